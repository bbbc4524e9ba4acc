#include "wqed/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <limits>
#include <tuple>

#include "wqed/kernels.hpp"

namespace wqed {

Spectra Spectra::compute(const ArrayConfig& cfg) {
    Spectra s;
    s.single = diagonalize_single(cfg);
    s.pairs = cfg.n_atoms >= 2 ? diagonalize_double(cfg) : DoubleExcitationSpectrum::empty(cfg);
    return s;
}

ModeMask ModeMask::full(int n_single, int n_pairs) {
    ModeMask m;
    m.single.resize(n_single);
    m.pairs.resize(n_pairs);
    std::iota(m.single.begin(), m.single.end(), 0);
    std::iota(m.pairs.begin(), m.pairs.end(), 0);
    return m;
}

ModeMask ModeMask::superradiant_only(int n_single, int n_pairs) {
    ModeMask m = full(n_single, n_pairs);
    if (n_single > 0)
        m.single = {0};
    return m;
}

void ModeMask::validate(int n_single, int n_pairs) const {
    auto check = [](const std::vector<int>& v, int n, const char* what) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (v[k] < 0 || v[k] >= n)
                throw InvalidConfig(std::string(what) + " mask index " + std::to_string(v[k]) +
                                    " out of range [0, " + std::to_string(n) + ")");
            for (std::size_t l = 0; l < k; ++l)
                if (v[l] == v[k])
                    throw InvalidConfig(std::string(what) + " mask index " + std::to_string(v[k]) +
                                        " repeated");
        }
    };
    check(single, n_single, "single");
    check(pairs, n_pairs, "double");
}

cplx coherent_smooth(const SingleExcitationSpectrum& sp, double t) {
    return coherent_smooth(sp, t, ModeMask::full(sp.size(), 0));
}

cplx coherent_smooth(const SingleExcitationSpectrum& sp, double t, const ModeMask& mask) {
    if (t < 0.0)
        return 0.0;
    cplx y = 0.0;
    for (int mu : mask.single)
        y += sp.transmission_residues(mu) * std::exp(-I * sp.eigenvalues(mu) * t);
    return -I * y;
}

cplx pair_coupling_U(const SingleExcitationSpectrum& sp, int i, int nu, int mu) {
    return I * sp.coupling_plus(i, nu) * sp.coupling_plus(i, mu);
}

cplx pair_coupling_V(const SingleExcitationSpectrum& sp, const DoubleExcitationSpectrum& dp, int i,
                     int nu, int mu, int kappa) {
    cplx g = 0.0;
    for (int j = 0; j < sp.size(); ++j)
        g += dp.emission(kappa, j) * sp.coupling_plus(j, nu) * sp.coupling_plus(j, mu);
    return -dp.emission(kappa, i) * g;
}

CVector f_integral(const SingleExcitationSpectrum& sp, cplx energy) {
    const int n = sp.size();
    CVector f = CVector::Zero(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            f += (I / (sp.eigenvalues(a) + sp.eigenvalues(b) - energy)) *
                 (sp.coupling_plus.col(a).array() * sp.coupling_plus.col(b).array()).matrix();
    return f;
}

CVector u_coefficient(const Spectra& s, cplx eps) {
    return q_matrix(s.pairs, eps) * f_integral(s.single, 2.0 * eps);
}

CVector u_coefficient_from_couplings(const Spectra& s, cplx eps) {
    const int n = s.single.size();
    CVector u = CVector::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                cplx er = 0.5 * (s.single.eigenvalues(a) + s.single.eigenvalues(b));
                u(i) += (I * eps - 1.0) * pair_coupling_U(s.single, i, a, b) / (er - eps);
                for (int k = 0; k < s.pairs.size(); ++k)
                    u(i) += pair_coupling_V(s.single, s.pairs, i, a, b, k) /
                            ((er - eps) * (s.pairs.eigenvalues(k) - eps));
            }
        }
    }
    return u;
}

namespace {

// Products over the masked modes shared by both evaluators.
struct CouplingTables {
    std::vector<int> modes;  // masked single modes
    std::vector<int> kappas;
    // w[(o * R + r)] = sum_i s_i^{-nu} s_i^{-mu} U_i^r, o = (nu, mu), r = (nu', mu')
    std::vector<cplx> w;
    // x[(o * R + r) * K + k] = sum_i s_i^{-nu} s_i^{-mu} V_i^{rk}
    std::vector<cplx> x;
    int count() const { return static_cast<int>(modes.size()); }
};

CouplingTables coupling_tables(const Spectra& s, const ModeMask& mask) {
    CouplingTables t;
    t.modes = mask.single;
    t.kappas = mask.pairs;
    const int n = s.single.size();
    const int m = t.count();
    const int r_count = m * m;
    const int k_count = static_cast<int>(t.kappas.size());
    t.w.assign(std::size_t(r_count) * r_count, 0.0);
    t.x.assign(std::size_t(r_count) * r_count * k_count, 0.0);

    const CMatrix& sm = s.single.coupling_minus;
    const CMatrix& sp = s.single.coupling_plus;
    for (int o1 = 0; o1 < m; ++o1) {
        for (int o2 = 0; o2 < m; ++o2) {
            CVector out = (sm.col(t.modes[o1]).array() * sm.col(t.modes[o2]).array()).matrix();
            int o = o1 * m + o2;
            for (int r1 = 0; r1 < m; ++r1) {
                for (int r2 = 0; r2 < m; ++r2) {
                    CVector in = (sp.col(t.modes[r1]).array() * sp.col(t.modes[r2]).array()).matrix();
                    int r = r1 * m + r2;
                    t.w[std::size_t(o) * r_count + r] = I * cplx(out.transpose() * in);
                    for (int kk = 0; kk < k_count; ++kk) {
                        CVector d = s.pairs.emission.row(t.kappas[kk]).transpose();
                        cplx dout = out.transpose() * d;
                        cplx din = d.transpose() * in;
                        t.x[(std::size_t(o) * r_count + r) * k_count + kk] = -dout * din;
                    }
                }
            }
        }
    }
    (void)n;
    return t;
}

}  // namespace

cplx incoherent_wavefunction(const Spectra& s, double t1, double t2, const ModeMask& mask) {
    mask.validate(s.single.size(), s.pairs.size());
    if (t1 < 0.0 || t2 < 0.0 || mask.empty())
        return 0.0;
    CouplingTables tab = coupling_tables(s, mask);
    const int m = tab.count();
    const int rc = m * m;
    const int kc = static_cast<int>(tab.kappas.size());
    const CVector& w = s.single.eigenvalues;
    cplx psi = 0.0;
    for (int o1 = 0; o1 < m; ++o1) {
        for (int o2 = 0; o2 < m; ++o2) {
            cplx wn = w(tab.modes[o1]), wm = w(tab.modes[o2]);
            int o = o1 * m + o2;
            for (int r1 = 0; r1 < m; ++r1) {
                for (int r2 = 0; r2 < m; ++r2) {
                    int r = r1 * m + r2;
                    cplx er = 0.5 * (w(tab.modes[r1]) + w(tab.modes[r2]));
                    psi += tab.w[std::size_t(o) * rc + r] * kernel_L(wn, wm, er, t1, t2);
                    for (int kk = 0; kk < kc; ++kk) {
                        cplx es = s.pairs.eigenvalues(tab.kappas[kk]);
                        psi += tab.x[(std::size_t(o) * rc + r) * kc + kk] * kernel_M(wn, wm, er, es, t1, t2);
                    }
                }
            }
        }
    }
    return psi;
}

// ---------------------------------------------------------------------------
// Exponential-sum form

namespace {

// Below this separation two poles are merged and the confluent limit is used.
constexpr double kMergeTolerance = 1e-10;

class ExpansionBuilder {
  public:
    int alpha_id(cplx a) { return id(alpha_, a); }
    int beta_id(cplx b) { return id(beta_, b); }
    void add(int a, int b, int p, cplx c) { acc_[{a, b, p}] += c; }

    WedgeExpansion finish() {
        WedgeExpansion e;
        e.alpha = alpha_;
        e.beta = beta_;
        for (auto& [key, c] : acc_)
            if (c != cplx(0.0))
                e.terms.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
        return e;
    }

  private:
    static int id(std::vector<cplx>& list, cplx v) {
        for (std::size_t k = 0; k < list.size(); ++k)
            if (std::abs(list[k] - v) <= 1e-13 * (1.0 + std::abs(v)))
                return static_cast<int>(k);
        list.push_back(v);
        return static_cast<int>(list.size()) - 1;
    }
    std::vector<cplx> alpha_;
    std::vector<cplx> beta_;
    std::map<std::tuple<int, int, int>, cplx> acc_;
};

WedgeExpansion coherent_expansion(const Spectra& s, const ModeMask& mask) {
    ExpansionBuilder eb;
    const CVector& w = s.single.eigenvalues;
    const CVector& t = s.single.transmission_residues;
    for (int nu : mask.single) {
        int a = eb.alpha_id(w(nu));
        for (int mu : mask.single)
            eb.add(a, eb.beta_id(0.5 * (w(nu) + w(mu))), 0, -t(nu) * t(mu));
    }
    return eb.finish();
}

WedgeExpansion incoherent_expansion(const Spectra& s, const ModeMask& mask) {
    ExpansionBuilder eb;
    if (mask.empty())
        return eb.finish();
    CouplingTables tab = coupling_tables(s, mask);
    const int m = tab.count();
    const int rc = m * m;
    const int kc = static_cast<int>(tab.kappas.size());
    const CVector& w = s.single.eigenvalues;
    auto small = [](cplx z) { return std::abs(z) < kMergeTolerance; };

    for (int o1 = 0; o1 < m; ++o1) {
        for (int o2 = 0; o2 < m; ++o2) {
            cplx wn = w(tab.modes[o1]), wm = w(tab.modes[o2]);
            cplx mean = 0.5 * (wn + wm);
            int a = eb.alpha_id(wn);
            int b_mean = eb.beta_id(mean);
            int o = o1 * m + o2;
            for (int r1 = 0; r1 < m; ++r1) {
                for (int r2 = 0; r2 < m; ++r2) {
                    int r = r1 * m + r2;
                    cplx er = 0.5 * (w(tab.modes[r1]) + w(tab.modes[r2]));
                    cplx dr = er - mean;
                    cplx coef = tab.w[std::size_t(o) * rc + r];
                    if (small(dr)) {
                        eb.add(a, b_mean, 1, coef * (I * mean - 1.0) * (-2.0 * I));
                        eb.add(a, b_mean, 0, coef * I);
                    } else {
                        eb.add(a, eb.beta_id(er), 0, coef * (I * er - 1.0) / dr);
                        eb.add(a, b_mean, 0, -coef * (I * mean - 1.0) / dr);
                    }
                    for (int kk = 0; kk < kc; ++kk) {
                        cplx c4 = 4.0 * tab.x[(std::size_t(o) * rc + r) * kc + kk];
                        if (c4 == cplx(0.0))
                            continue;
                        cplx es = s.pairs.eigenvalues(tab.kappas[kk]);
                        cplx ds = es - mean;
                        cplx x = -2.0 * I * dr, y = -2.0 * I * ds;
                        bool zr = small(dr), zs = small(ds), zrs = small(er - es);
                        if ((zr && zs) || (zr && zrs) || (zs && zrs)) {
                            eb.add(a, b_mean, 2, 0.5 * c4);
                        } else if (zr) {
                            eb.add(a, eb.beta_id(es), 0, c4 / (y * y));
                            eb.add(a, b_mean, 0, -c4 / (y * y));
                            eb.add(a, b_mean, 1, -c4 / y);
                        } else if (zs) {
                            eb.add(a, eb.beta_id(er), 0, c4 / (x * x));
                            eb.add(a, b_mean, 0, -c4 / (x * x));
                            eb.add(a, b_mean, 1, -c4 / x);
                        } else if (zrs) {
                            int br = eb.beta_id(er);
                            eb.add(a, br, 1, c4 / x);
                            eb.add(a, br, 0, -c4 / (x * x));
                            eb.add(a, b_mean, 0, c4 / (x * x));
                        } else {
                            eb.add(a, b_mean, 0, c4 / (x * y));
                            eb.add(a, eb.beta_id(er), 0, c4 / (x * (x - y)));
                            eb.add(a, eb.beta_id(es), 0, c4 / (y * (y - x)));
                        }
                    }
                }
            }
        }
    }
    return eb.finish();
}

}  // namespace

cplx WedgeExpansion::operator()(double t1, double t2) const {
    if (t1 < 0.0 || t2 < 0.0 || terms.empty())
        return 0.0;
    if (t1 < t2)
        std::swap(t1, t2);
    const double tau = t1 - t2, sigma = t2;
    // small fixed-size scratch; expansions stay well below these sizes for N <= 12
    thread_local std::vector<cplx> ea, eb;
    ea.resize(alpha.size());
    eb.resize(beta.size());
    for (std::size_t k = 0; k < alpha.size(); ++k)
        ea[k] = std::exp(-I * alpha[k] * tau);
    for (std::size_t k = 0; k < beta.size(); ++k)
        eb[k] = std::exp(-2.0 * I * beta[k] * sigma);
    const double pw[3] = {1.0, sigma, sigma * sigma};
    cplx psi = 0.0;
    for (const Term& t : terms)
        psi += t.coeff * pw[t.power] * ea[t.a] * eb[t.b];
    return psi;
}

double WedgeExpansion::slowest_diagonal_rate(double rel_cut) const {
    std::vector<double> weight(beta.size(), 0.0);
    double top = 0.0;
    for (const Term& t : terms) {
        weight[t.b] = std::max(weight[t.b], std::abs(t.coeff));
        top = std::max(top, std::abs(t.coeff));
    }
    double rate = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < beta.size(); ++b)
        if (weight[b] > rel_cut * top && weight[b] > 0.0)
            rate = std::min(rate, -4.0 * beta[b].imag());
    return rate;
}

void WedgeExpansion::append(const WedgeExpansion& other) {
    ExpansionBuilder eb;
    for (const Term& t : terms)
        eb.add(eb.alpha_id(alpha[t.a]), eb.beta_id(beta[t.b]), t.power, t.coeff);
    for (const Term& t : other.terms)
        eb.add(eb.alpha_id(other.alpha[t.a]), eb.beta_id(other.beta[t.b]), t.power, t.coeff);
    *this = eb.finish();
}

PulseModel::PulseModel(const Spectra& spectra, ModeMask mask) : spectra_(spectra), mask_(std::move(mask)) {
    spectra_.single.config.validate_for_pulse();
    mask_.validate(spectra_.single.size(), spectra_.pairs.size());
    coherent_ = wqed::coherent_expansion(spectra_, mask_);
    incoherent_ = wqed::incoherent_expansion(spectra_, mask_);
}

PulseModel PulseModel::build(const ArrayConfig& cfg) {
    cfg.validate_for_pulse();
    Spectra s = Spectra::compute(cfg);
    return PulseModel(s, ModeMask::full(s.single.size(), s.pairs.size()));
}

WedgeExpansion PulseModel::smooth_expansion() const {
    WedgeExpansion e = coherent_;
    e.append(incoherent_);
    return e;
}

// ---------------------------------------------------------------------------
// Grids

std::vector<double> TimeGrid::points() const {
    if (steps < 1 || !(t_max > 0.0))
        throw InvalidConfig("time grid needs t_max > 0 and steps >= 1");
    std::vector<double> p(steps + 1);
    if (kind == Kind::Uniform) {
        for (int i = 0; i <= steps; ++i)
            p[i] = t_max * i / steps;
        return p;
    }
    if (!(t_min > 0.0 && t_min < t_max) || steps < 2)
        throw InvalidConfig("geometric grid needs 0 < t_min < t_max and steps >= 2");
    p[0] = 0.0;
    for (int k = 0; k < steps; ++k)
        p[k + 1] = t_min * std::pow(t_max / t_min, double(k) / (steps - 1));
    p[steps] = t_max;
    return p;
}

double TimeGrid::max_step() const {
    std::vector<double> p = points();
    double h = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k)
        h = std::max(h, p[k] - p[k - 1]);
    return h;
}

namespace {

template <class Eval>
TwoPhotonField fill_field(const ArrayConfig& cfg, const ModeMask& mask, const TimeGrid& grid, Eval eval,
                          bool parallel) {
    TwoPhotonField f;
    f.config = cfg;
    f.grid = grid;
    f.mask = mask;
    f.times = grid.points();
    const int n = static_cast<int>(f.times.size());
    f.coherent.resize(n, n);
    f.incoherent.resize(n, n);
    f.delta_cross_terms = !mask.single.empty();
    double h = grid.max_step();
    // slack for rounding in the sampled times
    if (h > 0.1 / (cfg.n_atoms * cfg.gamma_1d) * (1.0 + 1e-12))
        f.warnings.push_back("GridTooCoarse: max step " + std::to_string(h) + " exceeds 0.1/(N gamma) = " +
                             std::to_string(0.1 / (cfg.n_atoms * cfg.gamma_1d)) +
                             "; superradiant features are unresolved");
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            auto [c, u] = eval(f.times[i], f.times[j]);
            f.coherent(i, j) = f.coherent(j, i) = c;
            f.incoherent(i, j) = f.incoherent(j, i) = u;
        }
    }
    return f;
}

}  // namespace

TwoPhotonField wavefunction_grid(const PulseModel& model, const TimeGrid& grid) {
    return fill_field(
        model.spectra().single.config, model.mask(), grid,
        [&](double a, double b) { return std::pair{model.coherent(a, b), model.incoherent(a, b)}; }, true);
}

TwoPhotonField wavefunction_grid(const ArrayConfig& cfg, const TimeGrid& grid, const ModeMask* mask) {
    cfg.validate_for_pulse();
    Spectra s = Spectra::compute(cfg);
    ModeMask m = mask ? *mask : ModeMask::full(s.single.size(), s.pairs.size());
    return wavefunction_grid(PulseModel(s, m), grid);
}

TwoPhotonField wavefunction_grid_reference(const Spectra& s, const ModeMask& mask, const TimeGrid& grid) {
    s.single.config.validate_for_pulse();
    mask.validate(s.single.size(), s.pairs.size());
    return fill_field(
        s.single.config, mask, grid,
        [&](double a, double b) {
            cplx c = coherent_smooth(s.single, a, mask) * coherent_smooth(s.single, b, mask);
            return std::pair{c, incoherent_wavefunction(s, a, b, mask)};
        },
        false);
}

std::vector<TwoPhotonField::Sample> TwoPhotonField::diagonal() const {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < times.size(); ++i)
        out.push_back({times[i], times[i], times[i], coherent(i, i), incoherent(i, i)});
    return out;
}

std::vector<TwoPhotonField::Sample> TwoPhotonField::edge(double t2) const {
    auto it = std::min_element(times.begin(), times.end(),
                               [&](double a, double b) { return std::abs(a - t2) < std::abs(b - t2); });
    std::size_t j = static_cast<std::size_t>(it - times.begin());
    std::vector<Sample> out;
    for (std::size_t i = 0; i < times.size(); ++i)
        out.push_back({times[i], times[i], times[j], coherent(i, j), incoherent(i, j)});
    return out;
}

std::vector<TwoPhotonField::Sample> TwoPhotonField::antidiagonal(double sum) const {
    if (grid.kind != TimeGrid::Kind::Uniform)
        throw InvalidConfig("antidiagonal extraction needs a uniform grid");
    const int n = static_cast<int>(times.size());
    const double h = grid.t_max / grid.steps;
    const int k = static_cast<int>(std::lround(sum / h));
    std::vector<Sample> out;
    for (int i = std::max(0, k - (n - 1)); i <= std::min(k, n - 1); ++i) {
        int j = k - i;
        out.push_back({times[i] - times[j], times[i], times[j], coherent(i, j), incoherent(i, j)});
    }
    return out;
}

std::vector<TwoPhotonField::Sample> evaluate_cut(const PulseModel& model, CutKind kind, double value,
                                                 double extent, int steps) {
    if (steps < 1 || !(extent > 0.0))
        throw InvalidConfig("cut needs extent > 0 and steps >= 1");
    if (kind != CutKind::Diagonal && !(value >= 0.0))
        throw InvalidConfig("cut value must be >= 0");
    std::vector<TwoPhotonField::Sample> out(steps + 1);
    double lo = 0.0, hi = extent;
    if (kind == CutKind::Antidiagonal) {
        hi = std::min(extent, value);
        lo = -hi;
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= steps; ++k) {
        double x = lo + (hi - lo) * k / steps;
        double t1 = x, t2 = x;
        if (kind == CutKind::Edge)
            t2 = value;
        else if (kind == CutKind::Antidiagonal) {
            t1 = 0.5 * (value + x);
            t2 = 0.5 * (value - x);
        }
        out[k] = {x, t1, t2, model.coherent(t1, t2), model.incoherent(t1, t2)};
    }
    return out;
}

}  // namespace wqed
