#include "wqed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wqed/quadrature.hpp"

namespace wqed {

namespace {

constexpr int kMaxPower = 6;  // sigma^(p_k + p_l + 1) with p <= 2

// int_0^a x^p e^{-lambda x} dx, Re lambda > 0; a <= 0 means a = infinity.
cplx power_exp_integral(int p, cplx lambda, double a) {
    double fact = std::tgamma(p + 1.0);
    if (a <= 0.0)
        return fact / std::pow(lambda, p + 1);
    cplx z = lambda * a;
    if (std::abs(z) < p + 2.0) {
        // a^{p+1} sum_j (-z)^j / (j! (p + j + 1))
        cplx sum = 0.0, term = 1.0;
        for (int j = 0; j < 200; ++j) {
            cplx add = term / double(p + j + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum))
                break;
            term *= -z / double(j + 1);
        }
        return std::pow(a, p + 1) * sum;
    }
    // p!/lambda^{p+1} (1 - e^{-z} sum_{j<=p} z^j/j!)
    cplx partial = 0.0, term = 1.0;
    for (int j = 0; j <= p; ++j) {
        partial += term;
        term *= z / double(j + 1);
    }
    return fact / std::pow(lambda, p + 1) * (1.0 - std::exp(-z) * partial);
}

}  // namespace

FieldMoments field_moments(const WedgeExpansion& psi, double window) {
    const std::size_t na = psi.alpha.size(), nb = psi.beta.size();
    // tau integrals of e^{-i(alpha_a - conj alpha_a') tau} with tau^0, tau^1
    std::vector<cplx> t0(na * na), t1(na * na);
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t c = 0; c < na; ++c) {
            cplx lam = I * (psi.alpha[a] - std::conj(psi.alpha[c]));
            t0[a * na + c] = power_exp_integral(0, lam, window);
            t1[a * na + c] = power_exp_integral(1, lam, window);
        }
    std::vector<cplx> s(nb * nb * (kMaxPower + 1));
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t d = 0; d < nb; ++d) {
            cplx lam = 2.0 * I * (psi.beta[b] - std::conj(psi.beta[d]));
            for (int p = 0; p <= kMaxPower; ++p)
                s[(b * nb + d) * (kMaxPower + 1) + p] = power_exp_integral(p, lam, window);
        }
    long double norm = 0.0L, first = 0.0L;
    for (const auto& k : psi.terms) {
        for (const auto& l : psi.terms) {
            cplx cc = k.coeff * std::conj(l.coeff);
            int p = k.power + l.power;
            std::size_t ac = std::size_t(k.a) * na + l.a;
            const cplx* sp = &s[(std::size_t(k.b) * nb + l.b) * (kMaxPower + 1)];
            cplx nrm = cc * t0[ac] * sp[p];
            cplx fst = cc * (t1[ac] * sp[p] + 2.0 * t0[ac] * sp[p + 1]);
            norm += nrm.real();
            first += fst.real();
        }
    }
    // the wedge t1 >= t2 carries half the norm; <t1> over the quadrant is
    // <t1 + t2> over the wedge
    return {2.0 * double(norm), double(first)};
}

DurationResult pulse_duration(const PulseModel& model, const DurationOptions& opt) {
    const int n = model.spectra().single.config.n_atoms;
    WedgeExpansion psi = model.smooth_expansion();
    FieldMoments exact = field_moments(psi);
    if (!(exact.norm >= 1e-12))
        throw DegenerateField("degenerate field: T undefined for N=" + std::to_string(n));
    DurationResult r;
    r.T = exact.first / exact.norm;
    r.inverse_T = 1.0 / r.T;
    double window = opt.t_start;
    for (int k = 0; k <= opt.max_doublings; ++k, window *= 2.0) {
        FieldMoments m = field_moments(psi, window);
        double rel = m.norm > 0.0 ? std::abs(m.first / m.norm - r.T) / r.T : 1.0;
        r.t_max = window;
        r.tail_estimate = rel;
        if (rel < opt.tolerance) {
            r.converged = true;
            break;
        }
    }
    return r;
}

DurationResult pulse_duration(const ArrayConfig& cfg, const DurationOptions& opt) {
    return pulse_duration(PulseModel::build(cfg), opt);
}

DurationResult pulse_duration_quadrature(const PulseModel& model, const DurationOptions& opt, double t_limit) {
    const int n = model.spectra().single.config.n_atoms;
    WedgeExpansion psi = model.smooth_expansion();
    // oscillation scale of |psi|^2
    double omega = 1e-9;
    for (cplx a : psi.alpha)
        for (cplx c : psi.alpha)
            omega = std::max(omega, std::abs(a.real() - c.real()));
    for (cplx b : psi.beta)
        for (cplx d : psi.beta)
            omega = std::max(omega, 2.0 * std::abs(b.real() - d.real()));
    const double h0 = 0.05 / n;
    const double hmax = std::min(2.0, 3.0 / omega);
    const GaussLegendre gl(10);

    // graded panels on [0, len]: fine near 0, at most hmax wide
    auto nodes = [&](double len, std::vector<double>& x, std::vector<double>& wt) {
        x.clear();
        wt.clear();
        double a = 0.0, h = h0;
        while (a < len) {
            double b = std::min(len, a + h);
            for (std::size_t k = 0; k < gl.x.size(); ++k) {
                x.push_back(a + 0.5 * (b - a) * (gl.x[k] + 1.0));
                wt.push_back(0.5 * (b - a) * gl.w[k]);
            }
            a = b;
            h = std::min(hmax, h * 1.5);
        }
    };

    auto moments = [&](double tm) {
        // wedge tau >= 0, sigma >= 0, tau + sigma <= tm, i.e. t2 <= t1 <= tm
        std::vector<double> xs, ws;
        nodes(tm, xs, ws);
        const int ns = static_cast<int>(xs.size());
        std::vector<double> pn(ns), pf(ns);
#pragma omp parallel for schedule(dynamic, 8)
        for (int i = 0; i < ns; ++i) {
            std::vector<double> xt, wt;
            nodes(tm - xs[i], xt, wt);
            double sn = 0.0, sf = 0.0;
            for (std::size_t j = 0; j < xt.size(); ++j) {
                double v = std::norm(psi(xt[j] + xs[i], xs[i]));
                sn += wt[j] * v;
                sf += wt[j] * v * (xt[j] + 2.0 * xs[i]);
            }
            pn[i] = ws[i] * sn;
            pf[i] = ws[i] * sf;
        }
        FieldMoments m;
        for (int i = 0; i < ns; ++i) {
            m.norm += 2.0 * pn[i];
            m.first += pf[i];
        }
        return m;
    };

    DurationResult r;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (double tm = opt.t_start; tm <= t_limit; tm *= 2.0) {
        FieldMoments m = moments(tm);
        if (!(m.norm >= 1e-12))
            throw DegenerateField("degenerate field: T undefined for N=" + std::to_string(n));
        r.T = m.first / m.norm;
        r.t_max = tm;
        r.tail_estimate = std::isnan(prev) ? 1.0 : std::abs(r.T - prev) / r.T;
        if (r.tail_estimate < opt.tolerance) {
            r.converged = true;
            break;
        }
        prev = r.T;
    }
    r.inverse_T = 1.0 / r.T;
    return r;
}

int SweepResult::worst_status() const {
    int s = 0;
    for (const auto& r : rows)
        s = std::max(s, r.status);
    return s;
}

SweepResult duration_sweep(const std::vector<int>& n_list, const std::vector<double>& phi_grid,
                           const DurationOptions& opt) {
    SweepResult out;
    for (int n : n_list)
        for (double phi : phi_grid) {
            SweepRow row;
            row.n_atoms = n;
            row.phase = phi;
            out.rows.push_back(row);
        }
    const int count = static_cast<int>(out.rows.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < count; ++k) {
        SweepRow& row = out.rows[k];
        const double nan = std::numeric_limits<double>::quiet_NaN();
        try {
            ArrayConfig cfg{row.n_atoms, row.phase};
            row.result = pulse_duration(cfg, opt);
            if (!row.result.converged) {
                row.status = 2;
                row.error = "observation window search did not converge";
            }
        } catch (const QuadratureNotConverged& e) {
            row.status = 2;
            row.error = e.what();
            row.result = {nan, nan, nan, false, nan};
        } catch (const Error& e) {
            row.status = 1;
            row.error = e.what();
            row.result = {nan, nan, nan, false, nan};
        }
    }
    return out;
}

}  // namespace wqed
