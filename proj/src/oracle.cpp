#include "wqed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace wqed {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Exponential integral E1(z) for Re z >= 0, z != 0.
cplx expint_e1(cplx z) {
    if (std::abs(z) < 2.0) {
        cplx sum = 0.0, term = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= -z / double(k);
            sum += term / double(k);
        }
        return -std::numbers::egamma - std::log(z) - sum;
    }
    // continued fraction e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))), modified Lentz
    const double tiny = 1e-300;
    cplx b = z + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int k = 1; k < 500; ++k) {
        double a = -double(k) * double(k);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            break;
    }
    return h * std::exp(-z);
}

// int_W^inf e^{-a x} (c1 / x + c2 / x^2) dx for Re a = 0, a != 0.
cplx power_tail(cplx a, double w, cplx c1, cplx c2) {
    cplx e1 = expint_e1(a * w);
    return c1 * e1 + c2 * (std::exp(-a * w) / w - a * e1);
}

// r/(x+i) + b/(x+i)^2, chosen to match the first two terms of a 1/x expansion.
struct Tail {
    cplx r, b;
    static Tail matching(cplx c1, cplx c2) { return {c1, c2 + I * c1}; }
    cplx operator()(cplx x) const {
        cplx y = x + I;
        return r / y + b / (y * y);
    }
    // int dx/2pi e^{-ixt} (...), t != 0
    cplx transform(double t) const { return t <= 0.0 ? cplx(0.0) : (-I * r - t * b) * std::exp(-t); }
};

// int dw/2pi e^{-i w tau} A(w) B(E - w): A has its double pole at -i, B at E + i.
cplx product_transform(const Tail& a, const Tail& b, double e, double tau) {
    cplx d = e + 2.0 * I;
    if (tau >= 0.0) {
        cplx x = std::exp(-tau);
        cplx bv = b.r / d + b.b / (d * d);
        cplx bd = b.r / (d * d) + 2.0 * b.b / (d * d * d);
        return -I * (a.r * x * bv + a.b * x * (-I * tau * bv + bd));
    }
    cplx x = std::exp(-I * (e + I) * tau);
    cplx av = a.r / d + a.b / (d * d);
    cplx ad = -a.r / (d * d) - 2.0 * a.b / (d * d * d);
    return I * (-b.r * x * av + b.b * x * (-I * tau * av + ad));
}

CVector single_poles(const ArrayConfig& cfg) {
    Eigen::ComplexEigenSolver<CMatrix> es(build_single_hamiltonian(cfg), false);
    return es.eigenvalues();
}

double spectral_reach(const CVector& poles) {
    double r = 0.0;
    for (Eigen::Index k = 0; k < poles.size(); ++k)
        r = std::max(r, std::abs(poles(k)));
    return r;
}

[[noreturn]] void not_converged(const char* what, const QuadResult& r) {
    throw QuadratureNotConverged(std::string(what) + ": quadrature did not converge (error estimate " +
                                     std::to_string(r.error) + " after " + std::to_string(r.evaluations) +
                                     " evaluations)",
                                 r.error);
}

CMatrix q_from(const ArrayConfig& cfg, cplx eps, QSource source, const OracleOptions& opt, double* err) {
    if (source == QSource::ResonanceExpansion) {
        *err = 0.0;
        if (cfg.n_atoms < 2)
            return q_matrix(DoubleExcitationSpectrum::empty(cfg), eps);
        return q_matrix(diagonalize_double(cfg), eps);
    }
    MatrixEstimate s = sigma_numeric(cfg, eps, opt);
    CMatrix q = s.value.inverse();
    double nq = q.cwiseAbs().rowwise().sum().maxCoeff();
    *err = nq * nq * s.error * cfg.n_atoms;
    return q;
}

}  // namespace

MatrixEstimate sigma_numeric(const ArrayConfig& cfg, cplx eps, const OracleOptions& opt) {
    cfg.validate();
    const int n = cfg.n_atoms;
    CVector w = single_poles(cfg);
    for (int a = 0; a < n; ++a) {
        if (2.0 * eps.imag() - w(a).imag() <= 0.0)
            throw InvalidConfig("sigma_numeric: the real-axis integral represents Sigma only for "
                                "Im(2 eps) > max Im omega_nu");
        for (int b = 0; b < n; ++b)
            if (std::abs(w(a) + w(b) - 2.0 * eps) < kPoleTolerance)
                throw SingularFrequency("sigma_numeric: 2 eps on the pair-sum spectrum");
    }
    Resolvent res(cfg);
    const int dim = n * (n + 1) / 2;
    Integrand f = [&](double x, CVector& out) {
        CMatrix g1 = res.matrix(x), g2 = res.matrix(2.0 * eps - x);
        out.resize(dim);
        int k = 0;
        for (int m = 0; m < n; ++m)
            for (int q = m; q < n; ++q)
                out(k++) = g1(m, q) * g2(m, q) / kTwoPi;
    };
    std::vector<cplx> poles;
    for (int a = 0; a < n; ++a) {
        poles.push_back(w(a));
        poles.push_back(2.0 * eps - w(a));
    }
    double width = std::max(50.0 * n * cfg.gamma_1d, 4.0 * spectral_reach(w) + 4.0 * std::abs(eps) + 10.0);
    QuadOptions qo{1e-14, opt.rel_tol, opt.max_evals};
    QuadResult r = integrate_real_line(f, dim, pole_breakpoints(poles, -width, width), width, qo);
    if (!r.converged && r.error > 1e-8)
        not_converged("sigma_numeric", r);
    MatrixEstimate out;
    out.value.resize(n, n);
    int k = 0;
    for (int m = 0; m < n; ++m)
        for (int q = m; q < n; ++q)
            out.value(m, q) = out.value(q, m) = r.value(k++);
    out.error = r.error;
    return out;
}

VectorEstimate f_numeric(const ArrayConfig& cfg, double energy, const OracleOptions& opt) {
    cfg.validate();
    const int n = cfg.n_atoms;
    CVector w = single_poles(cfg);
    Resolvent res(cfg);
    Integrand f = [&](double x, CVector& out) {
        auto s1 = res.couplings(x);
        auto s2 = res.couplings(energy - x);
        out = (s1.col(0).array() * s2.col(0).array()).matrix() / kTwoPi;
    };
    std::vector<cplx> poles;
    for (int a = 0; a < n; ++a) {
        poles.push_back(w(a));
        poles.push_back(energy - w(a));
    }
    double width = std::max(50.0 * n * cfg.gamma_1d, 4.0 * spectral_reach(w) + 2.0 * std::abs(energy) + 10.0);
    QuadOptions qo{1e-14, opt.rel_tol, opt.max_evals};
    QuadResult r = integrate_real_line(f, n, pole_breakpoints(poles, -width, width), width, qo);
    if (!r.converged && r.error > 1e-8)
        not_converged("f_numeric", r);
    return {r.value, r.error};
}

STildeEstimate s_tilde_numeric(const ArrayConfig& cfg, double w1, double w2, QSource source,
                               const OracleOptions& opt) {
    cfg.validate();
    Resolvent res(cfg);
    const double g = cfg.gamma_1d;
    auto c1 = res.couplings(w1), c2 = res.couplings(w2);
    CVector ep = plane_wave(cfg, Direction::Plus), em = plane_wave(cfg, Direction::Minus);
    auto t_of = [&](const Eigen::MatrixX2cd& c) { return 1.0 - I * g * cplx(em.transpose() * c.col(0)); };

    STildeEstimate out;
    out.coherent = 2.0 * t_of(c1) * t_of(c2);
    cplx eps = 0.5 * (w1 + w2);
    double qerr = 0.0;
    out.q = q_from(cfg, eps, source, opt, &qerr);
    VectorEstimate f = f_numeric(cfg, w1 + w2, opt);
    CVector out_pair = (c1.col(1).array() * c2.col(1).array()).matrix();
    out.incoherent = 2.0 * g * g * cplx(out_pair.transpose() * out.q * f.value);
    double nq = out.q.cwiseAbs().rowwise().sum().maxCoeff();
    out.error = 2.0 * g * g * out_pair.cwiseAbs().sum() * (nq * f.error + qerr * f.value.cwiseAbs().maxCoeff());
    return out;
}

ScalarEstimate coherent_numeric(const ArrayConfig& cfg, double t, const OracleOptions& opt) {
    cfg.validate();
    const int n = cfg.n_atoms;
    const double g = cfg.gamma_1d;
    Resolvent res(cfg);
    CVector ep = plane_wave(cfg, Direction::Plus), em = plane_wave(cfg, Direction::Minus);
    Tail tail = Tail::matching(-I * g * cplx(em.transpose() * ep),
                               -I * g * cplx(em.transpose() * res.hamiltonian() * ep));
    CVector w = single_poles(cfg);
    Integrand f = [&](double x, CVector& out) {
        auto c = res.couplings(x);
        cplx tm1 = -I * g * cplx(em.transpose() * c.col(0));
        out.resize(1);
        out(0) = std::exp(-I * x * t) * (tm1 - tail(x)) / kTwoPi;
    };
    std::vector<cplx> poles(w.data(), w.data() + n);
    poles.push_back(-I);
    double width = 400.0 + 20.0 * spectral_reach(w);
    QuadOptions qo{1e-13, opt.rel_tol, opt.max_evals};
    QuadResult r = integrate(f, 1, pole_breakpoints(poles, -width, width), qo);
    CVector edge(1);
    f(width, edge);
    double tail_err = 2.0 * std::abs(edge(0)) * width;
    if (!r.converged && r.error > 1e-7)
        not_converged("coherent_numeric", r);
    return {r.value(0) + tail.transform(t), r.error + tail_err};
}

ScalarEstimate psi_incoherent_numeric(const ArrayConfig& cfg, double t1, double t2, QSource source,
                                      const OracleOptions& opt) {
    cfg.validate_for_pulse();
    const int n = cfg.n_atoms;
    if (t1 < t2)
        std::swap(t1, t2);  // psi is symmetric; keep tau >= 0 and the slower outer phase
    const double tau = t1 - t2;

    Resolvent res(cfg);
    CVector w = single_poles(cfg);
    const double reach = spectral_reach(w);
    CVector ep = plane_wave(cfg, Direction::Plus), em = plane_wave(cfg, Direction::Minus);
    CVector hp = res.hamiltonian() * ep, hm = res.hamiltonian() * em;
    std::vector<Tail> tp(n), tm(n);
    CVector u_inf(n);
    for (int i = 0; i < n; ++i) {
        tp[i] = Tail::matching(ep(i), hp(i));
        tm[i] = Tail::matching(em(i), hm(i));
        u_inf(i) = ep(i) * ep(i);
    }
    DoubleExcitationSpectrum dp =
        n >= 2 && source == QSource::ResonanceExpansion ? diagonalize_double(cfg) : DoubleExcitationSpectrum::empty(cfg);

    QuadOptions inner{1e-14, opt.inner_rel_tol, opt.max_evals};

    // Y_i(t) = int dw/2pi e^{-iwt} s_i^-(w)
    auto single_transform = [&](double t, double* err) {
        Integrand f = [&](double x, CVector& out) {
            auto c = res.couplings(x);
            out.resize(n);
            cplx ph = std::exp(-I * x * t) / kTwoPi;
            for (int i = 0; i < n; ++i)
                out(i) = ph * (c(i, 1) - tm[i](x));
        };
        std::vector<cplx> poles(w.data(), w.data() + n);
        poles.push_back(-I);
        double width = 400.0 + 20.0 * reach;
        QuadResult r = integrate(f, n, pole_breakpoints(poles, -width, width), inner);
        CVector edge(n);
        f(width, edge);
        *err = r.error + edge.cwiseAbs().maxCoeff() * width;
        CVector y = r.value;
        for (int i = 0; i < n; ++i)
            y(i) += tm[i].transform(t);
        return y;
    };
    double ey1 = 0.0, ey2 = 0.0;
    CVector y1 = single_transform(t1, &ey1), y2 = single_transform(t2, &ey2);
    cplx direct = (u_inf.array() * y1.array() * y2.array()).sum();
    double direct_err = u_inf.cwiseAbs().sum() * (ey1 * y2.cwiseAbs().maxCoeff() + ey2 * y1.cwiseAbs().maxCoeff());

    // Inner transforms at fixed real E: g_i(E; tau) and f_j(E), with the
    // tail products removed analytically so the remainders fall off as 1/w^4.
    const double inner_width = 60.0 + 8.0 * reach;
    auto inner_integrals = [&](double e, CVector& g, CVector& f, double& eg, double& ef) {
        // components [0, n): g, [n, 2n): f; both share the two solves per node
        Integrand fgf = [&](double x, CVector& out) {
            auto c1 = res.couplings(x), c2 = res.couplings(e - x);
            out.resize(2 * n);
            cplx ph = std::exp(-I * x * tau) / kTwoPi;
            for (int i = 0; i < n; ++i) {
                out(i) = ph * (c1(i, 1) * c2(i, 1) - tm[i](x) * tm[i](e - x));
                out(n + i) = (c1(i, 0) * c2(i, 0) - tp[i](x) * tp[i](e - x)) / kTwoPi;
            }
        };
        std::vector<cplx> poles;
        for (int a = 0; a < n; ++a) {
            poles.push_back(w(a));
            poles.push_back(e - w(a));
        }
        poles.push_back(-I);
        poles.push_back(e + I);
        double lo = std::min(0.0, e) - inner_width, hi = std::max(0.0, e) + inner_width;
        QuadResult r = integrate(fgf, 2 * n, pole_breakpoints(poles, lo, hi), inner);
        CVector edge(2 * n), edge2(2 * n);
        fgf(lo, edge);
        fgf(hi, edge2);
        edge = edge.cwiseAbs() + edge2.cwiseAbs();
        eg = r.error + edge.head(n).real().maxCoeff() * inner_width;
        ef = r.error + edge.tail(n).real().maxCoeff() * inner_width;
        g = r.value.head(n);
        f = r.value.tail(n);
        for (int i = 0; i < n; ++i) {
            g(i) += product_transform(tm[i], tm[i], e, tau);
            f(i) += product_transform(tp[i], tp[i], e, 0.0);
        }
    };

    // component 0: integrand, component 1: propagated inner error
    Integrand outer = [&](double e, CVector& out) {
        CVector g, f;
        double eg = 0.0, ef = 0.0;
        inner_integrals(e, g, f, eg, ef);
        double qerr = 0.0;
        CMatrix q = source == QSource::ResonanceExpansion ? q_matrix(dp, 0.5 * e)
                                                          : q_from(cfg, 0.5 * e, source, opt, &qerr);
        CVector u = q * f - u_inf;
        double nq = q.cwiseAbs().rowwise().sum().maxCoeff();
        cplx ph = std::exp(-I * e * t2) / kTwoPi;
        out.resize(2);
        out(0) = ph * cplx(u.transpose() * g);
        out(1) = (u.cwiseAbs().sum() * eg + g.cwiseAbs().sum() * (nq * ef + qerr * f.cwiseAbs().maxCoeff())) / kTwoPi;
    };

    std::vector<cplx> poles;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            poles.push_back(w(a) + w(b));
    Eigen::ComplexEigenSolver<CMatrix> pe;
    if (n >= 2) {
        pe.compute(build_pair_hamiltonian(cfg), false);
        for (Eigen::Index k = 0; k < pe.eigenvalues().size(); ++k)
            poles.push_back(pe.eigenvalues()(k));
    }
    const double width = std::max(300.0, 40.0 * reach);
    QuadOptions oo{1e-12, opt.outer_rel_tol, opt.max_evals};
    // the error component must not drive refinement: integrate it alongside
    Integrand main = [&](double e, CVector& out) {
        CVector full;
        outer(e, full);
        out = full;
        out(1) *= 1e-30;
    };
    QuadResult r = integrate(main, 2, pole_breakpoints(poles, -width, width), oo);
    // Beyond +-W the integrand is e^{-iE t2} (c1 / E + c2 / E^2 + ...) on each
    // side; c1, c2 come from samples at W and 2W and the model is integrated
    // exactly. The one-term model's deviation bounds what is left.
    cplx tail = 0.0;
    double tail_err = 0.0;
    for (double side : {1.0, -1.0}) {
        CVector v1(2), v2(2);
        outer(side * width, v1);
        outer(side * 2.0 * width, v2);
        // h(x): the integrand at E = side * x without its phase
        cplx h1 = v1(0) * std::exp(I * side * width * t2), h2 = v2(0) * std::exp(I * side * 2.0 * width * t2);
        // h = d1 / x + d2 / x^2
        cplx d2 = 2.0 * width * width * (h1 - 2.0 * h2), d1 = width * h1 - d2 / width;
        cplx a = I * side * t2;
        if (std::abs(a) * width < 1e-8) {
            tail_err += (std::abs(v1(0)) + std::abs(v2(0))) * width;
            continue;
        }
        cplx two = power_tail(a, width, d1, d2), one = power_tail(a, width, width * h1, 0.0);
        tail += two;
        tail_err += std::abs(two - one) + std::abs(d2) / (width * width);
    }
    double err = r.error + r.value(1).real() * 1e30 + tail_err + direct_err;
    if (!r.converged && r.error > 1e-6)
        not_converged("psi_incoherent_numeric", r);
    return {direct + r.value(0) + tail, err};
}

namespace {

// int dE/2pi e^{-iE t2} weight(E) int dw/2pi e^{-iw tau} / ((w_nu - w)(w_mu - E + w)), tau >= 0
template <class Weight>
ScalarEstimate nested_pole_transform(cplx w_nu, cplx w_mu, double t2, double tau, Weight weight,
                                     const std::vector<cplx>& outer_poles, const OracleOptions& opt) {
    Tail ta = Tail::matching(-1.0, -w_nu), tb = Tail::matching(-1.0, -w_mu);
    const double reach = std::max({std::abs(w_nu), std::abs(w_mu), 1.0});
    const double inner_width = 60.0 + 8.0 * reach;
    QuadOptions inner{1e-15, opt.rel_tol, opt.max_evals};
    auto inner_value = [&](double e, double& err) {
        Integrand f = [&](double x, CVector& out) {
            out.resize(1);
            cplx exact = 1.0 / ((w_nu - x) * (w_mu - (e - x)));
            out(0) = std::exp(-I * x * tau) * (exact - ta(x) * tb(e - x)) / kTwoPi;
        };
        std::vector<cplx> poles{w_nu, e - w_mu, -I, e + I};
        double lo = std::min(0.0, e) - inner_width, hi = std::max(0.0, e) + inner_width;
        QuadResult r = integrate(f, 1, pole_breakpoints(poles, lo, hi), inner);
        CVector a(1), b(1);
        f(lo, a);
        f(hi, b);
        err = r.error + (std::abs(a(0)) + std::abs(b(0))) * inner_width;
        return r.value(0) + product_transform(ta, tb, e, tau);
    };
    Integrand outer = [&](double e, CVector& out) {
        double err = 0.0;
        cplx v = inner_value(e, err);
        cplx wt = weight(e);
        out.resize(2);
        out(0) = std::exp(-I * e * t2) * wt * v / kTwoPi;
        out(1) = 1e-30 * std::abs(wt) * err / kTwoPi;
    };
    std::vector<cplx> poles = outer_poles;
    poles.push_back(w_nu + w_mu);
    const double width = std::max(2000.0, 40.0 * reach);
    QuadOptions oo{1e-13, opt.outer_rel_tol, opt.max_evals};
    QuadResult r = integrate(outer, 2, pole_breakpoints(poles, -width, width), oo);
    CVector a(2), b(2);
    outer(-width, a);
    outer(width, b);
    double reach_t = t2 > 0.0 ? std::min(width, 1.0 / t2) : width;
    double tail_err = (std::abs(a(0)) + std::abs(b(0))) * reach_t * 2.0;
    if (!r.converged && r.error > 1e-6)
        not_converged("kernel transform", r);
    return {r.value(0), r.error + 1e30 * r.value(1).real() + tail_err};
}

// int dw/2pi e^{-iwt} / (w_nu - w)
ScalarEstimate simple_pole_transform(cplx w_nu, double t, const OracleOptions& opt) {
    Tail ta = Tail::matching(-1.0, -w_nu);
    Integrand f = [&](double x, CVector& out) {
        out.resize(1);
        out(0) = std::exp(-I * x * t) * (1.0 / (w_nu - x) - ta(x)) / kTwoPi;
    };
    double width = 2000.0 + 40.0 * std::abs(w_nu);
    QuadOptions qo{1e-15, opt.rel_tol, opt.max_evals};
    QuadResult r = integrate(f, 1, pole_breakpoints({w_nu, -I}, -width, width), qo);
    CVector a(1);
    f(width, a);
    return {r.value(0) + ta.transform(t), r.error + 2.0 * std::abs(a(0)) * width};
}

}  // namespace

ScalarEstimate kernel_L_numeric(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2, const OracleOptions& opt) {
    if (t1 < t2) {
        std::swap(t1, t2);
        std::swap(w_nu, w_mu);
    }
    // (i eps - 1)/(eps_r - eps) = (i eps_r - 1)/(eps_r - eps) - i
    ScalarEstimate k = nested_pole_transform(
        w_nu, w_mu, t2, t1 - t2, [&](double e) { return 1.0 / (eps_r - 0.5 * e); }, {2.0 * eps_r}, opt);
    ScalarEstimate f1 = simple_pole_transform(w_nu, t1, opt), f2 = simple_pole_transform(w_mu, t2, opt);
    cplx a = I * eps_r - 1.0;
    ScalarEstimate out;
    out.value = a * k.value - I * f1.value * f2.value;
    out.error = std::abs(a) * k.error + f1.error * std::abs(f2.value) + f2.error * std::abs(f1.value);
    return out;
}

ScalarEstimate kernel_M_numeric(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2,
                                const OracleOptions& opt) {
    if (t1 < t2) {
        std::swap(t1, t2);
        std::swap(w_nu, w_mu);
    }
    return nested_pole_transform(
        w_nu, w_mu, t2, t1 - t2, [&](double e) { return 1.0 / ((eps_r - 0.5 * e) * (eps_s - 0.5 * e)); },
        {2.0 * eps_r, 2.0 * eps_s}, opt);
}

}  // namespace wqed
