#include "wqed/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace wqed {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    CVector value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const Integrand& f, int dim, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    CVector k = CVector::Zero(dim), g = CVector::Zero(dim), y(dim);
    f(c, y);
    k += kWgk[7] * y;
    g += kWg[3] * y;
    for (int j = 0; j < 7; ++j) {
        CVector s(dim);
        f(c - h * kXgk[j], y);
        s = y;
        f(c + h * kXgk[j], y);
        s += y;
        k += kWgk[j] * s;
        if (j % 2 == 1)
            g += kWg[j / 2] * s;
    }
    Panel p{a, b, k * h, 0.0};
    p.error = ((k - g) * h).cwiseAbs().maxCoeff();
    return p;
}

}  // namespace

QuadResult integrate(const Integrand& f, int dim, std::vector<double> bp, const QuadOptions& opt) {
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    QuadResult r;
    r.value = CVector::Zero(dim);
    if (bp.size() < 2)
        return r;

    std::priority_queue<Panel> queue;
    CVector total = CVector::Zero(dim);
    double err = 0.0;
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        Panel p = gk15(f, dim, bp[k], bp[k + 1]);
        r.evaluations += 15;
        total += p.value;
        err += p.error;
        queue.push(std::move(p));
    }
    std::vector<Panel> frozen;  // panels too narrow to split further
    long iter = 0;
    while (!queue.empty()) {
        double scale = total.cwiseAbs().maxCoeff();
        if (err <= std::max(opt.abs_tol, opt.rel_tol * scale)) {
            r.converged = true;
            break;
        }
        if (r.evaluations >= opt.max_evals)
            break;
        Panel p = queue.top();
        queue.pop();
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b) || (p.b - p.a) < 1e-13 * std::max(1.0, std::abs(mid))) {
            frozen.push_back(std::move(p));
            continue;
        }
        Panel l = gk15(f, dim, p.a, mid), u = gk15(f, dim, mid, p.b);
        r.evaluations += 30;
        total += l.value + u.value - p.value;
        err += l.error + u.error - p.error;
        queue.push(std::move(l));
        queue.push(std::move(u));
        if (++iter % 512 == 0) {
            // refresh the running sums to keep rounding drift out
            std::vector<Panel> all;
            total.setZero();
            err = 0.0;
            while (!queue.empty()) {
                all.push_back(queue.top());
                queue.pop();
            }
            for (auto& q : all) {
                total += q.value;
                err += q.error;
            }
            for (auto& q : frozen) {
                total += q.value;
                err += q.error;
            }
            for (auto& q : all)
                queue.push(std::move(q));
        }
    }
    r.value.setZero();
    r.error = 0.0;
    while (!queue.empty()) {
        r.value += queue.top().value;
        r.error += queue.top().error;
        queue.pop();
    }
    for (auto& q : frozen) {
        r.value += q.value;
        r.error += q.error;
    }
    if (!r.converged)
        r.converged = r.error <= std::max(opt.abs_tol, opt.rel_tol * r.value.cwiseAbs().maxCoeff());
    return r;
}

QuadResult integrate_real_line(const Integrand& f, int dim, std::vector<double> bp, double w,
                               const QuadOptions& opt) {
    std::vector<double> inner{-w, w};
    for (double x : bp)
        if (x > -w && x < w)
            inner.push_back(x);
    // tails: x = +-w/u, dx = w/u^2 du, u in (0, 1)
    Integrand right = [&](double u, CVector& out) {
        f(w / u, out);
        out *= w / (u * u);
    };
    Integrand left = [&](double u, CVector& out) {
        f(-w / u, out);
        out *= w / (u * u);
    };
    QuadResult c = integrate(f, dim, inner, opt);
    QuadResult r = integrate(right, dim, {0.0, 0.5, 1.0}, opt);
    QuadResult l = integrate(left, dim, {0.0, 0.5, 1.0}, opt);
    QuadResult out;
    out.value = c.value + r.value + l.value;
    out.error = c.error + r.error + l.error;
    out.evaluations = c.evaluations + r.evaluations + l.evaluations;
    out.converged = c.converged && r.converged && l.converged;
    return out;
}

std::vector<double> pole_breakpoints(const std::vector<cplx>& poles, double lo, double hi) {
    // (position, local scale); points much closer than the local scale add nothing
    std::vector<std::pair<double, double>> bp{{lo, hi - lo}, {hi, hi - lo}};
    for (cplx p : poles) {
        double x = p.real();
        double d = std::max(std::abs(p.imag()), 1e-9);
        for (double k : {0.0, 1.0, -1.0, 8.0, -8.0, 64.0, -64.0}) {
            double y = x + k * d;
            if (y > lo && y < hi)
                bp.push_back({y, std::max(std::abs(k), 1.0) * d});
        }
    }
    std::sort(bp.begin(), bp.end());
    std::vector<double> out;
    double last_scale = 0.0;
    for (auto [y, scale] : bp) {
        if (!out.empty() && y - out.back() <= std::max(0.25 * std::min(scale, last_scale),
                                                       1e-12 * std::max(1.0, std::abs(y)))) {
            last_scale = std::min(last_scale, scale);
            continue;
        }
        out.push_back(y);
        last_scale = scale;
    }
    out.back() = hi;
    return out;
}

GaussLegendre::GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

}  // namespace wqed
