#include "wqed/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace wqed {

namespace {

// sinh(h)/h
cplx sinhc(cplx h) {
    if (std::abs(h) < 1e-3) {
        cplx h2 = h * h;
        return 1.0 + h2 / 6.0 * (1.0 + h2 / 20.0 * (1.0 + h2 / 42.0));
    }
    return std::sinh(h) / h;
}

}  // namespace

cplx exp_dd1(cplx a, cplx b) {
    cplx h = 0.5 * (b - a);
    if (std::abs(h) < 0.25)
        return std::exp(0.5 * (a + b)) * sinhc(h);
    return (std::exp(b) - std::exp(a)) / (b - a);
}

cplx exp_dd2(cplx a, cplx b, cplx c) {
    double ab = std::abs(a - b), bc = std::abs(b - c), ac = std::abs(a - c);
    double spread = std::max({ab, bc, ac});
    if (spread < 0.5) {
        // e^m * sum_k h_k(a-m, b-m, c-m) / (k+2)!, h_k complete homogeneous
        cplx m = (a + b + c) / 3.0;
        cplx x = a - m, y = b - m, z = c - m;
        cplx h1 = 1.0, h2 = 1.0, h3 = 1.0;  // h_k of {x}, {x,y}, {x,y,z}
        cplx sum = 0.5;
        double fact = 2.0;
        // |x|, |y|, |z| < 0.34: 24 terms are far past double precision. No early
        // exit, since h_1 = x + y + z vanishes identically about the centroid.
        for (int k = 1; k < 24; ++k) {
            h1 *= x;
            h2 = h1 + y * h2;
            h3 = h2 + z * h3;
            fact *= double(k + 2);
            sum += h3 / fact;
        }
        return std::exp(m) * sum;
    }
    // divide by the widest separation
    if (ac >= ab && ac >= bc)
        return (exp_dd1(b, c) - exp_dd1(a, b)) / (c - a);
    if (ab >= bc)
        return (exp_dd1(c, b) - exp_dd1(a, c)) / (b - a);
    return (exp_dd1(a, c) - exp_dd1(b, a)) / (c - b);
}

cplx phi1(cplx z) { return exp_dd1(cplx(0.0), z); }

namespace detail {

cplx kernel_L_generic(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2) {
    if (t1 < 0.0 || t2 < 0.0)
        return 0.0;
    cplx mean = 0.5 * (w_nu + w_mu);
    cplx head = t1 >= t2 ? std::exp(-I * w_nu * (t1 - t2) - 2.0 * I * eps_r * t2)
                         : std::exp(-I * w_mu * (t2 - t1) - 2.0 * I * eps_r * t1);
    cplx e0 = std::exp(-I * w_nu * t1 - I * w_mu * t2);
    return ((I * eps_r - 1.0) * head - (I * mean - 1.0) * e0) / (eps_r - mean);
}

cplx kernel_L_confluent(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2) {
    if (t1 < 0.0 || t2 < 0.0)
        return 0.0;
    cplx mean = 0.5 * (w_nu + w_mu);
    double tm = std::min(t1, t2);
    cplx log_e0 = -I * w_nu * t1 - I * w_mu * t2;
    cplx z = -2.0 * I * (eps_r - mean) * tm;
    // E0 [ (i mean - 1)(-2i tm) phi1(z) + i e^z ], with E0 folded into the nodes
    return (I * mean - 1.0) * (-2.0 * I * tm) * exp_dd1(log_e0, log_e0 + z) +
           I * std::exp(log_e0 + z);
}

cplx kernel_M_generic(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2) {
    if (t1 < 0.0 || t2 < 0.0)
        return 0.0;
    if (t1 > t2)
        return kernel_M_generic(w_mu, w_nu, eps_r, eps_s, t2, t1);
    cplx mean = 0.5 * (w_nu + w_mu);
    cplx dr = eps_r - mean, ds = eps_s - mean;
    cplx shift = -I * w_mu * (t2 - t1);
    cplx e0 = std::exp(-I * w_nu * t1 - I * w_mu * t2);
    cplx num = dr * std::exp(shift - 2.0 * I * eps_s * t1) -
               ds * std::exp(shift - 2.0 * I * eps_r * t1) - (eps_r - eps_s) * e0;
    return num / (dr * ds * (eps_r - eps_s));
}

cplx kernel_M_confluent(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2) {
    if (t1 < 0.0 || t2 < 0.0)
        return 0.0;
    cplx mean = 0.5 * (w_nu + w_mu);
    double tm = std::min(t1, t2);
    cplx log_e0 = -I * w_nu * t1 - I * w_mu * t2;
    cplx zr = -2.0 * I * (eps_r - mean) * tm;
    cplx zs = -2.0 * I * (eps_s - mean) * tm;
    return 4.0 * tm * tm * exp_dd2(log_e0, log_e0 + zr, log_e0 + zs);
}

}  // namespace detail

cplx kernel_L(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2) {
    cplx mean = 0.5 * (w_nu + w_mu);
    if (std::abs(eps_r - mean) < kConfluenceTolerance)
        return detail::kernel_L_confluent(w_nu, w_mu, eps_r, t1, t2);
    return detail::kernel_L_generic(w_nu, w_mu, eps_r, t1, t2);
}

cplx kernel_M(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2) {
    cplx mean = 0.5 * (w_nu + w_mu);
    if (std::abs(eps_r - mean) < kConfluenceTolerance ||
        std::abs(eps_s - mean) < kConfluenceTolerance ||
        std::abs(eps_r - eps_s) < kConfluenceTolerance)
        return detail::kernel_M_confluent(w_nu, w_mu, eps_r, eps_s, t1, t2);
    return detail::kernel_M_generic(w_nu, w_mu, eps_r, eps_s, t1, t2);
}

}  // namespace wqed
