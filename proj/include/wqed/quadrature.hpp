#pragma once

#include <functional>
#include <vector>

#include "wqed/types.hpp"

namespace wqed {

// out must be filled with dim components.
using Integrand = std::function<void(double x, CVector& out)>;

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    long max_evals = 2'000'000;
};

struct QuadResult {
    CVector value;
    double error = 0.0;  // sum of panel estimates, max norm over components
    long evaluations = 0;
    bool converged = false;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [b_0, b_last], starting from
// the panels delimited by the sorted breakpoints.
QuadResult integrate(const Integrand& f, int dim, std::vector<double> breakpoints, const QuadOptions& opt);

// Whole real line: breakpoints inside [-w, w], tails mapped by x = +-w/u.
// Only for integrands decaying at least like 1/x^2 without oscillation.
QuadResult integrate_real_line(const Integrand& f, int dim, std::vector<double> breakpoints, double w,
                               const QuadOptions& opt);

// Breakpoints clustering at the real projections of complex poles, graded
// by the distance of each pole to the axis.
std::vector<double> pole_breakpoints(const std::vector<cplx>& poles, double lo, double hi);

struct GaussLegendre {
    explicit GaussLegendre(int n);
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

}  // namespace wqed
