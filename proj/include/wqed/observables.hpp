#pragma once

#include <string>
#include <vector>

#include "wqed/pulse.hpp"

namespace wqed {

struct DurationOptions {
    double tolerance = 1e-3;  // relative, for the observation-window search
    double t_start = 20.0;
    int max_doublings = 48;
};

// T = <t1> over |psi_smooth|^2 on the quadrant. t_max is the smallest window
// 20 * 2^k such that restricting both the earlier arrival time and the
// photon delay to [0, t_max] reproduces T within the tolerance; tail_estimate
// is the relative deviation left at that window.
struct DurationResult {
    double T = 0.0;
    double inverse_T = 0.0;
    double t_max = 0.0;
    bool converged = false;
    double tail_estimate = 0.0;
};

// Closed-form moments of the exponential-sum representation.
DurationResult pulse_duration(const ArrayConfig& cfg, const DurationOptions& opt = {});
DurationResult pulse_duration(const PulseModel& model, const DurationOptions& opt = {});

// Same observable by graded Gauss-Legendre quadrature on [0, t_max]^2 with
// t_max doubled until T settles. Practical only when every mode decays
// within a few hundred 1/gamma.
DurationResult pulse_duration_quadrature(const PulseModel& model, const DurationOptions& opt = {},
                                         double t_limit = 2560.0);

// Norm and first moment <t1> of |psi|^2 over the quadrant, optionally
// restricted to sigma = min(t1, t2) <= window and tau = |t1 - t2| <= window.
struct FieldMoments {
    double norm = 0.0;
    double first = 0.0;
};
FieldMoments field_moments(const WedgeExpansion& psi, double window = 0.0);

struct SweepRow {
    int n_atoms = 0;
    double phase = 0.0;
    DurationResult result;
    int status = 0;  // 0 ok, 1 invalid input, 2 convergence failure
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (N, phi) as given
    int worst_status() const;
};

// Rows are independent and evaluated in parallel; a failing row is recorded
// and never aborts the sweep.
SweepResult duration_sweep(const std::vector<int>& n_list, const std::vector<double>& phi_grid,
                           const DurationOptions& opt = {});

}  // namespace wqed
