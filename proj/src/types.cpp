#include "wqed/types.hpp"

#include <cmath>
#include <numbers>

#include <omp.h>

namespace wqed {

namespace {
int g_threads = 0;
}

void ArrayConfig::validate() const {
    if (n_atoms < 1)
        throw InvalidConfig("n_atoms must be >= 1, got " + std::to_string(n_atoms));
    if (!(gamma_1d > 0.0) || !std::isfinite(gamma_1d))
        throw InvalidConfig("gamma_1d must be positive");
    if (!std::isfinite(omega_0))
        throw InvalidConfig("omega_0 must be finite");
    if (!std::isfinite(phase))
        throw InvalidConfig("phase must be finite");
    if (phase == 0.0)
        return;
    if (phase < kMinPhase || phase > std::numbers::pi - kMinPhase)
        throw InvalidConfig("phase must be 0 or lie in [1e-3, pi - 1e-3], got " +
                            std::to_string(phase));
}

void ArrayConfig::validate_for_pulse() const {
    validate();
    if (phase == 0.0)
        throw InvalidConfig("phase = 0 is allowed for spectra only");
    if (gamma_1d != 1.0 || omega_0 != 0.0)
        throw InvalidConfig("pulse pipeline works in units gamma_1d = 1, omega_0 = 0");
}

void set_thread_count(int n) {
    g_threads = n > 0 ? n : 0;
    omp_set_num_threads(g_threads > 0 ? g_threads : omp_get_num_procs());
}

int thread_count() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

}  // namespace wqed
