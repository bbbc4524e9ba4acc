#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wqed {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};

// Thresholds in units of gamma_1d.
inline constexpr double kPoleTolerance = 1e-8;
inline constexpr double kExceptionalTolerance = 1e-8;
inline constexpr double kMinPhase = 1e-3;
inline constexpr double kConfluenceTolerance = 1e-6;

struct ArrayConfig {
    int n_atoms = 1;
    double phase = 0.0;
    double gamma_1d = 1.0;
    double omega_0 = 0.0;

    // Throws InvalidConfig. The pulse pipeline additionally requires
    // canonical units and phase in [kMinPhase, pi - kMinPhase].
    void validate() const;
    void validate_for_pulse() const;
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Validation-type failures (CLI exit code 1).
class InvalidConfig : public Error {
  public:
    using Error::Error;
};
class SingularFrequency : public Error {
  public:
    using Error::Error;
};
class ExceptionalPoint : public Error {
  public:
    using Error::Error;
};
class EmptySector : public Error {
  public:
    using Error::Error;
};
class DegenerateField : public Error {
  public:
    using Error::Error;
};

// Numerical failure (CLI exit code 2).
class QuadratureNotConverged : public Error {
  public:
    QuadratureNotConverged(const std::string& what, double achieved)
        : Error(what), achieved_error(achieved) {}
    double achieved_error;
};

// Thread count used by the OpenMP kernels; 0 restores the runtime default.
void set_thread_count(int n);
int thread_count();

}  // namespace wqed
