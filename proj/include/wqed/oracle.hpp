#pragma once

#include "wqed/double_excitation.hpp"
#include "wqed/quadrature.hpp"

namespace wqed {

// Brute-force references built from frequency-domain quadrature. Apart from
// build_single_hamiltonian and dense solves, nothing here uses the
// eigen-decomposition or the residue expansions.

struct OracleOptions {
    double rel_tol = 1e-9;        // one-dimensional integrals
    double inner_rel_tol = 1e-7;  // inner integrals of nested transforms
    double outer_rel_tol = 1e-5;  // outer integral of nested transforms
    long max_evals = 4'000'000;
};

struct MatrixEstimate {
    CMatrix value;
    double error = 0.0;
};
struct VectorEstimate {
    CVector value;
    double error = 0.0;
};
struct ScalarEstimate {
    cplx value;
    double error = 0.0;
};

// Real-axis integral of G_mn(w) G_mn(2 eps - w) dw / 2pi. It continues the
// pair-pole formula only while every pole 2 eps - omega_nu stays above the
// axis, so eps must satisfy Im(2 eps) > max Im omega_nu. Accuracy degrades
// when 2 eps comes closer than ~0.01 to a pair sum omega_nu + omega_mu.
MatrixEstimate sigma_numeric(const ArrayConfig& cfg, cplx eps, const OracleOptions& opt = {});

// f_j(E) = int s_j^+(w) s_j^+(E - w) dw / 2pi for real E.
VectorEstimate f_numeric(const ArrayConfig& cfg, double energy, const OracleOptions& opt = {});

enum class QSource { ResonanceExpansion, NumericInverse };

// Frequency-integrated amplitude for a delta-pulse input at real output
// frequencies, split into 2 t t and the interaction part.
struct STildeEstimate {
    cplx coherent;
    cplx incoherent;
    CMatrix q;  // the Q(eps) used, eps = (w1 + w2) / 2
    double error = 0.0;
};
STildeEstimate s_tilde_numeric(const ArrayConfig& cfg, double w1, double w2,
                               QSource source = QSource::ResonanceExpansion, const OracleOptions& opt = {});

// Inverse transform of t(w) - 1.
ScalarEstimate coherent_numeric(const ArrayConfig& cfg, double t, const OracleOptions& opt = {});

// Inverse 2D transform of the interaction part of S~/2 (gamma_1d = 1).
ScalarEstimate psi_incoherent_numeric(const ArrayConfig& cfg, double t1, double t2,
                                      QSource source = QSource::ResonanceExpansion,
                                      const OracleOptions& opt = {});

// Inverse 2D transforms of the kernel integrands
//   (i eps - 1) / ((eps_r - eps)(w_nu - w1)(w_mu - w2))   and
//   1 / ((eps_r - eps)(eps_s - eps)(w_nu - w1)(w_mu - w2)),  eps = (w1 + w2) / 2.
ScalarEstimate kernel_L_numeric(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2,
                                const OracleOptions& opt = {});
ScalarEstimate kernel_M_numeric(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2,
                                const OracleOptions& opt = {});

}  // namespace wqed
