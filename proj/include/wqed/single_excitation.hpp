#pragma once

#include "wqed/types.hpp"

namespace wqed {

enum class Direction { Plus, Minus };

// Eigenpairs sorted by decay rate, fastest (most superradiant) first.
struct SingleExcitationSpectrum {
    ArrayConfig config;
    CVector eigenvalues;
    CMatrix eigenvectors;      // column nu, normalized so that v^T v = 1
    CMatrix coupling_plus;     // (j, nu) residue of s_j^+ at omega_nu
    CMatrix coupling_minus;
    CVector transmission_residues;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

CMatrix build_single_hamiltonian(const ArrayConfig& cfg);

// exp(+-i phase n), n = 0..N-1.
CVector plane_wave(const ArrayConfig& cfg, Direction dir);

CMatrix green_function(const ArrayConfig& cfg, cplx omega);
SingleExcitationSpectrum diagonalize_single(const ArrayConfig& cfg);

CVector coupling_amplitude(const ArrayConfig& cfg, Direction dir, cplx omega);
cplx transmission(const ArrayConfig& cfg, cplx omega);
cplx reflection(const ArrayConfig& cfg, cplx omega);

// s_j(omega) = sum_nu s_j^nu / (omega_nu - omega)
CVector coupling_from_poles(const SingleExcitationSpectrum& sp, Direction dir, cplx omega);
// t(omega) = 1 + sum_mu t_mu / (omega - omega_mu)
cplx transmission_from_poles(const SingleExcitationSpectrum& sp, cplx omega);

// Repeated (omega - H)^{-1} solves without the resonance check.
class Resolvent {
  public:
    explicit Resolvent(const ArrayConfig& cfg);
    CMatrix matrix(cplx omega) const;
    // Returns (omega - H)^{-1} [e_plus, e_minus] as two columns.
    Eigen::MatrixX2cd couplings(cplx omega) const;
    const CMatrix& hamiltonian() const { return h_; }

  private:
    CMatrix h_;
    CMatrix z_;  // Schur vectors
    CMatrix t_;  // Schur form
    Eigen::MatrixX2cd rhs_;
};

}  // namespace wqed
