#pragma once

#include <utility>
#include <vector>

#include "wqed/single_excitation.hpp"

namespace wqed {

using PairBasis = std::vector<std::pair<int, int>>;

// Hard-core two-excitation sector. Amplitudes live on pairs m < n; the
// symmetric amplitude over ordered pairs is psi_mn = psi_nm, so the
// normalization sum over ordered pairs reads 2 * sum_{m<n} psi^2 = 1.
struct DoubleExcitationSpectrum {
    ArrayConfig config;
    PairBasis pair_basis;
    CVector eigenvalues;   // epsilon_kappa; the pair energy is 2 epsilon_kappa
    CMatrix eigenvectors;  // column kappa in the pair basis
    CMatrix emission;      // (kappa, m): d_m^kappa

    int size() const { return static_cast<int>(eigenvalues.size()); }
    // The N = 1 sector: no pairs, no modes.
    static DoubleExcitationSpectrum empty(const ArrayConfig& cfg);
};

PairBasis make_pair_basis(int n_atoms);
int pair_index(int m, int n, int n_atoms);

CMatrix build_pair_hamiltonian(const ArrayConfig& cfg);
DoubleExcitationSpectrum diagonalize_double(const ArrayConfig& cfg);

// Sigma_mn(eps) = i sum_{nu,mu} v_m v_n v_m v_n / (omega_nu + omega_mu - 2 eps)
CMatrix sigma_matrix(const SingleExcitationSpectrum& sp, cplx eps);

// Resonance expansion 2(i(eps - w0) - g) + sum_k 2i d^k d^k / (eps_k - eps).
CMatrix q_matrix(const DoubleExcitationSpectrum& dp, cplx eps);

// Same matrix from the pair-sector resolvent; defined also where the pair
// Hamiltonian is not diagonalizable.
CMatrix q_matrix_resolvent(const ArrayConfig& cfg, cplx eps);

}  // namespace wqed
