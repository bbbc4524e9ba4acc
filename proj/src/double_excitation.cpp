#include "wqed/double_excitation.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "linalg.hpp"

namespace wqed {

PairBasis make_pair_basis(int n_atoms) {
    PairBasis b;
    for (int m = 0; m < n_atoms; ++m)
        for (int n = m + 1; n < n_atoms; ++n)
            b.emplace_back(m, n);
    return b;
}

int pair_index(int m, int n, int n_atoms) {
    if (m > n)
        std::swap(m, n);
    // rows before m hold (N-1) + (N-2) + ... + (N-m) pairs
    return m * (2 * n_atoms - m - 1) / 2 + (n - m - 1);
}

DoubleExcitationSpectrum DoubleExcitationSpectrum::empty(const ArrayConfig& cfg) {
    DoubleExcitationSpectrum d;
    d.config = cfg;
    d.eigenvectors.resize(0, 0);
    d.emission.resize(0, cfg.n_atoms);
    return d;
}

CMatrix build_pair_hamiltonian(const ArrayConfig& cfg) {
    const int n = cfg.n_atoms;
    if (n < 2)
        throw EmptySector("two-excitation sector is empty for N = 1");
    CMatrix h = build_single_hamiltonian(cfg);
    PairBasis basis = make_pair_basis(n);
    const int p = static_cast<int>(basis.size());
    CMatrix m = CMatrix::Zero(p, p);
    for (int k = 0; k < p; ++k) {
        auto [a, b] = basis[k];
        m(k, k) += h(a, a) + h(b, b);
        // hop either excitation to a free site; double occupancy is excluded
        for (int c = 0; c < n; ++c) {
            if (c == a || c == b)
                continue;
            m(k, pair_index(a, c, n)) += h(b, c);
            m(k, pair_index(c, b, n)) += h(a, c);
        }
    }
    return m;
}

namespace {

// B_{m,k} = H_{m,other(k)} when site m belongs to pair k.
CMatrix emission_operator(const CMatrix& h, const PairBasis& basis) {
    const int n = static_cast<int>(h.rows());
    CMatrix b = CMatrix::Zero(n, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        auto [m, q] = basis[k];
        b(m, k) = h(m, q);
        b(q, k) = h(q, m);
    }
    return b;
}

}  // namespace

DoubleExcitationSpectrum diagonalize_double(const ArrayConfig& cfg) {
    CMatrix m = build_pair_hamiltonian(cfg);
    DoubleExcitationSpectrum d;
    d.config = cfg;
    d.pair_basis = make_pair_basis(cfg.n_atoms);
    CVector lambda;
    CMatrix x;
    detail::symmetric_eigen(m, lambda, x, "two-excitation");
    d.eigenvalues = lambda / 2.0;
    d.eigenvectors = x / std::sqrt(2.0);
    CMatrix b = emission_operator(build_single_hamiltonian(cfg), d.pair_basis);
    d.emission = (b * d.eigenvectors).transpose();
    return d;
}

CMatrix sigma_matrix(const SingleExcitationSpectrum& sp, cplx eps) {
    const int n = sp.size();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (std::abs(sp.eigenvalues(a) + sp.eigenvalues(b) - 2.0 * eps) < kPoleTolerance)
                throw SingularFrequency("2 eps lies on a pair-sum resonance");
    CMatrix s = CMatrix::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            cplx w = I / (sp.eigenvalues(a) + sp.eigenvalues(b) - 2.0 * eps);
            auto va = sp.eigenvectors.col(a).array();
            auto vb = sp.eigenvectors.col(b).array();
            CVector ab = (va * vb).matrix();
            s.noalias() += w * ab * ab.transpose();
        }
    }
    return s;
}

CMatrix q_matrix(const DoubleExcitationSpectrum& dp, cplx eps) {
    const ArrayConfig& cfg = dp.config;
    const int n = cfg.n_atoms;
    CMatrix q = CMatrix::Identity(n, n) * (2.0 * (I * (eps - cfg.omega_0) - cfg.gamma_1d));
    for (int k = 0; k < dp.size(); ++k) {
        cplx den = dp.eigenvalues(k) - eps;
        if (std::abs(den) < kPoleTolerance)
            throw SingularFrequency("eps lies on a two-excitation resonance");
        CVector dk = dp.emission.row(k).transpose();
        q.noalias() += (2.0 * I / den) * dk * dk.transpose();
    }
    return q;
}

CMatrix q_matrix_resolvent(const ArrayConfig& cfg, cplx eps) {
    const int n = cfg.n_atoms;
    CMatrix q = CMatrix::Identity(n, n) * (2.0 * (I * (eps - cfg.omega_0) - cfg.gamma_1d));
    if (n < 2)
        return q;
    CMatrix m = build_pair_hamiltonian(cfg);
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    if ((es.eigenvalues().array() / 2.0 - eps).abs().minCoeff() < kPoleTolerance)
        throw SingularFrequency("eps lies on a two-excitation resonance");
    CMatrix a = m / 2.0 - eps * CMatrix::Identity(m.rows(), m.cols());
    CMatrix b = emission_operator(build_single_hamiltonian(cfg), make_pair_basis(n));
    q.noalias() += I * b * a.partialPivLu().solve(CMatrix(b.transpose()));
    return q;
}

}  // namespace wqed
