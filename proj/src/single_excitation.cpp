#include "wqed/single_excitation.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "linalg.hpp"

namespace wqed {

CMatrix build_single_hamiltonian(const ArrayConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_atoms;
    CMatrix h(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            h(m, k) = -I * cfg.gamma_1d * std::exp(I * cfg.phase * double(std::abs(m - k)));
    h.diagonal().array() += cfg.omega_0;
    return h;
}

CVector plane_wave(const ArrayConfig& cfg, Direction dir) {
    double sign = dir == Direction::Plus ? 1.0 : -1.0;
    CVector e(cfg.n_atoms);
    for (int k = 0; k < cfg.n_atoms; ++k)
        e(k) = std::exp(I * (sign * cfg.phase * k));
    return e;
}

namespace {

void check_resonance(const CMatrix& h, cplx omega) {
    Eigen::ComplexEigenSolver<CMatrix> es(h, false);
    double d = (es.eigenvalues().array() - omega).abs().minCoeff();
    if (d < kPoleTolerance)
        throw SingularFrequency("frequency lies on a single-excitation resonance (distance " +
                                std::to_string(d) + ")");
}

CMatrix checked_green(const ArrayConfig& cfg, cplx omega) {
    CMatrix h = build_single_hamiltonian(cfg);
    check_resonance(h, omega);
    CMatrix a = omega * CMatrix::Identity(cfg.n_atoms, cfg.n_atoms) - h;
    return a.partialPivLu().inverse();
}

}  // namespace

CMatrix green_function(const ArrayConfig& cfg, cplx omega) { return checked_green(cfg, omega); }

SingleExcitationSpectrum diagonalize_single(const ArrayConfig& cfg) {
    SingleExcitationSpectrum sp;
    sp.config = cfg;
    CMatrix h = build_single_hamiltonian(cfg);
    detail::symmetric_eigen(h, sp.eigenvalues, sp.eigenvectors, "single-excitation");

    const int n = cfg.n_atoms;
    CVector ep = plane_wave(cfg, Direction::Plus);
    CVector em = plane_wave(cfg, Direction::Minus);
    sp.coupling_plus.resize(n, n);
    sp.coupling_minus.resize(n, n);
    sp.transmission_residues.resize(n);
    for (int nu = 0; nu < n; ++nu) {
        auto v = sp.eigenvectors.col(nu);
        cplx op = v.transpose() * ep;
        cplx om = v.transpose() * em;
        sp.coupling_plus.col(nu) = -v * op;
        sp.coupling_minus.col(nu) = -v * om;
        sp.transmission_residues(nu) = -I * cfg.gamma_1d * om * op;
    }
    return sp;
}

CVector coupling_amplitude(const ArrayConfig& cfg, Direction dir, cplx omega) {
    return checked_green(cfg, omega) * plane_wave(cfg, dir);
}

cplx transmission(const ArrayConfig& cfg, cplx omega) {
    CMatrix g = checked_green(cfg, omega);
    cplx s = plane_wave(cfg, Direction::Minus).transpose() * g * plane_wave(cfg, Direction::Plus);
    return 1.0 - I * cfg.gamma_1d * s;
}

cplx reflection(const ArrayConfig& cfg, cplx omega) {
    CMatrix g = checked_green(cfg, omega);
    CVector ep = plane_wave(cfg, Direction::Plus);
    cplx s = ep.transpose() * g * ep;
    return -I * cfg.gamma_1d * s;
}

CVector coupling_from_poles(const SingleExcitationSpectrum& sp, Direction dir, cplx omega) {
    const CMatrix& res = dir == Direction::Plus ? sp.coupling_plus : sp.coupling_minus;
    CVector s = CVector::Zero(sp.size());
    for (int nu = 0; nu < sp.size(); ++nu)
        s += res.col(nu) / (sp.eigenvalues(nu) - omega);
    return s;
}

cplx transmission_from_poles(const SingleExcitationSpectrum& sp, cplx omega) {
    cplx t = 1.0;
    for (int mu = 0; mu < sp.size(); ++mu)
        t += sp.transmission_residues(mu) / (omega - sp.eigenvalues(mu));
    return t;
}

Resolvent::Resolvent(const ArrayConfig& cfg) : h_(build_single_hamiltonian(cfg)) {
    Eigen::ComplexSchur<CMatrix> schur(h_);
    z_ = schur.matrixU();
    t_ = schur.matrixT();
    Eigen::MatrixX2cd rhs(cfg.n_atoms, 2);
    rhs.col(0) = plane_wave(cfg, Direction::Plus);
    rhs.col(1) = plane_wave(cfg, Direction::Minus);
    rhs_ = z_.adjoint() * rhs;
}

// (omega - H)^{-1} = Z (omega - T)^{-1} Z^H with T upper triangular.
CMatrix Resolvent::matrix(cplx omega) const {
    CMatrix a = -t_;
    a.diagonal().array() += omega;
    CMatrix x = a.triangularView<Eigen::Upper>().solve(z_.adjoint());
    return z_ * x;
}

Eigen::MatrixX2cd Resolvent::couplings(cplx omega) const {
    CMatrix a = -t_;
    a.diagonal().array() += omega;
    Eigen::MatrixX2cd x = a.triangularView<Eigen::Upper>().solve(rhs_);
    return z_ * x;
}

}  // namespace wqed
