#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wqed/double_excitation.hpp"

using namespace wqed;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double inverse_residual(const ArrayConfig& cfg, const DoubleExcitationSpectrum& dp, cplx eps) {
    SingleExcitationSpectrum sp = diagonalize_single(cfg);
    CMatrix prod = q_matrix(dp, eps) * sigma_matrix(sp, eps);
    return max_abs(prod - CMatrix::Identity(cfg.n_atoms, cfg.n_atoms));
}

}  // namespace

TEST_CASE("pair basis ordering") {
    PairBasis b = make_pair_basis(4);
    REQUIRE(b.size() == 6);
    for (std::size_t k = 0; k < b.size(); ++k) {
        CHECK(b[k].first < b[k].second);
        CHECK(pair_index(b[k].first, b[k].second, 4) == int(k));
    }
    CHECK(b.front() == std::pair{0, 1});
    CHECK(b.back() == std::pair{2, 3});
}

TEST_CASE("pair hamiltonian") {
    CHECK_THROWS_AS(build_pair_hamiltonian({1, 0.3}), EmptySector);

    CMatrix m2 = build_pair_hamiltonian({2, 0.8});
    REQUIRE(m2.rows() == 1);
    CHECK(std::abs(m2(0, 0) - cplx(0, -2)) < 1e-15);

    CMatrix m3 = build_pair_hamiltonian({3, 0.0});
    CHECK(std::abs(m3.trace() - cplx(0, -6)) < 1e-14);

    CMatrix m5 = build_pair_hamiltonian({5, 1.1});
    CHECK(max_abs(m5 - m5.transpose()) < 1e-15);
}

TEST_CASE("two atoms: pair energy is -i for every phase") {
    for (double phi : {0.1, 0.5, std::numbers::pi / 2, 2.7}) {
        DoubleExcitationSpectrum dp = diagonalize_double({2, phi});
        REQUIRE(dp.size() == 1);
        CHECK(std::abs(dp.eigenvalues(0) - cplx(0, -1)) < 1e-14);
    }
}

TEST_CASE("normalization, decay and trace") {
    for (int n = 2; n <= 6; ++n)
        for (double phi : {0.1, 0.9, 2.2}) {
            DoubleExcitationSpectrum dp = diagonalize_double({n, phi});
            CHECK(dp.size() == n * (n - 1) / 2);
            CMatrix gram = 2.0 * dp.eigenvectors.transpose() * dp.eigenvectors;
            CHECK(max_abs(gram - CMatrix::Identity(dp.size(), dp.size())) < 1e-10);
            CHECK(std::abs(dp.eigenvalues.imag().sum() + n * (n - 1) / 2.0) < 1e-10);
            CHECK(dp.eigenvalues.imag().maxCoeff() < 0.0);
        }
    DoubleExcitationSpectrum dp = diagonalize_double({4, 0.1});
    CHECK(std::abs(dp.eigenvalues.imag().sum() + 6.0) < 1e-10);
}

TEST_CASE("N=4, phi=0.1 double spectrum classes") {
    DoubleExcitationSpectrum dp = diagonalize_double({4, 0.1});
    int super = 0, dark = 0, twilight = 0;
    for (int k = 0; k < dp.size(); ++k) {
        double rate = -2.0 * dp.eigenvalues(k).imag();
        super += rate > 3.0;
        dark += rate < 0.2;
        twilight += rate >= 0.3 && rate <= 3.0;
    }
    CHECK(super == 1);
    CHECK(dark == 2);
    CHECK(twilight == 3);
}

TEST_CASE("single atom: Sigma and Q") {
    ArrayConfig cfg{1, 0.4};
    SingleExcitationSpectrum sp = diagonalize_single(cfg);
    CHECK(std::abs(sigma_matrix(sp, 0.0)(0, 0) + 0.5) < 1e-15);
    DoubleExcitationSpectrum dp = DoubleExcitationSpectrum::empty(cfg);
    CHECK(dp.size() == 0);
    CHECK(std::abs(q_matrix(dp, 0.0)(0, 0) + 2.0) < 1e-15);
    CHECK(inverse_residual(cfg, dp, cplx(0.7, -0.3)) < 1e-14);
}

TEST_CASE("Q is the inverse of Sigma") {
    ArrayConfig two{2, 0.5};
    CHECK(inverse_residual(two, diagonalize_double(two), cplx(0.3, -0.2)) < 1e-8);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (ArrayConfig cfg : {ArrayConfig{4, 0.1}, ArrayConfig{3, 2.0}, ArrayConfig{5, 0.6}}) {
        DoubleExcitationSpectrum dp = diagonalize_double(cfg);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            cplx eps;
            do
                eps = 5.0 * cfg.n_atoms * cplx(u(rng), u(rng));
            while (std::abs(eps) >= 5.0 * cfg.n_atoms);
            worst = std::max(worst, inverse_residual(cfg, dp, eps));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("general units") {
    ArrayConfig cfg{3, 0.7, 0.6, 1.5};
    DoubleExcitationSpectrum dp = diagonalize_double(cfg);
    CHECK(std::abs(dp.eigenvalues.sum() - cplx(3 * 1.5, -3 * 0.6)) < 1e-12);
    CHECK(inverse_residual(cfg, dp, cplx(1.1, 0.4)) < 1e-10);
}

TEST_CASE("Sigma is symmetric") {
    SingleExcitationSpectrum sp = diagonalize_single({5, 1.3});
    CMatrix s = sigma_matrix(sp, cplx(0.4, -0.7));
    CHECK(max_abs(s - s.transpose()) < 1e-12);
    CHECK_THROWS_AS(sigma_matrix(sp, 0.5 * (sp.eigenvalues(0) + sp.eigenvalues(2))), SingularFrequency);
}

TEST_CASE("exceptional point at N=4, phi=pi/2") {
    ArrayConfig cfg{4, std::numbers::pi / 2};
    CHECK_THROWS_AS(diagonalize_double(cfg), ExceptionalPoint);
    SingleExcitationSpectrum sp = diagonalize_single(cfg);
    for (cplx eps : {cplx(0.3, 0.2), cplx(-1.5, -0.4), cplx(2.0, 1.0)}) {
        CMatrix prod = q_matrix_resolvent(cfg, eps) * sigma_matrix(sp, eps);
        CHECK(max_abs(prod - CMatrix::Identity(4, 4)) < 1e-8);
    }
}

TEST_CASE("resolvent and resonance forms of Q agree") {
    ArrayConfig cfg{5, 0.3};
    DoubleExcitationSpectrum dp = diagonalize_double(cfg);
    cplx eps(0.9, -0.25);
    CHECK(max_abs(q_matrix(dp, eps) - q_matrix_resolvent(cfg, eps)) < 1e-9 * max_abs(q_matrix(dp, eps)));
}
