#include "linalg.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace wqed::detail {

namespace {

// Eigenvalues closer than this (relative to the spectral scale) are
// treated as one degenerate cluster.
constexpr double kClusterTolerance = 1e-9;

double bilinear_ratio(const CVector& v) {
    double h = v.squaredNorm();
    return h > 0.0 ? std::abs(v.dot(v.conjugate())) / h : 0.0;
}

// Deterministic phase: first significant component gets positive real part.
void fix_sign(Eigen::Ref<CVector> v) {
    double cut = 1e-8 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > cut) {
            if (v(i).real() < 0.0 || (v(i).real() == 0.0 && v(i).imag() < 0.0))
                v = -v;
            return;
        }
    }
}

[[noreturn]] void fail(const char* sector, double ratio) {
    throw ExceptionalPoint(std::string(sector) +
                           " sector: bilinear norm collapsed (|v^T v|/|v|^2 = " +
                           std::to_string(ratio) + "), matrix is at or near an exceptional point");
}

}  // namespace

void symmetric_eigen(const CMatrix& m, CVector& values, CMatrix& vectors, const char* sector) {
    const Eigen::Index n = m.rows();
    Eigen::ComplexEigenSolver<CMatrix> es(m, true);
    if (es.info() != Eigen::Success)
        throw ExceptionalPoint(std::string(sector) + " sector: eigensolver failed");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    const CVector& ev = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (ev(a).imag() != ev(b).imag())
            return ev(a).imag() < ev(b).imag();
        return ev(a).real() < ev(b).real();
    });
    values.resize(n);
    vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        values(k) = ev(order[k]);
        vectors.col(k) = es.eigenvectors().col(order[k]);
    }

    double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    std::vector<int> cluster(n, -1);
    int nclusters = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        if (cluster[a] >= 0)
            continue;
        cluster[a] = nclusters;
        // grow transitively
        std::vector<Eigen::Index> stack{a};
        while (!stack.empty()) {
            Eigen::Index c = stack.back();
            stack.pop_back();
            for (Eigen::Index b = 0; b < n; ++b) {
                if (cluster[b] < 0 && std::abs(values(b) - values(c)) < kClusterTolerance * scale) {
                    cluster[b] = nclusters;
                    stack.push_back(b);
                }
            }
        }
        ++nclusters;
    }

    for (int c = 0; c < nclusters; ++c) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index k = 0; k < n; ++k)
            if (cluster[k] == c)
                members.push_back(k);

        // Pivoted Gram-Schmidt under x^T y: normalize the least isotropic
        // remaining vector, project it out of the others.
        std::vector<Eigen::Index> left = members;
        std::vector<CVector> done;
        while (!left.empty()) {
            std::size_t best = 0;
            double best_ratio = -1.0;
            for (std::size_t i = 0; i < left.size(); ++i) {
                double r = bilinear_ratio(vectors.col(left[i]));
                if (r > best_ratio) {
                    best_ratio = r;
                    best = i;
                }
            }
            if (best_ratio < kExceptionalTolerance)
                fail(sector, best_ratio);
            Eigen::Index k = left[best];
            CVector u = vectors.col(k);
            u /= std::sqrt(cplx(u.transpose() * u));
            for (std::size_t i = 0; i < left.size(); ++i) {
                if (i == best)
                    continue;
                CVector w = vectors.col(left[i]);
                w -= cplx(u.transpose() * w) * u;
                double h = w.norm();
                if (h > 0.0)
                    w /= h;
                vectors.col(left[i]) = w;
            }
            done.push_back(u);
            left.erase(left.begin() + static_cast<std::ptrdiff_t>(best));
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            vectors.col(members[i]) = done[i];
            fix_sign(vectors.col(members[i]));
        }
    }
}

}  // namespace wqed::detail
