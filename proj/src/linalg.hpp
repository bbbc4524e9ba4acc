#pragma once

#include "wqed/types.hpp"

namespace wqed::detail {

// Full eigendecomposition of a complex symmetric matrix. Eigenvalues are
// sorted by imaginary part (most negative first), eigenvectors normalized
// under the bilinear form x^T x = 1; degenerate clusters are re-orthogonalized
// under the same form. Throws ExceptionalPoint if a bilinear norm collapses.
void symmetric_eigen(const CMatrix& m, CVector& values, CMatrix& vectors, const char* sector);

}  // namespace wqed::detail
