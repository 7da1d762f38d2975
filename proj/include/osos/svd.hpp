#ifndef OSOS_SVD_HPP
#define OSOS_SVD_HPP

#include <cstddef>
#include <vector>

#include "osos/matrix.hpp"

namespace osos {

// Convergence policy for the one-sided Jacobi SVD and the pseudo-inverse
// built on it. The rank threshold is fixed to tol = max(rows, cols) *
// ulp(sigma_max), the gap between sigma_max and the next representable
// double.
struct PinvConfig {
    int max_sweeps = 15;
    double off_diag_tol = 1e-12;  // relative to the column norms of the pair
};

struct SvdResult {
    Matrix u;               // m x r, orthonormal columns (zero columns iff sigma == 0)
    std::vector<double> s;  // length r = min(m, n), non-increasing, >= 0
    Matrix v;               // n x r, orthonormal columns
    int sweeps_used = 0;
};

// One-sided Jacobi rotation SVD. Columns of the working copy of `a` are
// orthogonalized pairwise in cyclic row order until every off-diagonal
// inner product is below cfg.off_diag_tol relative to the column norms,
// or cfg.max_sweeps full sweeps have run. Inputs with rows < cols are
// decomposed through their transpose with U and V swapped.
SvdResult jacobi_svd(const Matrix& a, const PinvConfig& cfg = {});

struct PinvResult {
    Matrix value;  // a.cols x a.rows
    std::size_t rank = 0;
    bool rank_deficient = false;  // true iff rank < min(rows, cols)
    double tolerance = 0.0;       // singular value threshold actually applied
};

// Moore-Penrose pseudo-inverse via jacobi_svd with rank truncation:
// keep singular values strictly above max(rows,cols)*ulp(sigma_max),
// return V diag(1/sigma) U^T over the retained triplets. A matrix with
// no singular value above the threshold yields the zero matrix with
// rank_deficient set.
PinvResult pinv(const Matrix& a, const PinvConfig& cfg = {});


}  // namespace osos

#endif
