#include "osos/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace osos {

namespace {

// Rotation that zeroes the off-diagonal entry of the 2x2 Gram matrix
// [[dii, dij], [dij, djj]]. Stable small-root tangent formula.
void jacobi_rotation(double dii, double djj, double dij, double& c, double& s) {
    const double zeta = (djj - dii) / (2.0 * dij);
    const double t = (zeta >= 0.0 ? 1.0 / (zeta + std::sqrt(1.0 + zeta * zeta))
                                  : -1.0 / (-zeta + std::sqrt(1.0 + zeta * zeta)));
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = c * t;
}

inline void rotate_rows(std::span<double> a, std::span<double> b, double c, double s) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double x = a[k];
        const double y = b[k];
        a[k] = c * x - s * y;
        b[k] = s * x + c * y;
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
    return sum;
}

}  // namespace

SvdResult jacobi_svd(const Matrix& a, const PinvConfig& cfg) {
    if (cfg.max_sweeps < 1) throw std::invalid_argument("jacobi_svd: max_sweeps must be >= 1");
    if (!a.all_finite()) throw NumericError("jacobi_svd: non-finite input");
    if (a.rows() < a.cols()) {
        SvdResult r = jacobi_svd(transpose(a), cfg);
        std::swap(r.u, r.v);
        return r;
    }

    const std::size_t m = a.rows();
    const std::size_t n = a.cols();

    // Work on transposed copies so each column of A (and of V) is a
    // contiguous row here; rotations then stream through memory.
    Matrix ut = transpose(a);          // n x m, row i = column i of A
    Matrix vt = Matrix::identity(n);   // n x n, row i = column i of V

    int sweeps = 0;
    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                auto ci = ut.row(i);
                auto cj = ut.row(j);
                const double dij = dot(ci, cj);
                if (dij == 0.0) continue;
                const double dii = dot(ci, ci);
                const double djj = dot(cj, cj);
                const double denom = std::sqrt(dii * djj);
                if (denom == 0.0) continue;
                const double rel = std::fabs(dij) / denom;
                worst = std::max(worst, rel);
                if (rel <= cfg.off_diag_tol) continue;
                double c, s;
                jacobi_rotation(dii, djj, dij, c, s);
                rotate_rows(ci, cj, c, s);
                rotate_rows(vt.row(i), vt.row(j), c, s);
            }
        }
        sweeps = sweep;
        if (worst <= cfg.off_diag_tol) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(dot(ut.row(i), ut.row(i)));

    // Descending order; stable so equal singular values keep their
    // original column positions (identity stays the identity).
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    SvdResult out;
    out.sweeps_used = sweeps;
    out.s.resize(n);
    out.u = Matrix(m, n);
    out.v = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        const double sv = sigma[src];
        out.s[k] = sv;
        auto ucol = ut.row(src);
        auto vcol = vt.row(src);

        // Sign convention: largest-magnitude entry of each left singular
        // vector is non-negative, with the matching flip applied to V.
        double peak = 0.0;
        for (double x : ucol)
            if (std::fabs(x) > std::fabs(peak)) peak = x;
        const double flip = (peak < 0.0) ? -1.0 : 1.0;

        const double inv = (sv > 0.0) ? flip / sv : 0.0;
        for (std::size_t r = 0; r < m; ++r) out.u(r, k) = ucol[r] * inv;
        for (std::size_t r = 0; r < n; ++r) out.v(r, k) = vcol[r] * flip;
    }
    return out;
}

PinvResult pinv(const Matrix& a, const PinvConfig& cfg) {
    const SvdResult svd = jacobi_svd(a, cfg);
    const std::size_t r_max = svd.s.size();

    PinvResult out;
    const double sigma_max = r_max > 0 ? svd.s[0] : 0.0;
    // MATLAB-style threshold: dimension times the spacing between
    // sigma_max and the next representable double.
    const double ulp = sigma_max > 0.0
                           ? std::nextafter(sigma_max, std::numeric_limits<double>::infinity()) - sigma_max
                           : 0.0;
    out.tolerance = static_cast<double>(std::max(a.rows(), a.cols())) * ulp;

    std::size_t rank = 0;
    while (rank < r_max && svd.s[rank] > out.tolerance) ++rank;
    out.rank = rank;
    out.rank_deficient = rank < std::min(a.rows(), a.cols());

    out.value = Matrix(a.cols(), a.rows());
    for (std::size_t k = 0; k < rank; ++k) {
        const double inv = 1.0 / svd.s[k];
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double vik = svd.v(i, k) * inv;
            if (vik == 0.0) continue;
            for (std::size_t j = 0; j < a.rows(); ++j) out.value(i, j) += vik * svd.u(j, k);
        }
    }
    return out;
}

}  // namespace osos
