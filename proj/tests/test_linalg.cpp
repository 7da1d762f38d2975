#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "oracles.hpp"
#include "osos/matrix.hpp"
#include "osos/matrix_io.hpp"
#include "osos/rng.hpp"
#include "osos/svd.hpp"

using namespace osos;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

double ortho_error(const Matrix& q) {
    const Matrix g = matmul(transpose(q), q);
    return max_abs_diff(g, Matrix::identity(q.cols()));
}

Matrix reconstruct(const SvdResult& r) {
    Matrix us = r.u;
    for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t k = 0; k < us.cols(); ++k) us(i, k) *= r.s[k];
    return matmul(us, transpose(r.v));
}

}  // namespace

TEST_CASE("matmul identity and hand cases") {
    Rng rng(11);
    const Matrix x = random_matrix(3, 4, rng);
    CHECK(max_abs_diff(matmul(Matrix::identity(3), x), x) == 0.0);

    const Matrix a(2, 2, {1, 2, 3, 4});
    const Matrix b(2, 1, {0, 1});
    const Matrix c = matmul(a, b);
    CHECK(c(0, 0) == 2.0);
    CHECK(c(1, 0) == 4.0);
}

TEST_CASE("matmul matches naive triple-loop oracle exactly") {
    Rng rng(7);
    const Matrix a = random_matrix(7, 5, rng);
    const Matrix b = random_matrix(5, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), oracles::naive_matmul(a, b)) == 0.0);
}

TEST_CASE("matmul dimension mismatch throws") {
    CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), DimensionError);
}

TEST_CASE("transpose involution, add/sub exact on integers") {
    Rng rng(3);
    const Matrix x = random_matrix(5, 7, rng);
    CHECK(transpose(transpose(x)) == x);

    Matrix a(3, 3), b(3, 3);
    for (std::size_t i = 0; i < 9; ++i) {
        a.data()[i] = static_cast<double>(static_cast<int>(rng.next_u64() % 2001) - 1000);
        b.data()[i] = static_cast<double>(static_cast<int>(rng.next_u64() % 2001) - 1000);
    }
    CHECK(sub(add(a, b), b) == a);
    CHECK_THROWS_AS(add(Matrix(2, 2), Matrix(3, 3)), DimensionError);
}

TEST_CASE("frobenius norm of identity") {
    CHECK(frobenius_norm(Matrix::identity(2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("jacobi_svd identity and diagonal") {
    const SvdResult r = jacobi_svd(Matrix::identity(3));
    for (double s : r.s) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_abs_diff(r.u, Matrix::identity(3)) < 1e-14);
    CHECK(max_abs_diff(r.v, Matrix::identity(3)) < 1e-14);

    Matrix d(3, 3);
    d(0, 0) = 3;
    d(1, 1) = 2;
    d(2, 2) = 1;
    const SvdResult rd = jacobi_svd(d);
    CHECK(rd.s[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(rd.s[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rd.s[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("jacobi_svd singular values match eigen-oracle on A^T A") {
    Rng rng(42);
    const Matrix a = random_matrix(6, 4, rng);
    const SvdResult r = jacobi_svd(a);
    const auto eig = oracles::sym_eigenvalues(oracles::naive_matmul(transpose(a), a));
    REQUIRE(eig.size() == r.s.size());
    for (std::size_t i = 0; i < eig.size(); ++i)
        CHECK(r.s[i] == doctest::Approx(std::sqrt(std::max(eig[i], 0.0))).epsilon(1e-8));
}

TEST_CASE("jacobi_svd invariants on random shapes including wide") {
    Rng rng(100);
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{20, 12},
                        {12, 20},
                        {30, 30},
                        {1, 5},
                        {5, 1}}) {
        const Matrix a = random_matrix(m, n, rng);
        const SvdResult r = jacobi_svd(a);
        CHECK(r.s.size() == std::min(m, n));
        for (std::size_t i = 0; i + 1 < r.s.size(); ++i) CHECK(r.s[i] >= r.s[i + 1]);
        CHECK(ortho_error(r.u) < 1e-9);
        CHECK(ortho_error(r.v) < 1e-9);
        const double rel =
            frobenius_norm(sub(a, reconstruct(r))) / std::max(frobenius_norm(a), 1.0);
        CHECK(rel < 1e-9);
    }
}

TEST_CASE("jacobi_svd reconstruction at 200x200 within 1e-9 at sweep cap 15") {
    Rng rng(5);
    const Matrix a = random_matrix(200, 200, rng);
    const SvdResult r = jacobi_svd(a);
    CHECK(r.sweeps_used <= 15);
    const double rel = frobenius_norm(sub(a, reconstruct(r))) / std::max(frobenius_norm(a), 1.0);
    CHECK(rel < 1e-9);
}

TEST_CASE("jacobi_svd rejects non-finite input") {
    Matrix a(2, 2);
    a(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(jacobi_svd(a), NumericError);
}

TEST_CASE("pinv identity and zero matrix") {
    const PinvResult r = pinv(Matrix::identity(4));
    CHECK(max_abs_diff(r.value, Matrix::identity(4)) < 1e-12);
    CHECK(r.rank == 4);
    CHECK_FALSE(r.rank_deficient);

    const PinvResult z = pinv(Matrix(3, 2));
    CHECK(z.value.rows() == 2);
    CHECK(z.value.cols() == 3);
    CHECK(max_abs(z.value) == 0.0);
    CHECK(z.rank == 0);
    CHECK(z.rank_deficient);
}

TEST_CASE("pinv satisfies Moore-Penrose axioms and matches normal-equation oracle") {
    const Matrix a(3, 2, {1, 2, 3, 4, 5, 6});
    const Matrix x = pinv(a).value;

    CHECK(max_abs_diff(matmul(matmul(a, x), a), a) < 1e-9);
    CHECK(max_abs_diff(matmul(matmul(x, a), x), x) < 1e-9);
    const Matrix ax = matmul(a, x);
    CHECK(max_abs_diff(ax, transpose(ax)) < 1e-9);
    const Matrix xa = matmul(x, a);
    CHECK(max_abs_diff(xa, transpose(xa)) < 1e-9);

    // full column rank: pinv = (A^T A)^{-1} A^T
    const Matrix oracle = oracles::gauss_solve(
        oracles::naive_matmul(transpose(a), a), transpose(a));
    CHECK(max_abs_diff(x, oracle) < 1e-8);
}

TEST_CASE("pinv sweep saturation: 15 vs 20 sweeps agree on 150x150") {
    Rng rng(77);
    const Matrix a = random_matrix(150, 150, rng);
    PinvConfig c15, c20;
    c15.max_sweeps = 15;
    c20.max_sweeps = 20;
    const Matrix p15 = pinv(a, c15).value;
    const Matrix p20 = pinv(a, c20).value;
    CHECK(rel_frobenius_diff(p15, p20) < 1e-9);
}

TEST_CASE("matrix file round trip is byte-exact") {
    Rng rng(9);
    const Matrix m = random_matrix(17, 5, rng, -1e6, 1e6);
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "osos_test_matrix.mat";
    write_matrix(path, m);
    CHECK(read_matrix(path) == m);

    // rewriting produces identical bytes
    std::error_code ec;
    const auto size1 = std::filesystem::file_size(path, ec);
    write_matrix(path, m);
    CHECK(std::filesystem::file_size(path, ec) == size1);
    const auto csv = dir / "osos_test_matrix.csv";
    write_matrix_csv(csv, m);
    CHECK(read_matrix_csv(csv) == m);
    std::filesystem::remove(path);
    std::filesystem::remove(csv);
}

TEST_CASE("matrix io rejects corrupt headers") {
    const auto path = std::filesystem::temp_directory_path() / "osos_bad_magic.mat";
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOPE good luck";
    }
    CHECK_THROWS_AS(read_matrix(path), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("rng determinism and split independence") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng parent(9);
    parent.next_u64();  // split must not depend on draw position
    Rng s0 = parent.split(0);
    Rng s0_again = Rng(9).split(0);
    CHECK(s0.next_u64() == s0_again.next_u64());
    CHECK(Rng(9).split(0).next_u64() != Rng(9).split(1).next_u64());
}

TEST_CASE("poisson sampler has the right first moments") {
    Rng rng(2024);
    for (double lambda : {0.5, 4.0, 25.0, 400.0}) {
        double sum = 0.0, sum2 = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(lambda));
            sum += k;
            sum2 += k * k;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        CHECK(mean == doctest::Approx(lambda).epsilon(0.05));
        CHECK(var == doctest::Approx(lambda).epsilon(0.10));
    }
}
