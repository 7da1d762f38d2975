#ifndef OSOS_MATRIX_HPP
#define OSOS_MATRIX_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace osos {

// Thrown when operand shapes are incompatible.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a computation produces or receives NaN/Inf.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when the initial training batch has fewer rows than hidden nodes.
struct InsufficientInitBatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an index or count falls outside the valid range.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense real-valued matrix, row-major, double precision. Values are
// immutable once handed to another computation; all free functions below
// are pure, so Matrix objects may be shared across threads freely.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionError("Matrix: data length != rows*cols");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool all_finite() const noexcept;

    bool operator==(const Matrix& other) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

// max_ij |a_ij - b_ij|; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

// Relative Frobenius distance ||a-b||_F / max(||b||_F, 1e-300).
double rel_frobenius_diff(const Matrix& a, const Matrix& b);

// Copy of rows [begin, begin+count).
Matrix take_rows(const Matrix& a, std::size_t begin, std::size_t count);

}  // namespace osos

#endif
