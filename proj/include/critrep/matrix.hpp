#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace critrep {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    const std::vector<double>& storage() const { return data_; }

    /// Rows `indices` gathered into a new matrix, in the given order.
    Matrix gather_rows(std::span<const std::size_t> indices) const;
    Matrix transposed() const;

    bool all_finite() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Products; all throw DimensionError on non-conformable operands and
// NumericError if the result contains NaN/Inf.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // aᵀ·b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a·bᵀ

// Entry-wise activations.
Matrix sigmoid(const Matrix& m);
Matrix relu(const Matrix& m);
/// Row-wise softmax, computed after subtracting each row's maximum.
Matrix softmax_rows(const Matrix& m);

double sigmoid(double v);

/// Adds `bias` (length cols) to every row in place.
void add_row_vector(Matrix& m, std::span<const double> bias);
/// Column sums, length cols.
std::vector<double> column_sums(const Matrix& m);

}  // namespace critrep
