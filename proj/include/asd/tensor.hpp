#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace asd {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. Bias vectors are stored as n x 1.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// out = W x + b (b may be empty).
void affine(const Matrix& w, std::span<const double> x, const Matrix* b, std::span<double> out);
/// out += W^T g
void affine_transpose_acc(const Matrix& w, std::span<const double> g, std::span<double> out);
/// W += g x^T
void outer_acc(Matrix& w, std::span<const double> g, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace asd
