#include "asd/tensor.hpp"

#include "asd/error.hpp"

namespace asd {

void affine(const Matrix& w, std::span<const double> x, const Matrix* b, std::span<double> out) {
  if (x.size() != w.cols() || out.size() != w.rows() || (b && b->size() != w.rows())) {
    fail(Errc::ShapeMismatch, "affine: shape mismatch");
  }
  for (std::size_t r = 0; r < w.rows(); ++r) out[r] = dot(w.row(r), x) + (b ? (*b)[r] : 0.0);
}

void affine_transpose_acc(const Matrix& w, std::span<const double> g, std::span<double> out) {
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (g[r] != 0.0) axpy(g[r], w.row(r), out);
  }
}

void outer_acc(Matrix& w, std::span<const double> g, std::span<const double> x) {
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (g[r] != 0.0) axpy(g[r], x, w.row(r));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace asd
