#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bestofn {

/// Dense row-major double matrix. Just enough linear algebra for the
/// encoder; everything stays in 64-bit floating point.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  bool operator==(const Matrix& o) const = default;
};

/// out = a * b^T where a is (n x k) and b is (m x k); result n x m.
inline Matrix matmul_bt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_bt: inner dimensions differ");
  Matrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* bj = b.row(j);
      double sum = 0.0;
      for (int k = 0; k < a.cols; ++k) sum += ai[k] * bj[k];
      out(i, j) = sum;
    }
  }
  return out;
}

/// out = a^T * b where a is (n x r) and b is (n x c); result r x c.
inline Matrix matmul_at(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_at: row counts differ");
  Matrix out(a.cols, b.cols);
  for (int n = 0; n < a.rows; ++n) {
    const double* an = a.row(n);
    const double* bn = b.row(n);
    for (int i = 0; i < a.cols; ++i) {
      double* oi = out.row(i);
      for (int j = 0; j < b.cols; ++j) oi[j] += an[i] * bn[j];
    }
  }
  return out;
}

/// out = a * b where a is (n x k) and b is (k x m).
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* oi = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = ai[k];
      const double* bk = b.row(k);
      for (int j = 0; j < b.cols; ++j) oi[j] += aik * bk[j];
    }
  }
  return out;
}

}  // namespace bestofn
