#pragma once

#include <cmath>
#include <vector>

#include "stomech/errors.hpp"

namespace stomech {

using Vec = std::vector<double>;

// Small dense row-major matrix. Dimensions in this project are tiny
// (chart dimension <= 4), so a plain vector-backed type is enough.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

// Rank-3 tensor t[i][j][k], row-major.
struct Ten3 {
  int n0 = 0, n1 = 0, n2 = 0;
  std::vector<double> a;

  Ten3() = default;
  Ten3(int a0, int a1, int a2)
      : n0(a0), n1(a1), n2(a2), a(static_cast<size_t>(a0) * a1 * a2, 0.0) {}
  double& operator()(int i, int j, int k) {
    return a[(static_cast<size_t>(i) * n1 + j) * n2 + k];
  }
  double operator()(int i, int j, int k) const {
    return a[(static_cast<size_t>(i) * n1 + j) * n2 + k];
  }
};

// Rank-4 tensor t[i][j][k][l], row-major.
struct Ten4 {
  int n = 0;
  std::vector<double> a;

  Ten4() = default;
  explicit Ten4(int dim)
      : n(dim), a(static_cast<size_t>(dim) * dim * dim * dim, 0.0) {}
  double& operator()(int i, int j, int k, int l) {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
};

inline Mat mat_mul(const Mat& x, const Mat& y) {
  Mat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

inline Vec mat_vec(const Mat& m, const Vec& v) {
  Vec r(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r[i] += m(i, j) * v[j];
  return r;
}

// Gauss-Jordan inverse with partial pivoting.
inline Mat mat_inverse(const Mat& m) {
  int n = m.rows;
  Mat a = m;
  Mat inv = Mat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (std::fabs(a(piv, col)) < 1e-14)
      throw Error(ErrorCode::SingularJacobian, "matrix not invertible");
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    double d = 1.0 / a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) *= d;
      inv(col, j) *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

inline double mat_det(const Mat& m) {
  int n = m.rows;
  Mat a = m;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (std::fabs(a(piv, col)) < 1e-300) return 0.0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      det = -det;
    }
    det *= a(col, col);
    for (int r = col + 1; r < n; ++r) {
      double f = a(r, col) / a(col, col);
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

}  // namespace stomech
