#pragma once

#include <functional>

namespace stomech {

// Scalar potential U(x,t) and vector potential A_i(x,t); null callbacks mean
// identically zero. The Jacobian callback (row-major out[i*dim+j] = d_j A_i)
// is required by operations that need Ito corrections of the A-term.
struct PotentialSpec {
  std::function<double(const double* x, double t)> scalar;
  std::function<void(const double* x, double t, double* out)> vector;
  std::function<void(const double* x, double t, double* out)> vector_jacobian;

  bool has_scalar() const { return static_cast<bool>(scalar); }
  bool has_vector() const { return static_cast<bool>(vector); }
  bool has_vector_jacobian() const { return static_cast<bool>(vector_jacobian); }

  double u(const double* x, double t) const {
    return has_scalar() ? scalar(x, t) : 0.0;
  }
  void a(const double* x, double t, double* out, int dim) const {
    if (has_vector()) {
      vector(x, t, out);
    } else {
      for (int i = 0; i < dim; ++i) out[i] = 0.0;
    }
  }
  void da(const double* x, double t, double* out, int dim) const {
    if (has_vector_jacobian()) {
      vector_jacobian(x, t, out);
    } else {
      for (int i = 0; i < dim * dim; ++i) out[i] = 0.0;
    }
  }
};

}  // namespace stomech
