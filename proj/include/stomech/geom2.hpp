#pragma once

#include <functional>
#include <vector>

#include "stomech/mat.hpp"

namespace stomech::geom2 {

using stomech::Mat;
using stomech::Ten3;
using stomech::Ten4;
using stomech::Vec;

// Second order vector v = v^i d_i + (1/2) v^{jk} d_{jk}; the second slot is
// symmetrized on construction.
struct SecondOrderVector {
  Vec first;
  Mat second;

  SecondOrderVector() = default;
  SecondOrderVector(Vec f, Mat s);
  int dim() const { return static_cast<int>(first.size()); }
};

// Second order form w = w_i d2x^i + (1/2) w_{ij} d[x^i,x^j].
struct SecondOrderForm {
  Vec first;
  Mat second;

  SecondOrderForm() = default;
  SecondOrderForm(Vec f, Mat s);
  int dim() const { return static_cast<int>(first.size()); }
};

// First-order form (or vector field) with its spatial Jacobian at a point:
// value_i and jacobian(i,j) = d_j value_i.
struct FieldData {
  Vec value;
  Mat jacobian;
};

// Coordinate change with forward derivatives supplied at x and inverse
// derivatives at xt = map(x). Inverse derivative data can be derived from the
// forward data (inverse function theorem); see make_cubic_diffeo.
struct Diffeo {
  int dim = 0;
  std::function<Vec(const Vec&)> map;
  std::function<Mat(const Vec&)> jacobian;     // J^i_j = d xt^i / d x^j at x
  std::function<Ten3(const Vec&)> hessian;     // (i,j,k) = d^2 xt^i / dx^j dx^k
  std::function<Vec(const Vec&)> inv_map;      // at xt
  std::function<Mat(const Vec&)> inv_jacobian; // d x^i / d xt^j at xt
  std::function<Ten3(const Vec&)> inv_hessian; // d^2 x^i / dxt^j dxt^k at xt
};

// Random-coefficient cubic diffeo xt = x + c2 xx + c3 xxx with Newton-based
// inverse map and inverse derivatives from the inverse function theorem.
Diffeo make_cubic_diffeo(int dim, const Ten3& c2, const std::vector<double>& c3_flat);

// Active transformation laws.
// Throws SingularJacobian when the Jacobian is not invertible at the point.
SecondOrderVector transform_vector(const SecondOrderVector& v, const Diffeo& d,
                                   const Vec& at);
SecondOrderForm transform_form(const SecondOrderForm& w, const Diffeo& d,
                               const Vec& at);

// Duality pairing <w, v> = w_i v^i + (1/2) w_{ij} v^{ij}.
// Throws DimMismatch.
double pair(const SecondOrderForm& w, const SecondOrderVector& v);

// Product of first order vector fields: AB = (A^i d_i B^j) d_j + A^i B^j d_ij.
SecondOrderVector vector_product(const FieldData& a, const FieldData& b);

// Projection P(w_i d2x^i + (1/2) w_ij d[x^i,x^j]) = w_i dx^i.
Vec map_P(const SecondOrderForm& w);

// underline-d: alpha_i dx^i -> alpha_i d2x^i + (1/2) d_j alpha_i d[x^i,x^j].
SecondOrderForm map_underline_d(const FieldData& alpha);

// H(alpha (x) beta) = (1/2) alpha_i beta_j d[x^i,x^j].
SecondOrderForm map_H(const Vec& alpha, const Vec& beta);
// H of a general bilinear form b_ij.
SecondOrderForm map_H_bilinear(const Mat& b);

// G(alpha) = alpha_i (d2x^i + (1/2) Gamma^i_{kl} d[x^k,x^l]).
SecondOrderForm map_G(const Vec& alpha, const Ten3& christoffel);

// F(V) = (V^i + (1/2) Gamma^i_{kl} V^{kl}) d_i  (the covariant hat-velocity).
Vec map_F(const SecondOrderVector& v, const Ten3& christoffel);

// Ito group element (g, kappa): g in GL(d), kappa linear Sym(R^d (x) R^d) -> R^d,
// stored as kappa(i; j,k) symmetrized in (j,k).
struct ItoGroupElement {
  Mat g;
  Ten3 kappa;

  static ItoGroupElement identity(int dim);
};

// (g', k') (g, k) = (g' g, g' o k + k' o (g (x) g)).
ItoGroupElement ito_group_mul(const ItoGroupElement& a, const ItoGroupElement& b);
ItoGroupElement ito_group_inverse(const ItoGroupElement& a);

// Left action on (x, x2): (g x + kappa x2, (g (x) g) x2).
void ito_group_act(const ItoGroupElement& a, const Vec& x, const Mat& x2,
                   Vec& out_x, Mat& out_x2);

// Christoffel symbols pushed through a coordinate change (inhomogeneous law).
Ten3 christoffel_pushforward(const Ten3& gamma, const Diffeo& d, const Vec& at);

enum class Signature { Riemannian, Lorentzian };

// One coordinate chart of a (pseudo-)Riemannian manifold. Derivative data is
// supplied analytically by the chart; nothing here differentiates numerically.
struct ChartedManifold {
  int dim = 0;
  Signature signature = Signature::Riemannian;
  std::function<Mat(const Vec&)> metric;              // g_{ij}
  std::function<Ten3(const Vec&)> metric_derivative;  // (k,i,j) = d_k g_{ij}
  std::function<Ten4(const Vec&)> metric_second;      // (k,l,i,j) = d_k d_l g_{ij}
  std::function<Mat(const Vec&)> vielbein;            // e^mu_alpha (rows mu)
  std::function<Ten3(const Vec&)> christoffel;        // optional override
  std::function<Ten4(const Vec&)> riemann;            // optional override R^m_{nrs}

  Mat eta() const;  // delta or diag(-1, +1, ..., +1)
};

// Levi-Civita connection from g and dg. Throws SingularMetric.
Ten3 christoffel_from_metric(const ChartedManifold& man, const Vec& at);

// Uses the override when present, else Levi-Civita.
Ten3 christoffel_at(const ChartedManifold& man, const Vec& at);

// R^m_{nrs} from the Levi-Civita connection; requires metric_second unless an
// override is supplied. Throws MissingGeometry.
Ten4 riemann_from_christoffel(const ChartedManifold& man, const Vec& at);
Ten4 riemann_at(const ChartedManifold& man, const Vec& at);

// R_{mnrs} = g_{mk} R^k_{nrs}
Ten4 riemann_lowered(const ChartedManifold& man, const Vec& at);
double ricci_scalar(const ChartedManifold& man, const Vec& at);

// max |g_{mn} e^m_a e^n_b - eta_{ab}| at the point
double vielbein_defect(const ChartedManifold& man, const Vec& at);

// Standard charts used across tests and the relativistic module.
ChartedManifold flat_chart(int dim, Signature sig = Signature::Riemannian);
ChartedManifold sphere_chart(double radius);  // (theta, phi), Riemannian

}  // namespace stomech::geom2
