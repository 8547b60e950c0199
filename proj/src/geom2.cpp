#include "stomech/geom2.hpp"

#include <cmath>

#include "stomech/errors.hpp"

namespace stomech::geom2 {

namespace {

Mat symmetrized(Mat m) {
  for (int i = 0; i < m.rows; ++i)
    for (int j = i + 1; j < m.cols; ++j) {
      const double s = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = s;
      m(j, i) = s;
    }
  return m;
}

Ten3 symmetrized_last2(Ten3 t) {
  for (int i = 0; i < t.n0; ++i)
    for (int j = 0; j < t.n1; ++j)
      for (int k = j + 1; k < t.n2; ++k) {
        const double s = 0.5 * (t(i, j, k) + t(i, k, j));
        t(i, j, k) = s;
        t(i, k, j) = s;
      }
  return t;
}

}  // namespace

SecondOrderVector::SecondOrderVector(Vec f, Mat s)
    : first(std::move(f)), second(symmetrized(std::move(s))) {}

SecondOrderForm::SecondOrderForm(Vec f, Mat s)
    : first(std::move(f)), second(symmetrized(std::move(s))) {}

SecondOrderVector transform_vector(const SecondOrderVector& v, const Diffeo& d,
                                   const Vec& at) {
  const int n = v.dim();
  const Mat J = d.jacobian(at);
  const Ten3 H = d.hessian(at);
  if (std::fabs(mat_det(J)) < 1e-12)
    throw Error(ErrorCode::SingularJacobian, "diffeo jacobian singular");
  Vec first(n, 0.0);
  Mat second(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      first[i] += v.first[k] * J(i, k);
      for (int l = 0; l < n; ++l)
        first[i] += 0.5 * v.second(k, l) * H(i, k, l);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += v.second(k, l) * J(i, k) * J(j, l);
      second(i, j) = s;
    }
  return SecondOrderVector(std::move(first), std::move(second));
}

SecondOrderForm transform_form(const SecondOrderForm& w, const Diffeo& d,
                               const Vec& at) {
  const int n = w.dim();
  const Vec xt = d.map(at);
  const Mat Jinv = d.inv_jacobian(xt);
  const Ten3 Hinv = d.inv_hessian(xt);
  Vec first(n, 0.0);
  Mat second(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) first[i] += w.first[k] * Jinv(k, i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        s += w.first[k] * Hinv(k, i, j);
        for (int l = 0; l < n; ++l)
          s += w.second(k, l) * Jinv(k, i) * Jinv(l, j);
      }
      second(i, j) = s;
    }
  return SecondOrderForm(std::move(first), std::move(second));
}

double pair(const SecondOrderForm& w, const SecondOrderVector& v) {
  if (w.dim() != v.dim())
    throw Error(ErrorCode::DimMismatch, "pairing dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < w.dim(); ++i) s += w.first[i] * v.first[i];
  for (int i = 0; i < w.dim(); ++i)
    for (int j = 0; j < w.dim(); ++j) s += 0.5 * w.second(i, j) * v.second(i, j);
  return s;
}

SecondOrderVector vector_product(const FieldData& a, const FieldData& b) {
  const int n = static_cast<int>(a.value.size());
  Vec first(n, 0.0);
  Mat second(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) first[j] += a.value[i] * b.jacobian(j, i);
    for (int i = 0; i < n; ++i)
      second(i, j) = a.value[i] * b.value[j] + a.value[j] * b.value[i];
  }
  return SecondOrderVector(std::move(first), std::move(second));
}

Vec map_P(const SecondOrderForm& w) { return w.first; }

SecondOrderForm map_underline_d(const FieldData& alpha) {
  const int n = static_cast<int>(alpha.value.size());
  Mat second(n, n);
  // (1/2) d_j alpha_i d[x^i,x^j] => w_ij = sym(d_j alpha_i)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      second(i, j) = 0.5 * (alpha.jacobian(i, j) + alpha.jacobian(j, i));
  return SecondOrderForm(alpha.value, std::move(second));
}

SecondOrderForm map_H(const Vec& alpha, const Vec& beta) {
  const int n = static_cast<int>(alpha.size());
  Mat b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = alpha[i] * beta[j];
  return map_H_bilinear(b);
}

SecondOrderForm map_H_bilinear(const Mat& b) {
  const int n = b.rows;
  Vec first(n, 0.0);
  Mat second(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) second(i, j) = 0.5 * (b(i, j) + b(j, i));
  return SecondOrderForm(std::move(first), std::move(second));
}

SecondOrderForm map_G(const Vec& alpha, const Ten3& christoffel) {
  const int n = static_cast<int>(alpha.size());
  Mat second(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += alpha[i] * christoffel(i, k, l);
      second(k, l) = s;
    }
  return SecondOrderForm(alpha, std::move(second));
}

Vec map_F(const SecondOrderVector& v, const Ten3& christoffel) {
  const int n = v.dim();
  Vec out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    out[i] = v.first[i];
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        out[i] += 0.5 * christoffel(i, k, l) * v.second(k, l);
  }
  return out;
}

ItoGroupElement ItoGroupElement::identity(int dim) {
  ItoGroupElement e;
  e.g = Mat::identity(dim);
  e.kappa = Ten3(dim, dim, dim);
  return e;
}

ItoGroupElement ito_group_mul(const ItoGroupElement& a, const ItoGroupElement& b) {
  const int n = a.g.rows;
  ItoGroupElement r;
  r.g = mat_mul(a.g, b.g);
  r.kappa = Ten3(n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += a.g(i, l) * b.kappa(l, j, k);
        for (int m = 0; m < n; ++m)
          for (int nn = 0; nn < n; ++nn)
            s += a.kappa(i, m, nn) * b.g(m, j) * b.g(nn, k);
        r.kappa(i, j, k) = s;
      }
  r.kappa = symmetrized_last2(std::move(r.kappa));
  return r;
}

ItoGroupElement ito_group_inverse(const ItoGroupElement& a) {
  const int n = a.g.rows;
  ItoGroupElement r;
  r.g = mat_inverse(a.g);
  r.kappa = Ten3(n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            for (int nn = 0; nn < n; ++nn)
              s += r.g(i, l) * a.kappa(l, m, nn) * r.g(m, j) * r.g(nn, k);
        r.kappa(i, j, k) = -s;
      }
  return r;
}

void ito_group_act(const ItoGroupElement& a, const Vec& x, const Mat& x2,
                   Vec& out_x, Mat& out_x2) {
  const int n = a.g.rows;
  out_x.assign(n, 0.0);
  out_x2 = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out_x[i] += a.g(i, j) * x[j];
      for (int k = 0; k < n; ++k) out_x[i] += a.kappa(i, j, k) * x2(j, k);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += a.g(i, k) * a.g(j, l) * x2(k, l);
      out_x2(i, j) = s;
    }
}

Ten3 christoffel_pushforward(const Ten3& gamma, const Diffeo& d, const Vec& at) {
  const int n = gamma.n0;
  const Mat J = d.jacobian(at);
  const Vec xt = d.map(at);
  const Mat Jinv = d.inv_jacobian(xt);
  const Ten3 Hinv = d.inv_hessian(xt);
  Ten3 out(n, n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += J(a, l) * Hinv(l, b, c);
          for (int m = 0; m < n; ++m)
            for (int nn = 0; nn < n; ++nn)
              s += J(a, l) * Jinv(m, b) * Jinv(nn, c) * gamma(l, m, nn);
        }
        out(a, b, c) = s;
      }
  return out;
}

Diffeo make_cubic_diffeo(int dim, const Ten3& c2,
                         const std::vector<double>& c3_flat) {
  auto c3 = [dim, c3_flat](int i, int j, int k, int l) {
    return c3_flat[((static_cast<size_t>(i) * dim + j) * dim + k) * dim + l];
  };
  auto fwd = [dim, c2, c3](const Vec& x) {
    Vec y = x;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
          y[i] += c2(i, j, k) * x[j] * x[k];
          for (int l = 0; l < dim; ++l)
            y[i] += c3(i, j, k, l) * x[j] * x[k] * x[l];
        }
    }
    return y;
  };
  auto jac = [dim, c2, c3](const Vec& x) {
    Mat J = Mat::identity(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        for (int k = 0; k < dim; ++k) {
          J(i, j) += (c2(i, j, k) + c2(i, k, j)) * x[k];
          for (int l = 0; l < dim; ++l)
            J(i, j) += (c3(i, j, k, l) + c3(i, k, j, l) + c3(i, k, l, j)) *
                       x[k] * x[l];
        }
      }
    return J;
  };
  auto hess = [dim, c2, c3](const Vec& x) {
    Ten3 H(dim, dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
          H(i, j, k) = c2(i, j, k) + c2(i, k, j);
          for (int l = 0; l < dim; ++l)
            H(i, j, k) += (c3(i, j, k, l) + c3(i, j, l, k) + c3(i, l, j, k) +
                           c3(i, k, j, l) + c3(i, k, l, j) + c3(i, l, k, j)) *
                          x[l];
        }
    return H;
  };
  auto inv = [fwd, jac, dim](const Vec& xt) {
    Vec x = xt;  // Newton iteration; coefficients are small by construction
    for (int it = 0; it < 60; ++it) {
      Vec f = fwd(x);
      double rmax = 0.0;
      for (int i = 0; i < dim; ++i) {
        f[i] -= xt[i];
        rmax = std::max(rmax, std::fabs(f[i]));
      }
      if (rmax < 1e-15) break;
      const Mat Ji = mat_inverse(jac(x));
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) x[i] -= Ji(i, j) * f[j];
    }
    return x;
  };
  auto inv_jac = [inv, jac](const Vec& xt) { return mat_inverse(jac(inv(xt))); };
  auto inv_hess = [inv, jac, hess, dim](const Vec& xt) {
    const Vec x = inv(xt);
    const Mat Ji = mat_inverse(jac(x));
    const Ten3 H = hess(x);
    // d^2 x^k / dxt^i dxt^j = -Ji^k_a H^a_{bc} Ji^b_i Ji^c_j
    Ten3 out(dim, dim, dim);
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          double s = 0.0;
          for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
              for (int c = 0; c < dim; ++c)
                s += Ji(k, a) * H(a, b, c) * Ji(b, i) * Ji(c, j);
          out(k, i, j) = -s;
        }
    return out;
  };
  Diffeo d;
  d.dim = dim;
  d.map = fwd;
  d.jacobian = jac;
  d.hessian = hess;
  d.inv_map = inv;
  d.inv_jacobian = inv_jac;
  d.inv_hessian = inv_hess;
  return d;
}

Mat ChartedManifold::eta() const {
  Mat e = Mat::identity(dim);
  if (signature == Signature::Lorentzian) e(0, 0) = -1.0;
  return e;
}

Ten3 christoffel_from_metric(const ChartedManifold& man, const Vec& at) {
  const int n = man.dim;
  const Mat g = man.metric(at);
  if (std::fabs(mat_det(g)) < 1e-14)
    throw Error(ErrorCode::SingularMetric, "metric singular at point");
  const Mat ginv = mat_inverse(g);
  const Ten3 dg = man.metric_derivative(at);
  Ten3 gamma(n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(i, l) * (dg(j, l, k) + dg(k, l, j) - dg(l, j, k));
        gamma(i, j, k) = 0.5 * s;
      }
  return gamma;
}

Ten3 christoffel_at(const ChartedManifold& man, const Vec& at) {
  if (man.christoffel) return man.christoffel(at);
  return christoffel_from_metric(man, at);
}

Ten4 riemann_from_christoffel(const ChartedManifold& man, const Vec& at) {
  if (!man.metric_second)
    throw Error(ErrorCode::MissingGeometry,
                "riemann needs metric second derivatives or an override");
  const int n = man.dim;
  const Mat g = man.metric(at);
  const Mat ginv = mat_inverse(g);
  const Ten3 dg = man.metric_derivative(at);
  const Ten4 d2g = man.metric_second(at);
  const Ten3 gamma = christoffel_from_metric(man, at);

  // dGamma(m, i, j, k) = d_m Gamma^i_{jk}
  Ten4 dgam(n);
  for (int m = 0; m < n; ++m) {
    // d_m g^{il} = -g^{ia} (d_m g_{ab}) g^{bl}
    Mat dginv(n, n);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += ginv(i, a) * dg(m, a, b) * ginv(b, l);
        dginv(i, l) = -s;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            s += dginv(i, l) * (dg(j, l, k) + dg(k, l, j) - dg(l, j, k));
            s += ginv(i, l) * (d2g(m, j, l, k) + d2g(m, k, l, j) - d2g(m, l, j, k));
          }
          dgam(m, i, j, k) = 0.5 * s;
        }
  }

  Ten4 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = dgam(k, i, l, j) - dgam(l, i, k, j);
          for (int m = 0; m < n; ++m)
            s += gamma(i, k, m) * gamma(m, l, j) - gamma(i, l, m) * gamma(m, k, j);
          r(i, j, k, l) = s;
        }
  return r;
}

Ten4 riemann_at(const ChartedManifold& man, const Vec& at) {
  if (man.riemann) return man.riemann(at);
  return riemann_from_christoffel(man, at);
}

Ten4 riemann_lowered(const ChartedManifold& man, const Vec& at) {
  const int n = man.dim;
  const Mat g = man.metric(at);
  const Ten4 r = riemann_at(man, at);
  Ten4 out(n);
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += g(m, i) * r(i, j, k, l);
          out(m, j, k, l) = s;
        }
  return out;
}

double ricci_scalar(const ChartedManifold& man, const Vec& at) {
  const int n = man.dim;
  const Mat ginv = mat_inverse(man.metric(at));
  const Ten4 r = riemann_at(man, at);
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double ric = 0.0;
      for (int i = 0; i < n; ++i) ric += r(i, j, i, l);
      s += ginv(j, l) * ric;
    }
  return s;
}

double vielbein_defect(const ChartedManifold& man, const Vec& at) {
  const int n = man.dim;
  const Mat g = man.metric(at);
  const Mat e = man.vielbein(at);
  const Mat etam = man.eta();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) s += g(mu, nu) * e(mu, a) * e(nu, b);
      worst = std::max(worst, std::fabs(s - etam(a, b)));
    }
  return worst;
}

ChartedManifold flat_chart(int dim, Signature sig) {
  ChartedManifold man;
  man.dim = dim;
  man.signature = sig;
  Mat etam = Mat::identity(dim);
  if (sig == Signature::Lorentzian) etam(0, 0) = -1.0;
  man.metric = [etam](const Vec&) { return etam; };
  man.metric_derivative = [dim](const Vec&) { return Ten3(dim, dim, dim); };
  man.metric_second = [dim](const Vec&) { return Ten4(dim); };
  man.vielbein = [dim](const Vec&) { return Mat::identity(dim); };
  return man;
}

ChartedManifold sphere_chart(double radius) {
  ChartedManifold man;
  man.dim = 2;
  man.signature = Signature::Riemannian;
  const double r2 = radius * radius;
  man.metric = [r2](const Vec& x) {
    Mat g(2, 2);
    g(0, 0) = r2;
    g(1, 1) = r2 * std::sin(x[0]) * std::sin(x[0]);
    return g;
  };
  man.metric_derivative = [r2](const Vec& x) {
    Ten3 dg(2, 2, 2);
    dg(0, 1, 1) = 2.0 * r2 * std::sin(x[0]) * std::cos(x[0]);
    return dg;
  };
  man.metric_second = [r2](const Vec& x) {
    Ten4 d2g(2);
    d2g(0, 0, 1, 1) = 2.0 * r2 * std::cos(2.0 * x[0]);
    return d2g;
  };
  man.vielbein = [radius](const Vec& x) {
    Mat e(2, 2);
    e(0, 0) = 1.0 / radius;
    e(1, 1) = 1.0 / (radius * std::sin(x[0]));
    return e;
  };
  return man;
}

}  // namespace stomech::geom2
