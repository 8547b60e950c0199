#include "stomech/stochcalc.hpp"

#include <algorithm>
#include <cmath>

namespace stomech::stochcalc {

Path path_from_ensemble(const noise::ComplexPathEnsemble& ens, int path_index) {
  if (path_index < 0 || path_index >= ens.n_paths)
    throw Error(ErrorCode::IndexOutOfRange, "path index out of range");
  Path p;
  p.grid = ens.grid;
  p.dim = ens.dim;
  p.z.resize(static_cast<size_t>(ens.n_steps() + 1) * ens.dim);
  for (int k = 0; k <= ens.n_steps(); ++k)
    for (int c = 0; c < ens.dim; ++c)
      p.z[static_cast<size_t>(k) * ens.dim + c] = ens.m(path_index, k, c);
  return p;
}

Path coarsen_path(const Path& p, int factor) {
  if (factor < 1 || p.grid.n_steps % factor != 0)
    throw Error(ErrorCode::GridMismatch, "coarsening factor must divide n_steps");
  Path q;
  q.grid = p.grid;
  q.grid.n_steps = p.grid.n_steps / factor;
  q.dim = p.dim;
  q.z.resize(static_cast<size_t>(q.grid.n_steps + 1) * q.dim);
  for (int k = 0; k <= q.grid.n_steps; ++k)
    for (int c = 0; c < q.dim; ++c)
      q.z[static_cast<size_t>(k) * q.dim + c] = p.at(k * factor, c);
  return q;
}

double integrand_consistency_error(
    const IntegrandSpec& f, const std::vector<std::vector<Complex>>& probes,
    double t) {
  const int d = f.dim;
  const double h = 1e-6;
  double worst = 0.0;
  std::vector<Complex> jac(static_cast<size_t>(d) * d);
  std::vector<Complex> fp(d), fm(d);
  for (const auto& x : probes) {
    f.jacobian(x.data(), t, jac.data());
    double scale = 0.0;
    for (auto& j : jac) scale = std::max(scale, std::abs(j));
    if (scale == 0.0) scale = 1.0;
    for (int j = 0; j < d; ++j) {
      std::vector<Complex> xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      f.form(xp.data(), t, fp.data());
      f.form(xm.data(), t, fm.data());
      for (int i = 0; i < d; ++i) {
        const Complex fd = (fp[i] - fm[i]) / (2.0 * h);
        worst = std::max(worst,
                         std::abs(fd - jac[static_cast<size_t>(i) * d + j]) / scale);
      }
    }
  }
  return worst;
}

namespace {

enum class Endpoint { Left, Right, Mid };

std::vector<Complex> line_integral(const IntegrandSpec& f, const Path& p,
                                   Endpoint ep) {
  if (f.dim != p.dim)
    throw Error(ErrorCode::GridMismatch, "integrand/path dimension mismatch");
  const int n = p.grid.n_steps;
  const int d = p.dim;
  const double dt = p.grid.dt();
  std::vector<Complex> series(n + 1, Complex(0));
  std::vector<Complex> f0(d), f1(d);
  Complex run(0);
  for (int k = 0; k < n; ++k) {
    const Complex* x0 = p.state(k);
    const Complex* x1 = p.state(k + 1);
    const double t0 = p.grid.time(k);
    const double t1 = p.grid.time(k + 1);
    Complex inc(0);
    switch (ep) {
      case Endpoint::Left:
        f.form(x0, t0, f0.data());
        for (int i = 0; i < d; ++i) inc += f0[i] * (x1[i] - x0[i]);
        break;
      case Endpoint::Right:
        f.form(x1, t1, f1.data());
        for (int i = 0; i < d; ++i) inc += f1[i] * (x1[i] - x0[i]);
        break;
      case Endpoint::Mid:
        f.form(x0, t0, f0.data());
        f.form(x1, t1, f1.data());
        for (int i = 0; i < d; ++i)
          inc += 0.5 * (f0[i] + f1[i]) * (x1[i] - x0[i]);
        break;
    }
    (void)dt;
    run += inc;
    series[k + 1] = run;
  }
  return series;
}

}  // namespace

std::vector<Complex> ito_forward_integral(const IntegrandSpec& f, const Path& p) {
  return line_integral(f, p, Endpoint::Left);
}

std::vector<Complex> ito_backward_integral(const IntegrandSpec& f, const Path& p) {
  return line_integral(f, p, Endpoint::Right);
}

std::vector<Complex> stratonovich_integral(const IntegrandSpec& f, const Path& p) {
  return line_integral(f, p, Endpoint::Mid);
}

std::vector<Complex> qv_integral(const BilinearSpec& g, const Path& p) {
  if (g.dim != p.dim)
    throw Error(ErrorCode::GridMismatch, "integrand/path dimension mismatch");
  const int n = p.grid.n_steps;
  const int d = p.dim;
  std::vector<Complex> series(n + 1, Complex(0));
  std::vector<Complex> gv(static_cast<size_t>(d) * d);
  Complex run(0);
  for (int k = 0; k < n; ++k) {
    const Complex* x0 = p.state(k);
    const Complex* x1 = p.state(k + 1);
    g.form(x0, p.grid.time(k), gv.data());
    Complex inc(0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        inc += gv[static_cast<size_t>(i) * d + j] * (x1[i] - x0[i]) * (x1[j] - x0[j]);
    run += inc;
    series[k + 1] = run;
  }
  return series;
}

ConversionReport conversion_check(const IntegrandSpec& f,
                                  const noise::ComplexPathEnsemble& ens,
                                  int levels) {
  if (!f.jacobian)
    throw Error(ErrorCode::MissingDerivative,
                "conversion_check needs the integrand Jacobian");
  const int d = ens.dim;
  ConversionReport rep;
  BilinearSpec dfg;
  dfg.dim = d;
  dfg.form = [&f, d](const Complex* x, double t, Complex* out) {
    // contract with d_j f_i: the QV correction integrand
    f.jacobian(x, t, out);
  };
  for (int lev = 0; lev < levels; ++lev) {
    const int factor = 1 << lev;
    double maxf = 0.0, maxb = 0.0, sumf2 = 0.0, sumb2 = 0.0;
    int64_t cnt = 0;
    for (int pi = 0; pi < ens.n_paths; ++pi) {
      Path p = coarsen_path(path_from_ensemble(ens, pi), factor);
      const auto strat = stratonovich_integral(f, p);
      const auto fwd = ito_forward_integral(f, p);
      const auto bwd = ito_backward_integral(f, p);
      const auto corr = qv_integral(dfg, p);
      for (size_t k = 0; k < strat.size(); ++k) {
        const double rf = std::abs(strat[k] - fwd[k] - 0.5 * corr[k]);
        const double rb = std::abs(strat[k] - bwd[k] + 0.5 * corr[k]);
        maxf = std::max(maxf, rf);
        maxb = std::max(maxb, rb);
      }
      // RMS over the endpoint residuals, the statistic used for ordering
      const double rf_end = std::abs(strat.back() - fwd.back() - 0.5 * corr.back());
      const double rb_end = std::abs(strat.back() - bwd.back() + 0.5 * corr.back());
      sumf2 += rf_end * rf_end;
      sumb2 += rb_end * rb_end;
      ++cnt;
    }
    rep.dt.push_back(ens.grid.dt() * factor);
    rep.max_residual_forward.push_back(maxf);
    rep.max_residual_backward.push_back(maxb);
    rep.rms_residual_forward.push_back(std::sqrt(sumf2 / cnt));
    rep.rms_residual_backward.push_back(std::sqrt(sumb2 / cnt));
  }
  // levels are ordered fine -> coarse; order = log2(resid(2dt)/resid(dt))
  for (int lev = 0; lev + 1 < levels; ++lev) {
    rep.order_forward.push_back(std::log2(
        rep.rms_residual_forward[lev + 1] / rep.rms_residual_forward[lev]));
    rep.order_backward.push_back(std::log2(
        rep.rms_residual_backward[lev + 1] / rep.rms_residual_backward[lev]));
  }
  return rep;
}

namespace {

struct VelocityBuffers {
  std::vector<double> x0, v, v2, a, da, vhat;
};

double flat_lagrangian(const LagrangianSpec& lag, const double* x,
                       const double* v, const double* v2, double t, int d,
                       double sign, VelocityBuffers& buf) {
  // sign = +1 forward, -1 backward, 0 Stratonovich (no v2 term)
  double kin = 0.0;
  for (int i = 0; i < d; ++i) kin += v[i] * v[i];
  double val = 0.5 * lag.mass * kin - lag.potential.u(x, t);
  if (lag.potential.has_vector()) {
    buf.a.resize(d);
    lag.potential.a(x, t, buf.a.data(), d);
    for (int i = 0; i < d; ++i) val += lag.charge * buf.a[i] * v[i];
    if (sign != 0.0 && v2 != nullptr) {
      buf.da.resize(static_cast<size_t>(d) * d);
      lag.potential.da(x, t, buf.da.data(), d);
      double corr = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          corr += buf.da[static_cast<size_t>(i) * d + j] * v2[static_cast<size_t>(i) * d + j];
      val += sign * 0.5 * lag.charge * corr;
    }
  }
  return val;
}

double manifold_lagrangian(const LagrangianSpec& lag, const double* x,
                           const double* v, const double* v2, double t, int d,
                           double sign, VelocityBuffers& buf) {
  Vec xv(x, x + d);
  const geom2::ChartedManifold& man = *lag.manifold;
  const Mat g = man.metric(xv);
  const Ten3 gamma = geom2::christoffel_at(man, xv);
  const Ten4 rlow = geom2::riemann_lowered(man, xv);

  buf.vhat.assign(d, 0.0);
  for (int i = 0; i < d; ++i) {
    buf.vhat[i] = v[i];
    if (v2 != nullptr)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          buf.vhat[i] += sign * 0.5 * gamma(i, k, l) * v2[static_cast<size_t>(k) * d + l];
  }
  double kin = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) kin += g(i, j) * buf.vhat[i] * buf.vhat[j];
  double val = 0.5 * lag.mass * kin - lag.potential.u(x, t);

  if (v2 != nullptr) {
    double rterm = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l)
            rterm += rlow(i, j, k, l) * v2[static_cast<size_t>(i) * d + k] *
                     v2[static_cast<size_t>(j) * d + l];
    val += lag.mass / 12.0 * rterm;
  }

  if (lag.potential.has_vector()) {
    buf.a.resize(d);
    lag.potential.a(x, t, buf.a.data(), d);
    for (int i = 0; i < d; ++i) val += lag.charge * buf.a[i] * buf.vhat[i];
    if (sign != 0.0 && v2 != nullptr) {
      buf.da.resize(static_cast<size_t>(d) * d);
      lag.potential.da(x, t, buf.da.data(), d);
      double corr = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          // covariant derivative of the covector A
          double nabla = buf.da[static_cast<size_t>(i) * d + j];
          for (int k = 0; k < d; ++k) nabla -= gamma(k, j, i) * buf.a[k];
          corr += nabla * v2[static_cast<size_t>(i) * d + j];
        }
      val += sign * 0.5 * lag.charge * corr;
    }
  }
  return val;
}

ActionEstimate reduce_action(const std::vector<double>& per_path) {
  ActionEstimate est;
  const double n = static_cast<double>(per_path.size());
  double sum = 0.0;
  for (double v : per_path) sum += v;
  est.value = sum / n;
  double var = 0.0;
  for (double v : per_path) var += (v - est.value) * (v - est.value);
  est.std_error = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
  return est;
}

}  // namespace

ActionEstimate stratonovich_action(const RealPathEnsembleView& paths,
                                   const LagrangianSpec& lag) {
  const int n = paths.grid.n_steps;
  const int d = paths.dim;
  if (n < 2)
    throw Error(ErrorCode::MissingVelocity,
                "central-difference velocity needs n_steps >= 2");
  if (lag.manifold != nullptr && !lag.manifold->metric)
    throw Error(ErrorCode::MissingGeometry, "manifold context incomplete");
  const double dt = paths.grid.dt();
  std::vector<double> per_path(paths.n_paths, 0.0);
  parallel_for(paths.n_paths, [&](int64_t p) {
    VelocityBuffers buf;
    std::vector<double> x(d), v(d);
    double acc = 0.0;
    for (int k = 1; k < n; ++k) {
      for (int c = 0; c < d; ++c) {
        x[c] = paths.at(static_cast<int>(p), k, c);
        v[c] = (paths.at(static_cast<int>(p), k + 1, c) -
                paths.at(static_cast<int>(p), k - 1, c)) /
               (2.0 * dt);
      }
      const double t = paths.grid.time(k);
      acc += (lag.manifold ? manifold_lagrangian(lag, x.data(), v.data(),
                                                 nullptr, t, d, 0.0, buf)
                           : flat_lagrangian(lag, x.data(), v.data(), nullptr,
                                             t, d, 0.0, buf)) *
             dt;
    }
    per_path[p] = acc;
  });
  return reduce_action(per_path);
}

ActionEstimate ito_action_finite(const RealPathEnsembleView& paths,
                                 const LagrangianSpec& lag) {
  const int n = paths.grid.n_steps;
  const int d = paths.dim;
  if (n < 1)
    throw Error(ErrorCode::MissingVelocity, "need at least one step");
  if (lag.kind == LagrangianKind::Stratonovich)
    throw Error(ErrorCode::MissingVelocity,
                "ito_action_finite needs an Ito kind");
  if (lag.manifold != nullptr && !lag.manifold->metric)
    throw Error(ErrorCode::MissingGeometry, "manifold context incomplete");
  const bool forward = lag.kind == LagrangianKind::ItoForward;
  const double sign = forward ? 1.0 : -1.0;
  const double dt = paths.grid.dt();
  std::vector<double> per_path(paths.n_paths, 0.0);
  parallel_for(paths.n_paths, [&](int64_t pp) {
    const int p = static_cast<int>(pp);
    VelocityBuffers buf;
    std::vector<double> x(d), v(d), v2(static_cast<size_t>(d) * d);
    double acc = 0.0;
    for (int k = forward ? 0 : 1; k < (forward ? n : n + 1); ++k) {
      const int k0 = forward ? k : k - 1;  // difference base
      for (int c = 0; c < d; ++c) {
        x[c] = paths.at(p, k, c);
        v[c] = (paths.at(p, k0 + 1, c) - paths.at(p, k0, c)) / dt;
      }
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          v2[static_cast<size_t>(i) * d + j] = v[i] * v[j] * dt;
      const double t = paths.grid.time(k);
      acc += (lag.manifold ? manifold_lagrangian(lag, x.data(), v.data(),
                                                 v2.data(), t, d, sign, buf)
                           : flat_lagrangian(lag, x.data(), v.data(), v2.data(),
                                             t, d, sign, buf)) *
             dt;
    }
    per_path[p] = acc;
  });
  return reduce_action(per_path);
}

ActionEstimate l_infinity_estimator(const RealPathEnsembleView& paths,
                                    const LagrangianSpec& lag) {
  const int n = paths.grid.n_steps;
  const int d = paths.dim;
  if (n < 3)
    throw Error(ErrorCode::MissingVelocity,
                "l_infinity estimator needs n_steps >= 3");
  const double dt = paths.grid.dt();
  std::vector<double> per_path(paths.n_paths, 0.0);
  parallel_for(paths.n_paths, [&](int64_t pp) {
    const int p = static_cast<int>(pp);
    double acc = 0.0;
    std::vector<double> x(d);
    for (int k = 1; k + 1 < n; ++k) {
      for (int c = 0; c < d; ++c) x[c] = paths.at(p, k, c);
      Mat g = Mat::identity(d);
      if (lag.manifold) g = lag.manifold->metric(Vec(x.begin(), x.end()));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const double dx = paths.at(p, k + 1, i) - paths.at(p, k, i);
          const double vs_next =
              (paths.at(p, k + 2, j) - paths.at(p, k, j)) / (2.0 * dt);
          const double vs_cur =
              (paths.at(p, k + 1, j) - paths.at(p, k - 1, j)) / (2.0 * dt);
          acc += 0.5 * lag.mass * g(i, j) * dx * (vs_next - vs_cur);
        }
    }
    per_path[p] = acc;
  });
  return reduce_action(per_path);
}

}  // namespace stomech::stochcalc
