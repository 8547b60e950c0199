#include <doctest.h>

#include <cmath>
#include <vector>

#include "stomech/stochcalc.hpp"

using namespace stomech;
using namespace stomech::stochcalc;
using stomech::noise::sample_rotated_wiener;

namespace {

IntegrandSpec constant_one(int dim) {
  IntegrandSpec f;
  f.dim = dim;
  f.form = [dim](const Complex*, double, Complex* out) {
    for (int i = 0; i < dim; ++i) out[i] = 1.0;
  };
  f.jacobian = [dim](const Complex*, double, Complex* out) {
    for (int i = 0; i < dim * dim; ++i) out[i] = 0.0;
  };
  return f;
}

IntegrandSpec linear_x() {
  IntegrandSpec f;
  f.dim = 1;
  f.form = [](const Complex* x, double, Complex* out) { out[0] = x[0]; };
  f.jacobian = [](const Complex*, double, Complex* out) { out[0] = 1.0; };
  return f;
}

IntegrandSpec square_x() {
  IntegrandSpec f;
  f.dim = 1;
  f.form = [](const Complex* x, double, Complex* out) { out[0] = x[0] * x[0]; };
  f.jacobian = [](const Complex* x, double, Complex* out) { out[0] = 2.0 * x[0]; };
  return f;
}

DiffusionSpec wiener_spec() {
  DiffusionSpec s;
  s.phi = 0.0;
  return s;
}

}  // namespace

TEST_CASE("integrand jacobian consistency check") {
  std::vector<std::vector<Complex>> probes{{Complex(0.3, 0.0)},
                                           {Complex(-1.2, 0.0)},
                                           {Complex(0.7, 0.4)}};
  CHECK(integrand_consistency_error(square_x(), probes, 0.0) < 1e-5);

  IntegrandSpec wrong = square_x();
  wrong.jacobian = [](const Complex* x, double, Complex* out) {
    out[0] = 3.0 * x[0];
  };
  CHECK(integrand_consistency_error(wrong, probes, 0.0) > 1e-2);
}

TEST_CASE("constant integrand telescopes to the endpoint difference") {
  const auto ens = sample_rotated_wiener(wiener_spec(), TimeGrid{0, 1, 200}, 1,
                                         10, {101});
  for (int p = 0; p < ens.n_paths; ++p) {
    const Path path = path_from_ensemble(ens, p);
    const auto fwd = ito_forward_integral(constant_one(1), path);
    const auto bwd = ito_backward_integral(constant_one(1), path);
    const Complex diff = path.at(200, 0) - path.at(0, 0);
    CHECK(std::abs(fwd.back() - diff) < 1e-13);
    CHECK(std::abs(bwd.back() - diff) < 1e-13);
  }
}

TEST_CASE("f(x) = x along a Wiener path: exact discrete identities") {
  const auto ens = sample_rotated_wiener(wiener_spec(), TimeGrid{0, 1, 500}, 1,
                                         20, {102});
  for (int p = 0; p < ens.n_paths; ++p) {
    const Path path = path_from_ensemble(ens, p);
    const auto fwd = ito_forward_integral(linear_x(), path);
    const auto bwd = ito_backward_integral(linear_x(), path);
    const auto strat = stratonovich_integral(linear_x(), path);

    // independent telescoping oracles computed directly from increments
    Complex qv(0.0, 0.0);
    for (int k = 0; k < 500; ++k) {
      const Complex d = path.at(k + 1, 0) - path.at(k, 0);
      qv += d * d;
    }
    const Complex wf = path.at(500, 0);
    CHECK(std::abs(fwd.back() - 0.5 * (wf * wf - qv)) < 1e-12);
    CHECK(std::abs(bwd.back() - 0.5 * (wf * wf + qv)) < 1e-12);
    CHECK(std::abs(strat.back() - 0.5 * wf * wf) < 1e-12);

    // backward - forward equals the realized QV exactly for linear f
    CHECK(std::abs((bwd.back() - fwd.back()) - qv) < 1e-12);
    // forward + backward = 2 Stratonovich at every step
    for (size_t k = 0; k < fwd.size(); ++k)
      CHECK(std::abs(fwd[k] + bwd[k] - 2.0 * strat[k]) < 1e-12);
  }
}

TEST_CASE("martingale property: forward integrals average to zero") {
  const auto ens = sample_rotated_wiener(wiener_spec(), TimeGrid{0, 1, 200}, 1,
                                         4000, {103});
  IntegrandSpec f;
  f.dim = 1;
  f.form = [](const Complex* x, double, Complex* out) {
    out[0] = std::sin(x[0].real());
  };
  f.jacobian = [](const Complex* x, double, Complex* out) {
    out[0] = std::cos(x[0].real());
  };
  double mean = 0.0, mean2 = 0.0;
  for (int p = 0; p < ens.n_paths; ++p) {
    const auto series = ito_forward_integral(f, path_from_ensemble(ens, p));
    mean += series.back().real();
    mean2 += series.back().real() * series.back().real();
  }
  mean /= ens.n_paths;
  mean2 /= ens.n_paths;
  const double se = std::sqrt((mean2 - mean * mean) / ens.n_paths);
  CHECK(std::fabs(mean) < 3.0 * se);
}

TEST_CASE("qv integral of the rotated process hits the structure relation") {
  DiffusionSpec spec;
  spec.phi = 0.5 * kPi;
  const auto ens =
      sample_rotated_wiener(spec, TimeGrid{0, 1, 1000}, 1, 400, {104});
  BilinearSpec one;
  one.dim = 1;
  one.form = [](const Complex*, double, Complex* out) { out[0] = 1.0; };
  Complex mean(0.0, 0.0);
  for (int p = 0; p < ens.n_paths; ++p)
    mean += qv_integral(one, path_from_ensemble(ens, p)).back();
  mean /= ens.n_paths;
  CHECK(std::abs(mean - Complex(0.0, 1.0)) < 0.02);
}

TEST_CASE("qv integral along conjugate-paired components gives |alpha| t / m") {
  DiffusionSpec spec;
  spec.phi = 0.5 * kPi;
  const auto ens =
      sample_rotated_wiener(spec, TimeGrid{0, 1, 1000}, 1, 400, {105});
  // two-component path (M, conj M) contracted with the off-diagonal form
  BilinearSpec cross;
  cross.dim = 2;
  cross.form = [](const Complex*, double, Complex* out) {
    out[0] = 0.0;
    out[1] = 0.5;
    out[2] = 0.5;
    out[3] = 0.0;
  };
  Complex mean(0.0, 0.0);
  for (int p = 0; p < ens.n_paths; ++p) {
    Path z;
    z.grid = ens.grid;
    z.dim = 2;
    z.z.resize(1001 * 2);
    for (int k = 0; k <= 1000; ++k) {
      z.z[2 * k] = ens.m(p, k, 0);
      z.z[2 * k + 1] = std::conj(ens.m(p, k, 0));
    }
    mean += qv_integral(cross, z).back();
  }
  mean /= ens.n_paths;
  CHECK(std::abs(mean.imag()) < 1e-12);
  CHECK(mean.real() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("qv of a smooth path vanishes as dt -> 0") {
  for (int n : {100, 200, 400}) {
    Path p;
    p.grid = TimeGrid{0, 1, n};
    p.dim = 1;
    p.z.resize(n + 1);
    for (int k = 0; k <= n; ++k) p.z[k] = std::sin(p.grid.time(k));
    BilinearSpec one;
    one.dim = 1;
    one.form = [](const Complex*, double, Complex* out) { out[0] = 1.0; };
    const Complex total = qv_integral(one, p).back();
    CHECK(std::abs(total) < 1.0 / n);
  }
}

TEST_CASE("conversion identities: exact for linear f, order >= 0.5 for x^2") {
  DiffusionSpec spec = wiener_spec();
  const auto ens =
      sample_rotated_wiener(spec, TimeGrid{0, 1, 4000}, 1, 200, {106});

  const auto linear_rep = conversion_check(linear_x(), ens, 3);
  for (double r : linear_rep.max_residual_forward) CHECK(r < 1e-12);
  for (double r : linear_rep.max_residual_backward) CHECK(r < 1e-12);

  const auto sq_rep = conversion_check(square_x(), ens, 3);
  for (double ord : sq_rep.order_forward) CHECK(ord >= 0.5);
  for (double ord : sq_rep.order_backward) CHECK(ord >= 0.5);

  IntegrandSpec no_jac = square_x();
  no_jac.jacobian = nullptr;
  CHECK_THROWS_AS(conversion_check(no_jac, ens, 1), Error);
}

TEST_CASE("constant integrand: Stratonovich equals Ito") {
  const auto ens = sample_rotated_wiener(wiener_spec(), TimeGrid{0, 1, 100}, 1,
                                         5, {107});
  const Path p = path_from_ensemble(ens, 0);
  const auto a = stratonovich_integral(constant_one(1), p);
  const auto b = ito_forward_integral(constant_one(1), p);
  for (size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-14);
}

// ---------------------------------------------------------------------------
// actions
// ---------------------------------------------------------------------------

namespace {

// deterministic straight-line ensemble x(t) = v t
RealPathEnsembleView straight_line(std::vector<double>& storage, double v,
                                   int n) {
  TimeGrid grid{0, 1, n};
  storage.resize(n + 1);
  for (int k = 0; k <= n; ++k) storage[k] = v * grid.time(k);
  RealPathEnsembleView view;
  view.grid = grid;
  view.dim = 1;
  view.n_paths = 1;
  view.x = storage.data();
  return view;
}

}  // namespace

TEST_CASE("stratonovich action of deterministic paths") {
  std::vector<double> storage;
  const int n = 1000;

  SUBCASE("U(x) = x along x(t) = t: interior sum vanishes exactly") {
    const auto view = straight_line(storage, 1.0, n);
    LagrangianSpec lag;
    lag.kind = LagrangianKind::Stratonovich;
    lag.potential.scalar = [](const double* x, double) { return x[0]; };
    const auto est = stratonovich_action(view, lag);
    // sum_{k=1}^{n-1} (1/2 - t_k) dt = 0 by symmetry of the interior grid
    CHECK(std::fabs(est.value) < 1e-12);
  }

  SUBCASE("constant A adds q A (x_f - x_0) to the kinetic action") {
    const double v = 0.7, a0 = 1.3, q = 0.9;
    const auto view = straight_line(storage, v, n);
    LagrangianSpec lag;
    lag.kind = LagrangianKind::Stratonovich;
    lag.charge = q;
    lag.potential.vector = [a0](const double*, double, double* out) {
      out[0] = a0;
    };
    const auto est = stratonovich_action(view, lag);
    // interior sum covers (n-1) of the n steps
    const double interior = static_cast<double>(n - 1) / n;
    const double expect = (0.5 * v * v + q * a0 * v) * interior;
    CHECK(est.value == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("free stratonovich action matches the discrete Gaussian expectation") {
  DiffusionSpec spec = wiener_spec();  // nu = 1
  const TimeGrid grid{0, 1, 200};
  const auto ens = sample_rotated_wiener(spec, grid, 1, 4000, {108});
  RealPathEnsembleView view;
  view.grid = grid;
  view.dim = 1;
  view.n_paths = ens.n_paths;
  view.x = ens.w.data();  // phi = 0: Re M = W

  LagrangianSpec lag;
  lag.kind = LagrangianKind::Stratonovich;
  const auto est = stratonovich_action(view, lag);
  // E[(X_{k+1} - X_{k-1})^2] = 2 nu dt, so each interior step contributes
  // (m/2) * 2 nu dt / (4 dt^2) * dt = m nu / 4
  const double expect = 0.25 * (grid.n_steps - 1);
  CHECK(std::fabs(est.value - expect) < 3.0 * est.std_error);
}

TEST_CASE("ito action: the v2 term adds (q c / 2) T for A = c x") {
  DiffusionSpec spec = wiener_spec();
  const TimeGrid grid{0, 1, 400};
  const auto ens = sample_rotated_wiener(spec, grid, 1, 4000, {109});
  RealPathEnsembleView view;
  view.grid = grid;
  view.dim = 1;
  view.n_paths = ens.n_paths;
  view.x = ens.w.data();

  const double c = 0.8, q = 1.0;
  LagrangianSpec with_term;
  with_term.kind = LagrangianKind::ItoForward;
  with_term.charge = q;
  with_term.mass = 1e-12;  // isolate the A-terms
  with_term.potential.vector = [c](const double* x, double, double* out) {
    out[0] = c * x[0];
  };
  with_term.potential.vector_jacobian = [c](const double*, double, double* out) {
    out[0] = c;
  };
  LagrangianSpec naive = with_term;
  naive.potential.vector_jacobian = nullptr;  // drops the v2 correction

  const auto full = ito_action_finite(view, with_term);
  const auto bare = ito_action_finite(view, naive);
  // E[v2] = nu = 1, so the correction integrates to q c T / 2
  // realized v2 fluctuates at O(sqrt(dt / N)) around nu
  CHECK(full.value - bare.value ==
        doctest::Approx(0.5 * q * c).epsilon(0.01));
}

TEST_CASE("linear-term equivalence between Stratonovich and Ito actions") {
  DiffusionSpec spec = wiener_spec();
  const TimeGrid grid{0, 1, 400};
  const auto ens = sample_rotated_wiener(spec, grid, 1, 8000, {110});
  RealPathEnsembleView view;
  view.grid = grid;
  view.dim = 1;
  view.n_paths = ens.n_paths;
  view.x = ens.w.data();

  LagrangianSpec lin;
  lin.mass = 1e-12;  // kinetic part off: only the A-term remains
  lin.charge = 1.0;
  lin.potential.vector = [](const double* x, double, double* out) {
    out[0] = std::sin(x[0]);
  };
  lin.potential.vector_jacobian = [](const double* x, double, double* out) {
    out[0] = std::cos(x[0]);
  };

  lin.kind = LagrangianKind::Stratonovich;
  const auto strat = stratonovich_action(view, lin);
  lin.kind = LagrangianKind::ItoForward;
  const auto fwd = ito_action_finite(view, lin);
  lin.kind = LagrangianKind::ItoBackward;
  const auto bwd = ito_action_finite(view, lin);

  CHECK(std::fabs(strat.value - fwd.value) <
        3.0 * (strat.std_error + fwd.std_error));
  CHECK(std::fabs(strat.value - bwd.value) <
        3.0 * (strat.std_error + bwd.std_error));
}

TEST_CASE("L-infinity estimator is finite and centered for driftless noise") {
  DiffusionSpec spec = wiener_spec();
  const TimeGrid grid{0, 1, 200};
  const auto ens = sample_rotated_wiener(spec, grid, 1, 4000, {111});
  RealPathEnsembleView view;
  view.grid = grid;
  view.dim = 1;
  view.n_paths = ens.n_paths;
  view.x = ens.w.data();
  LagrangianSpec lag;
  const auto est = l_infinity_estimator(view, lag);
  CHECK(std::isfinite(est.value));
  CHECK(std::fabs(est.value) < 4.0 * est.std_error);
}

TEST_CASE("action errors") {
  std::vector<double> storage{0.0, 1.0};
  RealPathEnsembleView view;
  view.grid = TimeGrid{0, 1, 1};
  view.dim = 1;
  view.n_paths = 1;
  view.x = storage.data();
  LagrangianSpec lag;
  CHECK_THROWS_AS(stratonovich_action(view, lag), Error);
  lag.kind = LagrangianKind::Stratonovich;
  CHECK_THROWS_AS(ito_action_finite(view, lag), Error);
}
