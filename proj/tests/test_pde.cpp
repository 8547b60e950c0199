#include <doctest.h>

#include <cmath>
#include <vector>

#include "stomech/pde.hpp"

using namespace stomech;
using namespace stomech::pde;

namespace {

DiffusionSpec heat_spec() {
  DiffusionSpec s;
  s.phi = 0.0;
  return s;
}

DiffusionSpec quantum_spec() {
  DiffusionSpec s;
  s.phi = 0.5 * kPi;
  return s;
}

std::vector<Complex> first_slice(const WaveField& f) {
  return std::vector<Complex>(f.slice(0), f.slice(0) + f.grid.total_points());
}

}  // namespace

TEST_CASE("heat limit: solver matches the analytic kernel to 1e-3") {
  const SpaceGrid g = SpaceGrid::make_1d(-6, 6, 512);
  const TimeGrid tg{0.25, 0.75, 5000};  // dt = 1e-4, duration 0.5
  ReferenceParams rp;
  const WaveField ref = analytic_reference(ReferenceFamily::HeatKernel, rp,
                                           heat_spec(), g, {0.25, 0.75});
  SolveOptions opt;
  opt.store_stride = 5000;
  const WaveField sol = solve_complex_diffusion(
      first_slice(ref), heat_spec(), {}, g, tg, FieldDirection::Forward, opt);
  double peak = 0, err = 0;
  const Complex* expect = ref.slice(1);
  const Complex* got = sol.slice(sol.n_slices() - 1);
  for (int i = 0; i < 512; ++i) {
    peak = std::max(peak, std::abs(expect[i]));
    err = std::max(err, std::abs(got[i] - expect[i]));
  }
  CHECK(err / peak < 1e-3);

  // positivity is preserved for a nonnegative initial condition
  for (int i = 0; i < 512; ++i) CHECK(got[i].real() > -1e-12);
}

TEST_CASE("heat kernel value and variance match the closed form") {
  // at x = 0, t - t0 = 1, rate 1: value (2 pi)^{-1/2}, variance (hbar/m) t
  const SpaceGrid g = SpaceGrid::make_1d(-10, 10, 1001);
  const WaveField ref = analytic_reference(ReferenceFamily::HeatKernel, {},
                                           heat_spec(), g, {1.0});
  const Complex* psi = ref.slice(0);
  CHECK(psi[500].real() ==
        doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-10));
  double ex2 = 0;
  for (int i = 0; i < 1001; ++i)
    ex2 += g.axis[0].coord(i) * g.axis[0].coord(i) * psi[i].real() *
           ref.weight(i);
  CHECK(ex2 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("plane wave rotates at omega = hbar k^2 / 2m with flat amplitude") {
  const int n = 512;
  const SpaceGrid g = SpaceGrid::make_1d(0.0, 2.0 * kPi * (n - 1.0) / n, n);
  const double k = 3.0, omega = 0.5 * k * k, T = 1.0;
  std::vector<Complex> psi0(n);
  for (int i = 0; i < n; ++i)
    psi0[i] = std::exp(Complex(0, k * g.axis[0].coord(i)));
  SolveOptions opt;
  opt.boundary = BoundaryKind::Periodic;
  opt.store_stride = 4000;
  const WaveField sol = solve_complex_diffusion(
      psi0, quantum_spec(), {}, g, TimeGrid{0, T, 4000},
      FieldDirection::Forward, opt);
  const Complex* got = sol.slice(sol.n_slices() - 1);
  for (int i = 0; i < n; i += 37) {
    const Complex expect = std::exp(Complex(0, k * g.axis[0].coord(i) - omega * T));
    CHECK(std::abs(got[i] - expect) < 2e-3);
    CHECK(std::abs(std::abs(got[i]) - 1.0) < 1e-10);
  }
}

TEST_CASE("quantum norm is conserved to solver roundoff") {
  const SpaceGrid g = SpaceGrid::make_1d(-8, 8, 256);
  ReferenceParams rp;
  rp.sigma0 = 0.7;
  rp.k0 = 2.0;
  const WaveField ref = analytic_reference(ReferenceFamily::FreeGaussianPacket,
                                           rp, quantum_spec(), g, {0.0});
  SolveOptions opt;
  opt.store_stride = 100;
  const WaveField sol = solve_complex_diffusion(
      first_slice(ref), quantum_spec(), {}, g, TimeGrid{0, 0.5, 1000},
      FieldDirection::Forward, opt);
  const double n0 = sol.norm_l2(0);
  for (int s = 1; s < sol.n_slices(); ++s)
    CHECK(std::fabs(sol.norm_l2(s) - n0) / n0 < 1e-8);
}

TEST_CASE("free packet: solver sigma_x tracks the analytic spreading law") {
  const double sigma0 = 0.5;
  const double t_spread = 2.0 * sigma0 * sigma0;  // m = hbar = 1
  const SpaceGrid g = SpaceGrid::make_1d(-8, 8, 1024);
  ReferenceParams rp;
  rp.sigma0 = sigma0;
  rp.k0 = 1.0;
  const WaveField ref = analytic_reference(ReferenceFamily::FreeGaussianPacket,
                                           rp, quantum_spec(), g, {0.0});
  SolveOptions opt;
  opt.store_stride = 200;
  const WaveField sol = solve_complex_diffusion(
      first_slice(ref), quantum_spec(), {}, g, TimeGrid{0, t_spread, 2000},
      FieldDirection::Forward, opt);
  for (int s = 0; s < sol.n_slices(); ++s) {
    const auto rho = born_density(sol, s);
    double ex = 0, ex2 = 0;
    for (int i = 0; i < 1024; ++i) {
      const double x = g.axis[0].coord(i);
      ex += x * rho[i] * sol.weight(i);
      ex2 += x * x * rho[i] * sol.weight(i);
    }
    const double sig = std::sqrt(ex2 - ex * ex);
    const double t = sol.times[s];
    const double analytic =
        sigma0 * std::sqrt(1.0 + std::pow(t / (2.0 * sigma0 * sigma0), 2));
    CHECK(std::fabs(sig - analytic) / analytic < 0.005);
  }
}

TEST_CASE("harmonic ground state density is stationary to 1e-6 per period") {
  const double omega = 1.0;
  const double T = 2.0 * kPi / omega;
  const SpaceGrid g = SpaceGrid::make_1d(-8, 8, 1024);
  PotentialSpec pot;
  pot.scalar = [omega](const double* x, double) {
    return 0.5 * omega * omega * x[0] * x[0];
  };
  ReferenceParams rp;
  rp.omega = omega;
  const WaveField ref = analytic_reference(ReferenceFamily::HarmonicGround, rp,
                                           quantum_spec(), g, {0.0});
  SolveOptions opt;
  opt.store_stride = 4000;
  const WaveField sol = solve_complex_diffusion(
      first_slice(ref), quantum_spec(), pot, g, TimeGrid{0, T, 4000},
      FieldDirection::Forward, opt);
  const auto rho0 = born_density(sol, 0);
  const auto rho1 = born_density(sol, sol.n_slices() - 1);
  double peak = 0, err = 0;
  for (int i = 0; i < 1024; ++i) {
    peak = std::max(peak, rho0[i]);
    err = std::max(err, std::fabs(rho1[i] - rho0[i]));
  }
  CHECK(err / peak < 1e-6);
}

TEST_CASE("harmonic coherent state solves the trap equation") {
  // verified against the solver itself: evolve the closed form and compare
  const double omega = 1.3, a0 = 0.8;
  const SpaceGrid g = SpaceGrid::make_1d(-9, 9, 768);
  PotentialSpec pot;
  pot.scalar = [omega](const double* x, double) {
    return 0.5 * omega * omega * x[0] * x[0];
  };
  ReferenceParams rp;
  rp.omega = omega;
  rp.x0 = a0;
  const double T = 0.9;
  const WaveField ref = analytic_reference(ReferenceFamily::HarmonicCoherent,
                                           rp, quantum_spec(), g, {0.0, T});
  SolveOptions opt;
  opt.store_stride = 3000;
  const WaveField sol = solve_complex_diffusion(
      first_slice(ref), quantum_spec(), pot, g, TimeGrid{0, T, 3000},
      FieldDirection::Forward, opt);
  double err = 0;
  const Complex* a = sol.slice(sol.n_slices() - 1);
  const Complex* b = ref.slice(1);
  for (int i = 0; i < 768; ++i) err = std::max(err, std::abs(a[i] - b[i]));
  CHECK(err < 5e-4);
}

TEST_CASE("double slit reference develops the predicted fringe spacing") {
  // far-field configuration: tau = t / (2 sigma0^2) = 25
  const double sep = 4.0, sigma0 = 0.2, t = 2.0;
  const SpaceGrid g = SpaceGrid::make_1d(-16, 16, 4097);  // x = 0 on a node
  ReferenceParams rp;
  rp.sigma0 = sigma0;
  rp.separation = sep;
  const WaveField f = analytic_reference(
      ReferenceFamily::DoubleSlitSuperposition, rp, quantum_spec(), g, {t});
  const auto rho = born_density(f, 0);
  std::vector<double> peaks;
  double rho_max = 0;
  for (double r : rho) rho_max = std::max(rho_max, r);
  for (int i = 1; i + 1 < 4097; ++i)
    if (rho[i] > rho[i - 1] && rho[i] > rho[i + 1] && rho[i] > 0.2 * rho_max)
      peaks.push_back(g.axis[0].coord(i));
  REQUIRE(peaks.size() >= 5);
  // central fringe sits at the symmetry point
  double nearest_zero = 1e9;
  for (double p : peaks) nearest_zero = std::min(nearest_zero, std::fabs(p));
  CHECK(nearest_zero < 0.05);
  const double expect = 2.0 * kPi * t / sep;  // hbar = m = 1
  const double mean_spacing = (peaks.back() - peaks.front()) / (peaks.size() - 1);
  CHECK(mean_spacing == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("gauge shift of the scalar potential leaves densities unchanged") {
  const SpaceGrid g = SpaceGrid::make_1d(-6, 6, 256);
  ReferenceParams rp;
  rp.sigma0 = 0.6;
  for (auto spec : {quantum_spec(), heat_spec()}) {
    const WaveField init =
        spec.phi == 0.0
            ? analytic_reference(ReferenceFamily::HeatKernel,
                                 ReferenceParams{.t_origin = -0.2}, spec, g, {0.0})
            : analytic_reference(ReferenceFamily::FreeGaussianPacket, rp, spec,
                                 g, {0.0});
    PotentialSpec shifted;
    shifted.scalar = [](const double*, double) { return 0.7; };
    // the CN gauge defect scales as dt^2; dt = 2e-5 puts it below 5e-11
    SolveOptions opt;
    opt.store_stride = 10000;
    const WaveField plain = solve_complex_diffusion(
        first_slice(init), spec, {}, g, TimeGrid{0, 0.2, 10000},
        FieldDirection::Forward, opt);
    const WaveField gauged = solve_complex_diffusion(
        first_slice(init), spec, shifted, g, TimeGrid{0, 0.2, 10000},
        FieldDirection::Forward, opt);
    const auto rho_a = born_density(plain, plain.n_slices() - 1);
    const auto rho_b = born_density(gauged, gauged.n_slices() - 1);
    for (int i = 0; i < 256; ++i) CHECK(std::fabs(rho_a[i] - rho_b[i]) < 1e-10);
  }
}

TEST_CASE("sign-equivalent fields give identical densities") {
  const SpaceGrid g = SpaceGrid::make_1d(-6, 6, 128);
  ReferenceParams rp;
  rp.sigma0 = 0.5;
  rp.k0 = 1.0;
  WaveField f = analytic_reference(ReferenceFamily::FreeGaussianPacket, rp,
                                   quantum_spec(), g, {0.3});
  WaveField neg = f;
  for (auto& z : neg.values) z = -z;
  const auto rho_a = born_density(f, 0);
  const auto rho_b = born_density(neg, 0);
  for (int i = 0; i < 128; ++i) CHECK(std::fabs(rho_a[i] - rho_b[i]) < 1e-10);
}

TEST_CASE("backward direction solves the time-reversed equation") {
  // for q = 0 the backward field is the forward one mirrored in time
  const SpaceGrid g = SpaceGrid::make_1d(-6, 6, 256);
  ReferenceParams rp;
  rp.sigma0 = 0.7;
  const WaveField init = analytic_reference(ReferenceFamily::FreeGaussianPacket,
                                            rp, quantum_spec(), g, {0.0});
  SolveOptions opt;
  opt.store_stride = 50;
  const TimeGrid tg{0, 0.5, 500};
  const WaveField fwd = solve_complex_diffusion(
      first_slice(init), quantum_spec(), {}, g, tg, FieldDirection::Forward, opt);
  const WaveField bwd = solve_complex_diffusion(
      first_slice(init), quantum_spec(), {}, g, tg, FieldDirection::Backward, opt);
  REQUIRE(fwd.n_slices() == bwd.n_slices());
  const int ns = fwd.n_slices();
  for (int s = 0; s < ns; ++s) {
    CHECK(bwd.times[s] == doctest::Approx(fwd.times[s]));
    const Complex* a = fwd.slice(s);
    const Complex* b = bwd.slice(ns - 1 - s);
    for (int i = 0; i < 256; i += 13) CHECK(std::abs(a[i] - b[i]) < 1e-10);
  }
}

TEST_CASE("hamilton-jacobi residual") {
  SUBCASE("plane wave: residual at discretization roundoff") {
    const int n = 256;
    const SpaceGrid g = SpaceGrid::make_1d(0.0, 2.0 * kPi * (n - 1.0) / n, n);
    const double k = 2.0, omega = 0.5 * k * k;
    std::vector<double> times;
    std::vector<Complex> values;
    for (int s = 0; s < 5; ++s) {
      const double t = 0.01 * s;
      times.push_back(t);
      for (int i = 0; i < n; ++i)
        values.push_back(std::exp(Complex(0, k * g.axis[0].coord(i) - omega * t)));
    }
    WaveField f;
    f.grid = g;
    f.spec = quantum_spec();
    f.direction = FieldDirection::Forward;
    f.boundary = BoundaryKind::Periodic;
    f.times = times;
    f.values = values;
    const auto rep = hamilton_jacobi_residual(f);
    CHECK(rep.max_abs < 1e-6);
  }

  SUBCASE("free packet: second-order convergence under refinement") {
    const double sigma0 = 0.6;
    ReferenceParams rp;
    rp.sigma0 = sigma0;
    rp.k0 = 1.0;
    double l2_coarse = 0, l2_fine = 0;
    for (int level = 0; level < 2; ++level) {
      const int n = level == 0 ? 200 : 400;
      const int steps = level == 0 ? 40 : 80;
      const SpaceGrid g = SpaceGrid::make_1d(-7, 7, n + 1);
      SolveOptions opt;
      const WaveField init = analytic_reference(
          ReferenceFamily::FreeGaussianPacket, rp, quantum_spec(), g, {0.1});
      const WaveField sol = solve_complex_diffusion(
          first_slice(init), quantum_spec(), {}, g, TimeGrid{0.1, 0.3, steps},
          FieldDirection::Forward, opt);
      const auto rep = hamilton_jacobi_residual(sol);
      (level == 0 ? l2_coarse : l2_fine) = rep.l2;
    }
    CHECK(l2_coarse / l2_fine >= 3.5);
  }

  SUBCASE("perturbed field raises the residual by more than 10x") {
    // grid fine enough that the discretization residual sits well under the
    // perturbation signal
    ReferenceParams rp;
    rp.sigma0 = 0.6;
    const int n = 2049;
    const SpaceGrid g = SpaceGrid::make_1d(-7, 7, n);
    const WaveField init = analytic_reference(
        ReferenceFamily::FreeGaussianPacket, rp, quantum_spec(), g, {0.1});
    const WaveField sol = solve_complex_diffusion(
        first_slice(init), quantum_spec(), {}, g, TimeGrid{0.1, 0.3, 512},
        FieldDirection::Forward, {});
    const double base = hamilton_jacobi_residual(sol).l2;
    WaveField bent = sol;
    for (int s = 0; s < bent.n_slices(); ++s)
      for (int i = 0; i < n; ++i)
        bent.slice_mut(s)[i] *= 1.0 + 0.01 * std::sin(g.axis[0].coord(i));
    CHECK(hamilton_jacobi_residual(bent).l2 > 10.0 * base);
  }
}

TEST_CASE("born density normalization and regimes") {
  const SpaceGrid g = SpaceGrid::make_1d(-5, 5, 128);

  SUBCASE("heat kernel density is the kernel itself") {
    const WaveField f = analytic_reference(ReferenceFamily::HeatKernel, {},
                                           heat_spec(), g, {1.0});
    const auto rho = born_density(f, 0);
    double total = 0;
    for (int i = 0; i < 128; ++i) {
      total += rho[i] * f.weight(i);
      CHECK(rho[i] == doctest::Approx(f.slice(0)[i].real()).epsilon(1e-6));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("constant field gives the uniform density") {
    WaveField f;
    f.grid = g;
    f.spec = quantum_spec();
    f.times = {0.0};
    f.values.assign(128, Complex(0.4, 0.3));
    const auto rho = born_density(f, 0);
    for (int i = 1; i < 128; ++i) CHECK(rho[i] == doctest::Approx(rho[0]));
  }

  SUBCASE("zero field is rejected") {
    WaveField f;
    f.grid = g;
    f.spec = quantum_spec();
    f.times = {0.0};
    f.values.assign(128, Complex(0.0, 0.0));
    CHECK_THROWS_AS(born_density(f, 0), Error);
  }
}

TEST_CASE("solver guards") {
  const SpaceGrid g = SpaceGrid::make_1d(-5, 5, 64);
  std::vector<Complex> psi0(64, Complex(1.0, 0.0));

  DiffusionSpec anti;
  anti.phi = kPi;  // Re(alpha) < 0: anti-diffusive
  CHECK_THROWS_AS(solve_complex_diffusion(psi0, anti, {}, g, TimeGrid{0, 1, 10},
                                          FieldDirection::Forward, {}),
                  Error);

  std::vector<Complex> wrong(32);
  CHECK_THROWS_AS(solve_complex_diffusion(wrong, quantum_spec(), {}, g,
                                          TimeGrid{0, 1, 10},
                                          FieldDirection::Forward, {}),
                  Error);
}

TEST_CASE("2d packet: ADI conserves the norm and matches the product form") {
  const SpaceGrid g =
      SpaceGrid::make_2d({-6, 6, 96}, {-6, 6, 96});
  ReferenceParams rp;
  rp.sigma0 = 0.7;
  rp.k0 = 1.0;
  const WaveField init = analytic_reference(ReferenceFamily::FreeGaussianPacket,
                                            rp, quantum_spec(), g, {0.0});
  const double T = 0.4;
  SolveOptions opt;
  opt.store_stride = 400;
  const WaveField sol = solve_complex_diffusion(
      first_slice(init), quantum_spec(), {}, g, TimeGrid{0, T, 400},
      FieldDirection::Forward, opt);
  CHECK(std::fabs(sol.norm_l2(sol.n_slices() - 1) - sol.norm_l2(0)) /
            sol.norm_l2(0) <
        1e-8);
  const WaveField ref = analytic_reference(ReferenceFamily::FreeGaussianPacket,
                                           rp, quantum_spec(), g, {T});
  double err = 0, peak = 0;
  const Complex* a = sol.slice(sol.n_slices() - 1);
  const Complex* b = ref.slice(0);
  for (int64_t i = 0; i < g.total_points(); ++i) {
    err = std::max(err, std::abs(a[i] - b[i]));
    peak = std::max(peak, std::abs(b[i]));
  }
  CHECK(err / peak < 5e-3);
}

TEST_CASE("analytic reference guards") {
  const SpaceGrid g = SpaceGrid::make_1d(-5, 5, 64);
  // quantum family with a real-alpha spec
  CHECK_THROWS_AS(analytic_reference(ReferenceFamily::FreeGaussianPacket, {},
                                     heat_spec(), g, {0.0}),
                  Error);
  // heat kernel with a quantum spec
  CHECK_THROWS_AS(analytic_reference(ReferenceFamily::HeatKernel, {},
                                     quantum_spec(), g, {1.0}),
                  Error);
  // double slit needs a separation
  CHECK_THROWS_AS(analytic_reference(ReferenceFamily::DoubleSlitSuperposition,
                                     {}, quantum_spec(), g, {0.5}),
                  Error);
}
