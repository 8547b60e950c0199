#include <doctest.h>

#include <cmath>
#include <vector>

#include "stomech/noise.hpp"
#include "stomech/rng.hpp"

using namespace stomech;
using namespace stomech::noise;

namespace {

DiffusionSpec make_spec(double phi, double alpha_mag = 1.0) {
  DiffusionSpec s;
  s.alpha_mag = alpha_mag;
  s.phi = phi;
  return s;
}

// endpoint variance / covariance of a projection, straight from the data
void endpoint_stats(const ComplexPathEnsemble& ens, int comp, double& var_re,
                    double& var_im, double& cov) {
  double mr = 0, mi = 0;
  const int last = ens.n_steps();
  for (int p = 0; p < ens.n_paths; ++p) {
    const Complex z = ens.m(p, last, comp);
    mr += z.real();
    mi += z.imag();
  }
  mr /= ens.n_paths;
  mi /= ens.n_paths;
  var_re = var_im = cov = 0;
  for (int p = 0; p < ens.n_paths; ++p) {
    const Complex z = ens.m(p, last, comp);
    var_re += (z.real() - mr) * (z.real() - mr);
    var_im += (z.imag() - mi) * (z.imag() - mi);
    cov += (z.real() - mr) * (z.imag() - mi);
  }
  var_re /= ens.n_paths - 1;
  var_im /= ens.n_paths - 1;
  cov /= ens.n_paths - 1;
}

}  // namespace

TEST_CASE("paths start at zero and carry the exact ray structure") {
  const auto ens =
      sample_rotated_wiener(make_spec(0.3 * kPi), TimeGrid{0, 1, 100}, 2, 20, {7});
  for (int p = 0; p < ens.n_paths; ++p)
    for (int c = 0; c < 2; ++c) CHECK(ens.m(p, 0, c) == Complex(0.0, 0.0));
  // M is stored as rotation * real path: the degenerate structure is exact
  // by representation
  const Complex rot = ens.rotation();
  for (int p = 0; p < ens.n_paths; ++p)
    for (int k = 0; k <= 100; k += 17)
      for (int c = 0; c < 2; ++c)
        CHECK(ens.m(p, k, c) == rot * ens.wiener(p, k, c));
}

TEST_CASE("projection variances match (|alpha| hbar / 2m)(1 +/- cos phi) t") {
  const int n_paths = 20000;
  const TimeGrid grid{0, 1, 200};
  for (double phi : {0.0, 0.25 * kPi, 0.5 * kPi, 0.75 * kPi, kPi}) {
    const auto ens = sample_rotated_wiener(make_spec(phi), grid, 1, n_paths,
                                           {987654321});
    double var_re, var_im, cov;
    endpoint_stats(ens, 0, var_re, var_im, cov);
    const double expect_re = 0.5 * (1.0 + std::cos(phi));
    const double expect_im = 0.5 * (1.0 - std::cos(phi));
    const double expect_cov = 0.5 * std::sin(phi);
    // SE of a Gaussian variance estimate: var * sqrt(2/N)
    const double band = 3.0 * std::sqrt(2.0 / n_paths);
    CHECK(std::fabs(var_re - expect_re) <= band * std::max(0.05, expect_re));
    CHECK(std::fabs(var_im - expect_im) <= band * std::max(0.05, expect_im));
    CHECK(std::fabs(cov - expect_cov) <= band * std::max(0.05, 0.5));
  }
}

TEST_CASE("phi = pi kills the real projection identically") {
  const auto ens =
      sample_rotated_wiener(make_spec(kPi), TimeGrid{0, 1, 50}, 1, 10, {3});
  for (int p = 0; p < ens.n_paths; ++p)
    for (int k = 0; k <= 50; ++k) CHECK(ens.m(p, k, 0).real() == 0.0);
}

TEST_CASE("realized_qv matches the structure relation") {
  const TimeGrid grid{0, 1, 500};
  const int n_paths = 4000;

  SUBCASE("diagonal, quantum phase: total -> i hbar/m within 3 se") {
    const auto ens =
        sample_rotated_wiener(make_spec(0.5 * kPi), grid, 2, n_paths, {11});
    const auto qv = realized_qv(ens, 0, 0, false);
    // independent oracle: e^{i phi} * mean of sum dW^2
    double mean = 0.0;
    std::vector<double> totals(ens.n_paths);
    for (int p = 0; p < ens.n_paths; ++p) {
      double q = 0;
      for (int k = 0; k < 500; ++k) {
        const double dw = ens.wiener(p, k + 1, 0) - ens.wiener(p, k, 0);
        q += dw * dw;
      }
      totals[p] = q;
      mean += q;
    }
    mean /= ens.n_paths;
    const Complex oracle = ens.rotation() * ens.rotation() * mean;
    CHECK(std::abs(qv.total - oracle) < 1e-12);

    double var = 0;
    for (double q : totals) var += (q - mean) * (q - mean);
    var /= (ens.n_paths - 1);
    const double se = std::sqrt(var / ens.n_paths);
    CHECK(std::abs(qv.total - Complex(0.0, 1.0)) < 3.0 * se + 1e-6);
  }

  SUBCASE("off-diagonal components vanish") {
    const auto ens =
        sample_rotated_wiener(make_spec(0.5 * kPi), grid, 2, n_paths, {12});
    const auto qv = realized_qv(ens, 0, 1, false);
    // cross increments are independent; loose band from the step variance
    CHECK(std::abs(qv.total) < 3.0 * std::sqrt(grid.dt() / n_paths) + 1e-3);
  }

  SUBCASE("conjugated diagonal gives |alpha| t / m") {
    const auto ens =
        sample_rotated_wiener(make_spec(0.75 * kPi), grid, 1, n_paths, {13});
    const auto qv = realized_qv(ens, 0, 0, true);
    CHECK(qv.total.imag() == 0.0);
    CHECK(qv.total.real() == doctest::Approx(1.0).epsilon(0.05));
  }

  SUBCASE("series is cumulative and symmetric in (a,b)") {
    const auto ens =
        sample_rotated_wiener(make_spec(0.2), grid, 2, 50, {14});
    const auto ab = realized_qv(ens, 0, 1, false);
    const auto ba = realized_qv(ens, 1, 0, false);
    for (size_t k = 0; k < ab.series.size(); ++k)
      CHECK(std::abs(ab.series[k] - ba.series[k]) < 1e-15);
    // additivity over disjoint intervals is built into the cumulative series
    const Complex mid = ab.series[250];
    const Complex whole = ab.series[500];
    CHECK(std::abs((whole - mid) + mid - whole) < 1e-18);
  }

  SUBCASE("index bounds") {
    const auto ens = sample_rotated_wiener(make_spec(0.0), grid, 1, 5, {15});
    CHECK_THROWS_AS(realized_qv(ens, 0, 1, false), Error);
  }
}

TEST_CASE("rotated QV equals e^{i phi} times the real QV pathwise") {
  const auto ens = sample_rotated_wiener(make_spec(0.6), TimeGrid{0, 1, 100},
                                         1, 100, {77});
  const auto complex_qv = realized_qv(ens, 0, 0, false);
  const auto conj_qv = realized_qv(ens, 0, 0, true);  // the real QV
  const Complex phase = unit_phase(ens.spec.phi);
  CHECK(std::abs(complex_qv.total - phase * conj_qv.total) < 1e-12);
}

TEST_CASE("empirical moments: odd vanish, quartic obeys Isserlis") {
  const TimeGrid grid{0, 1, 100};
  const auto ens = sample_rotated_wiener(make_spec(0.0), grid, 2, 50000, {21});

  const auto odd = empirical_moment(ens, {{0, 3}}, 1.0);
  CHECK(std::abs(odd.value) < 3.0 * odd.std_error);

  const auto quartic = empirical_moment(ens, {{0, 4}}, 1.0);
  CHECK(quartic.value.real() == doctest::Approx(3.0).epsilon(0.03));

  const auto cross = empirical_moment(ens, {{0, 1}, {1, 1}}, 1.0);
  CHECK(std::abs(cross.value) < 3.0 * cross.std_error);

  CHECK_THROWS_AS(empirical_moment(ens, {{0, 9}}, 1.0), Error);
}

TEST_CASE("fourth-moment ratio approaches 3 for the real projection") {
  const auto ens =
      sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 50}, 1, 50000, {22});
  const auto m2 = empirical_moment(ens, {{0, 2}}, 1.0);
  const auto m4 = empirical_moment(ens, {{0, 4}}, 1.0);
  const double ratio = m4.value.real() / (m2.value.real() * m2.value.real());
  CHECK(ratio == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("levy diagnostics pass for a genuine rotated Wiener ensemble") {
  const auto ens = sample_rotated_wiener(make_spec(0.5 * kPi),
                                         TimeGrid{0, 1, 100}, 1, 2000, {31});
  const auto rep = levy_diagnostics(ens);
  CHECK(rep.mean_pass);
  CHECK(rep.correlation_pass);
  CHECK(rep.stationarity_pass);
  CHECK(rep.qv_determinism_pass);
  CHECK(rep.all_pass());
}

TEST_CASE("levy diagnostics detect an injected drift") {
  auto ens = sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 100}, 1,
                                   2000, {32});
  // drift 0.5 t on the real projection
  for (int p = 0; p < ens.n_paths; ++p)
    for (int k = 0; k <= 100; ++k)
      ens.w[ens.offset(p, k, 0)] += 0.5 * ens.grid.time(k);
  const auto rep = levy_diagnostics(ens);
  CHECK_FALSE(rep.mean_pass);
}

TEST_CASE("levy diagnostics detect AR(1) increment correlation") {
  auto ens = sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 100}, 1,
                                   2000, {33});
  // rebuild paths from correlated increments: e_k = 0.3 e_{k-1} + w_k
  const double rho = 0.3;
  for (int p = 0; p < ens.n_paths; ++p) {
    double prev = 0.0;
    double cum = 0.0;
    std::vector<double> orig(101);
    for (int k = 0; k <= 100; ++k) orig[k] = ens.wiener(p, k, 0);
    for (int k = 1; k <= 100; ++k) {
      const double w = orig[k] - orig[k - 1];
      const double e = rho * prev + w;
      prev = e;
      cum += e;
      ens.w[ens.offset(p, k, 0)] = cum;
    }
  }
  const auto rep = levy_diagnostics(ens);
  CHECK_FALSE(rep.correlation_pass);
}

TEST_CASE("levy diagnostics require a minimum ensemble") {
  const auto ens =
      sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 10}, 1, 10, {34});
  CHECK_THROWS_AS(levy_diagnostics(ens), Error);
}

TEST_CASE("forward and reversed increments are equal in distribution") {
  const auto ens = sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 100},
                                         1, 2000, {35});
  const auto rep = two_sided_increment_check(ens);
  CHECK(rep.pass);
}

TEST_CASE("commutator as QV limit: mean dM^2/dt equals alpha hbar / m") {
  const auto ens = sample_rotated_wiener(make_spec(0.5 * kPi),
                                         TimeGrid{0, 1, 400}, 1, 2000, {36});
  Complex acc(0, 0);
  const Complex ph = ens.rotation() * ens.rotation();
  for (int p = 0; p < ens.n_paths; ++p)
    for (int k = 0; k < 400; ++k) {
      const double dw = ens.wiener(p, k + 1, 0) - ens.wiener(p, k, 0);
      acc += ph * dw * dw / ens.grid.dt();
    }
  acc /= static_cast<double>(ens.n_paths) * 400;
  CHECK(std::abs(acc - Complex(0, 1)) < 0.02);
}

TEST_CASE("sampling guards") {
  SampleOptions opt;
  opt.beta = 0.5;
  CHECK_THROWS_AS(sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 10}, 1,
                                        10, {1}, opt),
                  Error);
  try {
    sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 10}, 1, 10, {1}, opt);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::JumpProcessRequested);
  }
  CHECK_THROWS_AS(
      sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 0, 10}, 1, 10, {1}),
      Error);
  SampleOptions tiny;
  tiny.max_bytes = 1024;
  CHECK_THROWS_AS(sample_rotated_wiener(make_spec(0.0), TimeGrid{0, 1, 1000},
                                        3, 1000, {1}, tiny),
                  Error);
}

TEST_CASE("streaming iteration reproduces the materialized ensemble") {
  const DiffusionSpec spec = make_spec(0.4);
  const TimeGrid grid{0, 1, 64};
  const auto ens = sample_rotated_wiener(spec, grid, 2, 32, {55});
  std::vector<double> collected(ens.w.size());
  for_each_path(spec, grid, 2, 32, {55}, [&](int p, const double* w) {
    std::copy(w, w + 65 * 2, collected.begin() + static_cast<int64_t>(p) * 65 * 2);
  });
  CHECK(collected == ens.w);

  std::vector<double> serial(ens.w.size());
  for_each_path_serial(spec, grid, 2, 32, {55}, [&](int p, const double* w) {
    std::copy(w, w + 65 * 2, serial.begin() + static_cast<int64_t>(p) * 65 * 2);
  });
  CHECK(serial == ens.w);
}

TEST_CASE("ensemble summary agrees with direct estimates") {
  const DiffusionSpec spec = make_spec(0.5 * kPi);
  const TimeGrid grid{0, 1, 100};
  const auto ens = sample_rotated_wiener(spec, grid, 2, 2000, {66});
  const auto sum = summarize_rotated_wiener(spec, grid, 2, 2000, {66});
  double var_re, var_im, cov;
  endpoint_stats(ens, 0, var_re, var_im, cov);
  CHECK(sum.var_re[0] == doctest::Approx(var_re).epsilon(1e-12));
  CHECK(sum.var_im[0] == doctest::Approx(var_im).epsilon(1e-12));
  CHECK(sum.cov_re_im[0] == doctest::Approx(cov).epsilon(1e-12));
  const auto qv = realized_qv(ens, 1, 1, false);
  CHECK(std::abs(sum.qv[3] - qv.total) < 1e-12);
}
