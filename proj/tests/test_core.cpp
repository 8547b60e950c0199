#include <doctest.h>

#include <cmath>

#include "stomech/core.hpp"
#include "stomech/noise.hpp"
#include "stomech/rng.hpp"

using namespace stomech;

TEST_CASE("validate_spec normalizes and classifies regimes") {
  DiffusionSpec brownian{1.0, 0.0, 1.0, 1.0, 0.0};
  CHECK(regime_of(validate_spec(brownian)) == Regime::Brownian);

  DiffusionSpec quantum{1.0, 0.5 * kPi, 1.0, 1.0, 0.0};
  CHECK(regime_of(validate_spec(quantum)) == Regime::Quantum);

  DiffusionSpec classical{0.0, 1.2345, 1.0, 1.0, 0.0};
  CHECK(regime_of(validate_spec(classical)) == Regime::Classical);

  DiffusionSpec mid{0.7, 0.25 * kPi, 2.0, 1.0, 0.0};
  CHECK(regime_of(validate_spec(mid)) == Regime::Intermediate);
}

TEST_CASE("validate_spec rejects bad fields") {
  DiffusionSpec s;
  s.mass = -1.0;
  CHECK_THROWS_AS(validate_spec(s), Error);
  try {
    validate_spec(s);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveMass);
  }
  s = DiffusionSpec{};
  s.alpha_mag = -0.5;
  try {
    validate_spec(s);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeAlphaMag);
  }
  s = DiffusionSpec{};
  s.phi = std::nan("");
  try {
    validate_spec(s);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteField);
  }
}

TEST_CASE("validate_spec wraps phi and is idempotent") {
  DiffusionSpec s;
  s.phi = 3.0 * kPi;  // == pi after wrapping
  const DiffusionSpec v = validate_spec(s);
  CHECK(v.phi == doctest::Approx(kPi).epsilon(1e-12));
  const DiffusionSpec v2 = validate_spec(v);
  CHECK(v2.phi == v.phi);
}

TEST_CASE("time_reverse flips alpha and is an involution") {
  DiffusionSpec s;
  s.phi = 0.5 * kPi;
  CHECK(time_reverse(s).phi == doctest::Approx(-0.5 * kPi));

  s.phi = 0.0;
  CHECK(time_reverse(s).phi == doctest::Approx(kPi));

  // involution over a sweep of angles (wrapped representation)
  for (int i = 0; i < 100; ++i) {
    const double phi = -kPi + (2.0 * kPi) * (i + 0.5) / 100.0;
    s.phi = phi;
    const DiffusionSpec twice = time_reverse(time_reverse(s));
    CHECK(twice.phi == doctest::Approx(phi).epsilon(1e-12));
    CHECK(twice.alpha_mag == s.alpha_mag);
    CHECK(twice.mass == s.mass);
  }

  // alpha itself is negated: T(alpha) = -alpha
  s.phi = 0.3;
  s.alpha_mag = 0.8;
  const Complex before = validate_spec(s).alpha();
  const Complex after = validate_spec(time_reverse(s)).alpha();
  CHECK(std::abs(after + before) < 1e-12);
}

TEST_CASE("grids validate") {
  CHECK_THROWS_AS(validate_grid(TimeGrid{1.0, 1.0, 10}), Error);
  CHECK_THROWS_AS(validate_grid(TimeGrid{0.0, 1.0, 0}), Error);
  CHECK(validate_grid(TimeGrid{0.0, 1.0, 4}).dt() == doctest::Approx(0.25));

  SpaceGrid g = SpaceGrid::make_1d(0.0, 1.0, 4);  // too few points
  CHECK_THROWS_AS(validate_grid(g), Error);
  g = SpaceGrid::make_1d(0.0, 1.0, 16);
  CHECK(validate_grid(g).axis[0].spacing() == doctest::Approx(1.0 / 15.0));
}

TEST_CASE("unit_phase snaps right-angle values exactly") {
  CHECK(unit_phase(0.5 * kPi).real() == 0.0);
  CHECK(unit_phase(0.5 * kPi).imag() == 1.0);
  CHECK(unit_phase(kPi).real() == -1.0);
  CHECK(unit_phase(kPi).imag() == 0.0);
}

TEST_CASE("substreams are deterministic and order-independent") {
  Xoshiro256pp a(42, 7);
  Xoshiro256pp b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  // different substreams differ
  Xoshiro256pp c(42, 8);
  int same = 0;
  Xoshiro256pp a2(42, 7);
  for (int i = 0; i < 64; ++i)
    if (a2.next() == c.next()) ++same;
  CHECK(same == 0);
}

TEST_CASE("seed determinism: path k independent of ensemble size") {
  DiffusionSpec spec;
  spec.phi = 0.25 * kPi;
  TimeGrid grid{0.0, 1.0, 50};
  const auto small = noise::sample_rotated_wiener(spec, grid, 2, 5, {123});
  const auto big = noise::sample_rotated_wiener(spec, grid, 2, 40, {123});
  for (int k = 0; k <= 50; ++k)
    for (int c = 0; c < 2; ++c)
      CHECK(small.wiener(3, k, c) == big.wiener(3, k, c));
}
