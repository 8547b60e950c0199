#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "stomech/errors.hpp"

namespace stomech {

using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846264338327950288;

// Wrap an angle into (-pi, pi].
double wrap_angle(double phi);

// e^{i angle} with components snapped to exact 0/±1 at multiples of pi/2, so
// degenerate projections (e.g. Re M at phi = pi) vanish identically rather
// than to rounding error.
Complex unit_phase(double angle);

// Physical parameter block governing every module. The diffusion parameter is
// alpha = |alpha| e^{i phi}; phi and |alpha| are stored separately because
// phi = pi with |alpha| > 0 is a meaningful degenerate case (the real noise
// projection vanishes) that a single complex number would obscure.
struct DiffusionSpec {
  double alpha_mag = 1.0;  // |alpha| >= 0, dimensionless
  double phi = 0.0;        // in (-pi, pi]
  double mass = 1.0;       // > 0
  double hbar = 1.0;       // > 0
  double charge = 0.0;

  Complex alpha() const {
    return alpha_mag * Complex(std::cos(phi), std::sin(phi));
  }

  // Variance rate of the underlying real Wiener process W, where the complex
  // martingale is M = e^{i phi/2} W:  Var[dW] = (|alpha| hbar / m) dt.
  double wiener_rate() const { return alpha_mag * hbar / mass; }

  // Variance rate of Re M:  s = (|alpha| hbar / 2m)(1 + cos phi).
  double real_noise_rate() const {
    return 0.5 * wiener_rate() * (1.0 + std::cos(phi));
  }

  // Variance rate of Im M:  (|alpha| hbar / 2m)(1 - cos phi).
  double imag_noise_rate() const {
    return 0.5 * wiener_rate() * (1.0 - std::cos(phi));
  }
};

enum class Regime { Classical, Brownian, Quantum, Intermediate };

const char* to_string(Regime r);

// Classify: |alpha| = 0 -> classical; alpha real -> Brownian;
// alpha imaginary -> quantum; anything else -> intermediate.
Regime regime_of(const DiffusionSpec& spec);

// Validates and normalizes (phi wrapped into (-pi, pi]).
// Throws: NonPositiveMass, NegativeAlphaMag, NonFiniteField.
DiffusionSpec validate_spec(DiffusionSpec spec);

// Time reversal T(alpha) = -alpha: phi -> phi - pi wrapped; involutive.
DiffusionSpec time_reverse(DiffusionSpec spec);

// Uniform discretization of [t0, tf].
struct TimeGrid {
  double t0 = 0.0;
  double tf = 1.0;
  int n_steps = 1;

  double dt() const { return (tf - t0) / n_steps; }
  double time(int k) const { return t0 + k * dt(); }
  double duration() const { return tf - t0; }
};

// Throws ZeroStepGrid on tf <= t0 or n_steps < 1.
TimeGrid validate_grid(TimeGrid grid);

struct AxisSpec {
  double min = 0.0;
  double max = 1.0;
  int n_points = 8;

  double spacing() const { return (max - min) / (n_points - 1); }
  double coord(int i) const { return min + i * spacing(); }
};

// Uniform 1d or 2d spatial grid (node-based, endpoints included).
struct SpaceGrid {
  int dim = 1;
  AxisSpec axis[2];

  static SpaceGrid make_1d(double min, double max, int n_points) {
    SpaceGrid g;
    g.dim = 1;
    g.axis[0] = {min, max, n_points};
    return g;
  }
  static SpaceGrid make_2d(AxisSpec x, AxisSpec y) {
    SpaceGrid g;
    g.dim = 2;
    g.axis[0] = x;
    g.axis[1] = y;
    return g;
  }

  int64_t total_points() const {
    int64_t n = axis[0].n_points;
    if (dim == 2) n *= axis[1].n_points;
    return n;
  }
  // row-major: index = ix * ny + iy in 2d
  int64_t index(int ix, int iy = 0) const {
    return dim == 1 ? ix : static_cast<int64_t>(ix) * axis[1].n_points + iy;
  }
  bool same_as(const SpaceGrid& o) const;
};

// Throws UnsupportedDim / ZeroStepGrid / OverflowingEnsembleSize analogs for
// malformed grids; memory cap keeps accidental huge grids from allocating.
SpaceGrid validate_grid(SpaceGrid grid, int64_t max_points = (int64_t{1} << 24));

// Deterministic randomness contract: path k of an ensemble draws from the
// substream (master_seed, k), so path k is bit-identical for any ensemble
// size and any thread count. Algorithm: xoshiro256++ seeded via splitmix64.
struct SeedSpec {
  uint64_t master_seed = 0;

  static constexpr const char* kAlgorithm = "xoshiro256++/splitmix64/box-muller";
};

}  // namespace stomech
