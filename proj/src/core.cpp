#include "stomech/core.hpp"

#include <cmath>

namespace stomech {

double wrap_angle(double phi) {
  double w = std::fmod(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  if (w > kPi) w -= 2.0 * kPi;
  // fmod can land exactly on -pi for inputs like -3*pi
  if (w == -kPi) w = kPi;
  return w;
}

Complex unit_phase(double angle) {
  double c = std::cos(angle);
  double s = std::sin(angle);
  const double eps = 4e-16;
  if (std::fabs(c) < eps) c = 0.0;
  if (std::fabs(s) < eps) s = 0.0;
  if (std::fabs(c - 1.0) < eps) c = 1.0;
  if (std::fabs(c + 1.0) < eps) c = -1.0;
  if (std::fabs(s - 1.0) < eps) s = 1.0;
  if (std::fabs(s + 1.0) < eps) s = -1.0;
  return Complex(c, s);
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Classical: return "classical";
    case Regime::Brownian: return "Brownian";
    case Regime::Quantum: return "quantum";
    case Regime::Intermediate: return "intermediate";
  }
  return "?";
}

Regime regime_of(const DiffusionSpec& spec) {
  if (spec.alpha_mag == 0.0) return Regime::Classical;
  if (spec.phi == 0.0 || spec.phi == kPi) return Regime::Brownian;
  if (spec.phi == 0.5 * kPi || spec.phi == -0.5 * kPi) return Regime::Quantum;
  return Regime::Intermediate;
}

DiffusionSpec validate_spec(DiffusionSpec spec) {
  if (!(std::isfinite(spec.alpha_mag) && std::isfinite(spec.phi) &&
        std::isfinite(spec.mass) && std::isfinite(spec.hbar) &&
        std::isfinite(spec.charge)))
    throw Error(ErrorCode::NonFiniteField, "DiffusionSpec has non-finite field");
  if (spec.mass <= 0.0)
    throw Error(ErrorCode::NonPositiveMass, "mass must be positive");
  if (spec.hbar <= 0.0)
    throw Error(ErrorCode::NonPositiveMass, "hbar must be positive");
  if (spec.alpha_mag < 0.0)
    throw Error(ErrorCode::NegativeAlphaMag, "|alpha| must be nonnegative");
  spec.phi = wrap_angle(spec.phi);
  return spec;
}

DiffusionSpec time_reverse(DiffusionSpec spec) {
  spec.phi = wrap_angle(spec.phi - kPi);
  return spec;
}

TimeGrid validate_grid(TimeGrid grid) {
  if (!(grid.tf > grid.t0) || grid.n_steps < 1 || !std::isfinite(grid.t0) ||
      !std::isfinite(grid.tf))
    throw Error(ErrorCode::ZeroStepGrid, "time grid needs tf > t0 and n_steps >= 1");
  return grid;
}

bool SpaceGrid::same_as(const SpaceGrid& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a) {
    if (axis[a].n_points != o.axis[a].n_points) return false;
    if (axis[a].min != o.axis[a].min || axis[a].max != o.axis[a].max)
      return false;
  }
  return true;
}

SpaceGrid validate_grid(SpaceGrid grid, int64_t max_points) {
  if (grid.dim != 1 && grid.dim != 2)
    throw Error(ErrorCode::UnsupportedDim, "space grid must be 1d or 2d");
  for (int a = 0; a < grid.dim; ++a) {
    const AxisSpec& ax = grid.axis[a];
    if (!(ax.max > ax.min) || ax.n_points < 8)
      throw Error(ErrorCode::ZeroStepGrid,
                  "axis needs max > min and n_points >= 8");
  }
  if (grid.total_points() > max_points)
    throw Error(ErrorCode::OverflowingEnsembleSize,
                "space grid exceeds memory cap");
  return grid;
}

}  // namespace stomech
