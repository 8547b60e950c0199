#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "stomech/core.hpp"
#include "stomech/potential.hpp"

namespace stomech::pde {

enum class BoundaryKind { Periodic, DirichletZero };

// Forward holds Psi_- (initial condition at t0, evolved up);
// Backward holds Psi_+ (terminal condition at tf, evolved down).
enum class FieldDirection { Forward, Backward };

// Complex field on a uniform grid, stored as time slices (ascending times).
struct WaveField {
  SpaceGrid grid;
  DiffusionSpec spec;
  PotentialSpec potential;
  FieldDirection direction = FieldDirection::Forward;
  BoundaryKind boundary = BoundaryKind::DirichletZero;
  std::vector<double> times;
  std::vector<Complex> values;  // n_slices x total_points

  int n_slices() const { return static_cast<int>(times.size()); }
  const Complex* slice(int s) const {
    return values.data() + static_cast<int64_t>(s) * grid.total_points();
  }
  Complex* slice_mut(int s) {
    return values.data() + static_cast<int64_t>(s) * grid.total_points();
  }
  int nearest_slice(double t) const;
  double slice_dt() const {
    return n_slices() > 1 ? times[1] - times[0] : 0.0;
  }

  // quadrature weight of node i (trapezoid for Dirichlet, uniform for
  // periodic where the period is n*h)
  double weight(int64_t flat_index) const;
  double cell_volume() const;

  double norm_l2(int s) const;       // sqrt(int |psi|^2)
  double integral_abs(int s) const;  // int |psi|
  double integral_abs2(int s) const;
};

struct SolveOptions {
  BoundaryKind boundary = BoundaryKind::DirichletZero;
  int store_stride = 1;  // keep every k-th step (t0 and tf always kept)
  double divergence_guard = 1e12;
};

// Crank-Nicolson (theta = 1/2) stepping of
//   alpha hbar dPsi/dt = (1/2m)(alpha hbar d + qA)^2 Psi + U Psi
// (forward; the backward equation carries the opposite signs and is marched
// down from tf). 1d: direct tridiagonal solves; 2d: Peaceman-Rachford ADI.
// For alpha purely imaginary the scheme conserves the discrete norm up to
// linear-solver roundoff.
// Throws UnstableParameters (Re alpha < 0), UnsupportedDim, SolverDivergence.
WaveField solve_complex_diffusion(const std::vector<Complex>& psi0,
                                  const DiffusionSpec& spec,
                                  const PotentialSpec& potential,
                                  const SpaceGrid& sgrid, const TimeGrid& tgrid,
                                  FieldDirection direction,
                                  const SolveOptions& opt = {});

enum class ReferenceFamily {
  HeatKernel,
  FreeGaussianPacket,
  HarmonicGround,
  HarmonicCoherent,
  DoubleSlitSuperposition,
};

struct ReferenceParams {
  double x0 = 0.0;         // packet center / coherent displacement
  double y0 = 0.0;         // 2d center
  double sigma0 = 1.0;     // initial |psi|^2 standard deviation (packets)
  double k0 = 0.0;         // carrier wavenumber (x axis)
  double omega = 1.0;      // trap frequency
  double separation = 0.0; // double-slit center separation
  double t_origin = 0.0;   // heat-kernel release time
};

// Closed-form reference solutions evaluated on the grid at the given times.
// Throws UnknownFamily, UnsupportedDim, ConfigError (family/regime mismatch).
WaveField analytic_reference(ReferenceFamily family, const ReferenceParams& p,
                             const DiffusionSpec& spec, const SpaceGrid& sgrid,
                             const std::vector<double>& times,
                             BoundaryKind boundary = BoundaryKind::DirichletZero);

// log Psi on one slice: log_abs + i * unwrapped phase, masked where
// |Psi| < eps_rel * max|Psi|. Phase unwrapping is row-major with a branch-cut
// consistency check on 2d plaquettes.
// Throws NodeRegionTooLarge when unwrapping is inconsistent.
struct LogField {
  std::vector<double> log_abs;
  std::vector<double> phase;
  std::vector<uint8_t> mask;  // 1 = usable
  int64_t n_masked = 0;
};
LogField log_field(const WaveField& f, int slice_index, double eps_rel = 1e-8);

// Chooses the 2*pi*k offset of `cur` so that the phase at the anchor index
// moves continuously from `prev`.
void align_phase(const LogField& prev, LogField& cur, int64_t anchor);

// Pointwise residual of the combined stochastic Hamilton-Jacobi equation for
// S = +/- alpha hbar ln Psi (sign per field direction), via centered
// differences in space and time over stored slices.
struct HjResidualReport {
  double l2 = 0.0;       // sqrt(int |r|^2) over evaluated points
  double max_abs = 0.0;
  int64_t n_points = 0;
};
HjResidualReport hamilton_jacobi_residual(const WaveField& f);

// rho = |Psi| / int |Psi| for real alpha (phi in {0, pi}), |Psi|^2-normalized
// otherwise; integrates to 1 (trapezoid). Throws ZeroNorm.
std::vector<double> born_density(const WaveField& f, int slice_index);

}  // namespace stomech::pde
