#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "stomech/core.hpp"
#include "stomech/pde.hpp"

namespace stomech::correspond {

enum class Branch { Plus, Minus };

// Complex velocity field w = v + i u per (time slice, grid point, component),
// with the second-order velocity w2 = alpha hbar / m fixed by the structure
// relation. mask marks points where the underlying wave field was resolvable.
struct VelocityField {
  SpaceGrid grid;
  std::vector<double> times;
  Branch branch = Branch::Minus;
  std::vector<Complex> w;      // n_slices x points x dim
  std::vector<uint8_t> mask;   // n_slices x points
  Complex v2;

  int n_slices() const { return static_cast<int>(times.size()); }
  int64_t flat(int slice, int64_t point, int comp) const {
    return (static_cast<int64_t>(slice) * grid.total_points() + point) *
               grid.dim + comp;
  }
  Complex at(int slice, int64_t point, int comp) const {
    return w[flat(slice, point, comp)];
  }
  int nearest_slice(double t) const;
};

// w_branch^i = (1/m)(+/- alpha hbar d_i ln Psi - q A_i), centered differences
// on the unwrapped logarithm; v2 = alpha hbar / m.
// Throws NodeRegionTooLarge when too little of the grid is resolvable.
VelocityField velocity_from_wave(const pde::WaveField& field, Branch branch);

// Pointwise residual of
//   cos(phi/2) u+ - sin(phi/2) v+ - cos(phi/2) u- + sin(phi/2) v-
// reported as norms; a diagnostic, not an assertion.
struct ConstraintReport {
  double l2 = 0.0;
  double max_abs = 0.0;
  int64_t n_points = 0;
};
ConstraintReport constraint_check(const VelocityField& plus,
                                  const VelocityField& minus, double phi);

// Oracle drift pair: b± = v_flow ± (s/2) grad ln rho with s the real-noise
// variance rate and v_flow the current velocity of the density implied by the
// field's own evolution equation (grad Stilde / m - qA/m in the complex
// regime; -(|alpha| hbar / 2m) grad ln rho in the real regime). This is the
// unique pair for which the Fokker-Planck equation with noise rate s
// propagates born_density(field) exactly.
VelocityField fokker_planck_drift(const pde::WaveField& field, Branch branch);

enum class BoundaryPolicy { Reflect, PeriodicWrap };

struct SimOptions {
  BoundaryPolicy boundary = BoundaryPolicy::Reflect;
  int64_t max_bytes = int64_t{3} << 30;
  // two_sided_check integrates (n_slices - 1) * substeps_per_slice EM steps
  int substeps_per_slice = 1;
};

// Real paths of the drift-diffusion process, slot k holding the state at
// grid.time(k) (backward ensembles fill slots from the top down).
struct DriftEnsemble {
  DiffusionSpec spec;
  TimeGrid grid;
  int dim = 1;
  int n_paths = 0;
  SeedSpec seed;
  Branch direction = Branch::Plus;
  std::vector<double> x;  // n_paths x (n_steps+1) x dim

  double at(int path, int step, int comp) const {
    return x[(static_cast<int64_t>(path) * (grid.n_steps + 1) + step) * dim + comp];
  }
};

// Euler-Maruyama with drift lookup (multilinear in space, nearest slice in
// time) and real noise of variance rate s = (|alpha| hbar / 2m)(1 + cos phi).
// Initial positions are sampled from the density by inverse CDF (1d) or
// rejection (2d). Forward drift integrates up from t0, backward drift down
// from tf. Throws DriftLookupOutOfBox, StepTooLarge, OverflowingEnsembleSize.
DriftEnsemble drift_diffusion_simulate(const VelocityField& drift,
                                       const DiffusionSpec& spec,
                                       const TimeGrid& grid, int n_paths,
                                       const std::vector<double>& initial_density,
                                       const SpaceGrid& density_grid,
                                       SeedSpec seed,
                                       const SimOptions& opt = {});

enum class DensityMethod { Histogram, Kde };

struct DensityEstimate {
  SpaceGrid grid;
  std::vector<double> rho;
  DensityMethod method = DensityMethod::Histogram;
  double bandwidth[2] = {0.0, 0.0};  // KDE only; Silverman unless overridden
};

// Normalized density of the ensemble state nearest to time t, on the target
// grid. bandwidth_override <= 0 means Silverman. Throws EmptyEnsemble.
DensityEstimate density_estimate(const DriftEnsemble& ens, double t,
                                 DensityMethod method,
                                 const SpaceGrid& target,
                                 double bandwidth_override = 0.0);

// Serial reference for the KDE kernel (the OpenMP version is the default).
DensityEstimate density_estimate_serial(const DriftEnsemble& ens, double t,
                                        DensityMethod method,
                                        const SpaceGrid& target,
                                        double bandwidth_override = 0.0);

struct DensityDistance {
  double l1 = 0.0;
  double ks = 0.0;  // 1d only
  double max_abs = 0.0;
};
// Throws GridMismatch.
DensityDistance compare_density(const std::vector<double>& rho_a,
                                const std::vector<double>& rho_b,
                                const SpaceGrid& grid);

// Resample a density onto another grid (multilinear + renormalize).
std::vector<double> resample_density(const std::vector<double>& rho,
                                     const SpaceGrid& from, const SpaceGrid& to);

struct UncertaintyStats {
  double sigma_x = 0.0;
  double sigma_p = 0.0;
  double product = 0.0;
  double bound = 0.0;  // (|alpha| hbar / 2)(1 + cos phi)
};
// 1d only; sigma_p from the DFT of Psi with p = |alpha| hbar k.
// Throws ZeroNorm, UnsupportedDim.
UncertaintyStats uncertainty_stats(const pde::WaveField& field, int slice_index);

struct TwoSidedReport {
  double t_mid = 0.0;
  double l1_forward = 0.0;
  double l1_backward = 0.0;
};
// Simulate forward from rho(t0) with b+ and backward from rho(tf) with b-;
// compare both ensemble densities against the field density at the midpoint
// slice, via KDE on the comparison grid.
TwoSidedReport two_sided_check(const pde::WaveField& field, int n_paths,
                               SeedSpec seed, const SpaceGrid& comparison_grid,
                               const SimOptions& opt = {});

}  // namespace stomech::correspond
