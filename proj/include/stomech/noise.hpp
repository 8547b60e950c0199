#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "stomech/core.hpp"
#include "stomech/mat.hpp"
#include "stomech/parallel.hpp"
#include "stomech/rng.hpp"

namespace stomech::noise {

// N discretized paths of the complex martingale M = e^{i phi/2} W, where W is
// a real Wiener process with Var[dW] = (|alpha| hbar / m) dt per component.
// Paths are stored as the underlying real W; the rotation is applied on
// access. This makes the degenerate complex structure exact by construction:
// e^{-i phi/2} dM is the stored real increment, with no imaginary residue.
struct ComplexPathEnsemble {
  DiffusionSpec spec;
  TimeGrid grid;
  int dim = 1;
  int n_paths = 0;
  SeedSpec seed;
  std::vector<double> w;  // n_paths x (n_steps+1) x dim, path-major

  Complex rotation() const { return unit_phase(0.5 * spec.phi); }
  int64_t offset(int path, int step, int comp) const {
    return (static_cast<int64_t>(path) * (grid.n_steps + 1) + step) * dim + comp;
  }
  double wiener(int path, int step, int comp) const {
    return w[offset(path, step, comp)];
  }
  Complex m(int path, int step, int comp) const {
    return rotation() * wiener(path, step, comp);
  }
  int n_steps() const { return grid.n_steps; }
};

struct SampleOptions {
  double beta = 0.0;             // jump intensity; only 0 is supported
  int64_t max_bytes = int64_t{3} << 30;  // materialization cap
};

// Fill one path of W (n_steps+1 values per component, W(t0) = 0) from the
// substream (seed, path_index). Shared by materialized and streaming callers.
void generate_wiener_path(const DiffusionSpec& spec, const TimeGrid& grid,
                          int dim, SeedSpec seed, int64_t path_index,
                          double* out);

// Throws ZeroStepGrid, OverflowingEnsembleSize, JumpProcessRequested.
ComplexPathEnsemble sample_rotated_wiener(const DiffusionSpec& spec,
                                          const TimeGrid& grid, int dim,
                                          int n_paths, SeedSpec seed,
                                          const SampleOptions& opt = {});

// Streaming iteration: fn(path_index, w_path) where w_path points at
// (n_steps+1) x dim doubles in a thread-local buffer. Parallel over paths;
// any per-path results must go to per-index slots.
template <class F>
void for_each_path(const DiffusionSpec& spec, const TimeGrid& grid, int dim,
                   int n_paths, SeedSpec seed, F&& fn) {
  const int64_t stride = static_cast<int64_t>(grid.n_steps + 1) * dim;
#ifdef _OPENMP
#pragma omp parallel
  {
    std::vector<double> buf(stride);
#pragma omp for schedule(static)
    for (int p = 0; p < n_paths; ++p) {
      generate_wiener_path(spec, grid, dim, seed, p, buf.data());
      fn(p, buf.data());
    }
  }
#else
  std::vector<double> buf(stride);
  for (int p = 0; p < n_paths; ++p) {
    generate_wiener_path(spec, grid, dim, seed, p, buf.data());
    fn(p, buf.data());
  }
#endif
}

// Serial reference for the streaming iteration (same output by contract).
template <class F>
void for_each_path_serial(const DiffusionSpec& spec, const TimeGrid& grid,
                          int dim, int n_paths, SeedSpec seed, F&& fn) {
  const int64_t stride = static_cast<int64_t>(grid.n_steps + 1) * dim;
  std::vector<double> buf(stride);
  for (int p = 0; p < n_paths; ++p) {
    generate_wiener_path(spec, grid, dim, seed, p, buf.data());
    fn(p, buf.data());
  }
}

// Quadratic covariation of components (a, b), cumulative in time and averaged
// over paths; additive over disjoint intervals and symmetric in (a, b).
struct RealizedQV {
  int a = 0, b = 0;
  bool conjugate_second = false;
  std::vector<Complex> series;  // length n_steps+1, series[0] = 0
  Complex total;                // series.back()
};

// Throws IndexOutOfRange.
RealizedQV realized_qv(const ComplexPathEnsemble& ens, int a, int b,
                       bool conjugate_second = false);

struct MomentEstimate {
  Complex value;
  double std_error = 0.0;  // sqrt((Var Re + Var Im)/N)
};

// Monte-Carlo estimate of E[prod_i (M^{a_i}_t)^{k_i}]; total order <= 8.
// Throws OrderTooHigh, IndexOutOfRange.
MomentEstimate empirical_moment(
    const ComplexPathEnsemble& ens,
    const std::vector<std::pair<int, int>>& component_multiset, double t);

// One-pass summary of a rotated-Wiener ensemble at scale: realized QV matrix
// (plain and conjugated) and endpoint projection statistics, without
// materializing the ensemble. Used by the acceptance suite where N x steps
// does not fit in memory.
struct EnsembleSummary {
  int dim = 0;
  int n_paths = 0;
  double duration = 0.0;
  // mean over paths of the pathwise QV totals
  std::vector<Complex> qv;       // dim x dim, m d[M^a,M^b] totals / (hbar)
  std::vector<Complex> qv_conj;  // dim x dim, conjugated second factor
  // cross-path standard error of the diagonal pathwise QV totals
  std::vector<double> qv_diag_se;  // dim
  // endpoint statistics of M(tf) per component
  std::vector<double> var_re, var_im, cov_re_im;   // dim
  std::vector<double> se_var_re, se_var_im, se_cov;  // jackknife-free normal SEs
};

EnsembleSummary summarize_rotated_wiener(const DiffusionSpec& spec,
                                         const TimeGrid& grid, int dim,
                                         int n_paths, SeedSpec seed);

// Levy-characterization diagnostics: (i) increment mean, (ii) disjoint
// increment correlation, (iii) stationarity of the increment variance,
// (iv) realized-QV determinism (cross-path QV variance consistent with the
// dt -> 0 concentration rate). Significance is per test, Bonferroni-corrected
// across components/blocks.
struct LevyReport {
  bool mean_pass = false;
  bool correlation_pass = false;
  bool stationarity_pass = false;
  bool qv_determinism_pass = false;
  double max_mean_z = 0.0;
  double max_corr_z = 0.0;
  double max_stationarity_z = 0.0;
  double max_qv_z = 0.0;
  double significance = 0.0;
  bool all_pass() const {
    return mean_pass && correlation_pass && stationarity_pass &&
           qv_determinism_pass;
  }
};

// Throws EnsembleTooSmall for n_paths < 1000.
LevyReport levy_diagnostics(const ComplexPathEnsemble& ens,
                            double significance = 1e-3);

// Two-sided kernel check: forward increments and time-reversed increments of
// the ensemble must be equal in distribution. Returns the two-sample KS
// statistic and its p-value threshold decision.
struct TwoSidedReport {
  double ks = 0.0;
  double ks_critical = 0.0;
  bool pass = false;
};
TwoSidedReport two_sided_increment_check(const ComplexPathEnsemble& ens,
                                         double significance = 1e-3);

}  // namespace stomech::noise
