#pragma once

#include <functional>
#include <vector>

#include "stomech/core.hpp"
#include "stomech/geom2.hpp"

namespace stomech::relsim {

enum class GaugeConvention { ProperTime, Energy, ProperLength, Unit };

const char* to_string(GaugeConvention g);

// Relativistic parameter block: epsilon is the gauge-fixed Lagrange
// multiplier; the affine parameter meaning follows from the convention.
struct RelativisticSpec {
  DiffusionSpec diffusion;
  double mass_sq = 1.0;
  double epsilon = 1.0;
  GaugeConvention gauge = GaugeConvention::ProperTime;
  double c = 1.0;

  // variance rate of the underlying real Gaussians per fiber component
  double fiber_rate() const {
    return diffusion.alpha_mag * diffusion.hbar * epsilon;
  }
};

// epsilon per the mass-sign rules: m^2 > 0 -> 1/|m| (proper time);
// m = 0 -> c^2/E (energy) or 1 (unit); m^2 < 0 -> 1/(c |m|) (proper length).
// Throws IncompatibleGauge.
RelativisticSpec gauge_fix(const DiffusionSpec& diffusion, double mass_sq,
                           GaugeConvention convention, double energy = 1.0,
                           double c = 1.0);

// Complex martingale on R^{d,1} fibers: spatial components rotated by
// e^{i phi/2}, the time component by e^{i(phi+pi)/2} -- the unique degenerate
// realization with d[M^0,M^0] = -alpha hbar eps dlambda (eta^{00} = -1).
struct RelPathEnsemble {
  RelativisticSpec spec;
  TimeGrid lambda_grid;
  int spacetime_dim = 4;  // d+1
  int n_paths = 0;
  SeedSpec seed;
  std::vector<double> w;  // underlying real paths, n_paths x (steps+1) x (d+1)

  Complex rotation(int mu) const {
    return unit_phase(0.5 * (spec.diffusion.phi + (mu == 0 ? kPi : 0.0)));
  }
  double wiener(int path, int step, int mu) const {
    return w[(static_cast<int64_t>(path) * (lambda_grid.n_steps + 1) + step) *
                 spacetime_dim + mu];
  }
  Complex m(int path, int step, int mu) const {
    return rotation(mu) * wiener(path, step, mu);
  }
};

RelPathEnsemble sample_relativistic_noise(const RelativisticSpec& spec,
                                          const TimeGrid& lambda_grid,
                                          int n_paths, SeedSpec seed);

// Mean pathwise QV totals per component pair, with the standard error of the
// diagonal entries (magnitude of the complex fluctuation).
struct RelQvSummary {
  int dim = 0;
  std::vector<Complex> qv;   // dim x dim
  std::vector<double> se;    // dim x dim
};
RelQvSummary realized_qv_matrix(const RelPathEnsemble& ens);

// Monte-Carlo causality-violation probabilities P[sum (dX^i)^2 >= c^2 dtau^2]
// against the exact chi-square tail, plus the crossover length scale
// c dtau ~ hbar d (1 + cos phi) / (2 m c).
struct CausalityReport {
  std::vector<double> delta_tau;
  std::vector<double> p_mc;
  std::vector<double> p_exact;
  std::vector<double> std_error;
  double crossover_scale = 0.0;  // length c * dtau_c
};
// Throws NonPositiveMassSq.
CausalityReport causality_stats(const RelativisticSpec& spec, int spatial_dim,
                                const std::vector<double>& delta_taus,
                                int n_samples, SeedSpec seed);

// Caller-supplied drift: hat-w_+ (covariant velocity, complex) evaluated at
// chart position x and parameter lambda; null means zero drift.
using ManifoldDrift =
    std::function<void(const double* x, double lambda, Complex* out)>;

struct ManifoldSimOptions {
  std::vector<double> chart_min, chart_max;  // absorb outside this box
  double absorbed_fraction_error = 0.5;      // ChartExit above this
};

struct ManifoldEnsemble {
  TimeGrid lambda_grid;
  int dim = 0;
  int n_paths = 0;
  std::vector<double> x;        // real part of Z, chart coords
  std::vector<double> y;        // imaginary part
  std::vector<int> alive_steps; // per path: steps completed before absorption
  double absorbed_fraction = 0.0;

  double at(int path, int step, int mu) const {
    return x[(static_cast<int64_t>(path) * (lambda_grid.n_steps + 1) + step) *
                 dim + mu];
  }
};

// Euler-Maruyama step of d+Z^mu = (what+ - 1/2 Gamma^mu_{nu rho} w2^{nu rho})
// dlambda + e^mu_alpha dM^alpha with w2 = alpha hbar eps g^{mu nu}(X).
// Throws ChartExit when the absorbed fraction exceeds the configured bound,
// SingularMetric on metric breakdown.
ManifoldEnsemble manifold_step_simulate(const geom2::ChartedManifold& man,
                                        const ManifoldDrift& drift,
                                        const RelativisticSpec& spec,
                                        const TimeGrid& lambda_grid,
                                        int n_paths, SeedSpec seed,
                                        const ManifoldSimOptions& opt);

// Realized chart QV against alpha hbar eps g^{mu nu}(X) restricted to steps
// whose start point satisfies the predicate.
struct ChartQvReport {
  std::vector<double> diag_ratio;     // realized / expected, per component
  double max_diag_rel_err = 0.0;
  double max_offdiag = 0.0;  // normalized by the diagonal
  int64_t steps_used = 0;
};
ChartQvReport manifold_chart_qv(const ManifoldEnsemble& ens,
                                const geom2::ChartedManifold& man,
                                const RelativisticSpec& spec,
                                const std::function<bool(const double*)>& in_band);

// Residual of eta^{mu nu} dS dS + m^2 for the plane wave with S = hbar
// (k.x - omega t); zero iff k is on the mass shell.
double onshell_residual(double omega, const std::vector<double>& k_spatial,
                        double mass, double hbar = 1.0);

}  // namespace stomech::relsim
