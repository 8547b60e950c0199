#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "stomech/core.hpp"
#include "stomech/geom2.hpp"
#include "stomech/noise.hpp"
#include "stomech/potential.hpp"

namespace stomech::stochcalc {

// One discretized path of complex states on a uniform grid.
struct Path {
  TimeGrid grid;
  int dim = 1;
  std::vector<Complex> z;  // (n_steps+1) x dim

  Complex at(int step, int comp) const { return z[static_cast<size_t>(step) * dim + comp]; }
  const Complex* state(int step) const { return z.data() + static_cast<size_t>(step) * dim; }
};

Path path_from_ensemble(const noise::ComplexPathEnsemble& ens, int path_index);

// Keep every 'factor'-th state; factor must divide n_steps. Used for
// dt-halving convergence studies on a common underlying path.
Path coarsen_path(const Path& p, int factor);

// Covector-valued integrand f_i(x,t) with spatial Jacobian d_j f_i
// (row-major out[i*dim+j]). The Jacobian is needed by the conversion and
// quadratic-variation operations.
struct IntegrandSpec {
  int dim = 1;
  std::function<void(const Complex* x, double t, Complex* out)> form;
  std::function<void(const Complex* x, double t, Complex* out)> jacobian;
};

// Finite-difference spot check of the supplied Jacobian; max relative error
// over the probe points. Used to enforce the integrand invariant.
double integrand_consistency_error(const IntegrandSpec& f,
                                   const std::vector<std::vector<Complex>>& probes,
                                   double t);

// Bilinear-form integrand g_ij(x,t) for quadratic-variation integrals.
struct BilinearSpec {
  int dim = 1;
  std::function<void(const Complex* x, double t, Complex* out)> form;
};

// All integrals return the cumulative series; series[0] = 0 and
// series[n_steps] is the value over [t0, tf].
// Throws GridMismatch when integrand and path dimensions disagree.
std::vector<Complex> ito_forward_integral(const IntegrandSpec& f, const Path& p);
std::vector<Complex> ito_backward_integral(const IntegrandSpec& f, const Path& p);
std::vector<Complex> stratonovich_integral(const IntegrandSpec& f, const Path& p);
std::vector<Complex> qv_integral(const BilinearSpec& g, const Path& p);

// Residuals of the conversion identities
//   Strat = Ito_+ + (1/2) int d_j f_i d[X^i,X^j]
//   Strat = Ito_- - (1/2) int d_j f_i d[X^i,X^j]
// evaluated pathwise at every step; reports the max absolute residual per
// coarsening level (level L uses every 2^L-th state of each path) and the
// observed convergence orders between levels. Throws MissingDerivative.
struct ConversionReport {
  std::vector<double> dt;            // per level
  std::vector<double> max_residual_forward;
  std::vector<double> max_residual_backward;
  std::vector<double> rms_residual_forward;
  std::vector<double> rms_residual_backward;
  std::vector<double> order_forward;   // between consecutive levels, from RMS
  std::vector<double> order_backward;
};

ConversionReport conversion_check(const IntegrandSpec& f,
                                  const noise::ComplexPathEnsemble& ens,
                                  int levels = 1);

// Real path ensembles (positions only); velocities are derived by
// differencing: V+ forward, V- backward, Vo central, v2 squared forward
// difference over dt.
struct RealPathEnsembleView {
  TimeGrid grid;
  int dim = 1;
  int n_paths = 0;
  const double* x = nullptr;  // n_paths x (n_steps+1) x dim
  double at(int path, int step, int comp) const {
    return x[(static_cast<int64_t>(path) * (grid.n_steps + 1) + step) * dim + comp];
  }
};

enum class LagrangianKind { Stratonovich, ItoForward, ItoBackward };

// Potential and optional metric context for action evaluation. A manifold
// context requires Christoffel and Riemann evaluators.
struct LagrangianSpec {
  LagrangianKind kind = LagrangianKind::Stratonovich;
  double mass = 1.0;
  double charge = 0.0;
  PotentialSpec potential;
  const geom2::ChartedManifold* manifold = nullptr;
};

struct ActionEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo estimate of E[int L(X,V,t) dt] with central-difference
// Stratonovich velocities (interior steps). Throws MissingVelocity when the
// grid is too short to difference.
ActionEstimate stratonovich_action(const RealPathEnsembleView& paths,
                                   const LagrangianSpec& lag);

// E[int L_0^{+/-} dt] including the (q/2) dA v2 term (flat) or the
// Christoffel/Riemann-corrected finite part (manifold).
// Throws MissingVelocity, MissingGeometry.
ActionEstimate ito_action_finite(const RealPathEnsembleView& paths,
                                 const LagrangianSpec& lag);

// Fixed-step discrete estimator of the divergent Lagrangian part:
// (m/2) sum g_ij dx^i dv_o^j. Reported separately; never added to finite
// actions.
ActionEstimate l_infinity_estimator(const RealPathEnsembleView& paths,
                                    const LagrangianSpec& lag);

}  // namespace stomech::stochcalc
