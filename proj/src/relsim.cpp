#include "stomech/relsim.hpp"

#include <algorithm>
#include <cmath>

#include "stomech/parallel.hpp"
#include "stomech/rng.hpp"
#include "stomech/stats.hpp"

namespace stomech::relsim {

const char* to_string(GaugeConvention g) {
  switch (g) {
    case GaugeConvention::ProperTime: return "proper_time";
    case GaugeConvention::Energy: return "energy";
    case GaugeConvention::ProperLength: return "proper_length";
    case GaugeConvention::Unit: return "unit";
  }
  return "?";
}

RelativisticSpec gauge_fix(const DiffusionSpec& diffusion, double mass_sq,
                           GaugeConvention convention, double energy, double c) {
  RelativisticSpec spec;
  spec.diffusion = validate_spec(diffusion);
  spec.mass_sq = mass_sq;
  spec.gauge = convention;
  spec.c = c;
  switch (convention) {
    case GaugeConvention::ProperTime:
      if (!(mass_sq > 0.0))
        throw Error(ErrorCode::IncompatibleGauge,
                    "proper-time gauge needs m^2 > 0");
      spec.epsilon = 1.0 / std::sqrt(mass_sq);
      break;
    case GaugeConvention::Energy:
      if (mass_sq != 0.0)
        throw Error(ErrorCode::IncompatibleGauge, "energy gauge needs m = 0");
      if (!(energy > 0.0))
        throw Error(ErrorCode::IncompatibleGauge, "energy gauge needs E > 0");
      spec.epsilon = c * c / energy;
      break;
    case GaugeConvention::Unit:
      if (mass_sq != 0.0)
        throw Error(ErrorCode::IncompatibleGauge, "unit gauge needs m = 0");
      spec.epsilon = 1.0;
      break;
    case GaugeConvention::ProperLength:
      if (!(mass_sq < 0.0))
        throw Error(ErrorCode::IncompatibleGauge,
                    "proper-length gauge needs m^2 < 0");
      spec.epsilon = 1.0 / (c * std::sqrt(-mass_sq));
      break;
  }
  return spec;
}

RelPathEnsemble sample_relativistic_noise(const RelativisticSpec& spec,
                                          const TimeGrid& lambda_grid,
                                          int n_paths, SeedSpec seed) {
  validate_grid(lambda_grid);
  RelPathEnsemble ens;
  ens.spec = spec;
  ens.lambda_grid = lambda_grid;
  ens.n_paths = n_paths;
  ens.seed = seed;
  const int dim = ens.spacetime_dim;
  const int64_t stride = static_cast<int64_t>(lambda_grid.n_steps + 1) * dim;
  ens.w.resize(static_cast<int64_t>(n_paths) * stride);
  const double step_sd = std::sqrt(spec.fiber_rate() * lambda_grid.dt());
  double* base = ens.w.data();
  parallel_for(n_paths, [&](int64_t p) {
    Xoshiro256pp rng(seed.master_seed, static_cast<uint64_t>(p));
    double* out = base + p * stride;
    for (int mu = 0; mu < dim; ++mu) out[mu] = 0.0;
    for (int k = 1; k <= lambda_grid.n_steps; ++k) {
      double* cur = out + static_cast<int64_t>(k) * dim;
      const double* prev = cur - dim;
      for (int mu = 0; mu < dim; ++mu) cur[mu] = prev[mu] + step_sd * rng.gauss();
    }
  });
  return ens;
}

RelQvSummary realized_qv_matrix(const RelPathEnsemble& ens) {
  const int dim = ens.spacetime_dim;
  const int n = ens.lambda_grid.n_steps;
  RelQvSummary s;
  s.dim = dim;
  s.qv.assign(static_cast<size_t>(dim) * dim, Complex(0));
  s.se.assign(static_cast<size_t>(dim) * dim, 0.0);

  std::vector<double> acc(static_cast<size_t>(dim) * dim, 0.0);
  std::vector<double> acc2(acc.size(), 0.0);
  for (int p = 0; p < ens.n_paths; ++p) {
    for (int mu = 0; mu < dim; ++mu)
      for (int nu = 0; nu < dim; ++nu) {
        double q = 0.0;
        for (int k = 0; k < n; ++k)
          q += (ens.wiener(p, k + 1, mu) - ens.wiener(p, k, mu)) *
               (ens.wiener(p, k + 1, nu) - ens.wiener(p, k, nu));
        acc[static_cast<size_t>(mu) * dim + nu] += q;
        acc2[static_cast<size_t>(mu) * dim + nu] += q * q;
      }
  }
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = 0; nu < dim; ++nu) {
      const size_t i = static_cast<size_t>(mu) * dim + nu;
      const double mean = acc[i] / ens.n_paths;
      const double var =
          std::max(0.0, acc2[i] / ens.n_paths - mean * mean);
      const Complex phase = ens.rotation(mu) * ens.rotation(nu);
      s.qv[i] = phase * mean;
      s.se[i] = std::sqrt(var / ens.n_paths);
    }
  return s;
}

CausalityReport causality_stats(const RelativisticSpec& spec, int spatial_dim,
                                const std::vector<double>& delta_taus,
                                int n_samples, SeedSpec seed) {
  if (!(spec.mass_sq > 0.0))
    throw Error(ErrorCode::NonPositiveMassSq,
                "causality statistics need a massive particle");
  const double m = std::sqrt(spec.mass_sq);
  const double phi = spec.diffusion.phi;
  const double hbar = spec.diffusion.hbar;
  const double amag = spec.diffusion.alpha_mag;
  const double c = spec.c;
  CausalityReport rep;
  rep.delta_tau = delta_taus;
  rep.crossover_scale =
      hbar * spatial_dim * amag * (1.0 + std::cos(phi)) / (2.0 * m * c);
  for (size_t i = 0; i < delta_taus.size(); ++i) {
    const double dtau = delta_taus[i];
    // Re(dM^i) ~ N(0, |alpha| hbar (1 + cos phi) / (2 m) dtau)
    const double var = amag * hbar * (1.0 + std::cos(phi)) / (2.0 * m) * dtau;
    const double threshold = c * c * dtau * dtau;
    double p_exact;
    if (var <= 0.0) {
      p_exact = 0.0;
    } else {
      p_exact = stats::chi_square_tail(spatial_dim, threshold / var);
    }
    std::vector<int> hits(n_samples, 0);
    if (var > 0.0) {
      const double sd = std::sqrt(var);
      parallel_for(n_samples, [&](int64_t s) {
        Xoshiro256pp rng(seed.master_seed + i, static_cast<uint64_t>(s));
        double norm2 = 0.0;
        for (int d2 = 0; d2 < spatial_dim; ++d2) {
          const double dx = sd * rng.gauss();
          norm2 += dx * dx;
        }
        hits[s] = norm2 >= threshold ? 1 : 0;
      });
    }
    int64_t total = 0;
    for (int h : hits) total += h;
    const double p = static_cast<double>(total) / n_samples;
    rep.p_mc.push_back(p);
    rep.p_exact.push_back(p_exact);
    rep.std_error.push_back(std::sqrt(std::max(p * (1.0 - p), 1e-12) / n_samples));
  }
  return rep;
}

ManifoldEnsemble manifold_step_simulate(const geom2::ChartedManifold& man,
                                        const ManifoldDrift& drift,
                                        const RelativisticSpec& spec,
                                        const TimeGrid& lambda_grid,
                                        int n_paths, SeedSpec seed,
                                        const ManifoldSimOptions& opt) {
  validate_grid(lambda_grid);
  const int dim = man.dim;
  if (static_cast<int>(opt.chart_min.size()) != dim ||
      static_cast<int>(opt.chart_max.size()) != dim)
    throw Error(ErrorCode::GridMismatch, "chart bounds must match chart dim");

  ManifoldEnsemble ens;
  ens.lambda_grid = lambda_grid;
  ens.dim = dim;
  ens.n_paths = n_paths;
  const int n = lambda_grid.n_steps;
  const int64_t stride = static_cast<int64_t>(n + 1) * dim;
  ens.x.assign(static_cast<int64_t>(n_paths) * stride, 0.0);
  ens.y.assign(static_cast<int64_t>(n_paths) * stride, 0.0);
  ens.alive_steps.assign(n_paths, 0);

  const double dlmb = lambda_grid.dt();
  const double fiber_sd = std::sqrt(spec.fiber_rate() * dlmb);
  const Complex alpha_he =
      spec.diffusion.alpha() * spec.diffusion.hbar * spec.epsilon;
  const double phi = spec.diffusion.phi;
  const bool lorentzian = man.signature == geom2::Signature::Lorentzian;

  // initial chart position: center of the band box
  Vec x0(dim);
  for (int mu = 0; mu < dim; ++mu)
    x0[mu] = 0.5 * (opt.chart_min[mu] + opt.chart_max[mu]);

  parallel_for(n_paths, [&](int64_t p) {
    Xoshiro256pp rng(seed.master_seed, static_cast<uint64_t>(p));
    Vec x = x0;
    Vec y(dim, 0.0);
    double* outx = ens.x.data() + p * stride;
    double* outy = ens.y.data() + p * stride;
    for (int mu = 0; mu < dim; ++mu) {
      outx[mu] = x[mu];
      outy[mu] = 0.0;
    }
    std::vector<Complex> what(dim, Complex(0));
    int k = 0;
    for (; k < n; ++k) {
      const Mat g = man.metric(x);
      const Mat ginv = mat_inverse(g);
      const Mat e = man.vielbein(x);
      const Ten3 gamma = geom2::christoffel_at(man, x);
      if (drift)
        drift(x.data(), lambda_grid.time(k), what.data());
      else
        std::fill(what.begin(), what.end(), Complex(0));

      bool exited = false;
      // one fiber increment vector per step, shared by all chart components
      std::vector<double> xi(dim);
      for (int a = 0; a < dim; ++a) xi[a] = fiber_sd * rng.gauss();
      Vec dx(dim, 0.0), dy(dim, 0.0);
      for (int mu = 0; mu < dim; ++mu) {
        Complex corr(0.0, 0.0);
        for (int nu = 0; nu < dim; ++nu)
          for (int rho = 0; rho < dim; ++rho)
            corr += gamma(mu, nu, rho) * ginv(nu, rho);
        Complex dz = (what[mu] - 0.5 * alpha_he * corr) * dlmb;
        for (int a = 0; a < dim; ++a)
          dz += e(mu, a) *
                unit_phase(0.5 * (phi + (lorentzian && a == 0 ? kPi : 0.0))) *
                xi[a];
        dx[mu] = dz.real();
        dy[mu] = dz.imag();
      }
      for (int mu = 0; mu < dim; ++mu) {
        x[mu] += dx[mu];
        y[mu] += dy[mu];
      }
      for (int mu = 0; mu < dim; ++mu)
        if (x[mu] < opt.chart_min[mu] || x[mu] > opt.chart_max[mu])
          exited = true;
      if (exited) break;
      double* cx = outx + static_cast<int64_t>(k + 1) * dim;
      double* cy = outy + static_cast<int64_t>(k + 1) * dim;
      for (int mu = 0; mu < dim; ++mu) {
        cx[mu] = x[mu];
        cy[mu] = y[mu];
      }
    }
    ens.alive_steps[p] = k;
    // freeze absorbed paths at their last in-chart position
    for (int kk = k + 1; kk <= n; ++kk)
      for (int mu = 0; mu < dim; ++mu) {
        outx[static_cast<int64_t>(kk) * dim + mu] =
            outx[static_cast<int64_t>(k) * dim + mu];
        outy[static_cast<int64_t>(kk) * dim + mu] =
            outy[static_cast<int64_t>(k) * dim + mu];
      }
  });

  int64_t absorbed = 0;
  for (int p = 0; p < n_paths; ++p)
    if (ens.alive_steps[p] < n) ++absorbed;
  ens.absorbed_fraction = static_cast<double>(absorbed) / n_paths;
  if (ens.absorbed_fraction > opt.absorbed_fraction_error)
    throw Error(ErrorCode::ChartExit, "too many paths left the chart");
  return ens;
}

ChartQvReport manifold_chart_qv(
    const ManifoldEnsemble& ens, const geom2::ChartedManifold& man,
    const RelativisticSpec& spec,
    const std::function<bool(const double*)>& in_band) {
  const int dim = ens.dim;
  const double dlmb = ens.lambda_grid.dt();
  const double expected_rate =
      0.5 * (1.0 + std::cos(spec.diffusion.phi)) * spec.fiber_rate();
  std::vector<double> realized(static_cast<size_t>(dim) * dim, 0.0);
  std::vector<double> expected(static_cast<size_t>(dim) * dim, 0.0);
  ChartQvReport rep;
  Vec x(dim);
  for (int p = 0; p < ens.n_paths; ++p) {
    for (int k = 0; k < ens.alive_steps[p]; ++k) {
      for (int mu = 0; mu < dim; ++mu) x[mu] = ens.at(p, k, mu);
      if (!in_band(x.data())) continue;
      const Mat ginv = mat_inverse(man.metric(x));
      for (int mu = 0; mu < dim; ++mu)
        for (int nu = 0; nu < dim; ++nu) {
          const double dmu = ens.at(p, k + 1, mu) - ens.at(p, k, mu);
          const double dnu = ens.at(p, k + 1, nu) - ens.at(p, k, nu);
          realized[static_cast<size_t>(mu) * dim + nu] += dmu * dnu;
          expected[static_cast<size_t>(mu) * dim + nu] +=
              expected_rate * ginv(mu, nu) * dlmb;
        }
      ++rep.steps_used;
    }
  }
  rep.diag_ratio.assign(dim, 0.0);
  for (int mu = 0; mu < dim; ++mu) {
    const size_t i = static_cast<size_t>(mu) * dim + mu;
    rep.diag_ratio[mu] = expected[i] != 0.0 ? realized[i] / expected[i] : 0.0;
    rep.max_diag_rel_err =
        std::max(rep.max_diag_rel_err, std::fabs(rep.diag_ratio[mu] - 1.0));
  }
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = 0; nu < dim; ++nu) {
      if (mu == nu) continue;
      const size_t i = static_cast<size_t>(mu) * dim + nu;
      const double scale = std::sqrt(
          std::fabs(expected[static_cast<size_t>(mu) * dim + mu] *
                    expected[static_cast<size_t>(nu) * dim + nu]));
      if (scale > 0)
        rep.max_offdiag = std::max(rep.max_offdiag,
                                   std::fabs(realized[i]) / scale);
    }
  return rep;
}

double onshell_residual(double omega, const std::vector<double>& k_spatial,
                        double mass, double hbar) {
  double k2 = 0.0;
  for (double k : k_spatial) k2 += k * k;
  return hbar * hbar * (k2 - omega * omega) + mass * mass;
}

}  // namespace stomech::relsim
