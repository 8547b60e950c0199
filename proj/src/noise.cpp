#include "stomech/noise.hpp"

#include <algorithm>
#include <cmath>

#include "stomech/stats.hpp"

namespace stomech::noise {

void generate_wiener_path(const DiffusionSpec& spec, const TimeGrid& grid,
                          int dim, SeedSpec seed, int64_t path_index,
                          double* out) {
  Xoshiro256pp rng(seed.master_seed, static_cast<uint64_t>(path_index));
  const double step_sd = std::sqrt(spec.wiener_rate() * grid.dt());
  for (int c = 0; c < dim; ++c) out[c] = 0.0;
  for (int k = 1; k <= grid.n_steps; ++k) {
    double* cur = out + static_cast<int64_t>(k) * dim;
    const double* prev = cur - dim;
    for (int c = 0; c < dim; ++c) cur[c] = prev[c] + step_sd * rng.gauss();
  }
}

ComplexPathEnsemble sample_rotated_wiener(const DiffusionSpec& spec,
                                          const TimeGrid& grid, int dim,
                                          int n_paths, SeedSpec seed,
                                          const SampleOptions& opt) {
  validate_grid(grid);
  if (opt.beta != 0.0)
    throw Error(ErrorCode::JumpProcessRequested,
                "jump processes (beta != 0) are not supported");
  if (n_paths < 1 || dim < 1)
    throw Error(ErrorCode::OverflowingEnsembleSize, "need n_paths, dim >= 1");
  const int64_t doubles =
      static_cast<int64_t>(n_paths) * (grid.n_steps + 1) * dim;
  if (doubles * static_cast<int64_t>(sizeof(double)) > opt.max_bytes)
    throw Error(ErrorCode::OverflowingEnsembleSize,
                "ensemble exceeds materialization cap; use for_each_path");

  ComplexPathEnsemble ens;
  ens.spec = validate_spec(spec);
  ens.grid = grid;
  ens.dim = dim;
  ens.n_paths = n_paths;
  ens.seed = seed;
  ens.w.resize(doubles);
  const int64_t stride = static_cast<int64_t>(grid.n_steps + 1) * dim;
  double* base = ens.w.data();
  parallel_for(n_paths, [&](int64_t p) {
    generate_wiener_path(spec, grid, dim, seed, p, base + p * stride);
  });
  return ens;
}

RealizedQV realized_qv(const ComplexPathEnsemble& ens, int a, int b,
                       bool conjugate_second) {
  if (a < 0 || b < 0 || a >= ens.dim || b >= ens.dim)
    throw Error(ErrorCode::IndexOutOfRange, "component index out of range");
  const int n = ens.n_steps();
  RealizedQV qv;
  qv.a = a;
  qv.b = b;
  qv.conjugate_second = conjugate_second;
  qv.series.assign(n + 1, Complex(0.0, 0.0));

  // dM^a dM^b = e^{i phi} dW^a dW^b; with conjugation the phases cancel.
  const Complex rot = ens.rotation();
  const Complex phase = conjugate_second ? Complex(1.0, 0.0) : rot * rot;
  std::vector<double> acc(n, 0.0);
  for (int p = 0; p < ens.n_paths; ++p) {
    for (int k = 0; k < n; ++k) {
      const double da = ens.wiener(p, k + 1, a) - ens.wiener(p, k, a);
      const double db = ens.wiener(p, k + 1, b) - ens.wiener(p, k, b);
      acc[k] += da * db;
    }
  }
  Complex run(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    run += phase * (acc[k] / ens.n_paths);
    qv.series[k + 1] = run;
  }
  qv.total = qv.series[n];
  return qv;
}

MomentEstimate empirical_moment(
    const ComplexPathEnsemble& ens,
    const std::vector<std::pair<int, int>>& component_multiset, double t) {
  int order = 0;
  for (auto& [comp, count] : component_multiset) {
    if (comp < 0 || comp >= ens.dim)
      throw Error(ErrorCode::IndexOutOfRange, "component index out of range");
    order += count;
  }
  if (order > 8)
    throw Error(ErrorCode::OrderTooHigh,
                "moment order > 8: Monte-Carlo variance blows up");
  int step = static_cast<int>(std::lround((t - ens.grid.t0) / ens.grid.dt()));
  step = std::clamp(step, 0, ens.n_steps());

  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
  for (int p = 0; p < ens.n_paths; ++p) {
    Complex prod(1.0, 0.0);
    for (auto& [comp, count] : component_multiset)
      for (int r = 0; r < count; ++r) prod *= ens.m(p, step, comp);
    sum_re += prod.real();
    sum_im += prod.imag();
    sum_re2 += prod.real() * prod.real();
    sum_im2 += prod.imag() * prod.imag();
  }
  const double n = ens.n_paths;
  MomentEstimate est;
  est.value = Complex(sum_re / n, sum_im / n);
  const double var_re = sum_re2 / n - (sum_re / n) * (sum_re / n);
  const double var_im = sum_im2 / n - (sum_im / n) * (sum_im / n);
  est.std_error = std::sqrt(std::max(0.0, var_re + var_im) / n);
  return est;
}

EnsembleSummary summarize_rotated_wiener(const DiffusionSpec& spec,
                                         const TimeGrid& grid, int dim,
                                         int n_paths, SeedSpec seed) {
  validate_grid(grid);
  EnsembleSummary s;
  s.dim = dim;
  s.n_paths = n_paths;
  s.duration = grid.duration();

  // per-path slots, reduced serially afterwards for determinism
  const int pairs = dim * dim;
  std::vector<double> qvw(static_cast<size_t>(n_paths) * pairs);
  std::vector<double> end_re(static_cast<size_t>(n_paths) * dim);
  std::vector<double> end_im(static_cast<size_t>(n_paths) * dim);

  const Complex rot = unit_phase(0.5 * spec.phi);
  const int n = grid.n_steps;
  for_each_path(spec, grid, dim, n_paths, seed, [&](int p, const double* w) {
    double* q = qvw.data() + static_cast<size_t>(p) * pairs;
    std::fill(q, q + pairs, 0.0);
    for (int k = 0; k < n; ++k) {
      const double* w0 = w + static_cast<int64_t>(k) * dim;
      const double* w1 = w0 + dim;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          q[a * dim + b] += (w1[a] - w0[a]) * (w1[b] - w0[b]);
    }
    const double* wend = w + static_cast<int64_t>(n) * dim;
    for (int c = 0; c < dim; ++c) {
      const Complex mc = rot * wend[c];
      end_re[static_cast<size_t>(p) * dim + c] = mc.real();
      end_im[static_cast<size_t>(p) * dim + c] = mc.imag();
    }
  });

  const Complex phase = rot * rot;
  s.qv.assign(pairs, Complex(0));
  s.qv_conj.assign(pairs, Complex(0));
  s.qv_diag_se.assign(dim, 0.0);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      double mean = 0.0;
      for (int p = 0; p < n_paths; ++p)
        mean += qvw[static_cast<size_t>(p) * pairs + a * dim + b];
      mean /= n_paths;
      s.qv[a * dim + b] = phase * mean;
      s.qv_conj[a * dim + b] = Complex(mean, 0.0);
      if (a == b) {
        double var = 0.0;
        for (int p = 0; p < n_paths; ++p) {
          double d = qvw[static_cast<size_t>(p) * pairs + a * dim + b] - mean;
          var += d * d;
        }
        var /= (n_paths - 1);
        s.qv_diag_se[a] = std::sqrt(var / n_paths);
      }
    }
  }

  s.var_re.assign(dim, 0.0);
  s.var_im.assign(dim, 0.0);
  s.cov_re_im.assign(dim, 0.0);
  s.se_var_re.assign(dim, 0.0);
  s.se_var_im.assign(dim, 0.0);
  s.se_cov.assign(dim, 0.0);
  for (int c = 0; c < dim; ++c) {
    double mr = 0.0, mi = 0.0;
    for (int p = 0; p < n_paths; ++p) {
      mr += end_re[static_cast<size_t>(p) * dim + c];
      mi += end_im[static_cast<size_t>(p) * dim + c];
    }
    mr /= n_paths;
    mi /= n_paths;
    double vrr = 0.0, vii = 0.0, vri = 0.0, m4r = 0.0, m4i = 0.0, m4ri = 0.0;
    for (int p = 0; p < n_paths; ++p) {
      const double dr = end_re[static_cast<size_t>(p) * dim + c] - mr;
      const double di = end_im[static_cast<size_t>(p) * dim + c] - mi;
      vrr += dr * dr;
      vii += di * di;
      vri += dr * di;
      m4r += dr * dr * dr * dr;
      m4i += di * di * di * di;
      m4ri += dr * di * dr * di;
    }
    const double n1 = n_paths - 1.0;
    s.var_re[c] = vrr / n1;
    s.var_im[c] = vii / n1;
    s.cov_re_im[c] = vri / n1;
    // SE of a variance estimate: sqrt((m4 - var^2)/N); same shape for cov
    const double nn = n_paths;
    s.se_var_re[c] = std::sqrt(std::max(
        0.0, (m4r / nn - s.var_re[c] * s.var_re[c]) / nn));
    s.se_var_im[c] = std::sqrt(std::max(
        0.0, (m4i / nn - s.var_im[c] * s.var_im[c]) / nn));
    s.se_cov[c] = std::sqrt(std::max(
        0.0, (m4ri / nn - s.cov_re_im[c] * s.cov_re_im[c]) / nn));
  }
  return s;
}

namespace {

// max |z| over the mean tests of the given channel extractor
double mean_test_z(const ComplexPathEnsemble& ens,
                   double (*chan)(const Complex&), int comp) {
  const int n = ens.n_steps();
  double sum = 0.0, sum2 = 0.0;
  int64_t cnt = 0;
  for (int p = 0; p < ens.n_paths; ++p)
    for (int k = 0; k < n; ++k) {
      const Complex d = ens.m(p, k + 1, comp) - ens.m(p, k, comp);
      const double x = chan(d);
      sum += x;
      sum2 += x * x;
      ++cnt;
    }
  const double mean = sum / cnt;
  const double var = sum2 / cnt - mean * mean;
  if (var <= 0.0) return 0.0;  // degenerate channel (e.g. Im at phi = 0)
  return std::fabs(mean) / std::sqrt(var / cnt);
}

double re_chan(const Complex& z) { return z.real(); }
double im_chan(const Complex& z) { return z.imag(); }

}  // namespace

LevyReport levy_diagnostics(const ComplexPathEnsemble& ens,
                            double significance) {
  if (ens.n_paths < 1000)
    throw Error(ErrorCode::EnsembleTooSmall,
                "levy_diagnostics needs at least 1000 paths");
  LevyReport rep;
  rep.significance = significance;
  const int n = ens.n_steps();
  const int d = ens.dim;

  // (i) increment mean; Bonferroni over 2d channels
  {
    const double zc = stats::normal_quantile(1.0 - 0.5 * significance / (2 * d));
    double worst = 0.0;
    for (int c = 0; c < d; ++c) {
      worst = std::max(worst, mean_test_z(ens, re_chan, c));
      worst = std::max(worst, mean_test_z(ens, im_chan, c));
    }
    rep.max_mean_z = worst;
    rep.mean_pass = worst < zc;
  }

  // (ii) lag-1 correlation of disjoint increments, pooled over paths
  {
    const double zc = stats::normal_quantile(1.0 - 0.5 * significance / d);
    double worst = 0.0;
    for (int c = 0; c < d; ++c) {
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      int64_t cnt = 0;
      for (int p = 0; p < ens.n_paths; ++p)
        for (int k = 0; k + 1 < n; ++k) {
          const double x = ens.wiener(p, k + 1, c) - ens.wiener(p, k, c);
          const double y = ens.wiener(p, k + 2, c) - ens.wiener(p, k + 1, c);
          sxy += x * y;
          sxx += x * x;
          syy += y * y;
          ++cnt;
        }
      if (sxx <= 0.0 || syy <= 0.0) continue;
      const double r = sxy / std::sqrt(sxx * syy);
      worst = std::max(worst, std::fabs(r) * std::sqrt(static_cast<double>(cnt)));
    }
    rep.max_corr_z = worst;
    rep.correlation_pass = worst < zc;
  }

  // (iii) stationarity: per-block increment variance equal across 8 time
  // blocks (variance linear in t)
  {
    const int blocks = std::min(8, n);
    const double zc =
        stats::normal_quantile(1.0 - 0.5 * significance / (blocks * d));
    double worst = 0.0;
    for (int c = 0; c < d; ++c) {
      std::vector<double> v(blocks, 0.0);
      std::vector<int64_t> cnt(blocks, 0);
      for (int p = 0; p < ens.n_paths; ++p)
        for (int k = 0; k < n; ++k) {
          const int b = static_cast<int>(static_cast<int64_t>(k) * blocks / n);
          const double x = ens.wiener(p, k + 1, c) - ens.wiener(p, k, c);
          v[b] += x * x;
          cnt[b]++;
        }
      double pooled = 0.0;
      int64_t total = 0;
      for (int b = 0; b < blocks; ++b) {
        pooled += v[b];
        total += cnt[b];
      }
      if (pooled <= 0.0) continue;
      pooled /= total;
      for (int b = 0; b < blocks; ++b) {
        const double vb = v[b] / cnt[b];
        // Var of a Gaussian variance estimate: 2 sigma^4 / n
        const double z =
            std::fabs(vb - pooled) / (pooled * std::sqrt(2.0 / cnt[b]));
        worst = std::max(worst, z);
      }
    }
    rep.max_stationarity_z = worst;
    rep.stationarity_pass = worst < zc;
  }

  // (iv) realized-QV determinism: the cross-path variance of [W,W]_tf must
  // match the Gaussian concentration rate 2 nu^2 dt T, which shrinks as
  // dt -> 0; tested via the chi-square z of the observed variance.
  {
    const double zc = stats::normal_quantile(1.0 - 0.5 * significance / d);
    const double dt = ens.grid.dt();
    const double T = ens.grid.duration();
    const double nu = ens.spec.wiener_rate();
    const double theory = 2.0 * nu * nu * dt * T;
    double worst = 0.0;
    for (int c = 0; c < d; ++c) {
      double mean = 0.0, mean2 = 0.0;
      for (int p = 0; p < ens.n_paths; ++p) {
        double q = 0.0;
        for (int k = 0; k < n; ++k) {
          const double x = ens.wiener(p, k + 1, c) - ens.wiener(p, k, c);
          q += x * x;
        }
        mean += q;
        mean2 += q * q;
      }
      mean /= ens.n_paths;
      const double var = mean2 / ens.n_paths - mean * mean;
      if (theory <= 0.0) continue;
      const double z = std::fabs(var / theory - 1.0) *
                       std::sqrt(ens.n_paths / 2.0);
      worst = std::max(worst, z);
    }
    rep.max_qv_z = worst;
    rep.qv_determinism_pass = worst < zc;
  }
  return rep;
}

TwoSidedReport two_sided_increment_check(const ComplexPathEnsemble& ens,
                                         double significance) {
  // Forward increments vs increments of the time-reversed paths; both samples
  // taken from the real projection of M over all paths and steps.
  const int n = ens.n_steps();
  std::vector<double> fwd, rev;
  fwd.reserve(static_cast<size_t>(ens.n_paths) * n);
  rev.reserve(fwd.capacity());
  const double c0 = std::cos(0.5 * ens.spec.phi);
  for (int p = 0; p < ens.n_paths; ++p)
    for (int k = 0; k < n; ++k) {
      const double dw = ens.wiener(p, k + 1, 0) - ens.wiener(p, k, 0);
      fwd.push_back(c0 * dw);
      rev.push_back(c0 * (ens.wiener(p, n - k - 1, 0) - ens.wiener(p, n - k, 0)));
    }
  TwoSidedReport rep;
  rep.ks = stats::ks_two_sample(fwd, rev);
  const double ne = static_cast<double>(fwd.size()) / 2.0;  // equal sizes
  rep.ks_critical = std::sqrt(-0.5 * std::log(significance / 2.0)) /
                    std::sqrt(ne);
  rep.pass = rep.ks < rep.ks_critical;
  return rep;
}

}  // namespace stomech::noise
