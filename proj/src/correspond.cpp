#include "stomech/correspond.hpp"

#include <algorithm>
#include <cmath>

#include "stomech/parallel.hpp"
#include "stomech/rng.hpp"
#include "stomech/stats.hpp"

namespace stomech::correspond {

namespace {

int nearest_of(const std::vector<double>& times, double t) {
  if (times.empty()) return 0;
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return static_cast<int>(times.size()) - 1;
  const int hi = static_cast<int>(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

// centered spatial gradient of a masked scalar grid field; out mask marks
// points whose full stencil is valid
void masked_gradient(const SpaceGrid& g, const std::vector<double>& f,
                     const std::vector<uint8_t>& mask,
                     std::vector<double>& grad, std::vector<uint8_t>& ok) {
  const int nx = g.axis[0].n_points;
  const int ny = g.dim == 2 ? g.axis[1].n_points : 1;
  const double hx = g.axis[0].spacing();
  const double hy = g.dim == 2 ? g.axis[1].spacing() : 1.0;
  grad.assign(static_cast<size_t>(g.total_points()) * g.dim, 0.0);
  ok.assign(g.total_points(), 0);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      const int64_t i = g.index(ix, iy);
      if (!mask[i]) continue;
      bool valid = ix > 0 && ix + 1 < nx;
      if (valid) valid = mask[g.index(ix - 1, iy)] && mask[g.index(ix + 1, iy)];
      if (g.dim == 2) {
        valid = valid && iy > 0 && iy + 1 < ny &&
                mask[g.index(ix, iy - 1)] && mask[g.index(ix, iy + 1)];
      }
      if (!valid) continue;
      ok[i] = 1;
      grad[i * g.dim + 0] =
          (f[g.index(ix + 1, iy)] - f[g.index(ix - 1, iy)]) / (2.0 * hx);
      if (g.dim == 2)
        grad[i * g.dim + 1] =
            (f[g.index(ix, iy + 1)] - f[g.index(ix, iy - 1)]) / (2.0 * hy);
    }
}

// fill unusable points from the nearest usable point along x rows
void fill_masked(const SpaceGrid& g, std::vector<Complex>& w,
                 const std::vector<uint8_t>& ok, int64_t slice_offset) {
  const int nx = g.axis[0].n_points;
  const int ny = g.dim == 2 ? g.axis[1].n_points : 1;
  for (int iy = 0; iy < ny; ++iy) {
    int last = -1;
    for (int ix = 0; ix < nx; ++ix) {
      const int64_t i = g.index(ix, iy);
      if (ok[i]) {
        if (last < 0 && ix > 0) {
          for (int back = 0; back < ix; ++back)
            for (int c = 0; c < g.dim; ++c)
              w[slice_offset + (g.index(back, iy)) * g.dim + c] =
                  w[slice_offset + i * g.dim + c];
        } else if (last >= 0 && ix - last > 1) {
          for (int mid = last + 1; mid < ix; ++mid) {
            const int64_t src =
                (mid - last <= ix - mid) ? g.index(last, iy) : i;
            for (int c = 0; c < g.dim; ++c)
              w[slice_offset + (g.index(mid, iy)) * g.dim + c] =
                  w[slice_offset + src * g.dim + c];
          }
        }
        last = ix;
      }
    }
    if (last >= 0 && last + 1 < nx) {
      for (int tail = last + 1; tail < nx; ++tail)
        for (int c = 0; c < g.dim; ++c)
          w[slice_offset + (g.index(tail, iy)) * g.dim + c] =
              w[slice_offset + (g.index(last, iy)) * g.dim + c];
    }
  }
}

}  // namespace

int VelocityField::nearest_slice(double t) const { return nearest_of(times, t); }

VelocityField velocity_from_wave(const pde::WaveField& field, Branch branch) {
  VelocityField vf;
  vf.grid = field.grid;
  vf.times = field.times;
  vf.branch = branch;
  const DiffusionSpec& spec = field.spec;
  vf.v2 = spec.alpha() * spec.hbar / spec.mass;
  const int64_t npts = field.grid.total_points();
  vf.w.assign(static_cast<size_t>(field.n_slices()) * npts * field.grid.dim,
              Complex(0));
  vf.mask.assign(static_cast<size_t>(field.n_slices()) * npts, 0);

  const Complex sign = branch == Branch::Plus ? 1.0 : -1.0;
  const Complex coef = sign * spec.alpha() * spec.hbar / spec.mass;

  pde::LogField prev;
  int64_t anchor = 0;
  {
    double best = 0.0;
    const Complex* psi = field.slice(field.n_slices() / 2);
    for (int64_t i = 0; i < npts; ++i)
      if (std::abs(psi[i]) > best) {
        best = std::abs(psi[i]);
        anchor = i;
      }
  }

  std::vector<double> grad_abs, grad_ph, abuf(static_cast<size_t>(npts) * field.grid.dim);
  std::vector<uint8_t> ok_abs, ok_ph;
  int64_t usable_total = 0;
  for (int s = 0; s < field.n_slices(); ++s) {
    pde::LogField lf = pde::log_field(field, s);
    if (s > 0) pde::align_phase(prev, lf, anchor);

    masked_gradient(field.grid, lf.log_abs, lf.mask, grad_abs, ok_abs);
    masked_gradient(field.grid, lf.phase, lf.mask, grad_ph, ok_ph);

    // vector potential on the slice
    double xbuf[2];
    std::vector<double> aval(field.grid.dim, 0.0);
    const int nx = field.grid.axis[0].n_points;
    const int ny = field.grid.dim == 2 ? field.grid.axis[1].n_points : 1;
    const int64_t slice_off = static_cast<int64_t>(s) * npts * field.grid.dim;
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        const int64_t i = field.grid.index(ix, iy);
        if (!ok_abs[i]) continue;
        vf.mask[static_cast<int64_t>(s) * npts + i] = 1;
        ++usable_total;
        xbuf[0] = field.grid.axis[0].coord(ix);
        if (field.grid.dim == 2) xbuf[1] = field.grid.axis[1].coord(iy);
        field.potential.a(xbuf, field.times[s], aval.data(), field.grid.dim);
        for (int c = 0; c < field.grid.dim; ++c) {
          const Complex dlog(grad_abs[i * field.grid.dim + c],
                             grad_ph[i * field.grid.dim + c]);
          vf.w[slice_off + i * field.grid.dim + c] =
              coef * dlog - spec.charge * aval[c] / spec.mass;
        }
      }
    fill_masked(field.grid, vf.w, ok_abs, slice_off);
    prev = std::move(lf);
  }
  if (usable_total <
      static_cast<int64_t>(field.n_slices()) * npts / 4)
    throw Error(ErrorCode::NodeRegionTooLarge,
                "masked node region covers most of the field");
  (void)abuf;
  return vf;
}

ConstraintReport constraint_check(const VelocityField& plus,
                                  const VelocityField& minus, double phi) {
  if (!plus.grid.same_as(minus.grid) || plus.times.size() != minus.times.size())
    throw Error(ErrorCode::GridMismatch, "velocity fields on different grids");
  const double ch = std::cos(0.5 * phi);
  const double sh = std::sin(0.5 * phi);
  ConstraintReport rep;
  double sum2 = 0.0;
  const int64_t npts = plus.grid.total_points();
  for (int s = 0; s < plus.n_slices(); ++s)
    for (int64_t i = 0; i < npts; ++i) {
      if (!plus.mask[static_cast<int64_t>(s) * npts + i] ||
          !minus.mask[static_cast<int64_t>(s) * npts + i])
        continue;
      for (int c = 0; c < plus.grid.dim; ++c) {
        const Complex wp = plus.at(s, i, c);
        const Complex wm = minus.at(s, i, c);
        const double r = ch * wp.imag() - sh * wp.real() -
                         (ch * wm.imag() - sh * wm.real());
        sum2 += r * r;
        rep.max_abs = std::max(rep.max_abs, std::fabs(r));
        ++rep.n_points;
      }
    }
  rep.l2 = rep.n_points > 0 ? std::sqrt(sum2 / rep.n_points) : 0.0;
  return rep;
}

VelocityField fokker_planck_drift(const pde::WaveField& field, Branch branch) {
  VelocityField vf;
  vf.grid = field.grid;
  vf.times = field.times;
  vf.branch = branch;
  const DiffusionSpec& spec = field.spec;
  vf.v2 = spec.alpha() * spec.hbar / spec.mass;
  const int64_t npts = field.grid.total_points();
  const int dim = field.grid.dim;
  vf.w.assign(static_cast<size_t>(field.n_slices()) * npts * dim, Complex(0));
  vf.mask.assign(static_cast<size_t>(field.n_slices()) * npts, 0);

  const bool real_regime = std::fabs(std::sin(spec.phi)) < 1e-12;
  const double s_rate = spec.real_noise_rate();
  const double hbar_eff = spec.alpha_mag * spec.hbar;
  const double drift_sign = branch == Branch::Plus ? 1.0 : -1.0;

  pde::LogField prev;
  int64_t anchor = 0;
  {
    double best = 0.0;
    const Complex* psi = field.slice(field.n_slices() / 2);
    for (int64_t i = 0; i < npts; ++i)
      if (std::abs(psi[i]) > best) {
        best = std::abs(psi[i]);
        anchor = i;
      }
  }

  std::vector<double> grad_abs, grad_ph;
  std::vector<uint8_t> ok_abs, ok_ph;
  for (int s = 0; s < field.n_slices(); ++s) {
    pde::LogField lf = pde::log_field(field, s);
    if (s > 0) pde::align_phase(prev, lf, anchor);
    masked_gradient(field.grid, lf.log_abs, lf.mask, grad_abs, ok_abs);
    masked_gradient(field.grid, lf.phase, lf.mask, grad_ph, ok_ph);

    // grad ln rho = (1 or 2) grad ln|Psi|
    const double rho_factor = real_regime ? 1.0 : 2.0;
    double xbuf[2];
    std::vector<double> aval(dim, 0.0);
    const int nx = field.grid.axis[0].n_points;
    const int ny = dim == 2 ? field.grid.axis[1].n_points : 1;
    const int64_t slice_off = static_cast<int64_t>(s) * npts * dim;
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        const int64_t i = field.grid.index(ix, iy);
        if (!ok_abs[i]) continue;
        vf.mask[static_cast<int64_t>(s) * npts + i] = 1;
        xbuf[0] = field.grid.axis[0].coord(ix);
        if (dim == 2) xbuf[1] = field.grid.axis[1].coord(iy);
        field.potential.a(xbuf, field.times[s], aval.data(), dim);
        for (int c = 0; c < dim; ++c) {
          const double dlnrho = rho_factor * grad_abs[i * dim + c];
          double v_flow;
          if (real_regime) {
            v_flow = -0.5 * hbar_eff / spec.mass * dlnrho;
          } else {
            const double ds = hbar_eff * grad_ph[i * dim + c];
            v_flow = (ds - spec.charge * aval[c]) / spec.mass;
          }
          vf.w[slice_off + i * dim + c] =
              Complex(v_flow + drift_sign * 0.5 * s_rate * dlnrho, 0.0);
        }
      }
    fill_masked(field.grid, vf.w, ok_abs, slice_off);
    prev = std::move(lf);
  }
  return vf;
}

namespace {

// multilinear interpolation of the drift at x, nearest slice in time
void drift_lookup(const VelocityField& vf, int slice, const double* x,
                  double* out) {
  const SpaceGrid& g = vf.grid;
  double fx[2] = {0.0, 0.0};
  int ix[2] = {0, 0};
  for (int a = 0; a < g.dim; ++a) {
    const AxisSpec& ax = g.axis[a];
    const double u = (x[a] - ax.min) / ax.spacing();
    if (u < -0.5 || u > ax.n_points - 0.5)
      throw Error(ErrorCode::DriftLookupOutOfBox, "position left the drift box");
    const double uc = std::clamp(u, 0.0, static_cast<double>(ax.n_points - 1));
    ix[a] = std::min(static_cast<int>(uc), ax.n_points - 2);
    fx[a] = uc - ix[a];
  }
  const int64_t base = static_cast<int64_t>(slice) * g.total_points() * g.dim;
  if (g.dim == 1) {
    for (int c = 0; c < 1; ++c) {
      const double v0 = vf.w[base + (ix[0]) * 1 + c].real();
      const double v1 = vf.w[base + (ix[0] + 1) * 1 + c].real();
      out[c] = v0 + fx[0] * (v1 - v0);
    }
  } else {
    for (int c = 0; c < 2; ++c) {
      const double v00 = vf.w[base + g.index(ix[0], ix[1]) * 2 + c].real();
      const double v10 = vf.w[base + g.index(ix[0] + 1, ix[1]) * 2 + c].real();
      const double v01 = vf.w[base + g.index(ix[0], ix[1] + 1) * 2 + c].real();
      const double v11 = vf.w[base + g.index(ix[0] + 1, ix[1] + 1) * 2 + c].real();
      const double a0 = v00 + fx[0] * (v10 - v00);
      const double a1 = v01 + fx[0] * (v11 - v01);
      out[c] = a0 + fx[1] * (a1 - a0);
    }
  }
}

void apply_boundary(const SpaceGrid& g, BoundaryPolicy bp, double* x) {
  for (int a = 0; a < g.dim; ++a) {
    const double lo = g.axis[a].min;
    const double hi = g.axis[a].max;
    const double len = hi - lo;
    double v = x[a];
    if (bp == BoundaryPolicy::PeriodicWrap) {
      v = std::fmod(v - lo, len);
      if (v < 0) v += len;
      x[a] = lo + v;
    } else {
      // reflect until inside; steps are small relative to the box
      int guard = 0;
      while ((v < lo || v > hi) && guard++ < 64) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
      }
      x[a] = v;
    }
  }
}

// inverse-CDF sampling from a 1d node density (piecewise linear CDF)
double sample_inverse_cdf(const std::vector<double>& cdf, const AxisSpec& ax,
                          double u) {
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  int hi = static_cast<int>(it - cdf.begin());
  hi = std::clamp(hi, 1, ax.n_points - 1);
  const double c0 = cdf[hi - 1], c1 = cdf[hi];
  const double f = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
  return ax.coord(hi - 1) + f * ax.spacing();
}

}  // namespace

DriftEnsemble drift_diffusion_simulate(const VelocityField& drift,
                                       const DiffusionSpec& spec_in,
                                       const TimeGrid& grid, int n_paths,
                                       const std::vector<double>& initial_density,
                                       const SpaceGrid& density_grid,
                                       SeedSpec seed, const SimOptions& opt) {
  const DiffusionSpec spec = validate_spec(spec_in);
  validate_grid(grid);
  const int dim = drift.grid.dim;
  if (static_cast<int64_t>(initial_density.size()) != density_grid.total_points())
    throw Error(ErrorCode::GridMismatch, "initial density size != grid");
  const int64_t doubles =
      static_cast<int64_t>(n_paths) * (grid.n_steps + 1) * dim;
  if (doubles * 8 > opt.max_bytes)
    throw Error(ErrorCode::OverflowingEnsembleSize, "ensemble too large");

  // precheck the drift magnitude guard on the stored field itself
  const double box0 = drift.grid.axis[0].max - drift.grid.axis[0].min;
  double wmax = 0.0;
  for (const Complex& z : drift.w) wmax = std::max(wmax, std::fabs(z.real()));
  if (wmax * grid.dt() > box0)
    throw Error(ErrorCode::StepTooLarge,
                "|b| dt exceeds the grid box; reduce dt");

  DriftEnsemble ens;
  ens.spec = spec;
  ens.grid = grid;
  ens.dim = dim;
  ens.n_paths = n_paths;
  ens.seed = seed;
  ens.direction = drift.branch;
  ens.x.resize(doubles);

  const bool forward = drift.branch == Branch::Plus;
  const double noise_sd = std::sqrt(spec.real_noise_rate() * grid.dt());
  const double dt = grid.dt();
  const int n = grid.n_steps;

  // 1d inverse-CDF table
  std::vector<double> cdf;
  double rho_max = 0.0;
  if (dim == 1) {
    cdf.resize(density_grid.axis[0].n_points, 0.0);
    for (int i = 1; i < density_grid.axis[0].n_points; ++i)
      cdf[i] = cdf[i - 1] + 0.5 *
                                (initial_density[i - 1] + initial_density[i]) *
                                density_grid.axis[0].spacing();
    const double total = cdf.back();
    if (!(total > 0))
      throw Error(ErrorCode::ZeroNorm, "initial density integrates to zero");
    for (auto& c : cdf) c /= total;
  } else {
    for (double r : initial_density) rho_max = std::max(rho_max, r);
    if (!(rho_max > 0))
      throw Error(ErrorCode::ZeroNorm, "initial density is zero");
  }

  parallel_for(n_paths, [&](int64_t p) {
    Xoshiro256pp rng(seed.master_seed, static_cast<uint64_t>(p));
    double x[2] = {0.0, 0.0};
    if (dim == 1) {
      x[0] = sample_inverse_cdf(cdf, density_grid.axis[0], rng.uniform());
    } else {
      // rejection against the bilinear-interpolated density
      for (int tries = 0; tries < 100000; ++tries) {
        x[0] = density_grid.axis[0].min +
               rng.uniform() * (density_grid.axis[0].max - density_grid.axis[0].min);
        x[1] = density_grid.axis[1].min +
               rng.uniform() * (density_grid.axis[1].max - density_grid.axis[1].min);
        // nearest-node density is accurate enough for seeding
        const int ix = static_cast<int>(std::lround(
            (x[0] - density_grid.axis[0].min) / density_grid.axis[0].spacing()));
        const int iy = static_cast<int>(std::lround(
            (x[1] - density_grid.axis[1].min) / density_grid.axis[1].spacing()));
        const double r = initial_density[density_grid.index(
            std::clamp(ix, 0, density_grid.axis[0].n_points - 1),
            std::clamp(iy, 0, density_grid.axis[1].n_points - 1))];
        if (rng.uniform() * rho_max <= r) break;
      }
    }

    auto slot = [&](int k, int c) {
      return (static_cast<int64_t>(p) * (n + 1) + k) * dim + c;
    };
    double b[2];
    if (forward) {
      for (int c = 0; c < dim; ++c) ens.x[slot(0, c)] = x[c];
      for (int k = 0; k < n; ++k) {
        const int s = drift.nearest_slice(grid.time(k));
        drift_lookup(drift, s, x, b);
        for (int c = 0; c < dim; ++c)
          x[c] += b[c] * dt + noise_sd * rng.gauss();
        apply_boundary(drift.grid, opt.boundary, x);
        for (int c = 0; c < dim; ++c) ens.x[slot(k + 1, c)] = x[c];
      }
    } else {
      for (int c = 0; c < dim; ++c) ens.x[slot(n, c)] = x[c];
      for (int k = n; k > 0; --k) {
        const int s = drift.nearest_slice(grid.time(k));
        drift_lookup(drift, s, x, b);
        for (int c = 0; c < dim; ++c)
          x[c] += -b[c] * dt + noise_sd * rng.gauss();
        apply_boundary(drift.grid, opt.boundary, x);
        for (int c = 0; c < dim; ++c) ens.x[slot(k - 1, c)] = x[c];
      }
    }
  });
  return ens;
}

namespace {

DensityEstimate density_estimate_impl(const DriftEnsemble& ens, double t,
                                      DensityMethod method,
                                      const SpaceGrid& target,
                                      double bandwidth_override, bool parallel) {
  if (ens.n_paths == 0)
    throw Error(ErrorCode::EmptyEnsemble, "no paths to estimate from");
  DensityEstimate est;
  est.grid = target;
  est.method = method;
  const int64_t npts = target.total_points();
  est.rho.assign(npts, 0.0);
  int step = static_cast<int>(std::lround((t - ens.grid.t0) / ens.grid.dt()));
  step = std::clamp(step, 0, ens.grid.n_steps);
  const int dim = ens.dim;
  const int N = ens.n_paths;

  if (method == DensityMethod::Histogram) {
    // linear (cloud-in-cell) assignment: preserves the first moment exactly
    for (int p = 0; p < N; ++p) {
      int lo[2] = {0, 0};
      double fr[2] = {0.0, 0.0};
      bool inside = true;
      for (int a = 0; a < dim; ++a) {
        const AxisSpec& ax = target.axis[a];
        const double u = (ens.at(p, step, a) - ax.min) / ax.spacing();
        if (u < 0.0 || u > ax.n_points - 1) {
          inside = false;
          break;
        }
        lo[a] = std::min(static_cast<int>(u), ax.n_points - 2);
        fr[a] = u - lo[a];
      }
      if (!inside) continue;
      if (dim == 1) {
        est.rho[lo[0]] += 1.0 - fr[0];
        est.rho[lo[0] + 1] += fr[0];
      } else {
        est.rho[target.index(lo[0], lo[1])] += (1 - fr[0]) * (1 - fr[1]);
        est.rho[target.index(lo[0] + 1, lo[1])] += fr[0] * (1 - fr[1]);
        est.rho[target.index(lo[0], lo[1] + 1)] += (1 - fr[0]) * fr[1];
        est.rho[target.index(lo[0] + 1, lo[1] + 1)] += fr[0] * fr[1];
      }
    }
  } else {
    // Gaussian product KDE, Silverman bandwidth per axis unless overridden
    double bw[2] = {bandwidth_override, bandwidth_override};
    if (bandwidth_override <= 0.0) {
      for (int a = 0; a < dim; ++a) {
        double mean = 0.0, var = 0.0;
        for (int p = 0; p < N; ++p) mean += ens.at(p, step, a);
        mean /= N;
        for (int p = 0; p < N; ++p) {
          const double d = ens.at(p, step, a) - mean;
          var += d * d;
        }
        var /= std::max(1, N - 1);
        bw[a] = 1.06 * std::sqrt(var) * std::pow(static_cast<double>(N), -0.2);
        if (bw[a] <= 0.0) bw[a] = target.axis[a].spacing();
      }
    }
    est.bandwidth[0] = bw[0];
    est.bandwidth[1] = dim == 2 ? bw[1] : 0.0;

    // parallel over grid nodes: each node sums over all samples
    auto eval_node = [&](int64_t i) {
      const int nyt = dim == 2 ? target.axis[1].n_points : 1;
      const int ix = static_cast<int>(i / nyt);
      const int iy = static_cast<int>(i % nyt);
      const double gx = target.axis[0].coord(ix);
      const double gy = dim == 2 ? target.axis[1].coord(iy) : 0.0;
      double acc = 0.0;
      for (int p = 0; p < N; ++p) {
        double u = (gx - ens.at(p, step, 0)) / bw[0];
        double e = 0.5 * u * u;
        if (dim == 2) {
          const double v = (gy - ens.at(p, step, 1)) / bw[1];
          e += 0.5 * v * v;
        }
        if (e < 40.0) acc += std::exp(-e);
      }
      est.rho[i] = acc;
    };
    if (parallel)
      parallel_for(npts, eval_node);
    else
      serial_for(npts, eval_node);
  }

  // normalize on the target grid (trapezoid)
  double total = 0.0;
  double cellv = target.axis[0].spacing();
  if (dim == 2) cellv *= target.axis[1].spacing();
  for (int64_t i = 0; i < npts; ++i) {
    double w = cellv;
    const int nyt = dim == 2 ? target.axis[1].n_points : 1;
    const int ix = static_cast<int>(i / nyt);
    const int iy = static_cast<int>(i % nyt);
    if (ix == 0 || ix == target.axis[0].n_points - 1) w *= 0.5;
    if (dim == 2 && (iy == 0 || iy == target.axis[1].n_points - 1)) w *= 0.5;
    total += est.rho[i] * w;
  }
  if (total > 0)
    for (auto& r : est.rho) r /= total;
  return est;
}

}  // namespace

DensityEstimate density_estimate(const DriftEnsemble& ens, double t,
                                 DensityMethod method, const SpaceGrid& target,
                                 double bandwidth_override) {
  return density_estimate_impl(ens, t, method, target, bandwidth_override, true);
}

DensityEstimate density_estimate_serial(const DriftEnsemble& ens, double t,
                                        DensityMethod method,
                                        const SpaceGrid& target,
                                        double bandwidth_override) {
  return density_estimate_impl(ens, t, method, target, bandwidth_override, false);
}

DensityDistance compare_density(const std::vector<double>& rho_a,
                                const std::vector<double>& rho_b,
                                const SpaceGrid& grid) {
  if (rho_a.size() != rho_b.size() ||
      static_cast<int64_t>(rho_a.size()) != grid.total_points())
    throw Error(ErrorCode::GridMismatch, "density sizes disagree");
  DensityDistance d;
  double cellv = grid.axis[0].spacing();
  if (grid.dim == 2) cellv *= grid.axis[1].spacing();
  double cum_a = 0.0, cum_b = 0.0;
  for (size_t i = 0; i < rho_a.size(); ++i) {
    double w = cellv;
    const int nyt = grid.dim == 2 ? grid.axis[1].n_points : 1;
    const int ix = static_cast<int>(i / nyt);
    const int iy = static_cast<int>(i % nyt);
    if (ix == 0 || ix == grid.axis[0].n_points - 1) w *= 0.5;
    if (grid.dim == 2 && (iy == 0 || iy == grid.axis[1].n_points - 1)) w *= 0.5;
    const double diff = rho_a[i] - rho_b[i];
    d.l1 += std::fabs(diff) * w;
    d.max_abs = std::max(d.max_abs, std::fabs(diff));
    if (grid.dim == 1) {
      cum_a += rho_a[i] * w;
      cum_b += rho_b[i] * w;
      d.ks = std::max(d.ks, std::fabs(cum_a - cum_b));
    }
  }
  return d;
}

std::vector<double> resample_density(const std::vector<double>& rho,
                                     const SpaceGrid& from, const SpaceGrid& to) {
  std::vector<double> out(to.total_points(), 0.0);
  const int nyt = to.dim == 2 ? to.axis[1].n_points : 1;
  for (int64_t i = 0; i < to.total_points(); ++i) {
    const int ix = static_cast<int>(i / nyt);
    const int iy = static_cast<int>(i % nyt);
    double x[2] = {to.axis[0].coord(ix),
                   to.dim == 2 ? to.axis[1].coord(iy) : 0.0};
    // multilinear on the source grid, clamped
    double fx[2] = {0.0, 0.0};
    int gi[2] = {0, 0};
    for (int a = 0; a < from.dim; ++a) {
      const AxisSpec& ax = from.axis[a];
      double u = (x[a] - ax.min) / ax.spacing();
      u = std::clamp(u, 0.0, static_cast<double>(ax.n_points - 1));
      gi[a] = std::min(static_cast<int>(u), ax.n_points - 2);
      fx[a] = u - gi[a];
    }
    if (from.dim == 1) {
      out[i] = rho[gi[0]] + fx[0] * (rho[gi[0] + 1] - rho[gi[0]]);
    } else {
      const double v00 = rho[from.index(gi[0], gi[1])];
      const double v10 = rho[from.index(gi[0] + 1, gi[1])];
      const double v01 = rho[from.index(gi[0], gi[1] + 1)];
      const double v11 = rho[from.index(gi[0] + 1, gi[1] + 1)];
      const double a0 = v00 + fx[0] * (v10 - v00);
      const double a1 = v01 + fx[0] * (v11 - v01);
      out[i] = a0 + fx[1] * (a1 - a0);
    }
  }
  // renormalize
  double total = 0.0;
  double cellv = to.axis[0].spacing();
  if (to.dim == 2) cellv *= to.axis[1].spacing();
  for (int64_t i = 0; i < to.total_points(); ++i) {
    double w = cellv;
    const int ix = static_cast<int>(i / nyt);
    const int iy = static_cast<int>(i % nyt);
    if (ix == 0 || ix == to.axis[0].n_points - 1) w *= 0.5;
    if (to.dim == 2 && (iy == 0 || iy == to.axis[1].n_points - 1)) w *= 0.5;
    total += out[i] * w;
  }
  if (total > 0)
    for (auto& r : out) r /= total;
  return out;
}

UncertaintyStats uncertainty_stats(const pde::WaveField& field, int slice_index) {
  if (field.grid.dim != 1)
    throw Error(ErrorCode::UnsupportedDim, "uncertainty_stats is 1d");
  const int n = field.grid.axis[0].n_points;
  const double h = field.grid.axis[0].spacing();
  const std::vector<double> rho = pde::born_density(field, slice_index);

  UncertaintyStats st;
  double ex = 0.0, ex2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = field.weight(i);
    const double x = field.grid.axis[0].coord(i);
    ex += x * rho[i] * w;
    ex2 += x * x * rho[i] * w;
  }
  st.sigma_x = std::sqrt(std::max(0.0, ex2 - ex * ex));

  // momentum distribution from the DFT over the box period n*h
  std::vector<Complex> psi_k(field.slice(slice_index),
                             field.slice(slice_index) + n);
  if (stats::is_pow2(psi_k.size())) {
    stats::fft_pow2(psi_k, false);
  } else {
    std::vector<Complex> out(n, Complex(0));
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        out[k] += psi_k[j] *
                  std::exp(Complex(0.0, -2.0 * kPi * k * j / static_cast<double>(n)));
    psi_k = std::move(out);
  }
  const double period = n * h;
  const double hbar_eff = field.spec.alpha_mag * field.spec.hbar;
  double wsum = 0.0, ep = 0.0, ep2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const int kk = k <= n / 2 ? k : k - n;
    const double p = hbar_eff * 2.0 * kPi * kk / period;
    const double wgt = std::norm(psi_k[k]);
    wsum += wgt;
    ep += p * wgt;
    ep2 += p * p * wgt;
  }
  if (!(wsum > 0)) throw Error(ErrorCode::ZeroNorm, "zero spectral weight");
  ep /= wsum;
  ep2 /= wsum;
  st.sigma_p = std::sqrt(std::max(0.0, ep2 - ep * ep));
  st.product = st.sigma_x * st.sigma_p;
  st.bound = 0.5 * field.spec.alpha_mag * field.spec.hbar *
             (1.0 + std::cos(field.spec.phi));
  return st;
}

TwoSidedReport two_sided_check(const pde::WaveField& field, int n_paths,
                               SeedSpec seed, const SpaceGrid& comparison_grid,
                               const SimOptions& opt) {
  const int n_slices = field.n_slices();
  if (n_slices < 3)
    throw Error(ErrorCode::GridMismatch, "two_sided_check needs >= 3 slices");
  TwoSidedReport rep;
  const int mid = n_slices / 2;
  rep.t_mid = field.times[mid];

  const VelocityField b_plus = fokker_planck_drift(field, Branch::Plus);
  const VelocityField b_minus = fokker_planck_drift(field, Branch::Minus);

  TimeGrid sim_grid{field.times.front(), field.times.back(),
                    (n_slices - 1) * std::max(1, opt.substeps_per_slice)};
  const std::vector<double> rho0 = pde::born_density(field, 0);
  const std::vector<double> rhof = pde::born_density(field, n_slices - 1);

  DriftEnsemble fwd = drift_diffusion_simulate(
      b_plus, field.spec, sim_grid, n_paths, rho0, field.grid, seed, opt);
  DriftEnsemble bwd = drift_diffusion_simulate(
      b_minus, field.spec, sim_grid, n_paths, rhof, field.grid,
      SeedSpec{seed.master_seed + 1}, opt);

  const std::vector<double> rho_mid_pde = resample_density(
      pde::born_density(field, mid), field.grid, comparison_grid);
  const DensityEstimate rho_fwd = density_estimate(
      fwd, rep.t_mid, DensityMethod::Kde, comparison_grid);
  const DensityEstimate rho_bwd = density_estimate(
      bwd, rep.t_mid, DensityMethod::Kde, comparison_grid);
  rep.l1_forward =
      compare_density(rho_fwd.rho, rho_mid_pde, comparison_grid).l1;
  rep.l1_backward =
      compare_density(rho_bwd.rho, rho_mid_pde, comparison_grid).l1;
  return rep;
}

}  // namespace stomech::correspond
