#include <algorithm>
#include <cmath>

#include "stomech/pde.hpp"

namespace stomech::pde {

namespace {

bool is_real_regime(const DiffusionSpec& spec) {
  return std::fabs(std::sin(spec.phi)) < 1e-12;
}

bool is_quantum_regime(const DiffusionSpec& spec) {
  return std::fabs(std::cos(spec.phi)) < 1e-12;
}

Complex packet_1d(double x, double t, double x0, double sigma0, double k0,
                  double hbar_eff, double mass) {
  // free evolution of (2 pi s0^2)^{-1/4} exp(-(x-x0)^2/(4 s0^2) + i k0 (x-x0))
  const double tau = hbar_eff * t / (2.0 * mass * sigma0 * sigma0);
  const Complex one_itau(1.0, tau);
  const double v = hbar_eff * k0 / mass;
  const double xp = x - x0 - v * t;
  const Complex gauss =
      std::exp(-xp * xp / (4.0 * sigma0 * sigma0 * one_itau));
  const Complex carrier = std::exp(
      Complex(0.0, k0 * (x - x0) - 0.5 * hbar_eff * k0 * k0 * t / mass));
  const double norm0 = std::pow(2.0 * kPi * sigma0 * sigma0, -0.25);
  return norm0 / std::sqrt(one_itau) * gauss * carrier;
}

}  // namespace

WaveField analytic_reference(ReferenceFamily family, const ReferenceParams& p,
                             const DiffusionSpec& spec_in,
                             const SpaceGrid& sgrid,
                             const std::vector<double>& times,
                             BoundaryKind boundary) {
  const DiffusionSpec spec = validate_spec(spec_in);
  validate_grid(sgrid);
  const double hbar_eff = spec.alpha_mag * spec.hbar;
  const double m = spec.mass;

  const bool needs_quantum = family != ReferenceFamily::HeatKernel;
  if (needs_quantum && !is_quantum_regime(spec))
    throw Error(ErrorCode::ConfigError,
                "reference family defined for the quantum regime (phi = +/- pi/2)");
  if (family == ReferenceFamily::HeatKernel && !is_real_regime(spec))
    throw Error(ErrorCode::ConfigError,
                "heat kernel reference needs real alpha (phi in {0, pi})");
  if (sgrid.dim == 2 && family != ReferenceFamily::HeatKernel &&
      family != ReferenceFamily::FreeGaussianPacket)
    throw Error(ErrorCode::UnsupportedDim, "family is 1d only");

  WaveField f;
  f.grid = sgrid;
  f.spec = spec;
  f.direction = FieldDirection::Forward;
  f.boundary = boundary;
  f.times = times;
  f.values.resize(static_cast<int64_t>(times.size()) * sgrid.total_points());

  const int nx = sgrid.axis[0].n_points;
  const int ny = sgrid.dim == 2 ? sgrid.axis[1].n_points : 1;
  for (size_t s = 0; s < times.size(); ++s) {
    const double t = times[s];
    Complex* out = f.slice_mut(static_cast<int>(s));
    for (int ix = 0; ix < nx; ++ix) {
      const double x = sgrid.axis[0].coord(ix);
      for (int iy = 0; iy < ny; ++iy) {
        const double y = sgrid.dim == 2 ? sgrid.axis[1].coord(iy) : 0.0;
        Complex val(0.0, 0.0);
        switch (family) {
          case ReferenceFamily::HeatKernel: {
            const double var = spec.wiener_rate() * (t - p.t_origin);
            if (var <= 0.0)
              throw Error(ErrorCode::ConfigError,
                          "heat kernel needs t > t_origin");
            const double dx = x - p.x0;
            double arg = dx * dx;
            double norm = std::sqrt(2.0 * kPi * var);
            if (sgrid.dim == 2) {
              const double dy = y - p.y0;
              arg += dy * dy;
              norm *= std::sqrt(2.0 * kPi * var);
            }
            val = std::exp(-arg / (2.0 * var)) / norm;
            break;
          }
          case ReferenceFamily::FreeGaussianPacket: {
            val = packet_1d(x, t, p.x0, p.sigma0, p.k0, hbar_eff, m);
            if (sgrid.dim == 2)
              val *= packet_1d(y, t, p.y0, p.sigma0, 0.0, hbar_eff, m);
            break;
          }
          case ReferenceFamily::HarmonicGround: {
            const double w = p.omega;
            const double pref = std::pow(m * w / (kPi * hbar_eff), 0.25);
            val = pref *
                  std::exp(Complex(-0.5 * m * w * (x - p.x0) * (x - p.x0) /
                                       hbar_eff,
                                   -0.5 * w * t));
            break;
          }
          case ReferenceFamily::HarmonicCoherent: {
            const double w = p.omega;
            const double a = p.x0;  // displacement amplitude
            const double xc = a * std::cos(w * t);
            const double pc = -m * w * a * std::sin(w * t);
            const double pref = std::pow(m * w / (kPi * hbar_eff), 0.25);
            const double phase =
                (pc * (x - 0.5 * xc)) / hbar_eff - 0.5 * w * t;
            val = pref * std::exp(Complex(-0.5 * m * w * (x - xc) * (x - xc) /
                                              hbar_eff,
                                          phase));
            break;
          }
          case ReferenceFamily::DoubleSlitSuperposition: {
            if (p.separation <= 0.0)
              throw Error(ErrorCode::ConfigError,
                          "double slit needs a positive separation");
            val = packet_1d(x, t, -0.5 * p.separation, p.sigma0, p.k0,
                            hbar_eff, m) +
                  packet_1d(x, t, +0.5 * p.separation, p.sigma0, p.k0,
                            hbar_eff, m);
            val *= std::sqrt(0.5);
            break;
          }
        }
        out[sgrid.index(ix, iy)] = val;
      }
    }
  }
  return f;
}

LogField log_field(const WaveField& f, int slice_index, double eps_rel) {
  const int64_t n = f.grid.total_points();
  const Complex* psi = f.slice(slice_index);
  LogField lf;
  lf.log_abs.assign(n, 0.0);
  lf.phase.assign(n, 0.0);
  lf.mask.assign(n, 0);

  double peak = 0.0;
  for (int64_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(psi[i]));
  if (peak == 0.0)
    throw Error(ErrorCode::ZeroNorm, "field is identically zero");
  const double cutoff = eps_rel * peak;

  for (int64_t i = 0; i < n; ++i) {
    const double a = std::abs(psi[i]);
    if (a >= cutoff) {
      lf.mask[i] = 1;
      lf.log_abs[i] = std::log(a);
      lf.phase[i] = std::arg(psi[i]);
    } else {
      ++lf.n_masked;
    }
  }

  auto unwrap_towards = [&](int64_t idx, int64_t ref) {
    double d = lf.phase[idx] - lf.phase[ref];
    while (d > kPi) {
      lf.phase[idx] -= 2.0 * kPi;
      d -= 2.0 * kPi;
    }
    while (d < -kPi) {
      lf.phase[idx] += 2.0 * kPi;
      d += 2.0 * kPi;
    }
  };

  if (f.grid.dim == 1) {
    // unwrap left-to-right within each unmasked segment
    for (int64_t i = 1; i < n; ++i)
      if (lf.mask[i] && lf.mask[i - 1]) unwrap_towards(i, i - 1);
  } else {
    const int nx = f.grid.axis[0].n_points;
    const int ny = f.grid.axis[1].n_points;
    // row-major: first row along y, then each column along x
    for (int iy = 1; iy < ny; ++iy)
      if (lf.mask[f.grid.index(0, iy)] && lf.mask[f.grid.index(0, iy - 1)])
        unwrap_towards(f.grid.index(0, iy), f.grid.index(0, iy - 1));
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 1; ix < nx; ++ix)
        if (lf.mask[f.grid.index(ix, iy)] && lf.mask[f.grid.index(ix - 1, iy)])
          unwrap_towards(f.grid.index(ix, iy), f.grid.index(ix - 1, iy));
    // branch-cut consistency: plaquette residues must vanish on the
    // unmasked region (simply connected assumption)
    for (int ix = 0; ix + 1 < nx; ++ix)
      for (int iy = 0; iy + 1 < ny; ++iy) {
        const int64_t i00 = f.grid.index(ix, iy);
        const int64_t i10 = f.grid.index(ix + 1, iy);
        const int64_t i01 = f.grid.index(ix, iy + 1);
        const int64_t i11 = f.grid.index(ix + 1, iy + 1);
        if (!(lf.mask[i00] && lf.mask[i10] && lf.mask[i01] && lf.mask[i11]))
          continue;
        const double loop = (lf.phase[i10] - lf.phase[i00]) +
                            (lf.phase[i11] - lf.phase[i10]) -
                            (lf.phase[i11] - lf.phase[i01]) -
                            (lf.phase[i01] - lf.phase[i00]);
        // always zero by construction of unwrapping along trees; check the
        // principal-value residue instead
        double residue = std::arg(psi[i10] / psi[i00]) +
                         std::arg(psi[i11] / psi[i10]) +
                         std::arg(psi[i01] / psi[i11]) +
                         std::arg(psi[i00] / psi[i01]);
        (void)loop;
        if (std::fabs(residue) > 1e-6)
          throw Error(ErrorCode::NodeRegionTooLarge,
                      "phase unwrapping inconsistent (nonzero winding)");
      }
  }
  return lf;
}

void align_phase(const LogField& prev, LogField& cur, int64_t anchor) {
  if (!prev.mask[anchor] || !cur.mask[anchor]) return;
  const double d = cur.phase[anchor] - prev.phase[anchor];
  const double shift = 2.0 * kPi * std::round(d / (2.0 * kPi));
  if (shift != 0.0)
    for (size_t i = 0; i < cur.phase.size(); ++i)
      if (cur.mask[i]) cur.phase[i] -= shift;
}

namespace {

// S and its first/second centered differences on the unmasked interior.
struct SliceS {
  std::vector<Complex> s;
  std::vector<uint8_t> mask;
};

SliceS principal_function(const WaveField& f, const LogField& lf) {
  const Complex pm = f.direction == FieldDirection::Backward ? 1.0 : -1.0;
  const Complex coef = pm * f.spec.alpha() * f.spec.hbar;
  SliceS out;
  const size_t n = lf.log_abs.size();
  out.s.resize(n);
  out.mask = lf.mask;
  for (size_t i = 0; i < n; ++i)
    if (lf.mask[i]) out.s[i] = coef * Complex(lf.log_abs[i], lf.phase[i]);
  return out;
}

}  // namespace

HjResidualReport hamilton_jacobi_residual(const WaveField& f) {
  if (f.n_slices() < 3)
    throw Error(ErrorCode::GridMismatch,
                "need at least three stored slices for the time derivative");
  const int64_t npts = f.grid.total_points();
  const double dt = f.slice_dt();
  const double m = f.spec.mass;
  const double q = f.spec.charge;
  const Complex ah = f.spec.alpha() * f.spec.hbar;
  const Complex pm = f.direction == FieldDirection::Backward ? 1.0 : -1.0;

  // log fields with time-aligned phases, anchored at the global peak
  std::vector<LogField> lfs(f.n_slices());
  int64_t anchor = 0;
  {
    double best = 0.0;
    const Complex* psi = f.slice(f.n_slices() / 2);
    for (int64_t i = 0; i < npts; ++i)
      if (std::abs(psi[i]) > best) {
        best = std::abs(psi[i]);
        anchor = i;
      }
  }
  for (int s = 0; s < f.n_slices(); ++s) {
    lfs[s] = log_field(f, s);
    if (s > 0) align_phase(lfs[s - 1], lfs[s], anchor);
  }

  const int nx = f.grid.axis[0].n_points;
  const int ny = f.grid.dim == 2 ? f.grid.axis[1].n_points : 1;
  const double hx = f.grid.axis[0].spacing();
  const double hy = f.grid.dim == 2 ? f.grid.axis[1].spacing() : 1.0;

  HjResidualReport rep;
  double sum2 = 0.0;
  std::vector<double> xbuf(2), abuf(2), dabuf(4);
  for (int s = 1; s + 1 < f.n_slices(); ++s) {
    SliceS sm = principal_function(f, lfs[s - 1]);
    SliceS s0 = principal_function(f, lfs[s]);
    SliceS sp = principal_function(f, lfs[s + 1]);
    const double t = f.times[s];
    for (int ix = 1; ix + 1 < nx; ++ix) {
      for (int iy = (f.grid.dim == 2 ? 1 : 0);
           iy < (f.grid.dim == 2 ? ny - 1 : 1); ++iy) {
        const int64_t i = f.grid.index(ix, iy);
        const int64_t ixp = f.grid.index(ix + 1, iy);
        const int64_t ixm = f.grid.index(ix - 1, iy);
        const int64_t iyp = f.grid.dim == 2 ? f.grid.index(ix, iy + 1) : i;
        const int64_t iym = f.grid.dim == 2 ? f.grid.index(ix, iy - 1) : i;
        bool ok = sm.mask[i] && s0.mask[i] && sp.mask[i] && s0.mask[ixp] &&
                  s0.mask[ixm];
        if (f.grid.dim == 2) ok = ok && s0.mask[iyp] && s0.mask[iym];
        if (!ok) continue;

        const Complex st = (sp.s[i] - sm.s[i]) / (2.0 * dt);
        Complex grad[2], lap(0.0, 0.0);
        grad[0] = (s0.s[ixp] - s0.s[ixm]) / (2.0 * hx);
        lap += (s0.s[ixp] - 2.0 * s0.s[i] + s0.s[ixm]) / (hx * hx);
        if (f.grid.dim == 2) {
          grad[1] = (s0.s[iyp] - s0.s[iym]) / (2.0 * hy);
          lap += (s0.s[iyp] - 2.0 * s0.s[i] + s0.s[iym]) / (hy * hy);
        }

        xbuf[0] = f.grid.axis[0].coord(ix);
        if (f.grid.dim == 2) xbuf[1] = f.grid.axis[1].coord(iy);
        const double u = f.potential.u(xbuf.data(), t);
        f.potential.a(xbuf.data(), t, abuf.data(), f.grid.dim);
        f.potential.da(xbuf.data(), t, dabuf.data(), f.grid.dim);
        double diva = dabuf[0];
        if (f.grid.dim == 2) diva += dabuf[3];

        Complex gradsq(0.0, 0.0), a_grad(0.0, 0.0);
        double a2 = 0.0;
        for (int d2 = 0; d2 < f.grid.dim; ++d2) {
          gradsq += grad[d2] * grad[d2];
          a_grad += abuf[d2] * grad[d2];
          a2 += abuf[d2] * abuf[d2];
        }

        const Complex r = 2.0 * m * st + gradsq + pm * ah * lap -
                          2.0 * q * a_grad - pm * ah * q * diva + q * q * a2 +
                          2.0 * m * u;
        const double w = hx * (f.grid.dim == 2 ? hy : 1.0) * dt;
        sum2 += std::norm(r) * w;
        rep.max_abs = std::max(rep.max_abs, std::abs(r));
        ++rep.n_points;
      }
    }
  }
  if (rep.n_points == 0)
    throw Error(ErrorCode::NodeRegionTooLarge,
                "no usable points for the residual");
  rep.l2 = std::sqrt(sum2);
  return rep;
}

std::vector<double> born_density(const WaveField& f, int slice_index) {
  const int64_t n = f.grid.total_points();
  const Complex* psi = f.slice(slice_index);
  const bool real_regime = std::fabs(std::sin(f.spec.phi)) < 1e-12;
  std::vector<double> rho(n);
  for (int64_t i = 0; i < n; ++i)
    rho[i] = real_regime ? std::abs(psi[i]) : std::norm(psi[i]);
  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) total += f.weight(i) * rho[i];
  if (!(total > 1e-300))
    throw Error(ErrorCode::ZeroNorm, "field has zero norm");
  for (int64_t i = 0; i < n; ++i) rho[i] /= total;
  return rho;
}

}  // namespace stomech::pde
