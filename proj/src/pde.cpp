#include "stomech/pde.hpp"

#include <algorithm>
#include <cmath>

namespace stomech::pde {

namespace {

// Thomas algorithm; a = sub, b = diag, c = super (a[0], c[n-1] unused).
void solve_tridiag(std::vector<Complex>& a, std::vector<Complex>& b,
                   std::vector<Complex>& c, std::vector<Complex>& rhs) {
  const size_t n = b.size();
  for (size_t i = 1; i < n; ++i) {
    const Complex w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= b[n - 1];
  for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

// Cyclic tridiagonal via Sherman-Morrison; corner entries (alpha = A[n-1][0]
// coupling last->first, beta = A[0][n-1]).
void solve_cyclic_tridiag(const std::vector<Complex>& a,
                          const std::vector<Complex>& b,
                          const std::vector<Complex>& c, Complex corner_lo,
                          Complex corner_hi, std::vector<Complex>& rhs) {
  const size_t n = b.size();
  const Complex gamma = -b[0];
  std::vector<Complex> bb = b;
  bb[0] -= gamma;
  bb[n - 1] -= corner_lo * corner_hi / gamma;
  std::vector<Complex> aa = a, cc = c;
  std::vector<Complex> u(n, Complex(0));
  u[0] = gamma;
  u[n - 1] = corner_lo;
  {
    std::vector<Complex> a1 = aa, b1 = bb, c1 = cc;
    solve_tridiag(a1, b1, c1, rhs);
  }
  {
    std::vector<Complex> a1 = aa, b1 = bb, c1 = cc;
    solve_tridiag(a1, b1, c1, u);
  }
  const Complex num = rhs[0] + corner_hi * rhs[n - 1] / gamma;
  const Complex den = 1.0 + u[0] + corner_hi * u[n - 1] / gamma;
  const Complex fact = num / den;
  for (size_t i = 0; i < n; ++i) rhs[i] -= fact * u[i];
}

// One spatial direction of the generator at fixed time:
//   L = D d^2 + sA (q/2m)(Dc A + A Dc) + V0
// assembled as tridiagonal coefficients per node. Periodic wraps are passed
// back as corner entries.
struct Tridiag {
  std::vector<Complex> lo, di, hi;
  Complex corner_lo{0.0, 0.0}, corner_hi{0.0, 0.0};
};

}  // namespace

int WaveField::nearest_slice(double t) const {
  if (times.empty()) return 0;
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return n_slices() - 1;
  const int hiidx = static_cast<int>(it - times.begin());
  return (t - times[hiidx - 1] <= times[hiidx] - t) ? hiidx - 1 : hiidx;
}

double WaveField::cell_volume() const {
  double v = grid.axis[0].spacing();
  if (grid.dim == 2) v *= grid.axis[1].spacing();
  return v;
}

double WaveField::weight(int64_t flat) const {
  if (boundary == BoundaryKind::Periodic) return cell_volume();
  double w = cell_volume();
  if (grid.dim == 1) {
    const int nx = grid.axis[0].n_points;
    if (flat == 0 || flat == nx - 1) w *= 0.5;
  } else {
    const int ny = grid.axis[1].n_points;
    const int ix = static_cast<int>(flat / ny);
    const int iy = static_cast<int>(flat % ny);
    if (ix == 0 || ix == grid.axis[0].n_points - 1) w *= 0.5;
    if (iy == 0 || iy == ny - 1) w *= 0.5;
  }
  return w;
}

double WaveField::norm_l2(int s) const {
  const Complex* psi = slice(s);
  double acc = 0.0;
  for (int64_t i = 0; i < grid.total_points(); ++i)
    acc += weight(i) * std::norm(psi[i]);
  return std::sqrt(acc);
}

double WaveField::integral_abs(int s) const {
  const Complex* psi = slice(s);
  double acc = 0.0;
  for (int64_t i = 0; i < grid.total_points(); ++i)
    acc += weight(i) * std::abs(psi[i]);
  return acc;
}

double WaveField::integral_abs2(int s) const {
  const Complex* psi = slice(s);
  double acc = 0.0;
  for (int64_t i = 0; i < grid.total_points(); ++i)
    acc += weight(i) * std::norm(psi[i]);
  return acc;
}

namespace {

struct OperatorContext {
  DiffusionSpec spec;
  const PotentialSpec* pot;
  double sign_a;      // +1 for Psi_-, -1 for Psi_+
  Complex alpha_hbar; // alpha * hbar
};

// Assemble the 1d-direction tridiagonal of L along the given axis.
// pot_fraction: share of the zeroth-order term carried by this direction.
Tridiag assemble_direction(const OperatorContext& ctx, const SpaceGrid& grid,
                           int axis, double t, BoundaryKind bc,
                           double pot_fraction,
                           const std::vector<double>& other_coord) {
  const int n = grid.axis[axis].n_points;
  const double h = grid.axis[axis].spacing();
  const Complex diffusion = ctx.alpha_hbar / (2.0 * ctx.spec.mass);
  const double q = ctx.spec.charge;
  Tridiag tri;
  tri.lo.assign(n, Complex(0));
  tri.di.assign(n, Complex(0));
  tri.hi.assign(n, Complex(0));

  std::vector<double> avals(n, 0.0);
  std::vector<double> u0(n, 0.0), asq(n, 0.0);
  double x[2];
  std::vector<double> abuf(grid.dim);
  for (int i = 0; i < n; ++i) {
    x[axis] = grid.axis[axis].coord(i);
    if (grid.dim == 2) x[1 - axis] = other_coord[0];
    if (ctx.pot->has_vector()) {
      ctx.pot->vector(x, t, abuf.data());
      avals[i] = abuf[axis];
      double s = 0.0;
      for (int d = 0; d < grid.dim; ++d) s += abuf[d] * abuf[d];
      asq[i] = s;
    }
    u0[i] = ctx.pot->u(x, t);
  }

  for (int i = 0; i < n; ++i) {
    tri.di[i] += -2.0 * diffusion / (h * h);
    const double adv = ctx.sign_a * q / (4.0 * ctx.spec.mass * h);
    const int ip = (i + 1 < n) ? i + 1 : 0;
    const int im = (i - 1 >= 0) ? i - 1 : n - 1;
    const Complex up = diffusion / (h * h) + adv * (avals[ip] + avals[i]);
    const Complex dn = diffusion / (h * h) - adv * (avals[im] + avals[i]);
    if (i + 1 < n)
      tri.hi[i] = up;
    else if (bc == BoundaryKind::Periodic)
      tri.corner_lo = up;  // coupling last -> first
    if (i - 1 >= 0)
      tri.lo[i] = dn;
    else if (bc == BoundaryKind::Periodic)
      tri.corner_hi = dn;  // coupling first -> last
    tri.di[i] += pot_fraction *
                 (q * q * asq[i] / (2.0 * ctx.spec.mass) + u0[i]) / ctx.alpha_hbar;
  }
  return tri;
}

void apply_tridiag(const Tridiag& tri, const std::vector<Complex>& in,
                   std::vector<Complex>& out, Complex scale, Complex shift) {
  // out = shift * in + scale * (L in)
  const size_t n = in.size();
  for (size_t i = 0; i < n; ++i) {
    Complex acc = tri.di[i] * in[i];
    if (i > 0) acc += tri.lo[i] * in[i - 1];
    if (i + 1 < n) acc += tri.hi[i] * in[i + 1];
    out[i] = shift * in[i] + scale * acc;
  }
  if (tri.corner_lo != Complex(0)) out[n - 1] += scale * tri.corner_lo * in[0];
  if (tri.corner_hi != Complex(0)) out[0] += scale * tri.corner_hi * in[n - 1];
}

void solve_shifted(const Tridiag& tri, Complex scale,
                   std::vector<Complex>& rhs, BoundaryKind bc) {
  // solves (I - scale * L) psi = rhs in place
  const size_t n = rhs.size();
  std::vector<Complex> a(n), b(n), c(n);
  for (size_t i = 0; i < n; ++i) {
    a[i] = -scale * tri.lo[i];
    b[i] = 1.0 - scale * tri.di[i];
    c[i] = -scale * tri.hi[i];
  }
  if (bc == BoundaryKind::Periodic &&
      (tri.corner_lo != Complex(0) || tri.corner_hi != Complex(0))) {
    solve_cyclic_tridiag(a, b, c, -scale * tri.corner_lo,
                         -scale * tri.corner_hi, rhs);
  } else {
    solve_tridiag(a, b, c, rhs);
  }
}

}  // namespace

WaveField solve_complex_diffusion(const std::vector<Complex>& psi0,
                                  const DiffusionSpec& spec_in,
                                  const PotentialSpec& potential,
                                  const SpaceGrid& sgrid, const TimeGrid& tgrid,
                                  FieldDirection direction,
                                  const SolveOptions& opt) {
  const DiffusionSpec spec = validate_spec(spec_in);
  validate_grid(tgrid);
  validate_grid(sgrid);
  if (sgrid.dim != 1 && sgrid.dim != 2)
    throw Error(ErrorCode::UnsupportedDim, "solver supports 1d and 2d grids");
  if (static_cast<int64_t>(psi0.size()) != sgrid.total_points())
    throw Error(ErrorCode::GridMismatch, "psi0 size != grid points");
  if (std::cos(spec.phi) < -1e-12)
    throw Error(ErrorCode::UnstableParameters,
                "Re(alpha) < 0 is anti-diffusive for this march");
  for (const Complex& z : psi0)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::NonFiniteField, "psi0 has non-finite entries");

  OperatorContext ctx;
  ctx.spec = spec;
  ctx.pot = &potential;
  ctx.sign_a = direction == FieldDirection::Forward ? 1.0 : -1.0;
  ctx.alpha_hbar = spec.alpha() * spec.hbar;

  const int n_steps = tgrid.n_steps;
  const double dt = tgrid.dt();
  const bool backward = direction == FieldDirection::Backward;

  WaveField out;
  out.grid = sgrid;
  out.spec = spec;
  out.potential = potential;
  out.direction = direction;
  out.boundary = opt.boundary;

  std::vector<int> stored_steps;
  for (int k = 0; k <= n_steps; ++k)
    if (k % opt.store_stride == 0 || k == n_steps) stored_steps.push_back(k);
  out.values.resize(static_cast<int64_t>(stored_steps.size()) *
                    sgrid.total_points());
  out.times.resize(stored_steps.size());

  std::vector<Complex> psi = psi0;
  auto physical_time = [&](double k) {
    return backward ? tgrid.tf - k * dt : tgrid.t0 + k * dt;
  };
  auto store = [&](int k, size_t slot) {
    // slices are kept ascending in physical time
    const size_t idx = backward ? stored_steps.size() - 1 - slot : slot;
    out.times[idx] = physical_time(k);
    std::copy(psi.begin(), psi.end(),
              out.values.begin() + static_cast<int64_t>(idx) * sgrid.total_points());
  };

  size_t next_slot = 0;
  if (stored_steps[0] == 0) store(0, next_slot++);

  std::vector<double> dummy_other(1, 0.0);
  if (sgrid.dim == 1) {
    for (int k = 0; k < n_steps; ++k) {
      const double tm = physical_time(k + 0.5);
      Tridiag tri =
          assemble_direction(ctx, sgrid, 0, tm, opt.boundary, 1.0, dummy_other);
      std::vector<Complex> rhs(psi.size());
      apply_tridiag(tri, psi, rhs, Complex(0.5 * dt), Complex(1.0));
      solve_shifted(tri, Complex(0.5 * dt), rhs, opt.boundary);
      psi = rhs;
      double peak = 0.0;
      for (const Complex& z : psi) peak = std::max(peak, std::norm(z));
      if (!std::isfinite(peak) || peak > opt.divergence_guard * opt.divergence_guard)
        throw Error(ErrorCode::SolverDivergence, "solution diverged");
      if (next_slot < stored_steps.size() && stored_steps[next_slot] == k + 1)
        store(k + 1, next_slot++);
    }
  } else {
    // Peaceman-Rachford ADI: half-step implicit in x, half-step implicit in y
    const int nx = sgrid.axis[0].n_points;
    const int ny = sgrid.axis[1].n_points;
    std::vector<Complex> line_x(nx), line_y(ny), star(psi.size());
    for (int k = 0; k < n_steps; ++k) {
      const double tm = physical_time(k + 0.5);
      // stage 1: (I - dt/2 Lx) psi* = (I + dt/2 Ly) psi
      for (int ix = 0; ix < nx; ++ix) {
        std::vector<double> oc{sgrid.axis[0].coord(ix)};
        Tridiag triy =
            assemble_direction(ctx, sgrid, 1, tm, opt.boundary, 0.5, oc);
        for (int iy = 0; iy < ny; ++iy) line_y[iy] = psi[sgrid.index(ix, iy)];
        std::vector<Complex> outl(ny);
        apply_tridiag(triy, line_y, outl, Complex(0.5 * dt), Complex(1.0));
        for (int iy = 0; iy < ny; ++iy) star[sgrid.index(ix, iy)] = outl[iy];
      }
      for (int iy = 0; iy < ny; ++iy) {
        std::vector<double> oc{sgrid.axis[1].coord(iy)};
        Tridiag trix =
            assemble_direction(ctx, sgrid, 0, tm, opt.boundary, 0.5, oc);
        for (int ix = 0; ix < nx; ++ix) line_x[ix] = star[sgrid.index(ix, iy)];
        solve_shifted(trix, Complex(0.5 * dt), line_x, opt.boundary);
        for (int ix = 0; ix < nx; ++ix) star[sgrid.index(ix, iy)] = line_x[ix];
      }
      // stage 2: (I - dt/2 Ly) psi^{n+1} = (I + dt/2 Lx) psi*
      for (int iy = 0; iy < ny; ++iy) {
        std::vector<double> oc{sgrid.axis[1].coord(iy)};
        Tridiag trix =
            assemble_direction(ctx, sgrid, 0, tm, opt.boundary, 0.5, oc);
        for (int ix = 0; ix < nx; ++ix) line_x[ix] = star[sgrid.index(ix, iy)];
        std::vector<Complex> outl(nx);
        apply_tridiag(trix, line_x, outl, Complex(0.5 * dt), Complex(1.0));
        for (int ix = 0; ix < nx; ++ix) psi[sgrid.index(ix, iy)] = outl[ix];
      }
      for (int ix = 0; ix < nx; ++ix) {
        std::vector<double> oc{sgrid.axis[0].coord(ix)};
        Tridiag triy =
            assemble_direction(ctx, sgrid, 1, tm, opt.boundary, 0.5, oc);
        for (int iy = 0; iy < ny; ++iy) line_y[iy] = psi[sgrid.index(ix, iy)];
        solve_shifted(triy, Complex(0.5 * dt), line_y, opt.boundary);
        for (int iy = 0; iy < ny; ++iy) psi[sgrid.index(ix, iy)] = line_y[iy];
      }
      double peak = 0.0;
      for (const Complex& z : psi) peak = std::max(peak, std::norm(z));
      if (!std::isfinite(peak) || peak > opt.divergence_guard * opt.divergence_guard)
        throw Error(ErrorCode::SolverDivergence, "solution diverged");
      if (next_slot < stored_steps.size() && stored_steps[next_slot] == k + 1)
        store(k + 1, next_slot++);
    }
  }
  return out;
}

}  // namespace stomech::pde
