#include "fluctlab/spde.hpp"

#include <cmath>
#include <stdexcept>

#include "fluctlab/numerics.hpp"

namespace fl {

namespace {

// Time stepping is the semi-implicit Euler-Maruyama family: the stiff linear
// part is implicit (backward Euler for the transient-driven runs, trapezoidal
// where the run measures stationary variances, since the trapezoidal rule
// preserves the exact per-mode stationary variance of a linear SDE), and the
// nonlinearity and the noise are explicit.

bool capture(const std::vector<double> &times, double t, double dt,
             std::size_t &next) {
  if (next >= times.size()) return false;
  if (t + 0.5 * dt >= times[next]) {
    ++next;
    return true;
  }
  return false;
}

double sup_abs(const std::vector<double> &v) {
  double s = 0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

FieldSeries to_psi(const FieldSeries &tilde) {
  if (tilde.scaling != FieldScaling::psi_tilde)
    throw std::invalid_argument("to_psi expects a psi_tilde series");
  FieldSeries out = tilde;
  out.scaling = FieldScaling::psi;
  const double scale = std::pow(tilde.K, -0.75);
  for (auto &snap : out.snapshots)
    for (auto &x : snap.a) x *= scale;
  return out;
}

DensityBackground density_background(const PeriodicProfile &prof, int nx,
                                     const ScalarFn &g1, const ScalarFn &g2) {
  DensityBackground bg;
  bg.u_cell.resize(nx);
  bg.u_edge.resize(nx);
  bg.g1_edge.resize(nx);
  bg.g2_cell.resize(nx);
  for (int i = 0; i < nx; ++i) {
    bg.u_cell[i] = prof.eval(static_cast<double>(i) / nx);
    bg.u_edge[i] = prof.eval((i + 0.5) / nx);
    bg.g1_edge[i] = g1(bg.u_edge[i]);
    bg.g2_cell[i] = g2(bg.u_cell[i]);
  }
  return bg;
}

DensityBackground density_background_wave(const WaveProfile &wave, double K,
                                          int nx, const ScalarFn &g1,
                                          const ScalarFn &g2) {
  // u(x) = U0(sqrt(K) x) on [-1/2, 1/2)
  DensityBackground bg;
  bg.u_cell.resize(nx);
  bg.u_edge.resize(nx);
  bg.g1_edge.resize(nx);
  bg.g2_cell.resize(nx);
  const double sk = std::sqrt(K);
  for (int i = 0; i < nx; ++i) {
    const double x = static_cast<double>(i) / nx - 0.5;
    bg.u_cell[i] = wave.eval(sk * x);
    bg.u_edge[i] = wave.eval(sk * (x + 0.5 / nx));
    bg.g1_edge[i] = g1(bg.u_edge[i]);
    bg.g2_cell[i] = g2(bg.u_cell[i]);
  }
  return bg;
}

DensityBackground density_background_constant(double u, int nx,
                                              const ScalarFn &g1,
                                              const ScalarFn &g2) {
  DensityBackground bg;
  bg.u_cell.assign(nx, u);
  bg.u_edge.assign(nx, u);
  bg.g1_edge.assign(nx, g1(u));
  bg.g2_cell.assign(nx, g2(u));
  return bg;
}

FieldSeries integrate_density_spde(const BistableReaction &r,
                                   const DensityBackground &bg,
                                   const std::vector<double> &phi0,
                                   const DensitySpdeOptions &opt) {
  const int n = opt.nx;
  if (static_cast<int>(phi0.size()) != n ||
      static_cast<int>(bg.u_cell.size()) != n)
    throw std::invalid_argument("density spde: size mismatch");
  if (opt.n_order < 1 || opt.n_order > 3)
    throw std::invalid_argument("density spde: drift order must be 1, 2 or 3");
  const double h = 1.0 / n;
  const double dt = opt.dt;
  const double K = opt.K;
  const double nscale = std::pow(opt.N, -0.5);  // N^{-d/2}, d = 1

  std::vector<double> fp(n), fpp(n), fppp(n);
  for (int i = 0; i < n; ++i) {
    fp[i] = r.df(bg.u_cell[i]);
    fpp[i] = r.d2f(bg.u_cell[i]);
    fppp[i] = r.d3f(bg.u_cell[i]);
  }

  // backward Euler for the Laplacian
  TridiagSolver<double> solver;
  {
    std::vector<double> diag(n, 1.0 + 2.0 * dt / (h * h));
    solver.factor(diag, -dt / (h * h));
  }

  Rng rng(opt.seed);
  NoiseSpec nspec;
  nspec.kind = opt.noise_kind;
  nspec.cutoff = opt.noise_cutoff;
  nspec.channels = 2;

  FieldSeries series;
  series.scaling = FieldScaling::phi;
  series.N = opt.N;
  series.K = K;
  series.drift_order = opt.n_order;
  series.dz = h;
  series.du = 0;

  std::vector<double> phi = phi0, rhs(n), work(n);
  const double a = opt.comoving ? opt.comoving_c * std::sqrt(K) : 0.0;
  const int steps = static_cast<int>(std::llround(opt.T / dt));
  std::size_t next_sample = 0;
  double t = 0;
  auto snapshot = [&]() {
    Field2 f2;
    f2.nz = n;
    f2.nu = 1;
    f2.a = phi;
    series.snapshots.push_back(std::move(f2));
    series.times.push_back(t);
  };
  if (capture(opt.sample_times, t, dt, next_sample)) snapshot();

  for (int m = 0; m < steps; ++m) {
    const auto noise = sample_noise(nspec, n, h, dt, rng);
    for (int i = 0; i < n; ++i) {
      const double p = phi[i];
      double drift = fp[i] * p;
      if (opt.n_order >= 2) drift += 0.5 * nscale * fpp[i] * p * p;
      if (opt.n_order >= 3)
        drift += (1.0 / 6.0) * nscale * nscale * fppp[i] * p * p * p;
      double rhs_i = p + dt * K * drift;
      if (a > 0)
        rhs_i += dt * a * (phi[(i + 1) % n] - p) / h;
      else if (a < 0)
        rhs_i += dt * a * (p - phi[(i + n - 1) % n]) / h;
      if (opt.conservative_on) {
        const int im = (i + n - 1) % n;
        rhs_i += (bg.g1_edge[i] * noise[0][i] - bg.g1_edge[im] * noise[0][im]) / h;
      }
      if (opt.flip_on) rhs_i += std::sqrt(K) * bg.g2_cell[i] * noise[1][i];
      rhs[i] = rhs_i;
    }
    solver.solve_inplace(rhs, work);
    phi.swap(rhs);
    t = (m + 1) * dt;
    if (sup_abs(phi) > opt.blowup_cap) {
      series.blew_up = true;
      snapshot();
      return series;
    }
    if (capture(opt.sample_times, t, dt, next_sample)) snapshot();
  }
  if (series.times.empty() || series.times.back() != t) snapshot();
  return series;
}

FieldSeries integrate_stretched_spde(const PeriodicProfile &prof,
                                     const ScalarFn &g1, const ScalarFn &g2,
                                     const Field2 &psi0,
                                     const StretchedSpdeOptions &opt) {
  const int nz = opt.nz, nu = opt.nu;
  if (psi0.nz != nz || psi0.nu != nu)
    throw std::invalid_argument("stretched spde: initial field size mismatch");
  const double K = opt.K;
  const double sk = std::sqrt(K);
  const double dz = sk / nz;
  const double du = 1.0 / nu;
  const double dt = opt.dt;
  const int d = (nu == 1) ? 1 : 2;
  const double cellvol = (nu == 1) ? dz : dz * du;

  // vbar(z_i) with the layer centered at the middle of the grid
  std::vector<double> vcell(nz), fpcell(nz), fppcell(nz), fpppcell(nz),
      g1z_edge(nz), g2z(nz), g1z(nz);
  for (int i = 0; i < nz; ++i) {
    const double x = static_cast<double>(i) / nz - 0.5;
    vcell[i] = prof.eval(x);
    const double vedge = prof.eval(x + 0.5 / nz);
    fpcell[i] = prof.reaction.df(vcell[i]);
    fppcell[i] = prof.reaction.d2f(vcell[i]);
    fpppcell[i] = prof.reaction.d3f(vcell[i]);
    g1z_edge[i] = g1(vedge);
    g1z[i] = g1(vcell[i]);
    g2z[i] = g2(vcell[i]);
  }

  // backward Euler factor for I + dt K A_z, A_z = -D2 - f'(vbar)
  TridiagSolver<double> zsolver;
  {
    std::vector<double> diag(nz);
    for (int i = 0; i < nz; ++i)
      diag[i] = 1.0 + dt * K * (2.0 / (dz * dz) - fpcell[i]);
    zsolver.factor(diag, -dt * K / (dz * dz));
  }
  TridiagSolver<double> usolver;
  if (nu > 1) {
    std::vector<double> diag(nu, 1.0 + 2.0 * dt / (du * du));
    usolver.factor(diag, -dt / (du * du));
  }

  const double quad_coef =
      (opt.nonlinearity >= 2)
          ? std::pow(K, 1.75) * std::pow(opt.N, -0.5 * d) * 0.5
          : 0.0;
  const double cube_coef =
      (opt.nonlinearity >= 3)
          ? std::pow(K, 2.5) * std::pow(opt.N, -1.0 * d) / 6.0
          : 0.0;

  Rng rng(opt.seed);
  FieldSeries series;
  series.scaling = FieldScaling::psi;
  series.N = opt.N;
  series.K = K;
  series.drift_order = opt.nonlinearity;
  series.dz = dz;
  series.du = du;

  Field2 psi = psi0;
  std::vector<double> zcol(nz), zwork(nz), urow(nu), uwork(nu);
  std::vector<double> xi_z(static_cast<std::size_t>(nz) * nu);
  std::vector<double> xi_u(nu > 1 ? xi_z.size() : 0);
  std::vector<double> zeta(xi_z.size());
  const double noise_sd = std::sqrt(dt / cellvol);
  const double grad_ux_amp = opt.grad_ux_channel_on ? 1.0 : 0.0;

  const int steps = static_cast<int>(std::llround(opt.T / dt));
  std::size_t next_sample = 0;
  double t = 0;
  auto snapshot = [&]() {
    series.snapshots.push_back(psi);
    series.times.push_back(t);
  };
  if (capture(opt.sample_times, t, dt, next_sample)) snapshot();

  for (int m = 0; m < steps; ++m) {
    // channel draws are made unconditionally so that switching the
    // K^{-1/2} transverse channel on/off couples runs path by path
    for (auto &x : xi_z) x = noise_sd * rng.gaussian();
    for (auto &x : xi_u) x = noise_sd * rng.gaussian();
    for (auto &x : zeta) x = noise_sd * rng.gaussian();

    for (int iu = 0; iu < nu; ++iu) {
      for (int iz = 0; iz < nz; ++iz) {
        const std::size_t id = static_cast<std::size_t>(iz) * nu + iu;
        const int izm = (iz + nz - 1) % nz;
        const std::size_t idm = static_cast<std::size_t>(izm) * nu + iu;
        double v = psi.at(iz, iu);
        double add = 0;
        if (quad_coef != 0) add += dt * quad_coef * fppcell[iz] * v * v;
        if (cube_coef != 0) add += dt * cube_coef * fpppcell[iz] * v * v * v;
        // conservative z channel
        add += (g1z_edge[iz] * xi_z[id] - g1z_edge[izm] * xi_z[idm]) / dz;
        // transverse conservative channel, K^{-1/2} g1 div_ux
        if (nu > 1) {
          const int ium = (iu + nu - 1) % nu;
          const std::size_t idu = static_cast<std::size_t>(iz) * nu + ium;
          add += grad_ux_amp * g1z[iz] / sk * (xi_u[id] - xi_u[idu]) / du;
        }
        // flip channel
        add += g2z[iz] * zeta[id];
        psi.at(iz, iu) = v + add;
      }
    }
    // implicit z sweep
    for (int iu = 0; iu < nu; ++iu) {
      for (int iz = 0; iz < nz; ++iz) zcol[iz] = psi.at(iz, iu);
      zsolver.solve_inplace(zcol, zwork);
      for (int iz = 0; iz < nz; ++iz) psi.at(iz, iu) = zcol[iz];
    }
    // implicit ux sweep
    if (nu > 1) {
      for (int iz = 0; iz < nz; ++iz) {
        for (int iu = 0; iu < nu; ++iu) urow[iu] = psi.at(iz, iu);
        usolver.solve_inplace(urow, uwork);
        for (int iu = 0; iu < nu; ++iu) psi.at(iz, iu) = urow[iu];
      }
    }
    t = (m + 1) * dt;
    if (sup_abs(psi.a) > opt.blowup_cap) {
      series.blew_up = true;
      snapshot();
      return series;
    }
    if (capture(opt.sample_times, t, dt, next_sample)) snapshot();
  }
  if (series.times.empty() || series.times.back() != t) snapshot();
  return series;
}

FieldSeries integrate_limit_interface(const std::vector<double> &psi0,
                                      const LimitInterfaceOptions &opt) {
  if (opt.d >= 3)
    throw std::invalid_argument(
        "limit interface SPDE: d >= 3 has no interface interpretation");
  if (opt.d < 1) throw std::invalid_argument("limit interface SPDE: bad d");
  const int nu = (opt.d == 1) ? 1 : opt.nu;
  if (static_cast<int>(psi0.size()) != nu)
    throw std::invalid_argument("limit interface SPDE: psi0 size mismatch");
  const double du = 1.0 / nu;
  const double dt = opt.dt;

  // trapezoidal step for the Laplacian: preserves the exact stationary
  // variance of every Fourier mode
  TridiagSolver<double> solver;
  if (nu > 1) {
    std::vector<double> diag(nu, 1.0 + dt / (du * du));
    solver.factor(diag, -0.5 * dt / (du * du));
  }

  Rng rng(opt.seed);
  FieldSeries series;
  series.scaling = FieldScaling::psi;
  series.du = du;
  series.dz = du;

  std::vector<double> psi = psi0, rhs(nu), work(nu);
  const double noise_sd =
      (opt.d == 1) ? std::sqrt(dt) : std::sqrt(dt / du);
  const int steps = static_cast<int>(std::llround(opt.T / dt));
  std::size_t next_sample = 0;
  double t = 0;
  auto snapshot = [&]() {
    Field2 f2;
    f2.nz = nu;
    f2.nu = 1;
    f2.a = psi;
    series.snapshots.push_back(std::move(f2));
    series.times.push_back(t);
  };
  if (capture(opt.sample_times, t, dt, next_sample)) snapshot();

  for (int m = 0; m < steps; ++m) {
    if (nu == 1) {
      psi[0] += dt * opt.c3 * psi[0] * psi[0] * psi[0] +
                opt.c_star * noise_sd * rng.gaussian();
    } else {
      for (int i = 0; i < nu; ++i) {
        const int ip = (i + 1) % nu, im = (i + nu - 1) % nu;
        const double lap = (psi[ip] - 2 * psi[i] + psi[im]) / (du * du);
        rhs[i] = psi[i] + 0.5 * dt * lap +
                 dt * opt.c3 * psi[i] * psi[i] * psi[i] +
                 opt.c_star * noise_sd * rng.gaussian();
      }
      solver.solve_inplace(rhs, work);
      psi.swap(rhs);
    }
    t = (m + 1) * dt;
    if (sup_abs(psi) > opt.blowup_cap) {
      series.blew_up = true;
      snapshot();
      return series;
    }
    if (capture(opt.sample_times, t, dt, next_sample)) snapshot();
  }
  if (series.times.empty() || series.times.back() != t) snapshot();
  return series;
}

std::vector<double> integrate_offsite(const OffsiteOptions &opt) {
  if (!(opt.c > 0))
    throw std::invalid_argument("offsite: decay rate c must be > 0");
  const int n = opt.nx;
  const double h = 1.0 / n;
  const double K = opt.K;
  const double cgrad = opt.amp_grad * std::pow(K, -0.25);
  const double cflip = opt.amp_flip * std::pow(K, 0.25);

  Rng rng(opt.seed);
  std::vector<double> psi(n, 0.0), rhs(n), work(n), xi(n), zeta(n);

  // trapezoidal in the full linear operator D2 - cK: exact stationary
  // variance for every mode at any dt, so the coarse phase can take large
  // steps and the fine trailing window re-equilibrates the high modes
  auto run_phase = [&](double T, double dt) {
    if (T <= 0) return;
    TridiagSolver<double> solver;
    {
      std::vector<double> diag(n, 1.0 + 0.5 * dt * (opt.c * K + 2.0 / (h * h)));
      solver.factor(diag, -0.5 * dt / (h * h));
    }
    const double noise_sd = std::sqrt(dt / h);
    const int steps = static_cast<int>(std::llround(T / dt));
    for (int m = 0; m < steps; ++m) {
      for (auto &x : xi) x = noise_sd * rng.gaussian();
      for (auto &x : zeta) x = noise_sd * rng.gaussian();
      for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n, im = (i + n - 1) % n;
        const double lin = (psi[ip] - 2 * psi[i] + psi[im]) / (h * h) -
                           opt.c * K * psi[i];
        rhs[i] = psi[i] + 0.5 * dt * lin + cgrad * (xi[i] - xi[im]) / h +
                 cflip * zeta[i];
      }
      solver.solve_inplace(rhs, work);
      psi.swap(rhs);
    }
  };

  const double coarse_T = std::max(0.0, opt.T - opt.fine_window);
  run_phase(coarse_T, opt.dt_coarse);
  run_phase(opt.T - coarse_T, opt.dt_fine);
  return psi;
}

}  // namespace fl
