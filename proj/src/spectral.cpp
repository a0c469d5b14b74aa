#include "fluctlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fluctlab/numerics.hpp"
#include "fluctlab/rng.hpp"

namespace fl {

namespace {

using Real = long double;

// quadratic form of L = -eps^2 D2 - f'(v) via summation by parts; no
// cancellation at the 1/h^2 scale, so Rayleigh quotients resolve eigenvalues
// tens of orders below the operator norm
Real bilinear(const std::vector<Real> &u, const std::vector<Real> &v,
              const std::vector<Real> &pot, Real kappa, Real w) {
  const std::size_t n = u.size();
  KahanSum<Real> grad, mass;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
    grad.add((u[ip] - u[i]) * (v[ip] - v[i]));
    mass.add(pot[i] * u[i] * v[i]);
  }
  return (kappa * grad.value() + mass.value()) * w;
}

Real dot(const std::vector<Real> &u, const std::vector<Real> &v, Real w) {
  KahanSum<Real> s;
  for (std::size_t i = 0; i < u.size(); ++i) s.add(u[i] * v[i]);
  return s.value() * w;
}

void apply_op(const std::vector<Real> &u, std::vector<Real> &out,
              const std::vector<Real> &pot, Real kappa) {
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
    const std::size_t im = (i == 0) ? n - 1 : i - 1;
    out[i] = kappa * (2 * u[i] - u[ip] - u[im]) + pot[i] * u[i];
  }
}

// Jacobi eigensolver for small dense symmetric matrices (row-major)
void jacobi_eigen(std::vector<Real> &a, int m, std::vector<Real> &evals,
                  std::vector<Real> &evecs) {
  evecs.assign(static_cast<std::size_t>(m) * m, Real(0));
  for (int i = 0; i < m; ++i) evecs[static_cast<std::size_t>(i) * m + i] = 1;
  auto A = [&](int i, int j) -> Real & {
    return a[static_cast<std::size_t>(i) * m + j];
  };
  auto V = [&](int i, int j) -> Real & {
    return evecs[static_cast<std::size_t>(i) * m + j];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    Real off = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) off += A(i, j) * A(i, j);
    if (off < Real(1e-36)) break;
    for (int p = 0; p < m; ++p) {
      for (int q = p + 1; q < m; ++q) {
        if (A(p, q) == 0) continue;
        const Real theta = (A(q, q) - A(p, p)) / (2 * A(p, q));
        const Real t = (theta >= 0 ? 1 : -1) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Real c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int i = 0; i < m; ++i) {
          const Real aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < m; ++i) {
          const Real api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < m; ++i) {
          const Real vip = V(i, p), viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  evals.resize(m);
  for (int i = 0; i < m; ++i) evals[i] = A(i, i);
}

void orthonormalize(std::vector<std::vector<Real>> &block, Real w) {
  for (std::size_t j = 0; j < block.size(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const Real c = dot(block[i], block[j], w);
        for (std::size_t p = 0; p < block[j].size(); ++p)
          block[j][p] -= c * block[i][p];
      }
    }
    const Real nrm = std::sqrt(dot(block[j], block[j], w));
    for (auto &x : block[j]) x /= nrm;
  }
}

}  // namespace

std::vector<double> SpectralDecomposition::stretched_vector(int j) const {
  std::vector<double> v = eigenvectors[j];
  const double scale = std::pow(K, -0.25);
  for (auto &x : v) x *= scale;
  return v;
}

SpectralDecomposition eigenpairs(const PeriodicProfile &profile, int k) {
  if (k < 3) throw std::invalid_argument("eigenpairs: need k >= 3");
  const int n = profile.n;
  // stretched spacing must resolve the O(1) layer: (sqrt(K) dx)^2 <= 0.5
  if (profile.K * profile.dx * profile.dx > 0.5)
    throw std::invalid_argument("eigenpairs: grid does not resolve the layer");

  SpectralDecomposition sd;
  sd.n = n;
  sd.K = profile.K;
  sd.dx = profile.dx;
  sd.potential.resize(n);

  const Real w = Real(profile.dx);
  const Real kappa = Real(1) / (Real(profile.K) * Real(profile.dx) * Real(profile.dx));
  std::vector<Real> pot(n);
  for (int i = 0; i < n; ++i) {
    pot[i] = -Real(profile.reaction.df(profile.value[i]));
    sd.potential[i] = static_cast<double>(pot[i]);
  }

  // factor (L + sigma I) once; inverse iteration pulls the low end
  const Real sigma = 0.01L;
  TridiagSolver<Real> solver;
  {
    std::vector<Real> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = 2 * kappa + pot[i] + sigma;
    solver.factor(diag, -kappa);
  }

  Rng rng(0x5eeded);
  auto random_vec = [&]() {
    std::vector<Real> v(n);
    for (auto &x : v) x = Real(rng.gaussian());
    return v;
  };

  // Stage 1: the near-degenerate bottom pair. Seed with the translation mode
  // v_x and a sign-split copy so both cluster members are present from the
  // start, then iterate to machine level.
  std::vector<std::vector<Real>> pair(2);
  pair[0].resize(n);
  pair[1].resize(n);
  for (int i = 0; i < n; ++i) {
    pair[0][i] = Real(profile.deriv[i]);
    pair[1][i] = std::abs(Real(profile.deriv[i]));
  }
  orthonormalize(pair, w);
  for (int iter = 0; iter < 30; ++iter) {
    for (auto &v : pair) v = solver.solve(v);
    orthonormalize(pair, w);
  }
  // Ritz split of the 2x2 cluster
  std::vector<Real> small(4), sevals, sevecs;
  small[0] = bilinear(pair[0], pair[0], pot, kappa, w);
  small[1] = small[2] = bilinear(pair[0], pair[1], pot, kappa, w);
  small[3] = bilinear(pair[1], pair[1], pot, kappa, w);
  jacobi_eigen(small, 2, sevals, sevecs);
  std::vector<std::vector<Real>> vecs(2, std::vector<Real>(n));
  std::vector<Real> vals(2);
  {
    const int order[2] = {sevals[0] <= sevals[1] ? 0 : 1,
                          sevals[0] <= sevals[1] ? 1 : 0};
    for (int j = 0; j < 2; ++j) {
      vals[j] = sevals[order[j]];
      for (int i = 0; i < n; ++i)
        vecs[j][i] = sevecs[static_cast<std::size_t>(0) * 2 + order[j]] * pair[0][i] +
                     sevecs[static_cast<std::size_t>(1) * 2 + order[j]] * pair[1][i];
    }
  }

  // Stage 2: the rest of the requested window, deflated against the pair
  const int extra = k - 2;
  const int b = extra + 4;
  std::vector<std::vector<Real>> block(b);
  for (auto &v : block) v = random_vec();
  auto deflate = [&](std::vector<Real> &v) {
    for (int j = 0; j < 2; ++j) {
      const Real c = dot(vecs[j], v, w);
      for (int i = 0; i < n; ++i) v[i] -= c * vecs[j][i];
    }
  };
  std::vector<Real> tmp(n);
  std::vector<Real> ritz_vals;
  std::vector<std::vector<Real>> ritz_vecs;
  for (int iter = 0; iter < 240; ++iter) {
    for (auto &v : block) {
      v = solver.solve(v);
      deflate(v);
    }
    orthonormalize(block, w);
    if (iter % 10 != 9 && iter != 239) continue;
    // Rayleigh-Ritz on the block
    std::vector<Real> bm(static_cast<std::size_t>(b) * b);
    for (int i = 0; i < b; ++i)
      for (int j = i; j < b; ++j) {
        bm[static_cast<std::size_t>(i) * b + j] =
            bm[static_cast<std::size_t>(j) * b + i] =
                bilinear(block[i], block[j], pot, kappa, w);
      }
    std::vector<Real> evals, evecs;
    jacobi_eigen(bm, b, evals, evecs);
    std::vector<int> idx(b);
    for (int i = 0; i < b; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a2, int b2) { return evals[a2] < evals[b2]; });
    ritz_vals.assign(extra, Real(0));
    ritz_vecs.assign(extra, std::vector<Real>(n, Real(0)));
    for (int j = 0; j < extra; ++j) {
      ritz_vals[j] = evals[idx[j]];
      for (int i = 0; i < n; ++i) {
        Real s = 0;
        for (int q = 0; q < b; ++q)
          s += evecs[static_cast<std::size_t>(q) * b + idx[j]] * block[q][i];
        ritz_vecs[j][i] = s;
      }
    }
    // residual of the worst requested mode decides convergence
    Real worst = 0;
    for (int j = 0; j < extra; ++j) {
      apply_op(ritz_vecs[j], tmp, pot, kappa);
      KahanSum<Real> rs;
      for (int i = 0; i < n; ++i) {
        const Real r = tmp[i] - ritz_vals[j] * ritz_vecs[j][i];
        rs.add(r * r);
      }
      worst = std::max(worst, std::sqrt(rs.value() * w));
    }
    if (worst < Real(1e-11)) break;
  }

  sd.eigenvalues.resize(k);
  sd.eigenvectors.assign(k, std::vector<double>(n));
  for (int j = 0; j < 2; ++j) {
    sd.eigenvalues[j] = static_cast<double>(vals[j]);
    for (int i = 0; i < n; ++i)
      sd.eigenvectors[j][i] = static_cast<double>(vecs[j][i]);
  }
  for (int j = 0; j < extra; ++j) {
    sd.eigenvalues[j + 2] = static_cast<double>(ritz_vals[j]);
    const Real nrm = std::sqrt(dot(ritz_vecs[j], ritz_vecs[j], w));
    for (int i = 0; i < n; ++i)
      sd.eigenvectors[j + 2][i] = static_cast<double>(ritz_vecs[j][i] / nrm);
  }
  return sd;
}

namespace {

// z-direction semigroup exp(-t K A) via modes + CN remainder
std::vector<double> semigroup_z(const SpectralDecomposition &sd, double t,
                                const std::vector<double> &g) {
  const int n = sd.n;
  const double w = sd.dx;
  const double K = sd.K;
  std::vector<double> out(n, 0.0), rem = g;
  for (std::size_t j = 0; j < sd.eigenvectors.size(); ++j) {
    const auto &psi = sd.eigenvectors[j];
    double c = 0;
    for (int i = 0; i < n; ++i) c += psi[i] * g[i];
    c *= w;
    const double lam = std::max(0.0, sd.eigenvalues[j]);
    const double decay = std::exp(-t * K * lam);
    for (int i = 0; i < n; ++i) {
      out[i] += c * decay * psi[i];
      rem[i] -= c * psi[i];
    }
  }
  if (t > 0) {
    const int nsub = 256;
    const double dt = t / nsub;
    const double kappa = 1.0 / (K * sd.dx * sd.dx);  // operator is K*A = K(-d2/dz2 - f')
    // (I + dt K A / 2) x_{m+1} = (I - dt K A / 2) x_m
    std::vector<double> diag(n);
    const double cfl = 0.5 * dt * K;
    for (int i = 0; i < n; ++i)
      diag[i] = 1.0 + cfl * (2 * kappa + sd.potential[i]);
    TridiagSolver<double> solver;
    solver.factor(diag, -cfl * kappa);
    std::vector<double> rhs(n), work(n);
    for (int m = 0; m < nsub; ++m) {
      for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        const int im = (i == 0) ? n - 1 : i - 1;
        const double Ax = kappa * (2 * rem[i] - rem[ip] - rem[im]) +
                          sd.potential[i] * rem[i];
        rhs[i] = rem[i] - cfl * Ax;
      }
      solver.solve_inplace(rhs, work);
      rem.swap(rhs);
    }
  }
  for (int i = 0; i < n; ++i) out[i] += rem[i];
  return out;
}

}  // namespace

std::vector<double> semigroup_apply(const SpectralDecomposition &sd, double t,
                                    const std::vector<double> &g) {
  if (t < 0) throw std::invalid_argument("semigroup_apply: t must be >= 0");
  if (t == 0) return g;
  return semigroup_z(sd, t, g);
}

Field2 semigroup_apply(const SpectralDecomposition &sd, double t,
                       const Field2 &g) {
  if (t < 0) throw std::invalid_argument("semigroup_apply: t must be >= 0");
  Field2 out = g;
  if (t == 0) return out;
  // z-direction column by column
  std::vector<double> col(g.nz);
  for (int iu = 0; iu < g.nu; ++iu) {
    for (int iz = 0; iz < g.nz; ++iz) col[iz] = g.at(iz, iu);
    col = semigroup_z(sd, t, col);
    for (int iz = 0; iz < g.nz; ++iz) out.at(iz, iu) = col[iz];
  }
  if (g.nu == 1) return out;
  // heat semigroup on the ux circle: Fourier multiplier exp(-(2 pi k)^2 t)
  const int nu = g.nu;
  std::vector<double> re(nu / 2 + 1), im(nu / 2 + 1), row(nu);
  const double tau = 6.283185307179586476925286766559;
  for (int iz = 0; iz < g.nz; ++iz) {
    for (int iu = 0; iu < nu; ++iu) row[iu] = out.at(iz, iu);
    for (int kf = 0; kf <= nu / 2; ++kf) {
      double sre = 0, sim = 0;
      for (int iu = 0; iu < nu; ++iu) {
        const double ang = tau * kf * iu / nu;
        sre += row[iu] * std::cos(ang);
        sim -= row[iu] * std::sin(ang);
      }
      const double mult = std::exp(-(tau * kf) * (tau * kf) * t);
      re[kf] = sre * mult / nu;
      im[kf] = sim * mult / nu;
    }
    for (int iu = 0; iu < nu; ++iu) {
      double s = re[0];
      for (int kf = 1; kf <= nu / 2; ++kf) {
        const double ang = tau * kf * iu / nu;
        const double scale = (2 * kf == nu) ? 1.0 : 2.0;
        s += scale * (re[kf] * std::cos(ang) - im[kf] * std::sin(ang));
      }
      out.at(iz, iu) = s;
    }
  }
  return out;
}

ProjectionResult projection_limit(const WaveProfile &sw,
                                  const std::vector<double> &zgrid, double dz,
                                  const std::vector<double> &g) {
  const double norm = std::sqrt(sw.deriv_l2_sq);
  ProjectionResult res;
  res.field.resize(zgrid.size());
  std::vector<double> e(zgrid.size());
  double c = 0;
  for (std::size_t i = 0; i < zgrid.size(); ++i) {
    e[i] = sw.eval_deriv(-zgrid[i]) / norm;
    c += g[i] * e[i];
  }
  res.coefficient = c * dz;
  for (std::size_t i = 0; i < zgrid.size(); ++i)
    res.field[i] = res.coefficient * e[i];
  return res;
}

namespace {

double smoothstep(Mollifier kind, double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  if (kind == Mollifier::quintic) return u * u * u * (10 + u * (-15 + 6 * u));
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

// cutoff on [lo, hi] with transition width wd at both ends
double cutoff(Mollifier kind, double x, double lo, double hi, double wd) {
  if (x <= lo || x >= hi) return 0;
  const double up = smoothstep(kind, (x - lo) / wd);
  const double dn = smoothstep(kind, (hi - x) / wd);
  return up * dn;
}

}  // namespace

std::vector<std::vector<double>> tau_functions(const PeriodicProfile &profile,
                                               Mollifier kind) {
  const double eps = 1.0 / std::sqrt(profile.K);
  const double m1 = profile.m1, m2 = profile.m2, m3 = profile.m1 + 1.0;
  std::vector<std::vector<double>> taus(2, std::vector<double>(profile.n, 0.0));
  for (int i = 0; i < profile.n; ++i) {
    const double x = profile.x[i];
    taus[0][i] = -cutoff(kind, x, m1, m2, 2 * eps) * profile.deriv[i];
    // second window wraps through x = 1
    const double xw = (x < m2) ? x + 1.0 : x;
    taus[1][i] = -cutoff(kind, xw, m2, m3, 2 * eps) * profile.deriv[i];
  }
  return taus;
}

std::vector<double> projection_tau(const PeriodicProfile &profile,
                                   const std::vector<double> &w,
                                   Mollifier kind) {
  const auto taus = tau_functions(profile, kind);
  const double dx = profile.dx;
  double g11 = 0, g12 = 0, g22 = 0, b1 = 0, b2 = 0;
  for (int i = 0; i < profile.n; ++i) {
    g11 += taus[0][i] * taus[0][i];
    g12 += taus[0][i] * taus[1][i];
    g22 += taus[1][i] * taus[1][i];
    b1 += taus[0][i] * w[i];
    b2 += taus[1][i] * w[i];
  }
  g11 *= dx; g12 *= dx; g22 *= dx; b1 *= dx; b2 *= dx;
  const double det = g11 * g22 - g12 * g12;
  const double a1 = (g22 * b1 - g12 * b2) / det;
  const double a2 = (g11 * b2 - g12 * b1) / det;
  std::vector<double> out(profile.n);
  for (int i = 0; i < profile.n; ++i)
    out[i] = a1 * taus[0][i] + a2 * taus[1][i];
  return out;
}

namespace {

// flux-form A u = -e^{-cz} d/dz (e^{cz} u') - f'(U0) u, exactly symmetric in
// the discrete weighted inner product <u,v>_c = sum u v e^{cz} dz
std::vector<double> apply_weighted_op(const WaveProfile &sw,
                                      const std::vector<double> &u) {
  const int n = static_cast<int>(sw.z.size());
  const double h = sw.dz, c = sw.speed;
  std::vector<double> out(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    const double wp = std::exp(c * (sw.z[i] + h / 2) - c * sw.z[i]);
    const double wm = std::exp(c * (sw.z[i] - h / 2) - c * sw.z[i]);
    const double flux =
        (wp * (u[i + 1] - u[i]) - wm * (u[i] - u[i - 1])) / (h * h);
    out[i] = -flux - sw.reaction.df(sw.value[i]) * u[i];
  }
  out[0] = out[n - 1] = 0.0;  // fields are assumed to vanish near the ends
  return out;
}

double weighted_dot(const WaveProfile &sw, const std::vector<double> &u,
                    const std::vector<double> &v) {
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += u[i] * v[i] * std::exp(sw.speed * sw.z[i]);
  return s * sw.dz;
}

}  // namespace

double weighted_symmetry_residual(const WaveProfile &sw,
                                  const std::vector<double> &u,
                                  const std::vector<double> &w) {
  if (std::abs(sw.speed) * sw.z_max > 300)
    throw std::invalid_argument("weighted norm would overflow: |c| z_max too large");
  const auto au = apply_weighted_op(sw, u);
  const auto aw = apply_weighted_op(sw, w);
  return std::abs(weighted_dot(sw, au, w) - weighted_dot(sw, u, aw));
}

double weighted_A_U0prime_norm(const WaveProfile &sw) {
  if (std::abs(sw.speed) * sw.z_max > 300)
    throw std::invalid_argument("weighted norm would overflow: |c| z_max too large");
  const auto r = apply_weighted_op(sw, sw.deriv);
  return std::sqrt(weighted_dot(sw, r, r));
}

double heat_kernel_torus(double t, double x, double y) {
  if (!(t > 0)) throw std::invalid_argument("heat_kernel_torus: t must be > 0");
  const double pref = 1.0 / std::sqrt(4.0 * 3.14159265358979323846 * t);
  double d = x - y;
  d -= std::round(d);
  double s = 0;
  for (int l = 0;; ++l) {
    const double term_p = std::exp(-(d - l) * (d - l) / (4 * t));
    const double term_m = (l > 0) ? std::exp(-(d + l) * (d + l) / (4 * t)) : 0.0;
    s += term_p + term_m;
    if (l > 0 && term_p + term_m < 1e-16) break;
  }
  return pref * s;
}

}  // namespace fl
