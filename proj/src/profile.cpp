#include "fluctlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fluctlab/io.hpp"
#include "fluctlab/numerics.hpp"

namespace fl {

namespace {

using Real = long double;

// 7-point Gauss-Legendre panel
template <class T, class F>
T gl7(const F &f, T a, T b) {
  static const Real xs[3] = {0.4058451513773971669066064120769615L,
                             0.7415311855993944398638647732807884L,
                             0.9491079123427585245261896840478513L};
  static const Real ws[4] = {0.4179591836734693877551020408163265L,
                             0.3818300505051189449503697754889751L,
                             0.2797053914892766679014677714237796L,
                             0.1294849661688696932706114326790820L};
  const T mid = (a + b) / 2, half = (b - a) / 2;
  T s = ws[0] * f(mid);
  for (int i = 0; i < 3; ++i)
    s += ws[i + 1] * (f(mid - half * xs[i]) + f(mid + half * xs[i]));
  return s * half;
}

// Inverts the cumulative of a positive integrand g: for each target y
// (ascending) finds s with int_0^s g = y. Marches with a bracketed Newton so
// no global error accumulates across the grid.
template <class G>
std::vector<Real> invert_cumulative(const G &g, Real s_hi,
                                    const std::vector<Real> &ys) {
  std::vector<Real> out(ys.size());
  Real s_cur = 0, c_cur = 0;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const Real y = ys[k];
    Real lo = s_cur, hi = s_hi;
    Real s = std::min(s_hi, s_cur + (y - c_cur) / std::max(g(s_cur), Real(1e-300)));
    for (int it = 0; it < 80; ++it) {
      const Real F = c_cur + gl7<Real>(g, s_cur, s) - y;
      if (F > 0) hi = s; else lo = s;
      const Real gs = g(s);
      Real step = (gs > 0) ? -F / gs : Real(0);
      Real snew = s + step;
      if (!(snew > lo) || !(snew < hi)) snew = (lo + hi) / 2;
      if (std::abs(snew - s) <= 1e-19L * (1 + std::abs(s)) || snew == s) {
        s = snew;
        break;
      }
      s = snew;
    }
    out[k] = s;
    c_cur = y;
    s_cur = s;
  }
  return out;
}

// local cubic Hermite on a uniform grid
double hermite_eval(const std::vector<double> &grid,
                    const std::vector<double> &val,
                    const std::vector<double> &der, double h, double q,
                    double below, double above) {
  if (q <= grid.front()) return below;
  if (q >= grid.back()) return above;
  const std::size_t i =
      std::min(grid.size() - 2,
               static_cast<std::size_t>((q - grid.front()) / h));
  const double t = (q - grid[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * val[i] + (t3 - 2 * t2 + t) * h * der[i] +
         (-2 * t3 + 3 * t2) * val[i + 1] + (t3 - t2) * h * der[i + 1];
}

}  // namespace

double WaveProfile::eval(double zq) const {
  return hermite_eval(z, value, deriv, dz, zq, reaction.rho_minus(),
                      reaction.rho_plus());
}

double WaveProfile::eval_deriv(double zq) const {
  if (zq <= z.front() || zq >= z.back()) return 0.0;
  const std::size_t i = std::min(
      z.size() - 2, static_cast<std::size_t>((zq - z.front()) / dz));
  const double t = (zq - z[i]) / dz;
  // Hermite on the derivative using U0'' = -(c U0' + f(U0))
  auto dd = [&](std::size_t j) {
    return -(speed * deriv[j] + reaction.f(value[j]));
  };
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * deriv[i] + (t3 - 2 * t2 + t) * dz * dd(i) +
         (-2 * t3 + 3 * t2) * deriv[i + 1] + (t3 - t2) * dz * dd(i + 1);
}

double PeriodicProfile::eval(double xq) const {
  double q = xq - std::floor(xq);
  const std::size_t i = std::min(static_cast<std::size_t>(n - 1),
                                 static_cast<std::size_t>(q / dx));
  const std::size_t ip = (i + 1) % static_cast<std::size_t>(n);
  const double t = (q - x[i]) / dx;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * value[i] + (t3 - 2 * t2 + t) * dx * deriv[i] +
         (-2 * t3 + 3 * t2) * value[ip] + (t3 - t2) * dx * deriv[ip];
}

WaveProfile solve_standing_wave(const BistableReaction &r, double z_max,
                                int n) {
  if (!r.balanced())
    throw std::invalid_argument("standing wave requires a balanced reaction");
  const Real rm = r.rho_minus(), rs = r.rho_star(), rp = r.rho_plus();
  const Real lam_p = std::sqrt(Real(-r.df(rp)));
  const Real lam_m = std::sqrt(Real(-r.df(rm)));
  if (z_max <= 0) z_max = 10.0 / static_cast<double>(std::min(lam_p, lam_m));
  if (n < 9) n = 9;
  if (n % 2 == 0) ++n;

  WaveProfile w;
  w.reaction = r;
  w.z_max = z_max;
  w.dz = 2.0 * z_max / (n - 1);
  w.z.resize(n);
  w.value.resize(n);
  w.deriv.resize(n);
  for (int i = 0; i < n; ++i) w.z[i] = -z_max + i * w.dz;

  // the anchoring residual of V at the outer roots can be a tiny negative
  auto p = [&](Real v) {
    return std::sqrt(std::max(2 * r.potential(v), Real(0)));
  };

  const int mid = (n - 1) / 2;
  w.value[mid] = static_cast<double>(rs);
  w.deriv[mid] = static_cast<double>(p(rs));

  // ascending side: invert z(v) = int_{rho_*}^{v} dv / p
  {
    std::vector<Real> zs;
    for (int i = mid + 1; i < n; ++i) zs.push_back(Real(w.z[i]));
    auto g = [&](Real u) { return 1 / p(rs + u); };
    auto ss = invert_cumulative(g, rp - rs - Real(1e-30), zs);
    for (int i = mid + 1; i < n; ++i) {
      const Real v = rs + ss[i - mid - 1];
      w.value[i] = static_cast<double>(v);
      w.deriv[i] = static_cast<double>(p(v));
    }
  }
  // descending side
  {
    std::vector<Real> zs;
    for (int i = mid - 1; i >= 0; --i) zs.push_back(Real(-w.z[i]));
    auto g = [&](Real u) { return 1 / p(rs - u); };
    auto ss = invert_cumulative(g, rs - rm - Real(1e-30), zs);
    for (int i = mid - 1; i >= 0; --i) {
      const Real v = rs - ss[mid - 1 - i];
      w.value[i] = static_cast<double>(v);
      w.deriv[i] = static_cast<double>(p(v));
    }
  }

  // ||U0'||^2 = int_{rho_-}^{rho_+} sqrt(2V) dv, exact over the whole line;
  // square-root substitution at both endpoints
  {
    const Real width = (rp - rm) / 8;
    auto body = [&](Real v) { return p(v); };
    Real total = integrate<Real>(body, rm + width, rp - width, Real(1e-17));
    total += integrate<Real>(
        [&](Real s) { return 2 * s * p(rm + s * s); }, Real(0),
        std::sqrt(width), Real(1e-17));
    total += integrate<Real>(
        [&](Real s) { return 2 * s * p(rp - s * s); }, Real(0),
        std::sqrt(width), Real(1e-17));
    w.deriv_l2_sq = static_cast<double>(total);
  }
  return w;
}

namespace {

struct ShootResult {
  int outcome = 0;  // +1 overshoot (U crossed rho_plus), -1 undershoot (W died)
  std::vector<double> zs, us, ws;
};

ShootResult shoot(const BistableReaction &r, double c, bool record) {
  ShootResult res;
  const double rm = r.rho_minus(), rp = r.rho_plus();
  const double mu = 0.5 * (-c + std::sqrt(c * c - 4.0 * r.df(rm)));
  const double delta = 1e-10 * (rp - rm);
  double u = rm + delta, w = mu * delta, z = 0.0;
  const double h = 1e-3;
  auto fu = [&](double, double ww) { return ww; };
  auto fw = [&](double uu, double ww) { return -c * ww - r.f(uu); };
  const int max_steps = 400000;
  if (record) {
    res.zs.reserve(8192);
    res.us.reserve(8192);
    res.ws.reserve(8192);
  }
  for (int step = 0; step < max_steps; ++step) {
    if (record) {
      res.zs.push_back(z);
      res.us.push_back(u);
      res.ws.push_back(w);
    }
    if (u >= rp) {
      res.outcome = +1;
      return res;
    }
    if (w <= 0) {
      res.outcome = -1;
      return res;
    }
    if (rp - u < 1e-13 && std::abs(w) < 1e-13) {
      res.outcome = -1;  // effectively landed; classify as boundary
      return res;
    }
    const double k1u = fu(u, w), k1w = fw(u, w);
    const double k2u = fu(u + h / 2 * k1u, w + h / 2 * k1w),
                 k2w = fw(u + h / 2 * k1u, w + h / 2 * k1w);
    const double k3u = fu(u + h / 2 * k2u, w + h / 2 * k2w),
                 k3w = fw(u + h / 2 * k2u, w + h / 2 * k2w);
    const double k4u = fu(u + h * k3u, w + h * k3w),
                 k4w = fw(u + h * k3u, w + h * k3w);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    z += h;
  }
  res.outcome = -1;
  return res;
}

}  // namespace

WaveProfile solve_traveling_wave(const BistableReaction &r,
                                 TravelingWaveOptions opt) {
  // outcome flips from overshoot (+1) at small c to undershoot (-1) at large c
  auto outcome = [&](double c) { return shoot(r, c, false).outcome; };
  double lo = 0.0, hi = 0.0;
  bool found = false;
  const int scan = 32;
  int prev = outcome(opt.c_lo);
  double prev_c = opt.c_lo;
  for (int i = 1; i <= scan; ++i) {
    const double c = opt.c_lo + (opt.c_hi - opt.c_lo) * i / scan;
    const int oc = outcome(c);
    if (oc != prev) {
      lo = prev_c;
      hi = c;
      found = true;
      break;
    }
    prev = oc;
    prev_c = c;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "traveling wave: no sign change in scanned speed range ["
        << opt.c_lo << ", " << opt.c_hi << "]";
    throw std::runtime_error(msg.str());
  }
  while (hi - lo > opt.tol_c) {
    const double mid = 0.5 * (lo + hi);
    if (outcome(mid) == +1)
      lo = mid;
    else
      hi = mid;
  }
  const double c = 0.5 * (lo + hi);

  // Two-sided construction: the one-sided orbit is exponentially unstable
  // past the layer, so each half is integrated in its own stable direction
  // and normalized at its rho_star crossing.
  const double rm = r.rho_minus(), rp = r.rho_plus(), rs = r.rho_star();
  const double mu_in = 0.5 * (-c + std::sqrt(c * c - 4.0 * r.df(rm)));
  const double mu_rev = 0.5 * (c + std::sqrt(c * c - 4.0 * r.df(rp)));
  const double delta = 1e-10 * (rp - rm);

  struct March {
    double u, w, z = 0;
    double dir;  // +1: forward in z; -1: reversed
    double speed;
    const BistableReaction *r;
    void step(double h) {
      auto fu = [&](double, double ww) { return dir * ww; };
      auto fw = [&](double uu, double ww) {
        return dir * (-speed * ww - r->f(uu));
      };
      const double k1u = fu(u, w), k1w = fw(u, w);
      const double k2u = fu(u + h / 2 * k1u, w + h / 2 * k1w),
                   k2w = fw(u + h / 2 * k1u, w + h / 2 * k1w);
      const double k3u = fu(u + h / 2 * k2u, w + h / 2 * k2w),
                   k3w = fw(u + h / 2 * k2u, w + h / 2 * k2w);
      const double k4u = fu(u + h * k3u, w + h * k3w),
                   k4w = fw(u + h * k3u, w + h * k3w);
      u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
      w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
      z += h;
    }
    void advance_to(double zt) {
      while (z < zt - 1e-15) {
        const int nsub = std::max(1, static_cast<int>(std::ceil((zt - z) / 1e-3)));
        const double h = (zt - z) / nsub;
        for (int s = 0; s < nsub; ++s) step(h);
        z = zt;
      }
    }
  };

  // crossing parameter of rho_star along a march, bisected to machine level
  auto crossing_of = [&](March m) {
    March before = m;
    const bool rising = m.dir > 0;
    while ((rising ? m.u < rs : m.u > rs) && m.z < 400.0) {
      before = m;
      m.step(1e-3);
    }
    if (m.z >= 400.0)
      throw std::runtime_error("traveling wave: profile never crossed rho_star");
    double lo = before.z, hi = before.z + 1e-3;
    for (int it = 0; it < 60; ++it) {
      const double midz = 0.5 * (lo + hi);
      March t = before;
      t.advance_to(midz);
      const bool under = rising ? t.u < rs : t.u > rs;
      if (under)
        lo = midz;
      else
        hi = midz;
    }
    return 0.5 * (lo + hi);
  };

  March fwd{rm + delta, mu_in * delta, 0.0, +1.0, c, &r};
  const double z0f = crossing_of(fwd);
  // reversed march descends from rho_plus: u' = -W, W stays the z-derivative
  March rev{rp - delta, mu_rev * delta, 0.0, -1.0, c, &r};
  const double z0b = crossing_of(rev);

  WaveProfile w;
  w.reaction = r;
  w.speed = c;
  w.z_max = opt.z_max;
  int n = opt.n;
  if (n % 2 == 0) ++n;
  w.dz = 2.0 * opt.z_max / (n - 1);
  w.z.resize(n);
  w.value.resize(n);
  w.deriv.resize(n);
  const int mid = (n - 1) / 2;

  // left half from the forward march
  {
    March m{rm + delta, mu_in * delta, 0.0, +1.0, c, &r};
    for (int i = 0; i <= mid; ++i) {
      const double zq = -opt.z_max + i * w.dz;
      const double zo = zq + z0f;
      if (zo <= 0.0) {
        const double uu = rm + delta * std::exp(mu_in * zo);
        w.z[i] = zq;
        w.value[i] = uu;
        w.deriv[i] = mu_in * (uu - rm);
        continue;
      }
      m.advance_to(zo);
      w.z[i] = zq;
      w.value[i] = m.u;
      w.deriv[i] = m.w;
    }
  }
  // right half from the reversed march, walked from the outside in
  {
    March m{rp - delta, mu_rev * delta, 0.0, -1.0, c, &r};
    std::vector<double> vv(n - mid), dd(n - mid);
    for (int j = n - 1; j > mid; --j) {
      const double zq = -opt.z_max + j * w.dz;
      const double zeta = z0b - zq;  // reversed-march parameter
      if (zeta <= 0.0) {
        const double gap = delta * std::exp(mu_rev * zeta);
        vv[j - mid] = rp - gap;
        dd[j - mid] = mu_rev * gap;
        continue;
      }
      m.advance_to(zeta);
      vv[j - mid] = m.u;
      dd[j - mid] = m.w;
    }
    for (int j = n - 1; j > mid; --j) {
      w.z[j] = -opt.z_max + j * w.dz;
      w.value[j] = vv[j - mid];
      w.deriv[j] = dd[j - mid];
    }
  }
  w.value[mid] = rs;  // both normalizations agree here to machine accuracy

  // ||U0'||^2 by Simpson on an auxiliary fine march over both halves
  {
    const double h = 5e-4;
    double total = 0.0;
    March m{rm + delta, mu_in * delta, 0.0, +1.0, c, &r};
    total += delta * delta * mu_in / 2;  // exact tail integral of the linear mode
    double prev = m.w * m.w;
    while (m.z < z0f) {
      const double mid_w = [&] { March t = m; t.step(h / 2); return t.w * t.w; }();
      m.step(h);
      total += h / 6 * (prev + 4 * mid_w + m.w * m.w);
      prev = m.w * m.w;
    }
    March b{rp - delta, mu_rev * delta, 0.0, -1.0, c, &r};
    total += delta * delta * mu_rev / 2;
    prev = b.w * b.w;
    while (b.z < z0b) {
      const double mid_w = [&] { March t = b; t.step(h / 2); return t.w * t.w; }();
      b.step(h);
      total += h / 6 * (prev + 4 * mid_w + b.w * b.w);
      prev = b.w * b.w;
    }
    w.deriv_l2_sq = total;
  }
  return w;
}

PeriodicProfile solve_periodic_profile(const BistableReaction &r, double K,
                                       int n) {
  if (!r.balanced())
    throw std::invalid_argument("periodic profile requires a balanced reaction");
  if (n < 64) throw std::invalid_argument("periodic profile: grid too coarse");
  const Real rm = r.rho_minus(), rs = r.rho_star(), rp = r.rho_plus();
  const Real vmax = r.potential(rs);
  const Real k = K;

  auto polyval = [](const std::vector<Real> &c, Real v) {
    Real acc = 0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * v + c[j];
    return acc;
  };

  // Product form of the potential, V = (v - rm)^2 (v - rp)^2 W(v). The
  // monomial form only vanishes at the outer roots to rounding, which is far
  // above the energy constants e ~ exp(-sqrt(K)) this solver needs; the
  // factored form has exact double roots and is relatively accurate there.
  std::vector<Real> Wq;
  {
    const auto &vc = r.potential_coeffs();
    Wq.assign(vc.begin(), vc.end());
    auto divide_out = [&](Real root) {
      std::vector<Real> q(Wq.size() - 1);
      Real carry = Wq.back();
      for (std::size_t j = Wq.size() - 1; j-- > 0;) {
        q[j] = carry;
        carry = Wq[j] + carry * root;  // remainder dropped
      }
      Wq = std::move(q);
    };
    divide_out(rp);
    divide_out(rp);
    divide_out(rm);
    divide_out(rm);
  }
  auto V_prod = [&](Real v) {
    const Real d1 = v - rm, d2 = v - rp;
    return d1 * d1 * d2 * d2 * polyval(Wq, v);
  };

  auto turn_lo = [&](Real E) {
    return brent<Real>([&](Real v) { return V_prod(v) - E; }, rm, rs,
                       Real(1e-19));
  };
  auto turn_hi = [&](Real E) {
    return brent<Real>([&](Real v) { return V_prod(v) - E; }, rs, rp,
                       Real(1e-19));
  };

  // Taylor coefficients of V - E about the turning point vt, assembled by
  // convolving the shifted factors, then folded with the excursion sign:
  // with v = vt + sgn s^2, (V - E)/s^2 = bracket(s^2) >= 0.
  auto shifted_bracket = [&](Real E, Real vt, Real sgn) {
    auto conv = [](const std::vector<Real> &a, const std::vector<Real> &b) {
      std::vector<Real> c(a.size() + b.size() - 1, Real(0));
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
      return c;
    };
    const Real am = vt - rm, ap = vt - rp;
    const std::vector<Real> sq_m = {am * am, 2 * am, Real(1)};
    const std::vector<Real> sq_p = {ap * ap, 2 * ap, Real(1)};
    std::vector<Real> wsh = Wq;  // W(vt + x), shifted in place
    const int degw = static_cast<int>(wsh.size()) - 1;
    for (int j = 0; j <= degw; ++j)
      for (int i = degw - 1; i >= j; --i) wsh[i] += vt * wsh[i + 1];
    std::vector<Real> ws = conv(conv(sq_m, sq_p), wsh);
    ws[0] -= E;  // ~0: vt is the turning point
    std::vector<Real> b(ws.size() - 1);
    Real sg = sgn;
    for (std::size_t j = 1; j < ws.size(); ++j) {
      b[j - 1] = ws[j] * sg;
      sg *= sgn;
    }
    return b;
  };

  // Half-excursion length between the turning point and rho_star. For small
  // E the integrand 2/sqrt(2k Q) is a near-1/s profile over many decades
  // (the turning point sits close to a double root of V), so the outer part
  // is integrated in log coordinates where it is flat.
  auto half_length = [&](Real E, bool lower) {
    const Real vt = lower ? turn_lo(E) : turn_hi(E);
    const Real smax = std::sqrt(std::abs(rs - vt));
    const Real sgn = lower ? 1 : -1;
    const auto br = shifted_bracket(E, vt, sgn);
    auto g = [&](Real s) {
      return 2 / std::sqrt(2 * k * std::max(polyval(br, s * s), Real(1e-300)));
    };
    const Real outer_root = lower ? rm : rp;
    const Real scale = std::sqrt(std::abs(vt - outer_root));
    const Real s1 = std::min(smax / 2, std::max(8 * scale, smax * Real(1e-12)));
    Real total = integrate<Real>(g, Real(0), s1, Real(2e-17));
    total += integrate<Real>(
        [&](Real u) {
          const Real s = std::exp(u);
          return s * g(s);
        },
        std::log(s1), std::log(smax), Real(2e-17));
    return total;
  };

  // period as a function of t, with e = -vmax * exp(-t)
  auto period = [&](Real t) {
    const Real E = vmax * std::exp(-t);
    return 2 * (half_length(E, true) + half_length(E, false));
  };

  const Real t_lo = 1e-10L;
  Real t_hi = 40;
  if (period(t_lo) >= 1)
    throw std::invalid_argument(
        "periodic profile: K too small, excursions cannot close on the torus");
  while (period(t_hi) < 1) {
    t_hi *= 2;
    if (t_hi > 1e5L) throw std::runtime_error("periodic profile: period search failed");
  }
  const Real t_star = brent<Real>([&](Real t) { return period(t) - 1; }, t_lo,
                                  t_hi, Real(1e-17));
  const Real E = vmax * std::exp(-t_star);
  const Real e_star = -E;
  const Real v_lo = turn_lo(E), v_hi = turn_hi(E);
  const Real T_lo = half_length(E, true), T_hi = half_length(E, false);
  const Real m1 = T_lo, h2 = 2 * T_lo, m2 = 2 * T_lo + T_hi;

  PeriodicProfile prof;
  prof.K = K;
  prof.n = n;
  prof.dx = 1.0 / n;
  prof.x.resize(n);
  prof.value.resize(n);
  prof.deriv.resize(n);
  prof.h2 = static_cast<double>(h2);
  prof.m1 = static_cast<double>(m1);
  prof.m2 = static_cast<double>(m2);
  prof.e_star = static_cast<double>(e_star);
  prof.reaction = r;

  struct Target {
    Real y;
    int idx;
    int sign;  // sign of v_x at the point
  };
  std::vector<Target> lower, upper;
  for (int i = 0; i < n; ++i) {
    const Real xq = Real(i) / n;
    prof.x[i] = static_cast<double>(xq);
    if (xq <= h2) {
      const Real y = std::abs(xq - m1);
      lower.push_back({y, i, xq < m1 ? -1 : +1});
    } else {
      const Real y = std::abs(xq - m2);
      upper.push_back({y, i, xq < m2 ? +1 : -1});
    }
  }
  auto by_y = [](const Target &a, const Target &b) { return a.y < b.y; };
  std::sort(lower.begin(), lower.end(), by_y);
  std::sort(upper.begin(), upper.end(), by_y);

  auto fill = [&](const std::vector<Target> &ts, Real vt, bool is_lower) {
    const Real sgn = is_lower ? 1 : -1;
    const auto br = shifted_bracket(E, vt, sgn);
    auto g = [&](Real s) {
      return 2 / std::sqrt(2 * k * std::max(polyval(br, s * s), Real(1e-300)));
    };
    std::vector<Real> ys(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) ys[j] = ts[j].y;
    const Real smax = std::sqrt(std::abs(rs - vt));
    auto ss = invert_cumulative(g, smax, ys);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const Real s = ss[j];
      const Real v = vt + sgn * s * s;
      prof.value[ts[j].idx] = static_cast<double>(v);
      prof.deriv[ts[j].idx] = static_cast<double>(
          ts[j].sign * s *
          std::sqrt(2 * k * std::max(polyval(br, s * s), Real(0))));
    }
  };
  fill(lower, v_lo, true);
  fill(upper, v_hi, false);
  return prof;
}

std::vector<double> hat_profile(const WaveProfile &sw, double K, double h2,
                                const std::vector<double> &x) {
  const double sk = std::sqrt(K);
  const double m1 = h2 / 2, m2 = (h2 + 1) / 2;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xq = x[i] - std::floor(x[i]);
    if (xq <= m1)
      out[i] = sw.eval(-sk * xq);
    else if (xq <= m2)
      out[i] = sw.eval(sk * (xq - h2));
    else
      out[i] = sw.eval(sk * (1 - xq));
  }
  return out;
}

std::vector<double> hat_profile_deriv(const WaveProfile &sw, double K,
                                      double h2, const std::vector<double> &x) {
  const double sk = std::sqrt(K);
  const double m1 = h2 / 2, m2 = (h2 + 1) / 2;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xq = x[i] - std::floor(x[i]);
    if (xq <= m1)
      out[i] = -sk * sw.eval_deriv(-sk * xq);
    else if (xq <= m2)
      out[i] = sk * sw.eval_deriv(sk * (xq - h2));
    else
      out[i] = -sk * sw.eval_deriv(sk * (1 - xq));
  }
  return out;
}

double ode_residual_sup(const WaveProfile &w) {
  // fourth-order five-point second difference on the interior
  const std::size_t n = w.value.size();
  const double h2 = w.dz * w.dz;
  double sup = 0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d2 = (-w.value[i - 2] + 16 * w.value[i - 1] - 30 * w.value[i] +
                       16 * w.value[i + 1] - w.value[i + 2]) /
                      (12 * h2);
    const double res = d2 + w.speed * w.deriv[i] + w.reaction.f(w.value[i]);
    sup = std::max(sup, std::abs(res));
  }
  return sup;
}

double ode_residual_sup(const PeriodicProfile &p) {
  // spec-form residual: eps^2 D2 v + f(v) with the plain centered stencil
  const int n = p.n;
  const double eps2 = 1.0 / p.K;
  const double h2 = p.dx * p.dx;
  double sup = 0;
  for (int i = 0; i < n; ++i) {
    const int im = (i + n - 1) % n, ip = (i + 1) % n;
    const double d2 = (p.value[im] - 2 * p.value[i] + p.value[ip]) / h2;
    sup = std::max(sup, std::abs(eps2 * d2 + p.reaction.f(p.value[i])));
  }
  return sup;
}

std::string profile_csv(const WaveProfile &w) {
  CsvWriter csv({"z", "value", "derivative"});
  for (std::size_t i = 0; i < w.z.size(); ++i)
    csv.add_row({w.z[i], w.value[i], w.deriv[i]});
  return csv.str();
}

std::string profile_csv(const PeriodicProfile &p) {
  CsvWriter csv({"x", "value", "derivative"});
  for (int i = 0; i < p.n; ++i)
    csv.add_row({p.x[i], p.value[i], p.deriv[i]});
  return csv.str();
}

std::string profile_sidecar_json(const PeriodicProfile &p) {
  std::ostringstream os;
  os.precision(17);
  os << "{\n  \"K\": " << p.K << ",\n  \"n\": " << p.n
     << ",\n  \"h2\": " << p.h2 << ",\n  \"m1\": " << p.m1
     << ",\n  \"m2\": " << p.m2 << ",\n  \"e_star\": " << p.e_star
     << ",\n  \"reaction\": \"" << p.reaction.id() << "\"\n}\n";
  return os.str();
}

}  // namespace fl
