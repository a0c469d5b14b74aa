#include "fluctlab/particle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "fluctlab/numerics.hpp"
#include "fluctlab/rng.hpp"

namespace fl {

namespace {

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

FlipRateFamily flip_constant(int dim) {
  FlipRateFamily f;
  f.id = "const";
  f.dim = dim;
  f.offsets = {std::vector<int>(dim, 0)};
  f.rate = {1.0, 1.0};
  f.max_rate = 1.0;
  return f;
}

FlipRateFamily flip_neighbor_linear(double a) {
  FlipRateFamily f;
  f.id = "neighbor-linear";
  f.dim = 1;
  f.offsets = {{0}, {-1}, {1}};
  f.rate.resize(8);
  for (int mask = 0; mask < 8; ++mask) {
    const int s = ((mask >> 1) & 1) + ((mask >> 2) & 1);
    f.rate[mask] = 1.0 + a * s;
    if (f.rate[mask] <= 0)
      throw std::invalid_argument("flip rates must be positive");
  }
  f.max_rate = *std::max_element(f.rate.begin(), f.rate.end());
  return f;
}

FlipRateFamily flip_bistable() {
  FlipRateFamily f;
  f.id = "bistable1d";
  f.dim = 1;
  f.offsets = {{0}, {-1}, {1}};
  const double birth[3] = {0.2, 0.05, 1.2};
  f.rate.resize(8);
  for (int mask = 0; mask < 8; ++mask) {
    const int occ = mask & 1;
    const int s = ((mask >> 1) & 1) + ((mask >> 2) & 1);
    f.rate[mask] = occ ? birth[2 - s] : birth[s];
  }
  f.max_rate = *std::max_element(f.rate.begin(), f.rate.end());
  return f;
}

namespace {

// sum over all window configurations weighted by Bernoulli(u) products
template <class Body>
void enumerate_window(const FlipRateFamily &rates, double u, const Body &body) {
  const int w = rates.window_size();
  if (w > 20)
    throw std::invalid_argument("ensemble average: window too large for exact enumeration");
  const int m = 1 << w;
  for (int mask = 0; mask < m; ++mask) {
    double weight = 1.0;
    for (int k = 0; k < w; ++k)
      weight *= ((mask >> k) & 1) ? u : (1.0 - u);
    body(mask, weight);
  }
}

}  // namespace

double ensemble_f(const FlipRateFamily &rates, double u) {
  double s = 0;
  enumerate_window(rates, u, [&](int mask, double weight) {
    const double cbar = rates.rate[mask] * ((mask & 1) ? -1.0 : 1.0);
    s += weight * cbar;
  });
  return s;
}

double ensemble_c0(const FlipRateFamily &rates, double u) {
  double s = 0;
  enumerate_window(rates, u, [&](int mask, double weight) {
    s += weight * rates.rate[mask];
  });
  return s;
}

BistableReaction reaction_from_rates(const FlipRateFamily &rates) {
  // expand E^{nu_u}[cbar] as an exact polynomial in u
  const int w = rates.window_size();
  if (w > 20) throw std::invalid_argument("reaction_from_rates: window too large");
  std::vector<double> poly(w + 1, 0.0);
  const int m = 1 << w;
  for (int mask = 0; mask < m; ++mask) {
    const double cbar = rates.rate[mask] * ((mask & 1) ? -1.0 : 1.0);
    std::vector<double> term{1.0};
    for (int k = 0; k < w; ++k) {
      std::vector<double> next(term.size() + 1, 0.0);
      if ((mask >> k) & 1) {
        for (std::size_t j = 0; j < term.size(); ++j) next[j + 1] += term[j];
      } else {
        for (std::size_t j = 0; j < term.size(); ++j) {
          next[j] += term[j];
          next[j + 1] -= term[j];
        }
      }
      term = std::move(next);
    }
    for (std::size_t j = 0; j < term.size(); ++j) poly[j] += cbar * term[j];
  }
  while (poly.size() > 1 && std::abs(poly.back()) < 1e-15) poly.pop_back();

  // locate the three roots in (0,1) by sign scanning
  auto eval = [&](double u) {
    double r = 0;
    for (std::size_t j = poly.size(); j-- > 0;) r = r * u + poly[j];
    return r;
  };
  std::vector<double> roots;
  const int scan = 4000;
  double prev = eval(0.0);
  for (int i = 1; i <= scan; ++i) {
    const double u = static_cast<double>(i) / scan;
    const double cur = eval(u);
    if ((prev > 0) != (cur > 0))
      roots.push_back(brent<double>(eval, (i - 1.0) / scan, u, 1e-15));
    prev = cur;
  }
  if (roots.size() != 3)
    throw std::invalid_argument("reaction_from_rates: ensemble drift is not bistable");
  return BistableReaction(poly, roots[0], roots[1], roots[2],
                          "rates:" + rates.id);
}

ScalarFn g2_from_rates(const FlipRateFamily &rates) {
  return [rates](double u) { return std::sqrt(ensemble_c0(rates, u)); };
}

std::vector<std::uint64_t> pack_state(const LatticeState &eta) {
  std::vector<std::uint64_t> out((eta.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < eta.size(); ++i)
    if (eta[i]) out[i >> 6] |= (1ULL << (i & 63));
  return out;
}

LatticeState unpack_state(const std::vector<std::uint64_t> &packed, int nsites) {
  LatticeState eta(nsites, 0);
  for (int i = 0; i < nsites; ++i)
    eta[i] = (packed[i >> 6] >> (i & 63)) & 1;
  return eta;
}

LatticeState pack_unpack_roundtrip(const LatticeState &eta) {
  return unpack_state(pack_state(eta), static_cast<int>(eta.size()));
}

LatticeState bernoulli_state(int nsites, double u, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 101));
  LatticeState eta(nsites);
  for (auto &e : eta) e = rng.uniform() < u ? 1 : 0;
  return eta;
}

LatticeState profile_state(int N, int d, const std::vector<double> &density,
                           std::uint64_t seed) {
  const int nsites = ipow(N, d);
  if (static_cast<int>(density.size()) != nsites)
    throw std::invalid_argument("profile_state: density size mismatch");
  Rng rng(derive_seed(seed, 102));
  LatticeState eta(nsites);
  for (int i = 0; i < nsites; ++i) eta[i] = rng.uniform() < density[i] ? 1 : 0;
  return eta;
}

namespace {

// incremental Dynkin bookkeeping for one probe function
struct Probe {
  int N = 0, d = 1, nsites = 0;
  double K = 0;
  const FlipRateFamily *rates = nullptr;
  std::vector<double> phi, lap_phi;          // phi and Delta^N phi per site
  std::vector<double> grad_sq;               // (grad^N phi)^2 per bond (site, dir)
  // running sums
  double pairing = 0;       // <rho, phi> = N^{-d} sum eta phi
  double bk = 0;            // <rho, Delta^N phi>
  double bg_bar = 0;        // sum cbar_p phi_p
  double sk = 0;            // sum over unordered bonds (eta_p - eta_q)^2 (grad phi)^2
  double sg = 0;            // sum c_p phi_p^2
  // integrals
  double int_bk = 0, int_bg = 0, int_qvk = 0, int_qvg = 0;
};

}  // namespace

LatticeTrajectory simulate_gk(const FlipRateFamily &rates, LatticeState init,
                              const GkOptions &opt) {
  const int N = opt.N, d = opt.d;
  if (d != 1 && d != 2) throw std::invalid_argument("simulate_gk: d must be 1 or 2");
  const int nsites = ipow(N, d);
  if (static_cast<int>(init.size()) != nsites)
    throw std::invalid_argument("simulate_gk: init size mismatch");
  if (rates.dim != d && rates.window_size() > 1)
    throw std::invalid_argument("simulate_gk: rate family dimension mismatch");

  LatticeTrajectory traj;
  traj.N = N;
  traj.d = d;
  traj.K = opt.K;
  traj.seed = opt.seed;
  traj.rate_id = rates.id;

  LatticeState eta = std::move(init);
  Rng rng(opt.seed);

  const int nbonds = d * nsites;
  const double rate_exchange =
      opt.kawasaki_on ? static_cast<double>(N) * N * nbonds : 0.0;
  const double rate_flip =
      opt.glauber_on ? opt.K * rates.max_rate * nsites : 0.0;
  const double rate_total = rate_exchange + rate_flip;
  if (rate_total <= 0) throw std::invalid_argument("simulate_gk: no dynamics enabled");
  if (rate_total * opt.T > opt.event_cap)
    std::fprintf(stderr,
                 "simulate_gk: projected %.3g events exceeds cap %.3g\n",
                 rate_total * opt.T, opt.event_cap);

  // neighbour helpers
  auto site_shift = [&](int p, int dir, int step) {
    if (d == 1) {
      return (p + step + N) % N;
    }
    int i = p % N, j = p / N;
    if (dir == 0)
      i = (i + step + N) % N;
    else
      j = (j + step + N) % N;
    return i + N * j;
  };
  const int w = rates.window_size();
  auto window_mask = [&](int p) {
    int mask = 0;
    for (int k = 0; k < w; ++k) {
      int q = p;
      if (d == 1) {
        q = (p + rates.offsets[k][0] + N) % N;
      } else {
        int i = (p % N + rates.offsets[k][0] + N) % N;
        int j = (p / N + (rates.offsets[k].size() > 1 ? rates.offsets[k][1] : 0) + N) % N;
        q = i + N * j;
      }
      mask |= (eta[q] ? 1 : 0) << k;
    }
    return mask;
  };

  // probe bookkeeping
  const bool probing = !opt.probe.empty();
  Probe pr;
  if (probing) {
    if (static_cast<int>(opt.probe.size()) != nsites)
      throw std::invalid_argument("simulate_gk: probe size mismatch");
    pr.N = N;
    pr.d = d;
    pr.nsites = nsites;
    pr.K = opt.K;
    pr.rates = &rates;
    pr.phi = opt.probe;
    pr.lap_phi.assign(nsites, 0.0);
    pr.grad_sq.assign(nbonds, 0.0);
    const double N2 = static_cast<double>(N) * N;
    for (int p = 0; p < nsites; ++p) {
      double lap = 0;
      for (int dir = 0; dir < d; ++dir) {
        const int qp = site_shift(p, dir, +1), qm = site_shift(p, dir, -1);
        lap += pr.phi[qp] + pr.phi[qm] - 2 * pr.phi[p];
        const double g = static_cast<double>(N) * (pr.phi[qp] - pr.phi[p]);
        pr.grad_sq[static_cast<std::size_t>(dir) * nsites + p] = g * g;
      }
      pr.lap_phi[p] = N2 * lap;
    }
    const double invd = 1.0 / nsites;
    for (int p = 0; p < nsites; ++p) {
      if (eta[p]) {
        pr.pairing += pr.phi[p] * invd;
        pr.bk += pr.lap_phi[p] * invd;
      }
      const int mask = window_mask(p);
      const double c = rates.rate[mask];
      const double cbar = c * (eta[p] ? -1.0 : 1.0);
      pr.bg_bar += cbar * pr.phi[p];
      pr.sg += c * pr.phi[p] * pr.phi[p];
      for (int dir = 0; dir < d; ++dir) {
        const int q = site_shift(p, dir, +1);
        const double diff = static_cast<double>(eta[p]) - eta[q];
        pr.sk += diff * diff * pr.grad_sq[static_cast<std::size_t>(dir) * nsites + p];
      }
    }
  }
  const double invd = 1.0 / nsites;

  // Adds (sign = +1) or removes (sign = -1) the probe contributions of
  // everything that can change when the sites in `cores` flip: the sites
  // themselves, the bonds touching them, and every site whose rate window
  // covers them. Called with -1 before the move and +1 after.
  int touched_bonds[16], touched_windows[16];
  auto probe_adjust = [&](const int *cores, int ncores, double sign) {
    int nb = 0, nw = 0;
    for (int ci = 0; ci < ncores; ++ci) {
      const int c = cores[ci];
      for (int dir = 0; dir < d; ++dir) {
        const int b1 = dir * nsites + c;
        const int b2 = dir * nsites + site_shift(c, dir, -1);
        for (int b : {b1, b2}) {
          bool dup = false;
          for (int j = 0; j < nb; ++j) dup |= (touched_bonds[j] == b);
          if (!dup) touched_bonds[nb++] = b;
        }
      }
      for (int k = 0; k < w; ++k) {
        int q;
        if (d == 1) {
          q = (c - rates.offsets[k][0] + N) % N;
        } else {
          const int oi = rates.offsets[k][0];
          const int oj = rates.offsets[k].size() > 1 ? rates.offsets[k][1] : 0;
          q = (c % N - oi + N) % N + N * ((c / N - oj + N) % N);
        }
        bool dup = false;
        for (int j = 0; j < nw; ++j) dup |= (touched_windows[j] == q);
        if (!dup) touched_windows[nw++] = q;
      }
      if (eta[c]) {
        pr.pairing += sign * pr.phi[c] * invd;
        pr.bk += sign * pr.lap_phi[c] * invd;
      }
    }
    for (int j = 0; j < nb; ++j) {
      const int b = touched_bonds[j];
      const int dir = b / nsites, p = b % nsites;
      const int q = site_shift(p, dir, +1);
      const double diff = static_cast<double>(eta[p]) - eta[q];
      pr.sk += sign * diff * diff * pr.grad_sq[b];
    }
    for (int j = 0; j < nw; ++j) {
      const int q = touched_windows[j];
      const double c = rates.rate[window_mask(q)];
      pr.bg_bar += sign * c * (eta[q] ? -1.0 : 1.0) * pr.phi[q];
      pr.sg += sign * c * pr.phi[q] * pr.phi[q];
    }
  };

  std::size_t next_snap = 0;
  double t = 0;         // time of the last event
  double t_cursor = 0;  // the integrals are accumulated up to here
  auto advance_to = [&](double tt) {
    if (probing && tt > t_cursor) {
      const double span = tt - t_cursor;
      pr.int_bk += pr.bk * span;
      pr.int_bg += opt.K * pr.bg_bar * invd * span;
      pr.int_qvk += pr.sk * invd * span;  // ordered/2 = unordered, over N^d
      pr.int_qvg += opt.K * pr.sg * invd * span;
    }
    t_cursor = std::max(t_cursor, tt);
  };
  auto snapshot = [&](double ts) {
    traj.snapshots.push_back({ts, pack_state(eta)});
    if (probing) {
      traj.dynkin.times.push_back(ts);
      traj.dynkin.pairing.push_back(pr.pairing);
      traj.dynkin.drift_k_int.push_back(pr.int_bk);
      traj.dynkin.drift_g_int.push_back(pr.int_bg);
      traj.dynkin.qv_kawasaki.push_back(pr.int_qvk);
      traj.dynkin.qv_glauber.push_back(pr.int_qvg);
      traj.dynkin.inst_bk.push_back(pr.bk);
      traj.dynkin.inst_bg.push_back(opt.K * pr.bg_bar * invd);
    }
  };
  auto take_snaps_until = [&](double tt) {
    while (next_snap < opt.snapshot_times.size() &&
           opt.snapshot_times[next_snap] <= tt) {
      advance_to(opt.snapshot_times[next_snap]);
      snapshot(opt.snapshot_times[next_snap]);
      ++next_snap;
    }
  };
  take_snaps_until(0.0);

  const double p_exchange = rate_exchange / rate_total;

  while (t < opt.T) {
    const double dt_ev = rng.exponential(rate_total);
    const double t_new = t + dt_ev;
    if (t_new >= opt.T) {
      take_snaps_until(opt.T);
      advance_to(opt.T);
      t = opt.T;
      break;
    }
    take_snaps_until(t_new);
    advance_to(t_new);
    t = t_new;

    if (rng.uniform() < p_exchange) {
      // pick an unordered bond (site, dir)
      const std::uint64_t pick = rng.uniform_index(static_cast<std::uint64_t>(nbonds));
      const int dir = static_cast<int>(pick / nsites);
      const int p = static_cast<int>(pick % nsites);
      const int q = site_shift(p, dir, +1);
      if (eta[p] == eta[q]) continue;
      const int cores[2] = {p, q};
      if (probing) probe_adjust(cores, 2, -1.0);
      std::swap(eta[p], eta[q]);
      ++traj.exchange_events;
      if (probing) probe_adjust(cores, 2, +1.0);
    } else {
      const int p = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(nsites)));
      const int mask = window_mask(p);
      if (rng.uniform() * rates.max_rate >= rates.rate[mask]) continue;
      const int cores[1] = {p};
      if (probing) probe_adjust(cores, 1, -1.0);
      eta[p] ^= 1;
      ++traj.flip_events;
      if (probing) probe_adjust(cores, 1, +1.0);
    }
  }
  take_snaps_until(opt.T);
  advance_to(opt.T);
  if (opt.snapshot_times.empty()) snapshot(opt.T);
  return traj;
}

std::vector<double> empirical_density(const LatticeState &eta, int N, int d,
                                      int block) {
  if (block <= 0 || N % block != 0)
    throw std::invalid_argument("empirical_density: block must divide N");
  const int nb = N / block;
  if (d == 1) {
    std::vector<double> out(nb, 0.0);
    for (int i = 0; i < N; ++i) out[i / block] += eta[i];
    for (auto &x : out) x /= block;
    return out;
  }
  std::vector<double> out(static_cast<std::size_t>(nb) * nb, 0.0);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      out[static_cast<std::size_t>(j / block) * nb + i / block] += eta[i + N * j];
  for (auto &x : out) x /= static_cast<double>(block) * block;
  return out;
}

std::vector<double> fluctuation_field(const LatticeState &eta, int N, int d,
                                      int block,
                                      const std::vector<double> &u_block) {
  auto rho = empirical_density(eta, N, d, block);
  if (rho.size() != u_block.size())
    throw std::invalid_argument("fluctuation_field: block grid mismatch");
  const double scale = std::pow(static_cast<double>(N), 0.5 * d);
  for (std::size_t i = 0; i < rho.size(); ++i)
    rho[i] = scale * (rho[i] - u_block[i]);
  return rho;
}

double fluctuation_pairing(const LatticeState &eta, int N, int d,
                           const std::vector<double> &phi_sites,
                           const std::vector<double> &u_sites) {
  const int nsites = ipow(N, d);
  double s = 0;
  for (int p = 0; p < nsites; ++p)
    s += (static_cast<double>(eta[p]) - u_sites[p]) * phi_sites[p];
  return std::pow(static_cast<double>(N), 0.5 * d) * s / nsites;
}

double drift_kawasaki_direct(const LatticeState &eta, int N, int d,
                             const std::vector<double> &phi) {
  const int nsites = ipow(N, d);
  const double N2 = static_cast<double>(N) * N;
  double s = 0;
  for (int p = 0; p < nsites; ++p) {
    for (int dir = 0; dir < d; ++dir) {
      int q;
      if (d == 1) {
        q = (p + 1) % N;
      } else {
        int i = p % N, j = p / N;
        q = (dir == 0) ? ((i + 1) % N + N * j) : (i + N * ((j + 1) % N));
      }
      const double diff = static_cast<double>(eta[p]) - eta[q];
      // ordered sum over both (p,q) and (q,p) collapses to twice this
      s += diff * (phi[q] - phi[p]);
    }
  }
  return N2 * s / nsites;
}

double drift_kawasaki_laplacian_form(const LatticeState &eta, int N, int d,
                                     const std::vector<double> &phi) {
  const int nsites = ipow(N, d);
  const double N2 = static_cast<double>(N) * N;
  double s = 0;
  for (int p = 0; p < nsites; ++p) {
    if (!eta[p]) continue;
    double lap = 0;
    for (int dir = 0; dir < d; ++dir) {
      int qp, qm;
      if (d == 1) {
        qp = (p + 1) % N;
        qm = (p + N - 1) % N;
      } else {
        int i = p % N, j = p / N;
        if (dir == 0) {
          qp = (i + 1) % N + N * j;
          qm = (i + N - 1) % N + N * j;
        } else {
          qp = i + N * ((j + 1) % N);
          qm = i + N * ((j + N - 1) % N);
        }
      }
      lap += phi[qp] + phi[qm] - 2 * phi[p];
    }
    s += N2 * lap;
  }
  return s / nsites;
}

double drift_glauber_direct(const FlipRateFamily &rates, const LatticeState &eta,
                            int N, int d, double K,
                            const std::vector<double> &phi) {
  const int nsites = ipow(N, d);
  const int w = rates.window_size();
  double s = 0;
  for (int p = 0; p < nsites; ++p) {
    int mask = 0;
    for (int k = 0; k < w; ++k) {
      int q;
      if (d == 1) {
        q = (p + rates.offsets[k][0] + N) % N;
      } else {
        int i = (p % N + rates.offsets[k][0] + N) % N;
        int j = (p / N + (rates.offsets[k].size() > 1 ? rates.offsets[k][1] : 0) + N) % N;
        q = i + N * j;
      }
      mask |= (eta[q] ? 1 : 0) << k;
    }
    s += rates.rate[mask] * (eta[p] ? -1.0 : 1.0) * phi[p];
  }
  return K * s / nsites;
}

std::string trajectory_to_binary(const LatticeTrajectory &traj) {
  std::string out;
  auto put = [&](const void *p, std::size_t len) {
    out.append(static_cast<const char *>(p), len);
  };
  const char magic[4] = {'G', 'K', 'R', '1'};
  put(magic, 4);
  const std::uint32_t N = traj.N, d = traj.d;
  put(&N, 4);
  put(&d, 4);
  put(&traj.K, 8);
  put(&traj.seed, 8);
  const std::uint32_t idlen = static_cast<std::uint32_t>(traj.rate_id.size());
  put(&idlen, 4);
  put(traj.rate_id.data(), idlen);
  put(&traj.exchange_events, 8);
  put(&traj.flip_events, 8);
  const std::uint32_t nsnap = static_cast<std::uint32_t>(traj.snapshots.size());
  put(&nsnap, 4);
  for (const auto &snap : traj.snapshots) {
    put(&snap.t, 8);
    const std::uint32_t words = static_cast<std::uint32_t>(snap.packed.size());
    put(&words, 4);
    put(snap.packed.data(), 8 * snap.packed.size());
  }
  return out;
}

LatticeTrajectory trajectory_from_binary(const std::string &bytes) {
  LatticeTrajectory traj;
  std::size_t pos = 0;
  auto get = [&](void *p, std::size_t len) {
    if (pos + len > bytes.size()) throw std::runtime_error("trajectory: truncated file");
    std::memcpy(p, bytes.data() + pos, len);
    pos += len;
  };
  char magic[4];
  get(magic, 4);
  if (std::memcmp(magic, "GKR1", 4) != 0)
    throw std::runtime_error("trajectory: bad magic");
  std::uint32_t N = 0, d = 0;
  get(&N, 4);
  get(&d, 4);
  traj.N = N;
  traj.d = d;
  get(&traj.K, 8);
  get(&traj.seed, 8);
  std::uint32_t idlen = 0;
  get(&idlen, 4);
  traj.rate_id.resize(idlen);
  get(traj.rate_id.data(), idlen);
  get(&traj.exchange_events, 8);
  get(&traj.flip_events, 8);
  std::uint32_t nsnap = 0;
  get(&nsnap, 4);
  traj.snapshots.resize(nsnap);
  for (auto &snap : traj.snapshots) {
    get(&snap.t, 8);
    std::uint32_t words = 0;
    get(&words, 4);
    snap.packed.resize(words);
    get(snap.packed.data(), 8 * words);
  }
  return traj;
}

}  // namespace fl
