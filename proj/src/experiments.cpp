#include "fluctlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fluctlab/analysis.hpp"
#include "fluctlab/constants.hpp"
#include "fluctlab/io.hpp"
#include "fluctlab/spde.hpp"
#include "fluctlab/spectral.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fl {

namespace {

using nlohmann::json;

std::vector<double> e_on_grid(const WaveProfile &sw, double K, int nz) {
  const double sk = std::sqrt(K);
  const double dz = sk / nz;
  const double norm = std::sqrt(sw.deriv_l2_sq);
  std::vector<double> e(nz);
  for (int i = 0; i < nz; ++i) {
    const double z = -sk / 2 + i * dz;
    e[i] = sw.eval_deriv(-z) / norm;
  }
  return e;
}

double pair_with(const std::vector<double> &field, const std::vector<double> &e,
                 double dz) {
  double s = 0;
  for (std::size_t i = 0; i < field.size(); ++i) s += field[i] * e[i];
  return s * dz;
}

// slope from per-window variances of independent increments
double increment_slope(const std::vector<std::vector<double>> &paths_x,
                       const std::vector<double> &times) {
  const std::size_t m = times.size() - 1;
  double sum = 0;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> inc;
    inc.reserve(paths_x.size());
    for (const auto &x : paths_x) inc.push_back(x[j + 1] - x[j]);
    sum += variance(inc) / (times[j + 1] - times[j]);
  }
  return sum / static_cast<double>(m);
}

}  // namespace

StretchedFluctuationResult run_stretched_fluctuation(
    const BistableReaction &r, const StretchedFluctuationOptions &opt) {
  const PeriodicProfile prof = solve_periodic_profile(r, opt.K, opt.nz);
  const double sk = std::sqrt(opt.K);
  const WaveProfile sw = solve_standing_wave(r, std::min(25.0, sk / 2), 8193);
  const double dz = sk / opt.nz;
  const std::vector<double> e = e_on_grid(sw, opt.K, opt.nz);
  const ScalarFn one = [](double) { return 1.0; };
  const double cstar = c_star(sw, one, one);

  std::vector<double> times(opt.samples + 1);
  for (int j = 0; j <= opt.samples; ++j)
    times[j] = opt.T * j / static_cast<double>(opt.samples);

  struct PathOut {
    std::vector<double> x;
    double corr = 0;
  };
  auto outs = run_ensemble<PathOut>(opt.exec, opt.paths, [&](std::size_t p) {
    StretchedSpdeOptions sopt;
    sopt.K = opt.K;
    sopt.nz = opt.nz;
    sopt.nu = 1;
    sopt.T = opt.T;
    sopt.dt = opt.dt;
    sopt.seed = derive_seed(opt.seed, 1, p);
    sopt.sample_times = times;
    Field2 psi0;
    psi0.nz = opt.nz;
    psi0.nu = 1;
    psi0.a = e;  // start on the limit shape
    const FieldSeries series = integrate_stretched_spde(prof, [](double) { return 1.0; },
                                                        [](double) { return 1.0; },
                                                        psi0, sopt);
    PathOut out;
    out.x.resize(series.snapshots.size());
    for (std::size_t s = 0; s < series.snapshots.size(); ++s)
      out.x[s] = pair_with(series.snapshots[s].a, e, dz);
    out.corr = pearson_correlation(series.snapshots.back().a, e);
    return out;
  });

  StretchedFluctuationResult res;
  res.times = times;
  res.expected_slope = cstar * cstar;
  res.var.resize(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    std::vector<double> xs(outs.size());
    for (std::size_t p = 0; p < outs.size(); ++p) xs[p] = outs[p].x[j];
    res.var[j] = variance(xs);
  }
  {
    std::vector<std::vector<double>> px(outs.size());
    for (std::size_t p = 0; p < outs.size(); ++p) px[p] = outs[p].x;
    res.slope_increments = increment_slope(px, times);
  }
  const LinearFit fit = linear_fit(times, res.var);
  res.slope_fit = fit.slope;
  res.fit_r_squared = fit.r_squared;
  double cs = 0, cmin = 1;
  for (const auto &o : outs) {
    cs += o.corr;
    cmin = std::min(cmin, o.corr);
  }
  res.shape_corr_mean = cs / static_cast<double>(outs.size());
  res.shape_corr_min = cmin;
  return res;
}

ChannelCompareResult run_channel_compare(const BistableReaction &r,
                                         const ChannelCompareOptions &opt) {
  const PeriodicProfile prof = solve_periodic_profile(r, opt.K, opt.nz);
  const double sk = std::sqrt(opt.K);
  const WaveProfile sw = solve_standing_wave(r, std::min(25.0, sk / 2), 8193);
  const double dz = sk / opt.nz;
  const double du = 1.0 / opt.nu;
  const std::vector<double> e = e_on_grid(sw, opt.K, opt.nz);

  const int m = 10;
  std::vector<double> times(m + 1);
  for (int j = 0; j <= m; ++j) times[j] = opt.T * j / m;

  struct PairOut {
    double slope_on = 0, slope_off = 0;
  };
  auto pair_for = [&](std::uint64_t seed, bool on) {
    StretchedSpdeOptions sopt;
    sopt.K = opt.K;
    sopt.nz = opt.nz;
    sopt.nu = opt.nu;
    sopt.T = opt.T;
    sopt.dt = opt.dt;
    sopt.seed = seed;
    sopt.grad_ux_channel_on = on;
    sopt.sample_times = times;
    Field2 psi0;
    psi0.nz = opt.nz;
    psi0.nu = opt.nu;
    psi0.a.assign(static_cast<std::size_t>(opt.nz) * opt.nu, 0.0);
    const FieldSeries series = integrate_stretched_spde(
        prof, [](double) { return 1.0; }, [](double) { return 1.0; }, psi0, sopt);
    std::vector<double> x(series.snapshots.size(), 0.0);
    for (std::size_t s = 0; s < series.snapshots.size(); ++s) {
      double acc = 0;
      for (int iz = 0; iz < opt.nz; ++iz) {
        double rowsum = 0;
        for (int iu = 0; iu < opt.nu; ++iu)
          rowsum += series.snapshots[s].at(iz, iu);
        acc += e[iz] * rowsum;
      }
      x[s] = acc * dz * du;
    }
    double slope = 0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
      const double inc = x[j + 1] - x[j];
      slope += inc * inc / (times[j + 1] - times[j]);
    }
    return slope / static_cast<double>(x.size() - 1);
  };

  auto outs = run_ensemble<PairOut>(opt.exec, opt.paths, [&](std::size_t p) {
    const std::uint64_t seed = derive_seed(opt.seed, 2, p);
    PairOut o;
    o.slope_on = pair_for(seed, true);
    o.slope_off = pair_for(seed, false);
    return o;
  });

  ChannelCompareResult res;
  std::vector<double> diffs(outs.size());
  double on = 0, off = 0;
  for (std::size_t p = 0; p < outs.size(); ++p) {
    on += outs[p].slope_on;
    off += outs[p].slope_off;
    diffs[p] = outs[p].slope_on - outs[p].slope_off;
  }
  res.slope_on = on / static_cast<double>(outs.size());
  res.slope_off = off / static_cast<double>(outs.size());
  res.diff = mean(diffs);
  res.diff_se = std::sqrt(variance(diffs) / static_cast<double>(diffs.size()));
  return res;
}

LimitModeResult run_limit_interface_modes(const LimitModeOptions &opt) {
  struct ChainOut {
    std::vector<double> sums;  // sum over samples of |psi_hat_k|^2
    long count = 0;
  };
  const int nu = opt.nu;
  auto outs = run_ensemble<ChainOut>(opt.exec, opt.chains, [&](std::size_t c) {
    LimitInterfaceOptions lopt;
    lopt.c_star = opt.c_star;
    lopt.c3 = 0.0;
    lopt.d = 2;
    lopt.nu = nu;
    lopt.dt = opt.dt;
    lopt.seed = derive_seed(opt.seed, 3, c);
    lopt.T = opt.burn + opt.spacing * opt.samples_per_chain;
    lopt.sample_times.resize(opt.samples_per_chain);
    for (int j = 0; j < opt.samples_per_chain; ++j)
      lopt.sample_times[j] = opt.burn + (j + 1) * opt.spacing;
    const FieldSeries series =
        integrate_limit_interface(std::vector<double>(nu, 0.0), lopt);
    ChainOut out;
    out.sums.assign(opt.kmax, 0.0);
    const double tau = 6.283185307179586476925286766559;
    for (const auto &snap : series.snapshots) {
      if (snap.a.empty()) continue;
      for (int k = 1; k <= opt.kmax; ++k) {
        double re = 0, im = 0;
        for (int j = 0; j < nu; ++j) {
          const double ang = tau * k * j / nu;
          re += snap.a[j] * std::cos(ang);
          im -= snap.a[j] * std::sin(ang);
        }
        re /= nu;
        im /= nu;
        out.sums[k - 1] += re * re + im * im;
      }
      ++out.count;
    }
    return out;
  });

  LimitModeResult res;
  res.mode_var.assign(opt.kmax, 0.0);
  res.mode_oracle.assign(opt.kmax, 0.0);
  long total = 0;
  for (const auto &o : outs) total += o.count;
  for (int k = 1; k <= opt.kmax; ++k) {
    double s = 0;
    for (const auto &o : outs) s += o.sums[k - 1];
    res.mode_var[k - 1] = s / static_cast<double>(total);
    const double w = 2.0 * 3.14159265358979323846 * k;
    res.mode_oracle[k - 1] = opt.c_star * opt.c_star / (2.0 * w * w);
  }
  res.samples = total;
  double worst = 0;
  for (int k = 0; k < opt.kmax; ++k)
    worst = std::max(worst, std::abs(res.mode_var[k] / res.mode_oracle[k] - 1.0));
  res.worst_rel_err = worst;
  return res;
}

OffsiteResult run_offsite_stationary(const OffsiteStationaryOptions &opt) {
  struct PathOut {
    double sum_sq = 0, sum_64 = 0, sum_128 = 0;
    int count = 0;
  };
  auto outs = run_ensemble<PathOut>(opt.exec, opt.paths, [&](std::size_t p) {
    OffsiteOptions oopt;
    oopt.K = opt.K;
    oopt.c = opt.c;
    oopt.amp_grad = opt.amp_grad;
    oopt.amp_flip = opt.amp_flip;
    oopt.nx = opt.nx;
    oopt.T = opt.T;
    oopt.seed = derive_seed(opt.seed, 4, p);
    const std::vector<double> psi = integrate_offsite(oopt);
    PathOut out;
    const int stride = opt.nx / opt.points_per_path;
    for (int j = 0; j < opt.points_per_path; ++j) {
      const int i = j * stride;
      out.sum_sq += psi[i] * psi[i];
      out.sum_64 += psi[i] * psi[(i + 64) % opt.nx];
      out.sum_128 += psi[i] * psi[(i + 128) % opt.nx];
      ++out.count;
    }
    return out;
  });
  OffsiteResult res;
  double ss = 0, s64 = 0, s128 = 0;
  long count = 0;
  for (const auto &o : outs) {
    ss += o.sum_sq;
    s64 += o.sum_64;
    s128 += o.sum_128;
    count += o.count;
  }
  res.var = ss / static_cast<double>(count);
  res.corr_64 = (s64 / static_cast<double>(count)) / res.var;
  res.corr_128 = (s128 / static_cast<double>(count)) / res.var;
  res.sigma2 = sigma_sq(opt.c, opt.amp_flip);
  res.samples = count;
  return res;
}

ParticleQvResult run_particle_diagnostics(const FlipRateFamily &rates,
                                          const ParticleQvOptions &opt) {
  ParticleQvResult res;
  const int N = opt.N;
  std::vector<double> phi(N);
  const double tau = 6.283185307179586476925286766559;
  for (int p = 0; p < N; ++p) phi[p] = std::sin(tau * p / N);
  double phi_l2 = 0, gradphi_l2 = 0;
  for (int p = 0; p < N; ++p) {
    phi_l2 += phi[p] * phi[p];
    const double g = N * (phi[(p + 1) % N] - phi[p]);
    gradphi_l2 += g * g;
  }
  phi_l2 /= N;
  gradphi_l2 /= N;
  const double chi = opt.u * (1 - opt.u);

  // pure Kawasaki leg at nu_u
  {
    GkOptions gopt;
    gopt.N = N;
    gopt.d = 1;
    gopt.K = 0.0;
    gopt.T = opt.T_kawasaki;
    gopt.seed = derive_seed(opt.seed, 5);
    gopt.glauber_on = false;
    gopt.probe = phi;
    gopt.snapshot_times = {opt.T_kawasaki};
    LatticeState init = bernoulli_state(N, opt.u, gopt.seed);
    long mass0 = 0;
    for (auto e : init) mass0 += e;
    const LatticeTrajectory traj = simulate_gk(rates, init, gopt);
    const LatticeState fin = unpack_state(traj.snapshots.back().packed, N);
    long mass1 = 0;
    for (auto e : fin) mass1 += e;
    res.mass_conserved = (mass0 == mass1);
    res.qv_k_rate = traj.dynkin.qv_kawasaki.back() / opt.T_kawasaki;
    res.qv_k_expected = 2 * chi * gradphi_l2;
  }

  // pure Glauber leg: short windows from fresh nu_u draws
  {
    struct Rep {
      double qv = 0;
    };
    auto reps = run_ensemble<Rep>(opt.exec, opt.glauber_replicas,
                                  [&](std::size_t rix) {
      GkOptions gopt;
      gopt.N = N;
      gopt.d = 1;
      gopt.K = opt.K_glauber;
      gopt.T = opt.T_glauber_window;
      gopt.seed = derive_seed(opt.seed, 6, rix);
      gopt.kawasaki_on = false;
      gopt.probe = phi;
      gopt.snapshot_times = {opt.T_glauber_window};
      LatticeState init = bernoulli_state(N, opt.u, gopt.seed + 1);
      const LatticeTrajectory traj = simulate_gk(rates, init, gopt);
      return Rep{traj.dynkin.qv_glauber.back()};
    });
    double s = 0;
    for (const auto &rep : reps) s += rep.qv;
    res.qv_g_rate = s / (static_cast<double>(reps.size()) * opt.T_glauber_window);
    res.qv_g_expected = opt.K_glauber * ensemble_c0(rates, opt.u) * phi_l2;
  }

  // drift identities per sampled state on a short full run
  {
    GkOptions gopt;
    gopt.N = 128;
    gopt.d = 1;
    gopt.K = 2.0;
    gopt.T = 0.01;
    gopt.seed = derive_seed(opt.seed, 7);
    std::vector<double> phi_small(128);
    for (int p = 0; p < 128; ++p) phi_small[p] = std::sin(tau * p / 128);
    gopt.probe = phi_small;
    for (int j = 1; j <= 16; ++j) gopt.snapshot_times.push_back(gopt.T * j / 16);
    LatticeState init = bernoulli_state(128, opt.u, gopt.seed);
    const LatticeTrajectory traj = simulate_gk(rates, init, gopt);
    double worst = 0, worst_inc = 0;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
      const LatticeState eta = unpack_state(traj.snapshots[s].packed, 128);
      const double direct = drift_kawasaki_direct(eta, 128, 1, phi_small);
      const double lap = drift_kawasaki_laplacian_form(eta, 128, 1, phi_small);
      worst = std::max(worst, std::abs(direct - lap));
      worst_inc = std::max(worst_inc, std::abs(traj.dynkin.inst_bk[s] - lap));
      const double bg = drift_glauber_direct(rates, eta, 128, 1, 2.0, phi_small);
      worst_inc = std::max(worst_inc, std::abs(traj.dynkin.inst_bg[s] - bg));
    }
    res.drift_identity_err = worst;
    res.drift_incremental_err = worst_inc;
  }
  return res;
}

TrackResult run_interface_track(const TrackOptions &opt) {
  const FlipRateFamily rates = flip_bistable();
  const BistableReaction reaction = reaction_from_rates(rates);
  const WaveProfile sw = solve_standing_wave(reaction, 0.0, 4097);
  const ScalarFn g2 = g2_from_rates(rates);
  const double cstar = c_star(sw, g1_particle, g2);
  const int N = opt.N;
  const int K = (opt.K > 0) ? opt.K : static_cast<int>(std::lround(
                                          std::pow(N, 2.0 / 7.0)));
  const int block = [](int n) {
    int b = static_cast<int>(std::lround(std::sqrt(n)));
    while (n % b != 0) --b;
    return b;
  }(N);

  const double rho_minus = reaction.rho_minus();
  const double rho_plus = reaction.rho_plus();
  const double rho_star = reaction.rho_star();
  const int m = static_cast<int>(std::lround(opt.T / opt.spacing));
  std::vector<double> times(m + 1);
  for (int j = 0; j <= m; ++j) times[j] = j * opt.spacing;

  struct PathOut {
    std::vector<double> disp;
    bool ok = true;
  };
  auto outs = run_ensemble<PathOut>(opt.exec, opt.paths, [&](std::size_t p) {
    GkOptions gopt;
    gopt.N = N;
    gopt.d = 1;
    gopt.K = K;
    gopt.T = opt.T;
    gopt.seed = derive_seed(opt.seed, 8, p);
    gopt.snapshot_times = times;
    std::vector<double> density(N);
    for (int i = 0; i < N; ++i) {
      const double x = static_cast<double>(i) / N;
      density[i] = (x >= 0.25 && x < 0.75) ? rho_plus : rho_minus;
    }
    LatticeState init = profile_state(N, 1, density, gopt.seed);
    const LatticeTrajectory traj = simulate_gk(rates, init, gopt);
    std::vector<std::vector<double>> fields;
    fields.reserve(traj.snapshots.size());
    for (const auto &snap : traj.snapshots)
      fields.push_back(
          empirical_density(unpack_state(snap.packed, N), N, 1, block));
    const InterfaceTrack track =
        track_interface(fields, times, rho_star, 0.10, 0.40);
    PathOut out;
    out.disp = rescaled_displacement(track, N, K, 1);
    for (char v : track.valid)
      if (!v) out.ok = false;
    return out;
  });

  TrackResult res;
  res.expected_slope = cstar * cstar / sw.deriv_l2_sq;
  std::vector<std::vector<double>> disp;
  for (auto &o : outs)
    if (o.ok) disp.push_back(o.disp);
  res.paths = static_cast<int>(disp.size());
  // affine fit of Var[x(t_j) - x(0)]: the intercept absorbs the static
  // occupation-noise of the crossing estimate, the slope is the Brownian rate
  std::vector<double> var_t(times.size(), 0.0);
  for (std::size_t j = 0; j < times.size(); ++j) {
    std::vector<double> xs(disp.size());
    for (std::size_t p = 0; p < disp.size(); ++p) xs[p] = disp[p][j];
    var_t[j] = variance(xs);
  }
  const LinearFit fit = linear_fit(times, var_t);
  res.var_slope = fit.slope;
  std::vector<double> incs;
  for (const auto &dp : disp)
    for (std::size_t j = 1; j < dp.size(); ++j) incs.push_back(dp[j] - dp[j - 1]);
  const GaussianityResult g = gaussianity(incs, 0.01, 300, opt.seed);
  res.normality_stat = g.statistic;
  res.normality_critical = g.critical_value;
  res.normal = g.pass;
  return res;
}

// ---------------------------------------------------------------------------
// config runner
// ---------------------------------------------------------------------------

namespace {

std::vector<double> parse_list(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

}  // namespace

void apply_override(ExperimentConfig &cfg, const std::string &key,
                    const std::string &value) {
  if (key == "experiment") cfg.experiment = value;
  else if (key == "reaction") cfg.reaction = value;
  else if (key == "K") cfg.K = std::stod(value);
  else if (key == "K_sweep") cfg.K_sweep = parse_list(value);
  else if (key == "N") cfg.N = std::stod(value);
  else if (key == "d") cfg.d = std::stoi(value);
  else if (key == "T") cfg.T = std::stod(value);
  else if (key == "dt") cfg.dt = std::stod(value);
  else if (key == "paths") cfg.paths = std::stoi(value);
  else if (key == "noise") cfg.noise = value;
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "threads") cfg.threads = std::stoi(value);
  else cfg.extra[key] = value;
}

ExperimentConfig parse_config_file(const std::string &path) {
  ExperimentConfig cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_override(cfg, key, value);
  }
  return cfg;
}

namespace {

std::string canonical_config(const ExperimentConfig &cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "experiment=" << cfg.experiment << "\nreaction=" << cfg.reaction
     << "\nN=" << cfg.N << "\nK=" << cfg.K << "\nK_sweep=";
  for (double k : cfg.K_sweep) os << k << ",";
  os << "\nd=" << cfg.d << "\nT=" << cfg.T << "\ndt=" << cfg.dt
     << "\npaths=" << cfg.paths << "\nnoise=" << cfg.noise
     << "\nseed=" << cfg.seed << "\n";
  for (const auto &[k, v] : cfg.extra) os << k << "=" << v << "\n";
  return os.str();
}

struct ArtifactSink {
  std::string dir;
  json manifest_files = json::array();
  void write(const std::string &name, const std::string &content) {
    const std::string path = dir + "/" + name;
    write_file(path, content);
    manifest_files.push_back(
        {{"file", name}, {"fnv1a64", hex64(fnv1a64(content))}});
  }
};

int pow2_at_least(double x) {
  int n = 64;
  while (n < x && n < (1 << 24)) n *= 2;
  return n;
}

// grid size that keeps |lambda_1| of the discrete operator well under 1e-6
int spectral_grid_for(double K) {
  return std::max(1024, pow2_at_least(std::sqrt(K / 6.0e-6)));
}

}  // namespace

int run_experiment(const ExperimentConfig &cfg) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  ArtifactSink sink{cfg.out_dir};
  json verdict;
  verdict["experiment"] = cfg.experiment;
  bool pass = true;

  const BistableReaction r = reaction_by_id(cfg.reaction);

  if (cfg.experiment == "constants") {
    const WaveProfile sw = solve_standing_wave(r, 0.0, 8193);
    const ScalarFn one = [](double) { return 1.0; };
    const ConstantReport rep = constant_report(sw, one, one);
    sink.write("constants.json", constant_report_json(rep));
    pass = std::abs(rep.c2) <= 1e-8 &&
           std::abs(rep.c3 - rep.c3_by_parts) <= 1e-8 && rep.c_star > 0;
    verdict["c2"] = rep.c2;
    verdict["c3"] = rep.c3;
    verdict["c_star"] = rep.c_star;
  } else if (cfg.experiment == "profile-sweep") {
    std::vector<double> Ks = cfg.K_sweep;
    if (Ks.empty()) Ks = {100, 400, 1600, 6400};
    const double zmax = std::sqrt(Ks.back()) * 0.30;
    const WaveProfile sw = solve_standing_wave(r, std::max(12.0, zmax), 16385);
    CsvWriter csv({"K", "h2", "e_star", "sup_v_err_scaled",
                   "sup_dv_err_scaled", "junction_residual"});
    std::vector<double> sup_scaled, dsup_scaled;
    for (double K : Ks) {
      const PeriodicProfile prof = solve_periodic_profile(r, K, 8192);
      const auto vh = hat_profile(sw, K, prof.h2, prof.x);
      const auto dvh = hat_profile_deriv(sw, K, prof.h2, prof.x);
      double sup = 0, dsup = 0;
      for (int i = 0; i < prof.n; ++i) {
        sup = std::max(sup, std::abs(prof.value[i] - vh[i]));
        dsup = std::max(dsup, std::abs(prof.deriv[i] - dvh[i]));
      }
      const double sup_s = sup * std::pow(K, 0.25);
      const double dsup_s = dsup * std::pow(K, -0.25);
      sup_scaled.push_back(sup_s);
      dsup_scaled.push_back(dsup_s);
      // both excursion quadratures share e_star, so the derivative magnitudes
      // at the junction agree; measure against the energy identity directly
      double junction = 0;
      const double speed_sq =
          2 * K * (r.potential(prof.value[0]) + prof.e_star);
      junction = std::abs(std::sqrt(std::max(0.0, speed_sq)) -
                          std::abs(prof.deriv[0]));
      csv.add_row({K, prof.h2, prof.e_star, sup_s, dsup_s, junction});
      pass = pass && junction <= 1e-7;
      sink.write("profile_K" + std::to_string(static_cast<int>(K)) + ".csv",
                 profile_csv(prof));
      sink.write("profile_K" + std::to_string(static_cast<int>(K)) + ".json",
                 profile_sidecar_json(prof));
    }
    for (std::size_t i = 1; i < sup_scaled.size(); ++i)
      pass = pass && sup_scaled[i] <= sup_scaled[i - 1] * (1 + 1e-9);
    for (std::size_t i = 0; i < dsup_scaled.size(); ++i)
      pass = pass && dsup_scaled[i] <= dsup_scaled[0] * 1.1;
    sink.write("profile_bounds.csv", csv.str());
    verdict["sup_scaled"] = sup_scaled;
    verdict["dsup_scaled"] = dsup_scaled;
  } else if (cfg.experiment == "spectrum-sweep") {
    std::vector<double> Ks = cfg.K_sweep;
    if (Ks.empty()) Ks = {100, 225, 400, 625, 900};
    CsvWriter csv({"K", "n", "lambda1", "lambda2", "lambda3", "alignment"});
    std::vector<double> sqrtK, loglam2, lam3s;
    for (double K : Ks) {
      const int n = spectral_grid_for(K);
      const PeriodicProfile prof = solve_periodic_profile(r, K, n);
      const SpectralDecomposition sd = eigenpairs(prof, 4);
      double vx_norm = 0, align = 0;
      for (int i = 0; i < n; ++i) vx_norm += prof.deriv[i] * prof.deriv[i];
      vx_norm = std::sqrt(vx_norm * prof.dx);
      for (int i = 0; i < n; ++i)
        align += sd.eigenvectors[0][i] * prof.deriv[i] / vx_norm;
      align = std::abs(align * prof.dx);
      csv.add_row({K, static_cast<double>(n), sd.eigenvalues[0],
                   sd.eigenvalues[1], sd.eigenvalues[2], align});
      pass = pass && std::abs(sd.eigenvalues[0]) <= 1e-6 && align >= 0.999;
      sqrtK.push_back(std::sqrt(K));
      loglam2.push_back(std::log(std::max(sd.eigenvalues[1], 1e-300)));
      lam3s.push_back(sd.eigenvalues[2]);
    }
    const LinearFit fit = linear_fit(sqrtK, loglam2);
    pass = pass && fit.slope < 0 && fit.r_squared >= 0.99;
    const double lam3_min = *std::min_element(lam3s.begin(), lam3s.end());
    const double lam3_max = *std::max_element(lam3s.begin(), lam3s.end());
    pass = pass && (lam3_max - lam3_min) / lam3_max < 0.20;
    sink.write("spectrum.csv", csv.str());
    verdict["log_lambda2_slope"] = fit.slope;
    verdict["log_lambda2_r2"] = fit.r_squared;
    verdict["lambda3_variation"] = (lam3_max - lam3_min) / lam3_max;
  } else if (cfg.experiment == "spde-linear") {
    StretchedFluctuationOptions opt;
    opt.K = cfg.K;
    opt.paths = cfg.paths;
    opt.T = cfg.T;
    opt.seed = cfg.seed;
    const StretchedFluctuationResult res = run_stretched_fluctuation(r, opt);
    CsvWriter csv({"t", "var"});
    for (std::size_t j = 0; j < res.times.size(); ++j)
      csv.add_row({res.times[j], res.var[j]});
    sink.write("var_pairing.csv", csv.str());
    pass = std::abs(res.slope_increments / res.expected_slope - 1.0) <= 0.15 &&
           res.shape_corr_mean >= 0.95;
    verdict["slope"] = res.slope_increments;
    verdict["expected_slope"] = res.expected_slope;
    verdict["shape_corr"] = res.shape_corr_mean;
  } else if (cfg.experiment == "spde-limit") {
    const WaveProfile sw = solve_standing_wave(r, 0.0, 8193);
    const ScalarFn one = [](double) { return 1.0; };
    const double cstar = c_star(sw, one, one);
    if (cfg.d == 1) {
      // psi(t) = psi(0) + c_* B_t
      LimitInterfaceOptions lopt;
      lopt.c_star = cstar;
      lopt.d = 1;
      lopt.T = cfg.T;
      lopt.dt = 0.01;
      std::vector<double> finals(cfg.paths);
      for (int p = 0; p < cfg.paths; ++p) {
        lopt.seed = derive_seed(cfg.seed, 9, p);
        finals[p] = integrate_limit_interface({0.0}, lopt).snapshots.back().a[0];
      }
      const double v = variance(finals);
      pass = std::abs(v / (cstar * cstar * cfg.T) - 1.0) <= 0.05;
      verdict["var"] = v;
      verdict["expected"] = cstar * cstar * cfg.T;
    } else {
      LimitModeOptions mopt;
      mopt.c_star = cstar;
      mopt.seed = cfg.seed;
      const LimitModeResult res = run_limit_interface_modes(mopt);
      CsvWriter csv({"k", "variance", "oracle"});
      for (std::size_t k = 0; k < res.mode_var.size(); ++k)
        csv.add_row({static_cast<double>(k + 1), res.mode_var[k],
                     res.mode_oracle[k]});
      sink.write("mode_variance.csv", csv.str());
      pass = res.worst_rel_err <= 0.10;
      verdict["worst_rel_err"] = res.worst_rel_err;
    }
  } else if (cfg.experiment == "offsite") {
    OffsiteStationaryOptions oopt;
    oopt.K = cfg.K;
    oopt.seed = cfg.seed;
    oopt.paths = cfg.paths;
    const OffsiteResult res = run_offsite_stationary(oopt);
    pass = std::abs(res.var / res.sigma2 - 1.0) <= 0.10 &&
           std::abs(res.corr_64) <= 0.05 && std::abs(res.corr_128) <= 0.05;
    verdict["var"] = res.var;
    verdict["sigma2"] = res.sigma2;
    verdict["corr_64"] = res.corr_64;
    verdict["corr_128"] = res.corr_128;
  } else if (cfg.experiment == "gk-run") {
    const FlipRateFamily rates =
        (cfg.extra.count("rates") && cfg.extra.at("rates") == "const")
            ? flip_constant(cfg.d)
            : flip_bistable();
    GkOptions gopt;
    gopt.N = static_cast<int>(cfg.N);
    gopt.d = cfg.d;
    gopt.K = cfg.K;
    gopt.T = cfg.T;
    gopt.seed = cfg.seed;
    const int m = std::max(1, static_cast<int>(cfg.T / std::max(cfg.dt, 1e-6)));
    for (int j = 0; j <= m; ++j) gopt.snapshot_times.push_back(cfg.T * j / m);
    LatticeState init = bernoulli_state(gopt.N, 0.5, cfg.seed);
    const LatticeTrajectory traj = simulate_gk(rates, init, gopt);
    sink.write("trajectory.gkrun", trajectory_to_binary(traj));
    // density CSV export
    const int block = std::max(1, gopt.N / 64);
    CsvWriter csv([&] {
      std::vector<std::string> hdr{"t"};
      for (int b = 0; b < gopt.N / block; ++b)
        hdr.push_back("rho" + std::to_string(b));
      return hdr;
    }());
    for (const auto &snap : traj.snapshots) {
      std::vector<double> row{snap.t};
      const auto rho = empirical_density(unpack_state(snap.packed, gopt.N),
                                         gopt.N, 1, block);
      row.insert(row.end(), rho.begin(), rho.end());
      csv.add_row(row);
    }
    sink.write("density.csv", csv.str());
    verdict["exchange_events"] = traj.exchange_events;
    verdict["flip_events"] = traj.flip_events;
  } else if (cfg.experiment == "interface-track") {
    TrackOptions topt;
    topt.N = static_cast<int>(cfg.N);
    topt.paths = cfg.paths;
    topt.T = cfg.T;
    topt.seed = cfg.seed;
    if (cfg.extra.count("K_int")) topt.K = std::stoi(cfg.extra.at("K_int"));
    const TrackResult res = run_interface_track(topt);
    pass = res.normal &&
           std::abs(res.var_slope / res.expected_slope - 1.0) <= 0.25;
    verdict["var_slope"] = res.var_slope;
    verdict["expected_slope"] = res.expected_slope;
    verdict["normal"] = res.normal;
    verdict["paths_used"] = res.paths;
  } else if (cfg.experiment == "report") {
    int total = 0, passed = 0;
    for (const auto &entry : fs::directory_iterator(cfg.out_dir)) {
      if (entry.path().extension() != ".json") continue;
      if (entry.path().filename().string().find("verdict") == std::string::npos)
        continue;
      const json v = json::parse(read_file(entry.path().string()));
      ++total;
      const bool p = v.value("pass", false);
      passed += p ? 1 : 0;
      std::cout << (p ? "PASS " : "FAIL ") << v.value("experiment", "?")
                << "  (" << entry.path().filename().string() << ")\n";
    }
    std::cout << passed << "/" << total << " experiments passed\n";
    return (passed == total) ? 0 : 1;
  } else {
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
  }

  verdict["pass"] = pass;
  sink.write(cfg.experiment + ".verdict.json", verdict.dump(2) + "\n");

  const auto t1 = std::chrono::steady_clock::now();
  json manifest;
  manifest["config"] = canonical_config(cfg);
  manifest["config_hash"] = hex64(fnv1a64(canonical_config(cfg)));
  manifest["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  manifest["artifacts"] = sink.manifest_files;
  write_file(cfg.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  return pass ? 0 : 1;
}

}  // namespace fl
