#ifndef FLUCTLAB_EXPERIMENTS_HPP
#define FLUCTLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fluctlab/parallel.hpp"
#include "fluctlab/particle.hpp"
#include "fluctlab/profile.hpp"

namespace fl {

// ---------------------------------------------------------------------------
// ensemble experiments backing the quantitative claims; every run is a pure
// function of its options (seed included), so reruns are bit-identical
// ---------------------------------------------------------------------------

struct StretchedFluctuationResult {
  std::vector<double> times;
  std::vector<double> var;       // Var <Psi(t), e> across paths
  double slope_increments = 0;   // increment-based slope estimate
  double slope_fit = 0;          // affine fit slope
  double fit_r_squared = 0;
  double expected_slope = 0;     // c_*^2
  double shape_corr_mean = 0;    // corr(Psi(T), e) averaged over paths
  double shape_corr_min = 0;
};

struct StretchedFluctuationOptions {
  double K = 1600;
  int nz = 4096;
  int paths = 200;
  double T = 1.0, dt = 1e-3;
  int samples = 20;
  std::uint64_t seed = 2024;
  Exec exec = Exec::openmp;
};

StretchedFluctuationResult run_stretched_fluctuation(
    const BistableReaction &r, const StretchedFluctuationOptions &opt);

// transverse-channel on/off comparison in d = 2 with coupled seeds
struct ChannelCompareResult {
  double slope_on = 0, slope_off = 0;
  double diff = 0, diff_se = 0;  // paired difference and its standard error
};

struct ChannelCompareOptions {
  double K = 1600;
  int nz = 1024, nu = 8;
  int paths = 32;
  double T = 0.5, dt = 1e-3;
  std::uint64_t seed = 77;
  Exec exec = Exec::openmp;
};

ChannelCompareResult run_channel_compare(const BistableReaction &r,
                                         const ChannelCompareOptions &opt);

struct LimitModeResult {
  std::vector<double> mode_var;     // E|psi_hat_k|^2, k = 1..kmax
  std::vector<double> mode_oracle;  // c_*^2 / (2 (2 pi k)^2)
  double worst_rel_err = 0;
  long samples = 0;
};

struct LimitModeOptions {
  double c_star = 1.0;
  int nu = 256, kmax = 8;
  int chains = 8;
  double burn = 1.0, spacing = 0.05;
  int samples_per_chain = 1000;
  double dt = 2e-4;
  std::uint64_t seed = 31;
  Exec exec = Exec::openmp;
};

LimitModeResult run_limit_interface_modes(const LimitModeOptions &opt);

struct OffsiteResult {
  double var = 0;            // pooled pointwise variance at t = T
  double sigma2 = 0;         // closed form
  double corr_64 = 0;        // correlation at 64- and 128-cell separation
  double corr_128 = 0;
  long samples = 0;
};

struct OffsiteStationaryOptions {
  double K = 6400, c = 2.0;
  double amp_grad = 1.0, amp_flip = 1.0;
  int nx = 2048;
  int paths = 1250, points_per_path = 16;
  double T = 1.0;
  std::uint64_t seed = 99;
  Exec exec = Exec::openmp;
};

OffsiteResult run_offsite_stationary(const OffsiteStationaryOptions &opt);

struct ParticleQvResult {
  double qv_k_rate = 0, qv_k_expected = 0;
  double qv_g_rate = 0, qv_g_expected = 0;
  double drift_identity_err = 0;   // worst |direct - laplacian form|
  double drift_incremental_err = 0;  // engine bookkeeping vs direct recompute
  bool mass_conserved = false;
};

struct ParticleQvOptions {
  int N = 512;
  double u = 0.5;
  double K_glauber = 4.0;
  double T_kawasaki = 0.2;
  double T_glauber_window = 0.003;
  int glauber_replicas = 400;
  std::uint64_t seed = 11;
  Exec exec = Exec::openmp;
};

ParticleQvResult run_particle_diagnostics(const FlipRateFamily &rates,
                                          const ParticleQvOptions &opt);

struct TrackResult {
  double var_slope = 0;        // of the rescaled displacement
  double expected_slope = 0;   // c_*^2 / ||U0'||^2
  double normality_stat = 0, normality_critical = 0;
  bool normal = false;
  int paths = 0;
};

struct TrackOptions {
  int N = 256;
  int K = 0;         // 0 = round(N^{2/7})
  int paths = 96;
  double T = 2.0, spacing = 0.2;
  std::uint64_t seed = 5150;
  Exec exec = Exec::openmp;
};

TrackResult run_interface_track(const TrackOptions &opt);

// ---------------------------------------------------------------------------
// config-file driven runner (CLI)
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string experiment;  // profile-sweep | spectrum-sweep | constants |
                           // spde-linear | spde-limit | offsite | gk-run |
                           // interface-track | report
  std::string reaction = "cubic";
  std::vector<double> K_sweep;
  double N = 1e6, K = 400;
  int d = 1;
  double T = 1.0, dt = 1e-3;
  int paths = 100;
  std::string noise = "white";
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;  // 0 = library default
  std::map<std::string, std::string> extra;
};

// key = value file; '#' comments
ExperimentConfig parse_config_file(const std::string &path);
void apply_override(ExperimentConfig &cfg, const std::string &key,
                    const std::string &value);

// runs the experiment, writes artifacts + manifest; returns process exit code
int run_experiment(const ExperimentConfig &cfg);

}  // namespace fl

#endif
