#include <chrono>
#include <cstdio>
#include <string>

#include "fluctlab/experiments.hpp"
#include "fluctlab/io.hpp"
#include "fluctlab/parallel.hpp"
#include "fluctlab/reaction.hpp"

// Times the OpenMP kernels against the serial reference on the three ensemble
// workloads. Both paths must produce identical results; the checksum column
// makes a silent divergence visible immediately.
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <class F>
void row(const char *name, const F &run) {
  auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t h_serial = run(fl::Exec::serial);
  const double s_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const std::uint64_t h_omp = run(fl::Exec::openmp);
  const double s_omp = seconds_since(t0);
  std::printf("%-28s %9.3fs %9.3fs  x%4.2f  %s\n", name, s_serial, s_omp,
              s_serial / s_omp,
              h_serial == h_omp ? "identical" : "MISMATCH");
}

std::uint64_t hash_doubles(const std::vector<double> &xs) {
  return fl::fnv1a64(xs.data(), xs.size() * sizeof(double));
}

}  // namespace

int main() {
  std::printf("%-28s %10s %10s %6s  %s\n", "workload", "serial", "openmp",
              "speed", "results");
  std::printf("threads available: %d\n", fl::max_threads());

  const fl::BistableReaction cubic = fl::make_cubic();

  row("stretched ensemble", [&](fl::Exec exec) {
    fl::StretchedFluctuationOptions opt;
    opt.K = 400;
    opt.nz = 1024;
    opt.paths = 24;
    opt.T = 0.25;
    opt.dt = 1e-3;
    opt.exec = exec;
    const auto res = fl::run_stretched_fluctuation(cubic, opt);
    return hash_doubles(res.var);
  });

  row("offsite ensemble", [&](fl::Exec exec) {
    fl::OffsiteStationaryOptions opt;
    opt.K = 1600;
    opt.nx = 512;
    opt.paths = 64;
    opt.T = 0.05;
    opt.exec = exec;
    const auto res = fl::run_offsite_stationary(opt);
    return fl::fnv1a64(&res.var, sizeof(res.var));
  });

  row("lattice trajectories", [&](fl::Exec exec) {
    fl::ParticleQvOptions opt;
    opt.N = 128;
    opt.T_kawasaki = 0.05;
    opt.glauber_replicas = 128;
    opt.exec = exec;
    const auto res = fl::run_particle_diagnostics(fl::flip_bistable(), opt);
    const double pack[2] = {res.qv_k_rate, res.qv_g_rate};
    return fl::fnv1a64(pack, sizeof(pack));
  });

  return 0;
}
