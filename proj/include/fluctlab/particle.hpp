#ifndef FLUCTLAB_PARTICLE_HPP
#define FLUCTLAB_PARTICLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fluctlab/reaction.hpp"

namespace fl {

// Finite-range translation-invariant flip rates. The rate of flipping site p
// depends on eta restricted to a window of offsets around p (offset 0 first);
// rates are tabulated over all 2^w window configurations at construction, so
// evaluation in the event loop is a gather plus a lookup.
struct FlipRateFamily {
  std::string id;
  int dim = 1;
  std::vector<std::vector<int>> offsets;  // offsets[k] is a d-vector; [0] = origin
  std::vector<double> rate;               // size 2^offsets.size()
  double max_rate = 0;

  int window_size() const { return static_cast<int>(offsets.size()); }
};

// c == 1
FlipRateFamily flip_constant(int dim = 1);
// c_p = 1 + a (eta_{p-1} + eta_{p+1}), d = 1
FlipRateFamily flip_neighbor_linear(double a);
// Bistable preset, d = 1: birth rate b(s) and death rate d(s) = b(2 - s)
// with b = {0.2, 0.05, 1.2} over the number s of occupied neighbours. Its
// ensemble average f(u) = (1-2u)(0.2 - 1.3 u(1-u)) is bistable and balanced
// with roots at (1 -+ sqrt(5/13))/2 and 1/2.
FlipRateFamily flip_bistable();

// ensemble averages over Bernoulli(u) on the window (exact enumeration)
double ensemble_f(const FlipRateFamily &rates, double u);    // E[c_p (1-2 eta_p)]
double ensemble_c0(const FlipRateFamily &rates, double u);   // E[c_p]

// exact polynomial of ensemble_f as a BistableReaction (roots located in
// (0,1); throws if the family is not bistable)
BistableReaction reaction_from_rates(const FlipRateFamily &rates);

// g2(u) = sqrt(<c_0>(u)) for a rate family
ScalarFn g2_from_rates(const FlipRateFamily &rates);

using LatticeState = std::vector<std::uint8_t>;

struct LatticeSnapshot {
  double t = 0;
  std::vector<std::uint64_t> packed;  // bit-packed occupation field
};

// per-event diagnostics: Dynkin drift and carre du champs integrals for one
// test function, at the Phi = N^{d/2}(rho - u) scale of the martingale
struct DynkinSeries {
  std::vector<double> times;
  std::vector<double> pairing;      // <rho^N(t), phi>
  std::vector<double> drift_k_int;  // int_0^t b_K ds with b_K = <rho, Delta^N phi>
  std::vector<double> drift_g_int;  // int_0^t b_G ds
  std::vector<double> qv_kawasaki;  // int_0^t N^d Gamma_K ds
  std::vector<double> qv_glauber;   // int_0^t N^d Gamma_G ds
  std::vector<double> inst_bk;      // b_K at the snapshot (incrementally kept)
  std::vector<double> inst_bg;      // b_G at the snapshot
};

struct LatticeTrajectory {
  int N = 0, d = 1;
  double K = 0;
  std::uint64_t seed = 0;
  std::string rate_id;
  std::vector<LatticeSnapshot> snapshots;
  std::uint64_t exchange_events = 0, flip_events = 0;
  DynkinSeries dynkin;  // filled when a probe function was supplied
};

struct GkOptions {
  int N = 64, d = 1;
  double K = 1.0;
  double T = 1.0;
  std::uint64_t seed = 1;
  std::vector<double> snapshot_times;
  bool kawasaki_on = true, glauber_on = true;
  std::vector<double> probe;        // test function phi on sites; empty = off
  double event_cap = 4e9;           // projected-event guard
};

LatticeState pack_unpack_roundtrip(const LatticeState &eta);  // test helper
std::vector<std::uint64_t> pack_state(const LatticeState &eta);
LatticeState unpack_state(const std::vector<std::uint64_t> &packed, int nsites);

LatticeState bernoulli_state(int nsites, double u, std::uint64_t seed);
// eta_p ~ Bernoulli(profile(p/N)) for a density profile on [0,1)
LatticeState profile_state(int N, int d, const std::vector<double> &density,
                           std::uint64_t seed);

LatticeTrajectory simulate_gk(const FlipRateFamily &rates, LatticeState init,
                              const GkOptions &opt);

// block-averaged step-function density on the torus; block must divide N
std::vector<double> empirical_density(const LatticeState &eta, int N, int d,
                                      int block);

// Phi^N = N^{d/2}(rho^N - u) block field for one snapshot
std::vector<double> fluctuation_field(const LatticeState &eta, int N, int d,
                                      int block, const std::vector<double> &u_block);

// <Phi^N, phi> in the empirical sense
double fluctuation_pairing(const LatticeState &eta, int N, int d,
                           const std::vector<double> &phi_sites,
                           const std::vector<double> &u_sites);

// direct evaluations used by the per-event identity checks
double drift_kawasaki_direct(const LatticeState &eta, int N, int d,
                             const std::vector<double> &phi);
double drift_kawasaki_laplacian_form(const LatticeState &eta, int N, int d,
                                     const std::vector<double> &phi);
double drift_glauber_direct(const FlipRateFamily &rates, const LatticeState &eta,
                            int N, int d, double K,
                            const std::vector<double> &phi);

// trajectory container <-> compact binary run file
std::string trajectory_to_binary(const LatticeTrajectory &traj);
LatticeTrajectory trajectory_from_binary(const std::string &bytes);

}  // namespace fl

#endif
