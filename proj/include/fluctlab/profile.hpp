#ifndef FLUCTLAB_PROFILE_HPP
#define FLUCTLAB_PROFILE_HPP

#include <string>
#include <vector>

#include "fluctlab/reaction.hpp"

namespace fl {

// Standing or traveling wave U0 on a uniform z-grid. Values and derivatives
// are stored together; `deriv` comes from the first integral (standing case)
// or the phase-plane integration (traveling case), never from differencing.
struct WaveProfile {
  std::vector<double> z;
  std::vector<double> value;
  std::vector<double> deriv;
  double dz = 0;
  double z_max = 0;
  double speed = 0;            // c; 0 for the balanced standing wave
  double deriv_l2_sq = 0;      // ||U0'||^2 over the whole line
  BistableReaction reaction;

  // off-grid evaluation (Hermite local; constant rho_+- beyond the grid)
  double eval(double zq) const;
  double eval_deriv(double zq) const;
};

// Two-layer stationary profile of d^2v/dx^2 + K f(v) = 0 on the unit torus,
// normalized v(0) = rho_star, v_x(0) < 0.
struct PeriodicProfile {
  double K = 0;
  int n = 0;
  double dx = 0;
  std::vector<double> x;
  std::vector<double> value;
  std::vector<double> deriv;
  double h2 = 0, m1 = 0, m2 = 0;
  double e_star = 0;           // shared energy constant, <= 0
  BistableReaction reaction;

  double eval(double xq) const;  // periodic Hermite interpolation
};

// Standing wave via inversion of z(v) = int dv / sqrt(2 V(v)); requires a
// balanced reaction. z_max <= 0 picks the default 10 / min(decay rate).
WaveProfile solve_standing_wave(const BistableReaction &r, double z_max, int n);

struct TravelingWaveOptions {
  double z_max = 15.0;
  int n = 4096;
  double c_lo = -4.0, c_hi = 4.0;  // scanned bracket for the speed
  double tol_c = 1e-12;
};

// Phase-plane shooting from the saddle at rho_minus; bisects on the speed c
// until the orbit lands on the saddle at rho_plus.
WaveProfile solve_traveling_wave(const BistableReaction &r,
                                 TravelingWaveOptions opt = {});

// Energy-parametrized two-excursion construction: bisect on the shared energy
// constant e < 0 until the two excursions close up with period one.
PeriodicProfile solve_periodic_profile(const BistableReaction &r, double K,
                                       int n);

// Pieced standing-wave approximation of the periodic profile (continuous but
// kinked at the layer midpoints m1, m2).
std::vector<double> hat_profile(const WaveProfile &sw, double K, double h2,
                                const std::vector<double> &x);
std::vector<double> hat_profile_deriv(const WaveProfile &sw, double K,
                                      double h2, const std::vector<double> &x);

// residual of the profile ODE measured with a fourth-order stencil
double ode_residual_sup(const WaveProfile &w);
double ode_residual_sup(const PeriodicProfile &p);

// CSV (x/z, value, derivative) plus a JSON sidecar with the scalar metadata
std::string profile_csv(const WaveProfile &w);
std::string profile_csv(const PeriodicProfile &p);
std::string profile_sidecar_json(const PeriodicProfile &p);

}  // namespace fl

#endif
