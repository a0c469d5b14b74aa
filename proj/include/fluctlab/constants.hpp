#ifndef FLUCTLAB_CONSTANTS_HPP
#define FLUCTLAB_CONSTANTS_HPP

#include <functional>
#include <string>

#include "fluctlab/profile.hpp"

namespace fl {

// All standing-wave line integrals are computed in the profile variable v:
// dz = dv / sqrt(2 V(v)) maps them onto (rho_-, rho_+) with no truncated
// tails. The quadrature tolerance below is the only error source.
inline constexpr double kConstQuadTol = 1e-12;

double surface_tension(const WaveProfile &sw);  // ||U0'||^2_{L2(R)}

// c_*^2 = || d_w e g1(U0(-w)) ||^2 + || e g2(U0(-w)) ||^2
double c_star(const WaveProfile &sw, const ScalarFn &g1, const ScalarFn &g2);

// c2 = 1/(2 ||U0'||^3) int f''(U0) (U0')^3 dz; vanishes for every bistable f
double c2(const WaveProfile &sw);

// c3 = 1/(6 ||U0'||^4) int f'''(U0) (U0')^4 dz; negative under the
// convex-concave hypothesis
double c3(const WaveProfile &sw);
// integration-by-parts route: 1/(2 ||U0'||^4) int f''(U0) f(U0) (U0')^2 dz
double c3_by_parts(const WaveProfile &sw);

// off-interface variance: amplitude^2 / sqrt(8 pi) int_0^inf e^{-2cu}/sqrt(u);
// closed form amplitude^2 / (4 sqrt(c)). Both are exposed so they can be
// cross-checked.
double sigma_sq(double c, double amplitude);
double sigma_sq_quadrature(double c, double amplitude);

// particle-side noise amplitude from chi(u) = u(1-u)
double g1_particle(double u);

struct ConstantReport {
  double surface_tension = 0;
  double c_star = 0;
  double c2 = 0;
  double c3 = 0;
  double c3_by_parts = 0;
  double sigma_sq_plus = 0;   // branch at rho_plus: c = -f'(rho_+)
  double sigma_sq_minus = 0;  // branch at rho_minus
  double decay_rate_plus = 0;
  double decay_rate_minus = 0;
  double quad_tol = kConstQuadTol;
  std::string reaction_id;
};

// evaluates every constant for the wave; g1, g2 also set the sigma amplitudes
ConstantReport constant_report(const WaveProfile &sw, const ScalarFn &g1,
                               const ScalarFn &g2);

std::string constant_report_json(const ConstantReport &r);

}  // namespace fl

#endif
