#include "fluctlab/constants.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fluctlab/numerics.hpp"

namespace fl {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wave_speed_of(const WaveProfile &sw) { return sw.speed; }

// integral over (rho_-, rho_+) with square-root substitution panels at both
// endpoints, where sqrt(2V) vanishes linearly
template <class F>
double v_integral(const BistableReaction &r, const F &body) {
  const double rm = r.rho_minus(), rp = r.rho_plus();
  const double width = (rp - rm) / 8;
  double total = integrate<double>(body, rm + width, rp - width, kConstQuadTol);
  total += integrate<double>(
      [&](double s) { return 2 * s * body(rm + s * s); }, 0.0,
      std::sqrt(width), kConstQuadTol);
  total += integrate<double>(
      [&](double s) { return 2 * s * body(rp - s * s); }, 0.0,
      std::sqrt(width), kConstQuadTol);
  return total;
}

double p_of(const BistableReaction &r, double v) {
  const double V = r.potential(v);
  return V > 0 ? std::sqrt(2 * V) : 0.0;
}

}  // namespace

double surface_tension(const WaveProfile &sw) { return sw.deriv_l2_sq; }

double c_star(const WaveProfile &sw, const ScalarFn &g1, const ScalarFn &g2) {
  if (wave_speed_of(sw) != 0.0)
    throw std::invalid_argument("c_star is defined for the balanced standing wave");
  const BistableReaction &r = sw.reaction;
  const double a2 = sw.deriv_l2_sq;
  const double term_grad = v_integral(r, [&](double v) {
    const double p = p_of(r, v);
    if (p == 0) return 0.0;
    const double fg = r.f(v) * g1(v);
    return fg * fg / p;
  });
  const double term_flip =
      v_integral(r, [&](double v) { return p_of(r, v) * g2(v) * g2(v); });
  return std::sqrt((term_grad + term_flip) / a2);
}

double c2(const WaveProfile &sw) {
  const BistableReaction &r = sw.reaction;
  const double a = std::sqrt(sw.deriv_l2_sq);
  const double integral = v_integral(r, [&](double v) {
    const double p = p_of(r, v);
    return r.d2f(v) * p * p;
  });
  return integral / (2 * a * a * a);
}

double c3(const WaveProfile &sw) {
  const BistableReaction &r = sw.reaction;
  const double a2 = sw.deriv_l2_sq;
  const double integral = v_integral(r, [&](double v) {
    const double p = p_of(r, v);
    return r.d3f(v) * p * p * p;
  });
  return integral / (6 * a2 * a2);
}

double c3_by_parts(const WaveProfile &sw) {
  const BistableReaction &r = sw.reaction;
  const double a2 = sw.deriv_l2_sq;
  const double integral = v_integral(
      r, [&](double v) { return r.d2f(v) * r.f(v) * p_of(r, v); });
  return integral / (2 * a2 * a2);
}

double sigma_sq(double c, double amplitude) {
  if (!(c > 0)) throw std::invalid_argument("sigma_sq: decay rate must be > 0");
  return amplitude * amplitude / (4 * std::sqrt(c));
}

double sigma_sq_quadrature(double c, double amplitude) {
  if (!(c > 0)) throw std::invalid_argument("sigma_sq: decay rate must be > 0");
  // u = s^2 removes the 1/sqrt(u) singularity
  const double cutoff = std::sqrt(30.0 / c);
  const double integral = integrate<double>(
      [&](double s) { return 2 * std::exp(-2 * c * s * s); }, 0.0, cutoff,
      1e-14);
  return amplitude * amplitude / std::sqrt(8 * kPi) * integral;
}

double g1_particle(double u) { return std::sqrt(2 * u * (1 - u)); }

ConstantReport constant_report(const WaveProfile &sw, const ScalarFn &g1,
                               const ScalarFn &g2) {
  ConstantReport rep;
  rep.reaction_id = sw.reaction.id();
  rep.surface_tension = surface_tension(sw);
  rep.c_star = c_star(sw, g1, g2);
  rep.c2 = c2(sw);
  rep.c3 = c3(sw);
  rep.c3_by_parts = c3_by_parts(sw);
  rep.decay_rate_plus = -sw.reaction.df(sw.reaction.rho_plus());
  rep.decay_rate_minus = -sw.reaction.df(sw.reaction.rho_minus());
  rep.sigma_sq_plus =
      sigma_sq(rep.decay_rate_plus, g2(sw.reaction.rho_plus()));
  rep.sigma_sq_minus =
      sigma_sq(rep.decay_rate_minus, g2(sw.reaction.rho_minus()));
  return rep;
}

std::string constant_report_json(const ConstantReport &r) {
  std::ostringstream os;
  os.precision(17);
  os << "{\n"
     << "  \"reaction\": \"" << r.reaction_id << "\",\n"
     << "  \"surface_tension\": " << r.surface_tension << ",\n"
     << "  \"c_star\": " << r.c_star << ",\n"
     << "  \"c2\": " << r.c2 << ",\n"
     << "  \"c3\": " << r.c3 << ",\n"
     << "  \"c3_by_parts\": " << r.c3_by_parts << ",\n"
     << "  \"sigma_sq_plus\": " << r.sigma_sq_plus << ",\n"
     << "  \"sigma_sq_minus\": " << r.sigma_sq_minus << ",\n"
     << "  \"decay_rate_plus\": " << r.decay_rate_plus << ",\n"
     << "  \"decay_rate_minus\": " << r.decay_rate_minus << ",\n"
     << "  \"quad_tol\": " << r.quad_tol << "\n"
     << "}\n";
  return os.str();
}

}  // namespace fl
