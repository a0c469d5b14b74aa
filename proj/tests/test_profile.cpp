#include <doctest.h>

#include <cmath>
#include <vector>

#include "fluctlab/profile.hpp"

using namespace fl;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("standing wave matches tanh(z/sqrt 2) for the cubic") {
  const WaveProfile w = solve_standing_wave(make_cubic(), 10.0, 4097);
  double sup = 0;
  for (std::size_t i = 0; i < w.z.size(); ++i) {
    if (std::abs(w.z[i]) > 8.0) continue;
    sup = std::max(sup, std::abs(w.value[i] - std::tanh(w.z[i] / kSqrt2)));
  }
  CHECK(sup <= 1e-6);
  // normalization and monotonicity
  CHECK(w.eval(0.0) == doctest::Approx(0.0).epsilon(1e-10));
  for (std::size_t i = 1; i < w.value.size(); ++i)
    CHECK(w.value[i] > w.value[i - 1]);
}

TEST_CASE("standing wave surface tension oracle 2 sqrt(2)/3") {
  const WaveProfile w = solve_standing_wave(make_cubic(), 10.0, 2049);
  CHECK(w.deriv_l2_sq == doctest::Approx(2.0 * kSqrt2 / 3.0).epsilon(1e-8));
}

TEST_CASE("standing wave ODE residual below 1e-8") {
  const WaveProfile w = solve_standing_wave(make_cubic(), 10.0, 4097);
  CHECK(ode_residual_sup(w) <= 1e-8);
  const WaveProfile q = solve_standing_wave(make_quartic_balanced(0.5), 10.0, 4097);
  CHECK(ode_residual_sup(q) <= 1e-8);
}

TEST_CASE("standing wave tail decay is exponential") {
  const WaveProfile w = solve_standing_wave(make_cubic(), 12.0, 4097);
  // log(rho_+ - U0) affine in z with slope -sqrt(2) on [3, 9]
  std::vector<double> zs, ls;
  for (std::size_t i = 0; i < w.z.size(); ++i) {
    if (w.z[i] < 3.0 || w.z[i] > 9.0) continue;
    zs.push_back(w.z[i]);
    ls.push_back(std::log(1.0 - w.value[i]));
  }
  const double slope = (ls.back() - ls.front()) / (zs.back() - zs.front());
  CHECK(slope == doctest::Approx(-kSqrt2).epsilon(1e-3));
}

TEST_CASE("standing wave requires balance") {
  CHECK_THROWS(solve_standing_wave(make_perturbed_cubic(0.1), 10.0, 513));
}

TEST_CASE("traveling wave: balanced cubic has speed zero") {
  const WaveProfile w = solve_traveling_wave(make_cubic());
  CHECK(std::abs(w.speed) <= 1e-8);
  CHECK(ode_residual_sup(w) <= 1e-8);
  for (std::size_t i = 1; i < w.value.size(); ++i)
    CHECK(w.value[i] >= w.value[i - 1]);
}

TEST_CASE("traveling wave speed for unbalanced f") {
  // c = -int f / ||U0'||^2 exactly (multiply the wave equation by U0')
  for (double delta : {0.05, 0.1}) {
    const BistableReaction r = make_perturbed_cubic(delta);
    const WaveProfile w = solve_traveling_wave(r);
    const double imbalance = check_balance(r);
    CHECK(w.speed < 0);  // the deeper rho_+ well invades
    CHECK(w.speed ==
          doctest::Approx(-imbalance / w.deriv_l2_sq).epsilon(2e-4));
    CHECK(w.eval(0.0) == doctest::Approx(r.rho_star()).epsilon(1e-8));
  }
  // continuity in delta towards the balanced case
  const double c_small = solve_traveling_wave(make_perturbed_cubic(0.01)).speed;
  CHECK(std::abs(c_small) < 0.02);
  CHECK(std::abs(c_small) > 1e-4);
}

TEST_CASE("periodic profile: cubic symmetry gives h2 = 1/2") {
  const PeriodicProfile p = solve_periodic_profile(make_cubic(), 400.0, 2048);
  CHECK(p.h2 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(p.m1 == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(p.e_star < 0);
  CHECK(p.value[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.deriv[0] < 0);
}

TEST_CASE("periodic profile: values confined and exactly two crossings") {
  const PeriodicProfile p = solve_periodic_profile(make_quartic_balanced(0.4),
                                                   300.0, 2048);
  int crossings = 0;
  for (int i = 0; i < p.n; ++i) {
    CHECK(p.value[i] > p.reaction.rho_minus());
    CHECK(p.value[i] < p.reaction.rho_plus());
    const double a = p.value[i] - p.reaction.rho_star();
    const double b = p.value[(i + 1) % p.n] - p.reaction.rho_star();
    if ((a > 0) != (b > 0)) ++crossings;
  }
  CHECK(crossings == 2);
}

TEST_CASE("periodic profile: energy identity holds on the grid") {
  const PeriodicProfile p = solve_periodic_profile(make_cubic(), 400.0, 4096);
  const double eps2 = 1.0 / p.K;
  double worst = 0;
  for (int i = 0; i < p.n; ++i) {
    const double e = 0.5 * eps2 * p.deriv[i] * p.deriv[i] -
                     p.reaction.potential(p.value[i]);
    worst = std::max(worst, std::abs(e - p.e_star));
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("periodic profile: reflection symmetry about m1") {
  const PeriodicProfile p = solve_periodic_profile(make_cubic(), 400.0, 4096);
  // v(m1 + s) = v(m1 - s)
  double worst = 0;
  for (double s = 0.01; s < 0.2; s += 0.013) {
    worst = std::max(worst, std::abs(p.eval(p.m1 + s) - p.eval(p.m1 - s)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("periodic profile: discrete ODE residual at n = 8192") {
  const PeriodicProfile p = solve_periodic_profile(make_cubic(), 400.0, 8192);
  CHECK(ode_residual_sup(p) <= 1e-5);
}

TEST_CASE("periodic profile: midpoint values approach the stable roots") {
  // |v(m1) + 1| <= C sqrt(eps) with eps = K^{-1/2}; check the trend
  double prev = 1.0;
  for (double K : {100.0, 400.0, 1600.0}) {
    const PeriodicProfile p = solve_periodic_profile(make_cubic(), K, 2048);
    const double gap = p.eval(p.m1) + 1.0;
    CHECK(gap > 0);
    CHECK(gap < prev);
    CHECK(gap <= 2.0 * std::pow(1.0 / std::sqrt(K), 0.5));
    prev = gap;
  }
}

TEST_CASE("periodic profile rejects small K and unbalanced f") {
  CHECK_THROWS(solve_periodic_profile(make_cubic(), 20.0, 512));
  CHECK_THROWS(solve_periodic_profile(make_perturbed_cubic(0.2), 400.0, 512));
}

TEST_CASE("hat profile continuity and value at zero") {
  const BistableReaction r = make_cubic();
  const double K = 400.0;
  const PeriodicProfile p = solve_periodic_profile(r, K, 4096);
  const WaveProfile sw = solve_standing_wave(r, 12.0, 8193);
  const auto vh = hat_profile(sw, K, p.h2, p.x);
  CHECK(vh[0] == doctest::Approx(r.rho_star()).epsilon(1e-12));
  // continuity at the junction m1: evaluate both pieces at m1
  const double left = sw.eval(-std::sqrt(K) * p.m1);
  const double right = sw.eval(std::sqrt(K) * (p.m1 - p.h2));
  CHECK(left == doctest::Approx(right).epsilon(1e-12));
  // the pieced field stays within [rho_-, rho_+]
  for (double v : vh) {
    CHECK(v >= r.rho_minus() - 1e-12);
    CHECK(v <= r.rho_plus() + 1e-12);
  }
}

TEST_CASE("hat profile error bound sweep: sup |v - vhat| K^{1/4} non-increasing") {
  const BistableReaction r = make_cubic();
  const WaveProfile sw = solve_standing_wave(r, 24.0, 16385);
  double prev = 1e9;
  for (double K : {100.0, 400.0, 1600.0, 6400.0}) {
    const PeriodicProfile p = solve_periodic_profile(r, K, 4096);
    const auto vh = hat_profile(sw, K, p.h2, p.x);
    double sup = 0;
    for (int i = 0; i < p.n; ++i)
      sup = std::max(sup, std::abs(p.value[i] - vh[i]));
    const double scaled = sup * std::pow(K, 0.25);
    CHECK(scaled <= prev * (1 + 1e-9));
    prev = scaled;
  }
}
