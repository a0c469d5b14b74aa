#include <doctest.h>

#include <cmath>
#include <vector>

#include "fluctlab/numerics.hpp"
#include "fluctlab/reaction.hpp"

using namespace fl;

TEST_CASE("cubic reaction basics") {
  const BistableReaction r = make_cubic();
  CHECK(r.f(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.df(1.0) == doctest::Approx(-2.0));
  CHECK(r.df(-1.0) == doctest::Approx(-2.0));
  CHECK(r.balanced());
  CHECK(r.potential(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.potential(0.0) == doctest::Approx(0.25));
  CHECK(r.potential(-1.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("roots are zeros of f within 1e-12 and outer roots stable") {
  for (const auto &r : {make_cubic(), make_perturbed_cubic(0.1),
                        make_quartic_balanced(0.3)}) {
    CHECK(std::abs(r.f(r.rho_minus())) <= 1e-12);
    CHECK(std::abs(r.f(r.rho_star())) <= 1e-12);
    CHECK(std::abs(r.f(r.rho_plus())) <= 1e-12);
    CHECK(r.df(r.rho_minus()) < 0);
    CHECK(r.df(r.rho_plus()) < 0);
  }
}

TEST_CASE("potential nonnegative on [rho-, rho+] when balanced") {
  const BistableReaction r = make_quartic_balanced(0.4);
  CHECK(r.balanced());
  for (int i = 0; i <= 200; ++i) {
    const double u = -1.0 + 2.0 * i / 200.0;
    CHECK(r.potential(u) >= -1e-12);
  }
}

TEST_CASE("balance quadrature") {
  CHECK(std::abs(check_balance(make_cubic())) <= 1e-12);
  // f = u - u^3 + 0.1 (1 - u^2) integrates to 0.1 * 4/3
  const BistableReaction r = make_perturbed_cubic(0.1);
  CHECK(check_balance(r) == doctest::Approx(0.1 * 4.0 / 3.0).epsilon(1e-10));
  CHECK(!r.balanced());
  CHECK(std::abs(r.f(r.rho_star())) <= 1e-14);
  CHECK(std::abs(check_balance(make_quartic_balanced(0.7))) <= 1e-12);
}

TEST_CASE("taylor drift orders") {
  const BistableReaction r = make_cubic();
  // n=1 has no N factor
  CHECK(taylor_drift(r, 1, 10.0, 1, 0.3, 0.7) ==
        doctest::Approx(r.df(0.3) * 0.7).epsilon(1e-15));
  // n=3 cubic at u=0, phi=1, N^{d/2}=10: 1 + 0 + (-6/6)/100
  CHECK(taylor_drift(r, 3, 100.0, 1, 0.0, 1.0) == doctest::Approx(0.99));
  CHECK_THROWS(taylor_drift(r, 0, 10.0, 1, 0.0, 1.0));
  CHECK_THROWS(taylor_drift(r, 4, 10.0, 1, 0.0, 1.0));
}

TEST_CASE("taylor drift n=3 reproduces the full difference for cubic f") {
  const BistableReaction r = make_cubic();
  for (double N : {16.0, 256.0}) {
    for (double u : {-0.5, 0.0, 0.4}) {
      for (double phi : {-1.2, 0.3, 2.0}) {
        const double scale = std::pow(N, -0.5);
        const double direct = (r.f(u + scale * phi) - r.f(u)) / scale;
        CHECK(taylor_drift(r, 3, N, 1, u, phi) ==
              doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("taylor remainder decays at the expected rate for a quartic") {
  const BistableReaction r = make_quartic_balanced(0.5);
  const double u = 0.2, phi = 1.0;
  std::vector<double> errs;
  const std::vector<double> Ns = {1e2, 1e3, 1e4};
  for (double N : Ns) {
    const double scale = std::pow(N, -0.5);
    const double direct = (r.f(u + scale * phi) - r.f(u)) / scale;
    errs.push_back(std::abs(direct - taylor_drift(r, 3, N, 1, u, phi)));
  }
  const double slope = std::log(errs[2] / errs[0]) / std::log(Ns[2] / Ns[0]);
  CHECK(slope == doctest::Approx(-1.5).epsilon(0.02));
}

TEST_CASE("potential path independence under balance") {
  const BistableReaction r = make_quartic_balanced(0.9);
  CHECK(std::abs(r.potential(r.rho_minus())) <= 1e-10);
}

TEST_CASE("constructor refuses wrong inputs") {
  CHECK_THROWS(BistableReaction({0.0, 1.0, 0.0, -1.0}, -1.0, 0.2, 1.0, "bad"));
  CHECK_THROWS(BistableReaction({0.0, -1.0, 0.0, 1.0}, -1.0, 0.0, 1.0, "unstable"));
}

TEST_CASE("reaction ids round-trip") {
  CHECK(reaction_by_id("cubic").id() == "cubic");
  CHECK(reaction_by_id("cubic+0.05").rho_star() == doctest::Approx(-0.05));
  CHECK(reaction_by_id("quartic+0.3").balanced());
  CHECK_THROWS(reaction_by_id("nope"));
}
