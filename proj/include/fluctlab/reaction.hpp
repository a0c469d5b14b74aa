#ifndef FLUCTLAB_REACTION_HPP
#define FLUCTLAB_REACTION_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fl {

using ScalarFn = std::function<double(double)>;

// Bistable nonlinearity f with stable zeros rho_minus < rho_plus and an
// unstable zero rho_star between them. All shipped reactions are polynomials,
// which keeps derivatives analytic and lets the profile solvers evaluate f and
// the potential V (V' = -f, V(rho_plus) = 0) in extended precision.
class BistableReaction {
 public:
  BistableReaction() = default;
  // coeffs: f(u) = sum_k coeffs[k] u^k; roots are verified, not trusted.
  BistableReaction(std::vector<double> coeffs, double rho_minus,
                   double rho_star, double rho_plus, std::string id);

  template <class Real>
  Real f(Real u) const {
    return horner<Real>(coeffs_, u);
  }
  template <class Real>
  Real df(Real u) const {
    return horner<Real>(dcoeffs_, u);
  }
  template <class Real>
  Real d2f(Real u) const {
    return horner<Real>(d2coeffs_, u);
  }
  template <class Real>
  Real d3f(Real u) const {
    return horner<Real>(d3coeffs_, u);
  }
  template <class Real>
  Real potential(Real u) const {
    return horner<Real>(vcoeffs_, u);
  }

  double rho_minus() const { return rho_minus_; }
  double rho_star() const { return rho_star_; }
  double rho_plus() const { return rho_plus_; }
  bool balanced() const { return balanced_; }
  const std::string &id() const { return id_; }
  const std::vector<double> &coeffs() const { return coeffs_; }
  const std::vector<double> &potential_coeffs() const { return vcoeffs_; }

 private:
  template <class Real>
  static Real horner(const std::vector<double> &c, Real u) {
    Real r = 0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * u + static_cast<Real>(c[k]);
    return r;
  }

  std::vector<double> coeffs_, dcoeffs_, d2coeffs_, d3coeffs_, vcoeffs_;
  double rho_minus_ = -1, rho_star_ = 0, rho_plus_ = 1;
  bool balanced_ = false;
  std::string id_;
};

// f(u) = u - u^3 with roots -1, 0, 1; V(u) = (1 - u^2)^2 / 4.
BistableReaction make_cubic();

// f(u) = (1 - u^2)(u + delta): same outer roots, rho_star = -delta,
// unbalanced for delta != 0. Used for traveling-wave experiments.
BistableReaction make_perturbed_cubic(double delta);

// f(u) = (1 - u^2)(u + a(u^2 - 1/5)): balanced for every a but not odd,
// so it exercises the balanced-yet-asymmetric code paths.
BistableReaction make_quartic_balanced(double a);

// lookup by id used by config files ("cubic", "cubic+delta", "quartic+a")
BistableReaction reaction_by_id(const std::string &id);

// Taylor drift F_n^N(u, phi) = sum_{k=1}^{n} N^{-(k-1)d/2} / k! f^(k)(u) phi^k.
double taylor_drift(const BistableReaction &r, int n, double N, int d,
                    double u, double phi);

// quadrature of f over [rho_minus, rho_plus]; zero iff balanced
double check_balance(const BistableReaction &r);

}  // namespace fl

#endif
