#include "fluctlab/reaction.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fluctlab/numerics.hpp"

namespace fl {

namespace {

std::vector<double> differentiate(const std::vector<double> &c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k)
    d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

std::vector<double> antiderivative(const std::vector<double> &c) {
  std::vector<double> a(c.size() + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k)
    a[k + 1] = c[k] / static_cast<double>(k + 1);
  return a;
}

double horner_d(const std::vector<double> &c, double u) {
  double r = 0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * u + c[k];
  return r;
}

}  // namespace

BistableReaction::BistableReaction(std::vector<double> coeffs, double rho_minus,
                                   double rho_star, double rho_plus,
                                   std::string id)
    : coeffs_(std::move(coeffs)),
      rho_minus_(rho_minus),
      rho_star_(rho_star),
      rho_plus_(rho_plus),
      id_(std::move(id)) {
  if (!(rho_minus_ < rho_star_ && rho_star_ < rho_plus_))
    throw std::invalid_argument("reaction: roots must be ordered");
  dcoeffs_ = differentiate(coeffs_);
  d2coeffs_ = differentiate(dcoeffs_);
  d3coeffs_ = differentiate(d2coeffs_);
  for (double root : {rho_minus_, rho_star_, rho_plus_}) {
    if (std::abs(horner_d(coeffs_, root)) > 1e-12)
      throw std::invalid_argument("reaction: supplied root is not a zero of f");
  }
  if (!(horner_d(dcoeffs_, rho_minus_) < 0 && horner_d(dcoeffs_, rho_plus_) < 0))
    throw std::invalid_argument("reaction: outer roots must be stable");

  // V = -int f, anchored so V(rho_plus) = 0
  vcoeffs_ = antiderivative(coeffs_);
  for (auto &v : vcoeffs_) v = -v;
  vcoeffs_[0] -= horner_d(vcoeffs_, rho_plus_);
  balanced_ = std::abs(horner_d(vcoeffs_, rho_minus_)) <= 1e-10;
}

BistableReaction make_cubic() {
  return BistableReaction({0.0, 1.0, 0.0, -1.0}, -1.0, 0.0, 1.0, "cubic");
}

BistableReaction make_perturbed_cubic(double delta) {
  // (1 - u^2)(u + delta) = delta + u - delta u^2 - u^3
  std::ostringstream id;
  id << "cubic+" << delta;
  return BistableReaction({delta, 1.0, -delta, -1.0}, -1.0, -delta, 1.0,
                          id.str());
}

BistableReaction make_quartic_balanced(double a) {
  // (1 - u^2)(u + a u^2 - a/5) = -a/5 + u + (6a/5) u^2 - u^3 - a u^4
  const double c = a / 5.0;
  // interior root of u + a u^2 - a/5 = 0 closest to 0
  double rho_star;
  if (std::abs(a) < 1e-14) {
    rho_star = 0.0;
  } else {
    const double disc = std::sqrt(1.0 + 4.0 * a * c);
    rho_star = (-1.0 + disc) / (2.0 * a);
  }
  std::ostringstream id;
  id << "quartic+" << a;
  return BistableReaction({-c, 1.0, 6.0 * a / 5.0, -1.0, -a}, -1.0, rho_star,
                          1.0, id.str());
}

BistableReaction reaction_by_id(const std::string &id) {
  if (id == "cubic") return make_cubic();
  const auto plus = id.find('+');
  if (plus != std::string::npos) {
    const std::string base = id.substr(0, plus);
    const double arg = std::stod(id.substr(plus + 1));
    if (base == "cubic") return make_perturbed_cubic(arg);
    if (base == "quartic") return make_quartic_balanced(arg);
  }
  throw std::invalid_argument("unknown reaction id: " + id);
}

double taylor_drift(const BistableReaction &r, int n, double N, int d,
                    double u, double phi) {
  if (n < 1 || n > 3) throw std::invalid_argument("taylor_drift: n must be 1, 2 or 3");
  const double scale = std::pow(N, -0.5 * d);
  double sum = r.df(u) * phi;
  if (n >= 2) sum += scale * 0.5 * r.d2f(u) * phi * phi;
  if (n >= 3) sum += scale * scale * (1.0 / 6.0) * r.d3f(u) * phi * phi * phi;
  return sum;
}

double check_balance(const BistableReaction &r) {
  return integrate<double>([&](double u) { return r.f(u); }, r.rho_minus(),
                           r.rho_plus(), 1e-14);
}

}  // namespace fl
