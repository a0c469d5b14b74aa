#include "fluctlab/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fl {

namespace {

double torus_dist(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

bool in_window(double x, double lo, double hi) {
  if (lo <= hi) return x >= lo && x <= hi;
  return x >= lo || x <= hi;  // wrapped window
}

}  // namespace

int count_crossings(const std::vector<double> &field, double level) {
  const int n = static_cast<int>(field.size());
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double a = field[i] - level;
    const double b = field[(i + 1) % n] - level;
    if (a == 0.0 || (a > 0) != (b > 0)) ++count;
  }
  return count;
}

InterfaceTrack track_interface(const std::vector<std::vector<double>> &fields,
                               const std::vector<double> &times,
                               double rho_star, double win_lo, double win_hi) {
  if (fields.size() != times.size())
    throw std::invalid_argument("track_interface: times/fields mismatch");
  InterfaceTrack track;
  track.times = times;
  track.location.assign(times.size(), std::numeric_limits<double>::quiet_NaN());
  track.valid.assign(times.size(), 0);
  // before the first hit, distances are measured from the window centre
  double prev = (win_lo <= win_hi) ? 0.5 * (win_lo + win_hi)
                                   : 0.5 * (win_lo + win_hi + 1.0);
  prev -= std::floor(prev);

  for (std::size_t s = 0; s < fields.size(); ++s) {
    const auto &f = fields[s];
    const int n = static_cast<int>(f.size());
    const double h = 1.0 / n;
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double a = f[i] - rho_star;
      const double b = f[(i + 1) % n] - rho_star;
      if (a == 0.0 || (a > 0) != (b > 0)) {
        const double frac = (a == b) ? 0.0 : a / (a - b);
        double x = (i + frac) * h;
        x -= std::floor(x);
        if (!in_window(x, win_lo, win_hi)) continue;
        const double dist = torus_dist(x, prev);
        if (dist < best_dist) {
          best_dist = dist;
          best = x;
        }
      }
    }
    if (!std::isnan(best)) {
      track.location[s] = best;
      track.valid[s] = 1;
      prev = best;
    }
  }
  return track;
}

std::vector<double> rescaled_displacement(const InterfaceTrack &track,
                                          double N, double K, int d) {
  const double scale = std::pow(N, 0.5 * d) * std::pow(K, -0.25);
  std::vector<double> out(track.location.size(), 0.0);
  double unwrapped = 0.0;
  double prev = track.location.empty() ? 0.0 : track.location[0];
  for (std::size_t i = 0; i < track.location.size(); ++i) {
    if (!track.valid[i]) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double step = track.location[i] - prev;
    step -= std::round(step);  // unwrap through the periodic boundary
    unwrapped += step;
    prev = track.location[i];
    out[i] = scale * unwrapped;
  }
  return out;
}

DecayFit fit_decay(const std::vector<double> &xs, const std::vector<double> &ys,
                   DecayModel model) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("fit_decay: need >= 3 points");
  std::vector<double> tx(xs.size()), ty(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0) || !(xs[i] > 0))
      throw std::invalid_argument("fit_decay: data must be positive");
    tx[i] = (model == DecayModel::powerlaw) ? std::log(xs[i]) : std::sqrt(xs[i]);
    ty[i] = std::log(ys[i]);
  }
  const LinearFit fit = linear_fit(tx, ty);
  DecayFit out;
  out.rate = fit.slope;
  out.amplitude = std::exp(fit.intercept);
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace fl
