#ifndef FLUCTLAB_ANALYSIS_HPP
#define FLUCTLAB_ANALYSIS_HPP

#include <vector>

#include "fluctlab/stats.hpp"

namespace fl {

struct InterfaceTrack {
  std::vector<double> times;
  std::vector<double> location;  // torus position of the tracked crossing
  std::vector<char> valid;       // 0 where no crossing was found in the window
};

// Sub-grid crossing of rho_star by linear interpolation on a periodic field.
// The window [win_lo, win_hi] (torus interval, may wrap) restricts the search;
// among crossings in the window the one nearest the previous location wins.
InterfaceTrack track_interface(const std::vector<std::vector<double>> &fields,
                               const std::vector<double> &times,
                               double rho_star, double win_lo, double win_hi);

int count_crossings(const std::vector<double> &field, double level);

// displacement of the track relative to its first point, unwrapped on the
// torus and scaled by N^{d/2} K^{-1/4}
std::vector<double> rescaled_displacement(const InterfaceTrack &track,
                                          double N, double K, int d);

enum class DecayModel { powerlaw, exp_sqrt };

struct DecayFit {
  double rate = 0;       // slope in log-log (powerlaw) or log vs sqrt(x)
  double amplitude = 0;  // exp(intercept)
  double r_squared = 0;
};

DecayFit fit_decay(const std::vector<double> &xs, const std::vector<double> &ys,
                   DecayModel model);

}  // namespace fl

#endif
