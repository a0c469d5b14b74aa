#ifndef FLUCTLAB_SPDE_HPP
#define FLUCTLAB_SPDE_HPP

#include <cstdint>
#include <vector>

#include "fluctlab/noise.hpp"
#include "fluctlab/profile.hpp"
#include "fluctlab/spectral.hpp"

namespace fl {

// Which rescaling of the density fluctuation a series carries:
//   phi        Phi(t,x)          on the unit torus
//   psi_tilde  Phi(t, z/sqrt(K)) on the stretched torus
//   psi        K^{-3/4} psi_tilde
enum class FieldScaling { phi, psi_tilde, psi };

struct FieldSeries {
  std::vector<double> times;
  std::vector<Field2> snapshots;
  FieldScaling scaling = FieldScaling::phi;
  double N = 0, K = 0;
  int drift_order = 0;
  bool blew_up = false;   // guard tripped; series holds the partial run
  double dz = 0, du = 0;  // grid spacings (z or x direction, ux direction)
};

// divide a psi_tilde series by K^{3/4}
FieldSeries to_psi(const FieldSeries &tilde);

// --------------------------------------------------------------------------
// density fluctuation SPDE on the torus (d = 1):
//   d Phi = [D2 Phi + K F_n(u, Phi) + c sqrt(K) dPhi (optional, upwind)] dt
//           + div(g1(u) dW) + sqrt(K) g2(u) dW
// --------------------------------------------------------------------------
struct DensitySpdeOptions {
  int n_order = 1;                 // Taylor order n in {1,2,3}
  double N = 1e4, K = 16;
  double T = 1.0, dt = 1e-4;
  int nx = 256;
  bool conservative_on = true, flip_on = true;
  NoiseSpec::Kind noise_kind = NoiseSpec::Kind::white;
  int noise_cutoff = 16;           // fourier_cutoff regularization
  double blowup_cap = 1e6;
  bool comoving = false;           // adds c sqrt(K) d_x Phi with upwinding
  double comoving_c = 0;
  std::uint64_t seed = 1;
  std::vector<double> sample_times;
};

// background u(x) sampled at cells and edges, plus the noise amplitudes
struct DensityBackground {
  std::vector<double> u_cell, u_edge;  // u at x_i and x_{i+1/2}
  std::vector<double> g1_edge, g2_cell;
};

DensityBackground density_background(const PeriodicProfile &prof, int nx,
                                     const ScalarFn &g1, const ScalarFn &g2);
DensityBackground density_background_wave(const WaveProfile &wave, double K,
                                          int nx, const ScalarFn &g1,
                                          const ScalarFn &g2);
DensityBackground density_background_constant(double u, int nx,
                                              const ScalarFn &g1,
                                              const ScalarFn &g2);

FieldSeries integrate_density_spde(const BistableReaction &r,
                                   const DensityBackground &bg,
                                   const std::vector<double> &phi0,
                                   const DensitySpdeOptions &opt);

// --------------------------------------------------------------------------
// stretched SPDE for Psi on sqrt(K) T x T^{d-1}   (nu = 1 gives d = 1)
// --------------------------------------------------------------------------
struct StretchedSpdeOptions {
  double K = 1600;
  double N = 0;                    // only used by the nonlinear terms
  int nonlinearity = 0;            // 0 linear, 2 quadratic, 3 quadratic+cubic
  int nz = 400, nu = 1;
  double T = 1.0, dt = 5e-4;
  bool grad_ux_channel_on = true;  // the K^{-1/2} transverse channel (d >= 2)
  double blowup_cap = 1e6;
  std::uint64_t seed = 1;
  std::vector<double> sample_times;
};

FieldSeries integrate_stretched_spde(const PeriodicProfile &prof,
                                     const ScalarFn &g1, const ScalarFn &g2,
                                     const Field2 &psi0,
                                     const StretchedSpdeOptions &opt);

// --------------------------------------------------------------------------
// limit interface SPDE on T^{d-1}: d psi = Delta psi dt + c3 psi^3 dt + c* dW
// --------------------------------------------------------------------------
struct LimitInterfaceOptions {
  double c_star = 1.0;
  double c3 = 0.0;
  int d = 2;                       // 1 or 2 (d >= 3 rejected)
  int nu = 256;                    // circle grid for d = 2
  double T = 1.0, dt = 1e-4;
  double blowup_cap = 1e6;
  std::uint64_t seed = 1;
  std::vector<double> sample_times;
};

FieldSeries integrate_limit_interface(const std::vector<double> &psi0,
                                      const LimitInterfaceOptions &opt);

// --------------------------------------------------------------------------
// off-interface SPDE on T (d = 1):
//   d Psi = [D2 Psi - c K Psi] dt + c1 K^{-1/4} div dW + c2 K^{1/4} dW
// --------------------------------------------------------------------------
struct OffsiteOptions {
  double K = 6400;
  double c = 2.0;                  // -f'(rho_pm)
  double amp_grad = 1.0, amp_flip = 1.0;
  int nx = 2048;
  double T = 1.0;
  double dt_coarse = 8e-3, dt_fine = 5e-5;
  double fine_window = 0.01;       // trailing window integrated at dt_fine
  std::uint64_t seed = 1;
};

// returns the field at t = T
std::vector<double> integrate_offsite(const OffsiteOptions &opt);

}  // namespace fl

#endif
