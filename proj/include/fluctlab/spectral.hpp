#ifndef FLUCTLAB_SPECTRAL_HPP
#define FLUCTLAB_SPECTRAL_HPP

#include <cmath>
#include <vector>

#include "fluctlab/profile.hpp"

namespace fl {

// Lowest eigenpairs of the Sturm-Liouville operator linearized around the
// two-layer profile: L = -eps^2 d^2/dx^2 - f'(v) on the torus, which is the
// same spectrum as the stretched A^K = -d^2/dz^2 - f'(vbar) on sqrt(K) T.
// Eigenvectors are stored on the torus grid, normalized in discrete L2 with
// weight dx. The stretched normalization divides by K^(1/4).
struct SpectralDecomposition {
  int n = 0;
  double K = 0;
  double dx = 0;             // torus spacing; stretched spacing is sqrt(K) dx
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  std::vector<double> potential;  // -f'(v) on the grid

  double dz() const { return std::sqrt(K) * dx; }
  // eigenvector in the stretched normalization (unit discrete L2 with dz)
  std::vector<double> stretched_vector(int j) const;
};

SpectralDecomposition eigenpairs(const PeriodicProfile &profile, int k);

// One ux-slice field on the stretched torus times T^{d-1} (nu = 1 gives d=1).
struct Field2 {
  int nz = 0, nu = 0;
  std::vector<double> a;  // row-major, a[iz * nu + iu]
  double &at(int iz, int iu) { return a[static_cast<std::size_t>(iz) * nu + iu]; }
  double at(int iz, int iu) const { return a[static_cast<std::size_t>(iz) * nu + iu]; }
};

// T_t^K H = exp(t(-K A_z + Delta_ux)) H: eigen-expansion on the computed
// modes plus Crank-Nicolson sub-stepping for the remainder in z, exact
// Fourier multiplier in ux. Slightly negative discrete eigenvalues of the
// provably nonnegative A are clamped at zero.
std::vector<double> semigroup_apply(const SpectralDecomposition &sd, double t,
                                    const std::vector<double> &g);
Field2 semigroup_apply(const SpectralDecomposition &sd, double t,
                       const Field2 &g);

// <G, e> e with e(z) = U0'(-z)/||U0'||, on a uniform z grid
struct ProjectionResult {
  double coefficient = 0;
  std::vector<double> field;
};
ProjectionResult projection_limit(const WaveProfile &sw,
                                  const std::vector<double> &zgrid, double dz,
                                  const std::vector<double> &g);

enum class Mollifier { exp_bump, quintic };

// tau_j = -gamma^j v_x with smooth cutoffs gamma^j (plateau
// [m_j + 2 eps, m_{j+1} - 2 eps], support [m_j, m_{j+1}], eps = K^{-1/2})
std::vector<std::vector<double>> tau_functions(const PeriodicProfile &profile,
                                               Mollifier kind = Mollifier::exp_bump);
std::vector<double> projection_tau(const PeriodicProfile &profile,
                                   const std::vector<double> &w,
                                   Mollifier kind = Mollifier::exp_bump);

// |<A u, w> - <u, A w>| in L2(e^{cz} dz) for A = -(d^2 + c d + f'(U0));
// the flux-form discretization keeps the discrete operator exactly symmetric.
double weighted_symmetry_residual(const WaveProfile &sw,
                                  const std::vector<double> &u,
                                  const std::vector<double> &w);
// ||A U0'|| in the weighted norm (U0' spans the kernel)
double weighted_A_U0prime_norm(const WaveProfile &sw);

// wrapped-Gaussian fundamental solution of d_t - d_x^2 on the unit torus
double heat_kernel_torus(double t, double x, double y);

}  // namespace fl

#endif
