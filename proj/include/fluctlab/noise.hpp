#ifndef FLUCTLAB_NOISE_HPP
#define FLUCTLAB_NOISE_HPP

#include <cstdint>
#include <vector>

#include "fluctlab/rng.hpp"

namespace fl {

// Space-time noise on a periodic 1-D grid. White noise is sampled per cell
// with variance dt / cell volume; regularized noise either as a Fourier-mode
// cutoff or from a positive semidefinite covariance table.
struct NoiseSpec {
  enum class Kind { white, fourier_cutoff, kernel_table };
  Kind kind = Kind::white;
  int cutoff = 8;                // fourier_cutoff: modes |k| <= cutoff
  std::vector<double> table;     // kernel_table: row-major n x n, Q(x_i, x_j)
  int table_n = 0;
  int channels = 2;              // d + 1
  std::uint64_t seed = 1;
};

// covariance kernel sampled on a periodic grid with given spacing
struct KernelGrid {
  int n = 0;
  double spacing = 0;
  std::vector<double> q;  // row-major n x n
  double at(int i, int j) const { return q[static_cast<std::size_t>(i) * n + j]; }
};

// pullback Q^K(z, z') = Q(z / sqrt(K), z' / sqrt(K)) at matched resolution
KernelGrid rescale_kernel(const KernelGrid &kernel, double K);

// Cholesky with zero-pivot tolerance; throws if the table is not PSD.
std::vector<double> kernel_cholesky(const KernelGrid &kernel);

// integrability diagnostics of the kernel: int |Q(x,x)| dx and the
// diagonal of the mixed second difference d_x d_y Q
double kernel_trace_integral(const KernelGrid &kernel);
double kernel_grad_trace_integral(const KernelGrid &kernel);

// one increment field per channel over a step dt (values, not densities)
std::vector<std::vector<double>> sample_noise(const NoiseSpec &spec, int n,
                                              double cell_volume, double dt,
                                              Rng &rng);

}  // namespace fl

#endif
