#include "fluctlab/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace fl {

KernelGrid rescale_kernel(const KernelGrid &kernel, double K) {
  // S_K maps the stretched grid point z_i = sqrt(K)(i/n - 1/2) to x = z/sqrt(K)
  // = i/n - 1/2, which is the original grid point again (mod 1). At matched
  // resolution the pullback therefore keeps the table and stretches the
  // spacing.
  KernelGrid out = kernel;
  out.spacing = kernel.spacing * std::sqrt(K);
  return out;
}

std::vector<double> kernel_cholesky(const KernelGrid &kernel) {
  const int n = kernel.n;
  std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0);
  const double tol = 1e-10;
  double scale = 0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(kernel.at(i, i)));
  for (int j = 0; j < n; ++j) {
    double d = kernel.at(j, j);
    for (int k = 0; k < j; ++k) d -= L[static_cast<std::size_t>(j) * n + k] * L[static_cast<std::size_t>(j) * n + k];
    if (d < -tol * scale)
      throw std::invalid_argument("kernel table is not positive semidefinite");
    d = std::max(d, 0.0);
    const double dj = std::sqrt(d);
    L[static_cast<std::size_t>(j) * n + j] = dj;
    for (int i = j + 1; i < n; ++i) {
      double s = kernel.at(i, j);
      for (int k = 0; k < j; ++k)
        s -= L[static_cast<std::size_t>(i) * n + k] * L[static_cast<std::size_t>(j) * n + k];
      L[static_cast<std::size_t>(i) * n + j] = (dj > 0) ? s / dj : 0.0;
    }
  }
  return L;
}

double kernel_trace_integral(const KernelGrid &kernel) {
  double s = 0;
  for (int i = 0; i < kernel.n; ++i) s += std::abs(kernel.at(i, i));
  return s * kernel.spacing;
}

double kernel_grad_trace_integral(const KernelGrid &kernel) {
  const int n = kernel.n;
  const double h = kernel.spacing;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    const double mixed = (kernel.at(ip, ip) - kernel.at(ip, im) -
                          kernel.at(im, ip) + kernel.at(im, im)) /
                         (4 * h * h);
    s += std::abs(mixed);
  }
  return s * h;
}

std::vector<std::vector<double>> sample_noise(const NoiseSpec &spec, int n,
                                              double cell_volume, double dt,
                                              Rng &rng) {
  std::vector<std::vector<double>> out(spec.channels,
                                       std::vector<double>(n, 0.0));
  if (spec.kind == NoiseSpec::Kind::white) {
    const double sd = std::sqrt(dt / cell_volume);
    for (auto &ch : out)
      for (auto &x : ch) x = sd * rng.gaussian();
    return out;
  }
  if (spec.kind == NoiseSpec::Kind::fourier_cutoff) {
    const double sd = std::sqrt(dt);
    const double tau = 6.283185307179586476925286766559;
    for (auto &ch : out) {
      const double a0 = sd * rng.gaussian();
      for (int i = 0; i < n; ++i) ch[i] = a0;
      for (int k = 1; k <= spec.cutoff; ++k) {
        const double ak = sd * rng.gaussian();
        const double bk = sd * rng.gaussian();
        for (int i = 0; i < n; ++i) {
          const double ang = tau * k * i / n;
          ch[i] += std::sqrt(2.0) * (ak * std::cos(ang) + bk * std::sin(ang));
        }
      }
    }
    return out;
  }
  // kernel table (small grids; the factorization is recomputed per call)
  if (spec.table_n != n)
    throw std::invalid_argument("sample_noise: kernel table size mismatch");
  KernelGrid kg{n, cell_volume, spec.table};
  const std::vector<double> chol = kernel_cholesky(kg);
  const double sd = std::sqrt(dt);
  std::vector<double> xi(n);
  for (auto &ch : out) {
    for (auto &x : xi) x = rng.gaussian();
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j <= i; ++j) s += chol[static_cast<std::size_t>(i) * n + j] * xi[j];
      ch[i] = sd * s;
    }
  }
  return out;
}

}  // namespace fl
