#ifndef FLUCTLAB_NUMERICS_HPP
#define FLUCTLAB_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fl {

// ---------------------------------------------------------------------------
// adaptive quadrature (Simpson with Richardson acceptance), templated on the
// scalar so profile construction can run in long double end to end
// ---------------------------------------------------------------------------

template <class Real, class F>
Real adaptive_simpson_rec(const F &f, Real a, Real b, Real fa, Real fm, Real fb,
                          Real whole, Real tol, int depth) {
  const Real m = (a + b) / 2;
  const Real lm = (a + m) / 2, rm = (m + b) / 2;
  const Real flm = f(lm), frm = f(rm);
  const Real left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Real right = (b - m) / 6 * (fm + 4 * frm + fb);
  const Real delta = left + right - whole;
  // non-finite values propagate out instead of forcing endless subdivision
  if (depth <= 0 || !(std::abs(delta) > 15 * tol))
    return left + right + delta / 15;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <class Real, class F>
Real integrate(const F &f, Real a, Real b, Real tol, int max_depth = 48) {
  if (a == b) return Real(0);
  const Real m = (a + b) / 2;
  const Real fa = f(a), fm = f(m), fb = f(b);
  const Real whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson_rec<Real>(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// ---------------------------------------------------------------------------
// root finding
// ---------------------------------------------------------------------------

template <class Real, class F>
Real bisect(const F &f, Real a, Real b, Real tol, int max_iter = 200) {
  Real fa = f(a), fb = f(b);
  if (fa == Real(0)) return a;
  if (fb == Real(0)) return b;
  if ((fa > 0) == (fb > 0))
    throw std::runtime_error("bisect: root not bracketed");
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    const Real m = (a + b) / 2;
    const Real fm = f(m);
    if (fm == Real(0)) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return (a + b) / 2;
}

// Brent's method; falls back to bisection steps internally.
template <class Real, class F>
Real brent(const F &f, Real a, Real b, Real tol, int max_iter = 200) {
  Real fa = f(a), fb = f(b);
  if (fa == Real(0)) return a;
  if (fb == Real(0)) return b;
  if ((fa > 0) == (fb > 0))
    throw std::runtime_error("brent: root not bracketed");
  Real c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const Real tol1 = 2 * std::numeric_limits<Real>::epsilon() * std::abs(b) + tol / 2;
    const Real xm = (c - b) / 2;
    if (std::abs(xm) <= tol1 || fb == Real(0)) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      Real p, q, r;
      const Real s = fb / fa;
      if (a == c) {
        p = 2 * xm * s;
        q = 1 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2 * xm * q * (q - r) - (b - a) * (r - 1));
        q = (q - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2 * p < std::min(3 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// cyclic banded solves (periodic grids). Tridiagonal case uses Thomas plus a
// Sherman-Morrison corner correction; the general band uses Woodbury.
// ---------------------------------------------------------------------------

template <class Real>
class TridiagSolver {
 public:
  // constant-coefficient a*x_{i-1} + b_i*x_i + c*x_{i+1} with wraparound
  void factor(const std::vector<Real> &diag, Real off) {
    n_ = diag.size();
    off_ = off;
    dd_.assign(n_, Real(0));
    // corner correction: A = T + u v^T with u = gamma e_1 + off e_n (v likewise)
    gamma_ = -diag[0];
    d0_ = diag;
    d0_[0] -= gamma_;
    d0_[n_ - 1] -= off * off / gamma_;
    // prefactor Thomas sweep coefficients for d0
    cw_.assign(n_, Real(0));
    Real beta = d0_[0];
    dd_[0] = beta;
    for (std::size_t i = 1; i < n_; ++i) {
      cw_[i] = off / dd_[i - 1];
      dd_[i] = d0_[i] - cw_[i] * off;
    }
    // solve T z = u once
    u_.assign(n_, Real(0));
    u_[0] = gamma_;
    u_[n_ - 1] = off;
    z_ = solve_tri(u_);
    denom_ = Real(1) + z_[0] + (off / gamma_) * z_[n_ - 1];
  }

  std::vector<Real> solve(const std::vector<Real> &rhs) const {
    std::vector<Real> y = solve_tri(rhs);
    const Real factor = (y[0] + (off_ / gamma_) * y[n_ - 1]) / denom_;
    for (std::size_t i = 0; i < n_; ++i) y[i] -= factor * z_[i];
    return y;
  }

  void solve_inplace(std::vector<Real> &rhs, std::vector<Real> &work) const {
    solve_tri_into(rhs, work);
    const Real factor = (work[0] + (off_ / gamma_) * work[n_ - 1]) / denom_;
    for (std::size_t i = 0; i < n_; ++i) rhs[i] = work[i] - factor * z_[i];
  }

 private:
  std::vector<Real> solve_tri(const std::vector<Real> &rhs) const {
    std::vector<Real> x(n_);
    solve_tri_into(rhs, x);
    return x;
  }
  void solve_tri_into(const std::vector<Real> &rhs, std::vector<Real> &x) const {
    x.resize(n_);
    x[0] = rhs[0];
    for (std::size_t i = 1; i < n_; ++i) x[i] = rhs[i] - cw_[i] * x[i - 1];
    x[n_ - 1] /= dd_[n_ - 1];
    for (std::size_t i = n_ - 1; i-- > 0;)
      x[i] = (x[i] - off_ * x[i + 1]) / dd_[i];
  }

  std::size_t n_ = 0;
  Real off_ = 0, gamma_ = 0, denom_ = 1;
  std::vector<Real> d0_, dd_, cw_, u_, z_;
};

// Dense-ish cyclic banded solver for small bandwidths (used by the
// fourth-order stencils). Stores the LU of the band plus a Woodbury block.
template <class Real>
class CyclicBandSolver {
 public:
  // row i couples x_{i+k}, k in [-p, p]; stencil constant except the diagonal
  void factor(const std::vector<Real> &diag, const std::vector<Real> &stencil,
              int p) {
    p_ = p;
    n_ = static_cast<int>(diag.size());
    st_ = stencil;  // length 2p+1, st_[p] unused (diag passed separately)
    const int w = 2 * p;
    // band matrix without wrap; wrap entries handled by U C V^T correction
    band_.assign(static_cast<std::size_t>(n_) * (2 * w + 1), Real(0));
    auto at = [&](int i, int j) -> Real & {
      return band_[static_cast<std::size_t>(i) * (2 * w + 1) + (j - i + w)];
    };
    for (int i = 0; i < n_; ++i) {
      for (int k = -p; k <= p; ++k) {
        const int j = i + k;
        if (j < 0 || j >= n_) continue;
        at(i, j) += (k == 0) ? diag[i] : st_[k + p];
      }
    }
    // wrap columns: for i<p, neighbours j=i+k with i+k<0 live at n+i+k; same top
    wraps_.clear();
    for (int i = 0; i < p_; ++i) {
      for (int k = -p; k < 0; ++k)
        if (i + k < 0) record_wrap(i, (i + k + n_) % n_, st_[k + p]);
    }
    for (int i = n_ - p_; i < n_; ++i) {
      for (int k = 1; k <= p; ++k)
        if (i + k >= n_) record_wrap(i, (i + k) % n_, st_[k + p]);
    }
    lu_factor(w);
    build_woodbury();
  }

  std::vector<Real> solve(const std::vector<Real> &rhs) const {
    std::vector<Real> y = lu_solve(rhs);
    if (m_ == 0) return y;
    // x = y - Z (I + W)^{-1} V^T y
    std::vector<Real> vty(m_, Real(0));
    for (int j = 0; j < m_; ++j) vty[j] = y[cols_idx_[j]];
    std::vector<Real> s = small_solve(vty);
    for (int j = 0; j < m_; ++j)
      for (int i = 0; i < n_; ++i) y[i] -= z_[static_cast<std::size_t>(j) * n_ + i] * s[j];
    return y;
  }

 private:
  struct Wrap {
    int row, col;
    Real val;
  };
  void record_wrap(int row, int col, Real val) {
    for (std::size_t k = 0; k < wraps_.size(); ++k) {
      if (wraps_[k].row == row && wraps_[k].col == col) {
        wraps_[k].val += val;
        return;
      }
    }
    wraps_.push_back({row, col, val});
  }

  void lu_factor(int w) {
    // simple banded LU without pivoting (matrices here are strongly diagonally
    // dominant after the implicit-step shift)
    const int stride = 2 * w + 1;
    lu_ = band_;
    for (int i = 0; i < n_ - 1; ++i) {
      const Real piv = lu_[static_cast<std::size_t>(i) * stride + w];
      const int jmax = std::min(n_ - 1, i + w);
      for (int j = i + 1; j <= jmax; ++j) {
        Real &lij = lu_[static_cast<std::size_t>(j) * stride + (i - j + w)];
        if (lij == Real(0)) continue;
        const Real m = lij / piv;
        lij = m;
        const int kmax = std::min(n_ - 1, i + w);
        for (int k = i + 1; k <= kmax; ++k)
          lu_[static_cast<std::size_t>(j) * stride + (k - j + w)] -=
              m * lu_[static_cast<std::size_t>(i) * stride + (k - i + w)];
      }
    }
    w_ = w;
  }

  std::vector<Real> lu_solve(const std::vector<Real> &rhs) const {
    const int stride = 2 * w_ + 1;
    std::vector<Real> x = rhs;
    for (int i = 0; i < n_; ++i) {
      const int jmin = std::max(0, i - w_);
      Real s = x[i];
      for (int j = jmin; j < i; ++j)
        s -= lu_[static_cast<std::size_t>(i) * stride + (j - i + w_)] * x[j];
      x[i] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
      const int jmax = std::min(n_ - 1, i + w_);
      Real s = x[i];
      for (int j = i + 1; j <= jmax; ++j)
        s -= lu_[static_cast<std::size_t>(i) * stride + (j - i + w_)] * x[j];
      x[i] = s / lu_[static_cast<std::size_t>(i) * stride + w_];
    }
    return x;
  }

  void build_woodbury() {
    m_ = static_cast<int>(wraps_.size());
    if (m_ == 0) return;
    z_.assign(static_cast<std::size_t>(m_) * n_, Real(0));
    cols_idx_.resize(m_);
    std::vector<Real> ej(n_, Real(0));
    for (int j = 0; j < m_; ++j) {
      ej.assign(n_, Real(0));
      ej[wraps_[j].row] = wraps_[j].val;
      std::vector<Real> zj = lu_solve(ej);
      for (int i = 0; i < n_; ++i) z_[static_cast<std::size_t>(j) * n_ + i] = zj[i];
      cols_idx_[j] = wraps_[j].col;
    }
    // W_{jk} = (V^T Z)_{jk} = Z_k at row cols_idx_[j]
    wmat_.assign(static_cast<std::size_t>(m_) * m_, Real(0));
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < m_; ++k)
        wmat_[static_cast<std::size_t>(j) * m_ + k] =
            (j == k ? Real(1) : Real(0)) + z_[static_cast<std::size_t>(k) * n_ + cols_idx_[j]];
    // LU of the small matrix
    piv_.resize(m_);
    for (int i = 0; i < m_; ++i) piv_[i] = i;
    for (int c = 0; c < m_; ++c) {
      int pr = c;
      for (int r = c + 1; r < m_; ++r)
        if (std::abs(wmat_[static_cast<std::size_t>(r) * m_ + c]) >
            std::abs(wmat_[static_cast<std::size_t>(pr) * m_ + c]))
          pr = r;
      if (pr != c) {
        for (int k = 0; k < m_; ++k)
          std::swap(wmat_[static_cast<std::size_t>(pr) * m_ + k],
                    wmat_[static_cast<std::size_t>(c) * m_ + k]);
        std::swap(piv_[pr], piv_[c]);
      }
      const Real pivot = wmat_[static_cast<std::size_t>(c) * m_ + c];
      for (int r = c + 1; r < m_; ++r) {
        const Real m = wmat_[static_cast<std::size_t>(r) * m_ + c] / pivot;
        wmat_[static_cast<std::size_t>(r) * m_ + c] = m;
        for (int k = c + 1; k < m_; ++k)
          wmat_[static_cast<std::size_t>(r) * m_ + k] -=
              m * wmat_[static_cast<std::size_t>(c) * m_ + k];
      }
    }
  }

  std::vector<Real> small_solve(const std::vector<Real> &b) const {
    std::vector<Real> x(m_);
    for (int i = 0; i < m_; ++i) x[i] = b[piv_[i]];
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < i; ++j)
        x[i] -= wmat_[static_cast<std::size_t>(i) * m_ + j] * x[j];
    for (int i = m_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < m_; ++j)
        x[i] -= wmat_[static_cast<std::size_t>(i) * m_ + j] * x[j];
      x[i] /= wmat_[static_cast<std::size_t>(i) * m_ + i];
    }
    return x;
  }

  int n_ = 0, p_ = 0, w_ = 0, m_ = 0;
  std::vector<Real> st_, band_, lu_, z_, wmat_;
  std::vector<Wrap> wraps_;
  std::vector<int> cols_idx_, piv_;
};

// Kahan-compensated sum; keeps the spectral Rayleigh quotients honest when
// eigenvalues sit twenty orders of magnitude below the operator norm.
template <class Real>
struct KahanSum {
  Real sum = 0, c = 0;
  void add(Real x) {
    const Real y = x - c;
    const Real t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  Real value() const { return sum; }
};

}  // namespace fl

#endif
