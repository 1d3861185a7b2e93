#pragma once

// Direct solvers for the narrow-band systems of the implicit transport and
// averaging steps. BandedLU is Gaussian elimination with partial pivoting
// restricted to the band (same storage idea as LAPACK gbtrf: kl extra
// super-diagonals receive the pivoting fill). Periodic systems are handled by
// splitting off the wrap-around corners and applying the Woodbury identity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "twofluid/errors.hpp"
#include "twofluid/state.hpp"

namespace twofluid {

/// Pivot-ratio bound above which a band is treated as numerically singular.
inline constexpr double kMaxPivotRatio = 1e14;

class BandedLU {
 public:
  BandedLU(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), ab_(n * (2 * kl + ku + 1), 0.0), piv_(n) {}

  std::size_t size() const noexcept { return n_; }

  /// Entry (i, j); requires -kl <= j - i <= ku before factorization.
  double& at(std::size_t i, std::size_t j) { return ab_[i * width_ + (j + kl_ - i)]; }
  double at(std::size_t i, std::size_t j) const { return ab_[i * width_ + (j + kl_ - i)]; }

  void add(std::size_t i, std::size_t j, double value) { at(i, j) += value; }

  void factorize() {
    double max_pivot = 0.0;
    double min_pivot = INFINITY;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t last_row = std::min(n_ - 1, k + kl_);
      const std::size_t last_col = std::min(n_ - 1, k + ku_ + kl_);
      std::size_t p = k;
      for (std::size_t i = k + 1; i <= last_row; ++i)
        if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
      piv_[k] = p;
      const double pivot_mag = std::abs(at(p, k));
      if (!(pivot_mag > 0.0) || !std::isfinite(pivot_mag)) {
        std::ostringstream os;
        os << "zero pivot in column " << k << " of a " << n_ << "-row band";
        throw NumericalError(NumericalErrorKind::SingularBand, os.str());
      }
      if (p != k)
        for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
      const double d = at(k, k);
      for (std::size_t i = k + 1; i <= last_row; ++i) {
        const double l = at(i, k) / d;
        at(i, k) = l;
        if (l == 0.0) continue;
        for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
      }
      max_pivot = std::max(max_pivot, pivot_mag);
      min_pivot = std::min(min_pivot, pivot_mag);
    }
    pivot_ratio_ = max_pivot / min_pivot;
    if (pivot_ratio_ > kMaxPivotRatio) {
      std::ostringstream os;
      os << "ill-conditioned band, pivot ratio estimate " << pivot_ratio_;
      throw NumericalError(NumericalErrorKind::SingularBand, os.str());
    }
  }

  /// Cheap conditioning indicator, max|u_kk| / min|u_kk|.
  double pivot_ratio() const noexcept { return pivot_ratio_; }

  /// Solves in place; factorize() must have been called.
  void solve(std::span<double> b) const {
    for (std::size_t k = 0; k < n_; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
      const std::size_t last_row = std::min(n_ - 1, k + kl_);
      for (std::size_t i = k + 1; i <= last_row; ++i) b[i] -= at(i, k) * b[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
      const std::size_t last_col = std::min(n_ - 1, k + ku_ + kl_);
      double s = b[k];
      for (std::size_t j = k + 1; j <= last_col; ++j) s -= at(k, j) * b[j];
      b[k] = s / at(k, k);
    }
  }

 private:
  std::size_t n_, kl_, ku_, width_;
  std::vector<double> ab_;
  std::vector<std::size_t> piv_;
  double pivot_ratio_ = 1.0;
};

/// A square system whose row i couples cells i-w..i+w. Coefficients are given
/// per row and offset; offsets that leave the grid are resolved by the
/// boundary policy (folded onto the nearest cell, or wrapped).
class StencilSystem {
 public:
  StencilSystem(std::size_t n, std::size_t halfwidth)
      : n_(n), w_(halfwidth), coef_(n * (2 * halfwidth + 1), 0.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t halfwidth() const noexcept { return w_; }

  double& operator()(std::size_t row, std::ptrdiff_t offset) {
    return coef_[row * (2 * w_ + 1) + static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(w_))];
  }
  double operator()(std::size_t row, std::ptrdiff_t offset) const {
    return coef_[row * (2 * w_ + 1) + static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(w_))];
  }

  /// y = M x under the given boundary policy.
  std::vector<double> apply(std::span<const double> x, Boundary bc) const {
    std::vector<double> y(n_, 0.0);
    const auto w = static_cast<std::ptrdiff_t>(w_);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::ptrdiff_t o = -w; o <= w; ++o)
        s += (*this)(i, o) * x[neighbor_index(static_cast<std::ptrdiff_t>(i) + o, n_, bc)];
      y[i] = s;
    }
    return y;
  }

  /// Solves M x = rhs.
  std::vector<double> solve(std::span<const double> rhs, Boundary bc) const {
    if (n_ <= 2 * w_)
      throw ValidationError("stencil system needs more than 2*halfwidth rows");
    return bc == Boundary::Periodic ? solve_periodic(rhs) : solve_folded(rhs);
  }

 private:
  BandedLU core_band(bool fold) const {
    BandedLU lu(n_, w_, w_);
    const auto w = static_cast<std::ptrdiff_t>(w_);
    const auto ni = static_cast<std::ptrdiff_t>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::ptrdiff_t o = -w; o <= w; ++o) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + o;
        if (j >= 0 && j < ni) {
          lu.add(i, static_cast<std::size_t>(j), (*this)(i, o));
        } else if (fold) {
          lu.add(i, neighbor_index(j, n_, Boundary::Transmissive), (*this)(i, o));
        }
      }
    }
    return lu;
  }

  std::vector<double> solve_folded(std::span<const double> rhs) const {
    BandedLU lu = core_band(true);
    lu.factorize();
    std::vector<double> x(rhs.begin(), rhs.end());
    lu.solve(x);
    return x;
  }

  // M = B + U V^T, where B is the band without wrap-around entries and the
  // columns of U collect the corner entries of each wrapped-to column.
  std::vector<double> solve_periodic(std::span<const double> rhs) const {
    BandedLU lu = core_band(false);
    lu.factorize();

    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < w_; ++c) cols.push_back(c);
    for (std::size_t c = n_ - w_; c < n_; ++c) cols.push_back(c);
    const std::size_t k = cols.size();

    std::vector<std::vector<double>> Z(k, std::vector<double>(n_, 0.0));
    const auto w = static_cast<std::ptrdiff_t>(w_);
    const auto ni = static_cast<std::ptrdiff_t>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::ptrdiff_t o = -w; o <= w; ++o) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + o;
        if (j >= 0 && j < ni) continue;
        const std::size_t col = neighbor_index(j, n_, Boundary::Periodic);
        const auto it = std::find(cols.begin(), cols.end(), col);
        Z[static_cast<std::size_t>(it - cols.begin())][i] += (*this)(i, o);
      }
    }
    for (auto& z : Z) lu.solve(z);

    std::vector<double> y(rhs.begin(), rhs.end());
    lu.solve(y);

    // Small dense system (I + V^T Z) s = V^T y.
    std::vector<double> S(k * k, 0.0);
    std::vector<double> s(k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) S[a * k + b] = (a == b ? 1.0 : 0.0) + Z[b][cols[a]];
      s[a] = y[cols[a]];
    }
    dense_solve(S, s, k);

    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t i = 0; i < n_; ++i) y[i] -= Z[b][i] * s[b];
    return y;
  }

  static void dense_solve(std::vector<double>& M, std::vector<double>& b, std::size_t k) {
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < k; ++r)
        if (std::abs(M[r * k + c]) > std::abs(M[p * k + c])) p = r;
      if (!(std::abs(M[p * k + c]) > 0.0))
        throw NumericalError(NumericalErrorKind::SingularBand, "singular periodic capacitance matrix");
      if (p != c) {
        for (std::size_t j = 0; j < k; ++j) std::swap(M[c * k + j], M[p * k + j]);
        std::swap(b[c], b[p]);
      }
      for (std::size_t r = c + 1; r < k; ++r) {
        const double l = M[r * k + c] / M[c * k + c];
        for (std::size_t j = c; j < k; ++j) M[r * k + j] -= l * M[c * k + j];
        b[r] -= l * b[c];
      }
    }
    for (std::size_t c = k; c-- > 0;) {
      double s = b[c];
      for (std::size_t j = c + 1; j < k; ++j) s -= M[c * k + j] * b[j];
      b[c] = s / M[c * k + c];
    }
  }

  std::size_t n_, w_;
  std::vector<double> coef_;
};

}  // namespace twofluid
