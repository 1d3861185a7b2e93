#pragma once

// Finite-difference stencil coefficients from Taylor moment systems.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "twofluid/errors.hpp"
#include "twofluid/state.hpp"

namespace twofluid {

/// One-sided first-derivative weights on offsets -3..0 used by the implicit transport.
inline constexpr std::array<double, 4> kUpwindP3 = {-1.0 / 3.0, 3.0 / 2.0, -3.0, 11.0 / 6.0};

/// Centered first-derivative weights of the order-3 pressure correction, on
/// offsets +1, +2, +3 (antisymmetric). Exact up to degree 4.
inline constexpr std::array<double, 3> kCenteredP3 = {69.0 / 101.0, -39.0 / 404.0, 1.0 / 303.0};

/// Implicit smoothing stencil on offsets -3..3 (negated sixth difference).
inline constexpr std::array<double, 7> kSmoothingP3 = {-1.0, 6.0, -15.0, 20.0, -15.0, 6.0, -1.0};

namespace detail {
// Gaussian elimination with partial pivoting on a small dense system.
inline std::vector<long double> solve_small(std::vector<long double> M, std::vector<long double> b) {
  const std::size_t k = b.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::fabs(M[r * k + c]) > std::fabs(M[p * k + c])) p = r;
    if (M[p * k + c] == 0.0L) throw ValidationError("singular moment system");
    if (p != c) {
      for (std::size_t j = 0; j < k; ++j) std::swap(M[c * k + j], M[p * k + j]);
      std::swap(b[c], b[p]);
    }
    for (std::size_t r = c + 1; r < k; ++r) {
      const long double l = M[r * k + c] / M[c * k + c];
      for (std::size_t j = c; j < k; ++j) M[r * k + j] -= l * M[c * k + j];
      b[r] -= l * b[c];
    }
  }
  for (std::size_t c = k; c-- > 0;) {
    long double s = b[c];
    for (std::size_t j = c + 1; j < k; ++j) s -= M[c * k + j] * b[j];
    b[c] = s / M[c * k + c];
  }
  return b;
}
}  // namespace detail

/// Weights on offsets -p..0 of the one-sided stencil that differentiates
/// polynomials of degree <= p exactly: sum_k c_k k^q = [q == 1].
inline std::vector<double> gen_upwind_coeffs(std::size_t p) {
  if (p < 1) throw ValidationError("gen_upwind_coeffs: p must be >= 1");
  const std::size_t k = p + 1;
  std::vector<long double> M(k * k), b(k, 0.0L);
  for (std::size_t q = 0; q < k; ++q)
    for (std::size_t c = 0; c < k; ++c) {
      const long double offset = static_cast<long double>(c) - static_cast<long double>(p);
      M[q * k + c] = q == 0 ? 1.0L : std::pow(offset, static_cast<long double>(q));
    }
  b[1] = 1.0L;
  const auto x = detail::solve_small(std::move(M), std::move(b));
  return {x.begin(), x.end()};
}

/// Weights c_1..c_p of the antisymmetric centered stencil of maximal order
/// (c_{-k} = -c_k), from the p x p system 2 sum_k c_k k^q = [q == 1], q odd.
inline std::vector<double> gen_centered_coeffs(std::size_t p) {
  if (p < 1) throw ValidationError("gen_centered_coeffs: p must be >= 1");
  std::vector<long double> M(p * p), b(p, 0.0L);
  for (std::size_t row = 0; row < p; ++row) {
    const auto q = static_cast<long double>(2 * row + 1);
    for (std::size_t c = 0; c < p; ++c)
      M[row * p + c] = 2.0L * std::pow(static_cast<long double>(c + 1), q);
  }
  b[0] = 1.0L;
  const auto x = detail::solve_small(std::move(M), std::move(b));
  return {x.begin(), x.end()};
}

struct StencilCoeffs {
  std::size_t p = 1;
  std::vector<double> upwind;    // offsets -p..0
  std::vector<double> centered;  // offsets 1..p, antisymmetric

  static StencilCoeffs generate(std::size_t p) {
    if (p % 2 == 0) throw ValidationError("stencil width p must be odd");
    return {p, gen_upwind_coeffs(p), gen_centered_coeffs(p)};
  }
};

/// h * d(omega)/dx with the published order-3 centered weights.
inline std::vector<double> centered_diff_p3(std::span<const double> omega, Boundary bc) {
  const std::size_t n = omega.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    double s = 0.0;
    for (std::ptrdiff_t k = 3; k >= 1; --k)
      s += kCenteredP3[static_cast<std::size_t>(k - 1)] *
           (omega[neighbor_index(ii + k, n, bc)] - omega[neighbor_index(ii - k, n, bc)]);
    d[i] = s;
  }
  return d;
}

/// h * d(omega)/dx with the three-point centered difference.
inline std::vector<double> centered_diff_o1(std::span<const double> omega, Boundary bc) {
  const std::size_t n = omega.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    d[i] = 0.5 * (omega[neighbor_index(ii + 1, n, bc)] - omega[neighbor_index(ii - 1, n, bc)]);
  }
  return d;
}

}  // namespace twofluid
