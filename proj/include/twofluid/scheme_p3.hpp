#pragma once

// Order-3 spatial building blocks: implicit upwind transport on a 7-diagonal
// band, implicit sixth-difference smoothing, the wide centered corrections,
// and the final post-treatment.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "twofluid/banded.hpp"
#include "twofluid/scheme_o1.hpp"
#include "twofluid/stencils.hpp"

namespace twofluid {

/// Solves (I + r Q) omega^{n+1} = omega^n, where Q applies the one-sided
/// upwind weights to v+ omega on offsets -p..0 and their mirror to v- omega on
/// offsets 0..p. `upwind` holds the weights for offsets -p..0.
inline std::vector<double> transport_p3(std::span<const double> omega, std::span<const double> v, double r,
                                        std::span<const double> upwind, Boundary bc) {
  const std::size_t n = omega.size();
  const std::size_t p = upwind.size() - 1;
  const auto pp = static_cast<std::ptrdiff_t>(p);
  StencilSystem sys(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    sys(i, 0) += 1.0;
    for (std::ptrdiff_t o = -pp; o <= 0; ++o) {
      const double w = upwind[static_cast<std::size_t>(o + pp)];
      sys(i, o) += r * w * positive_part(v[neighbor_index(ii + o, n, bc)]);
      sys(i, -o) += r * w * negative_part(v[neighbor_index(ii - o, n, bc)]);
    }
  }
  return sys.solve(omega, bc);
}

inline std::vector<double> transport_p3(std::span<const double> omega, std::span<const double> v, double r,
                                        Boundary bc) {
  return transport_p3(omega, v, r, kUpwindP3, bc);
}

/// Implicit smoothing (I + a S) omega^{n+1} = omega^n with S the negated
/// sixth difference (-1, 6, -15, 20, -15, 6, -1). S is positive
/// semi-definite, so the step damps and is solvable for every a >= 0.
inline std::vector<double> average_p3(std::span<const double> omega, double a, Boundary bc) {
  if (!(a >= 0.0)) throw ValidationError("average_p3: a must be >= 0");
  if (a == 0.0) return {omega.begin(), omega.end()};
  const std::size_t n = omega.size();
  StencilSystem sys(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t o = -3; o <= 3; ++o) sys(i, o) = a * kSmoothingP3[static_cast<std::size_t>(o + 3)];
    sys(i, 0) += 1.0;
  }
  return sys.solve(omega, bc);
}

/// Replaces each value by the mean over cells i-w..i+w (clipped at the ends).
inline std::vector<double> post_treatment(std::span<const double> omega, std::size_t w) {
  const std::size_t n = omega.size();
  std::vector<double> out(omega.begin(), omega.end());
  if (w == 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= w ? i - w : 0;
    const std::size_t hi = std::min(n - 1, i + w);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) s += omega[k];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

inline FieldSet pressure_correction_p3_canonical(const FieldSet& bar, const ClosureOut& cl, CorrectionParams cp) {
  cp.diff = &centered_diff_p3;
  return pressure_correction_canonical(bar, cl, cp);
}

inline FieldSet pressure_correction_p3_solved(const FieldSet& bar, const FieldSet& now, const ClosureOut& cl,
                                              CorrectionParams cp) {
  cp.diff = &centered_diff_p3;
  return pressure_correction_solved(bar, now, cl, cp);
}

}  // namespace twofluid
