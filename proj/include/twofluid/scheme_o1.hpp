#pragma once

// Order-1 building blocks of the splitting scheme: explicit upwind transport,
// three-point averaging, viscous increment, and the pressure corrections of
// both model forms. The corrections take the centered-difference operator as
// a parameter so the order-3 scheme reuses them with its wider stencil.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "twofluid/closure.hpp"
#include "twofluid/errors.hpp"
#include "twofluid/parallel.hpp"
#include "twofluid/state.hpp"
#include "twofluid/stencils.hpp"

namespace twofluid {

/// Returns h * d/dx of a cell array under a boundary policy.
using CenteredDiff = std::vector<double> (*)(std::span<const double>, Boundary);

inline double positive_part(double v) noexcept { return v > 0.0 ? v : 0.0; }
inline double negative_part(double v) noexcept { return v < 0.0 ? -v : 0.0; }

inline void check_cfl(std::span<const double> v, double r) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw NumericalError(NumericalErrorKind::NonFinite, "non-finite velocity").with_cell(i);
    if (std::abs(v[i]) * r > 1.0) {
      std::ostringstream os;
      os << "|v| r = " << std::abs(v[i]) * r << " exceeds 1";
      throw NumericalError(NumericalErrorKind::CflViolation, os.str()).with_cell(i);
    }
  }
}

/// omega_i + r [omega_{i-1} v+_{i-1} - omega_i |v_i| + omega_{i+1} v-_{i+1}].
inline std::vector<double> upwind_transport(std::span<const double> omega, std::span<const double> v,
                                            double r, Boundary bc, int threads = 1) {
  check_cfl(v, r);
  const std::size_t n = omega.size();
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const std::size_t im = neighbor_index(ii - 1, n, bc);
    const std::size_t ip = neighbor_index(ii + 1, n, bc);
    out[i] = omega[i] + r * (omega[im] * positive_part(v[im]) - omega[i] * std::abs(v[i]) +
                             omega[ip] * negative_part(v[ip]));
  });
  return out;
}

/// a q_{i-1} + (1 - 2a) q_i + a q_{i+1}, written so constants are preserved exactly.
inline std::vector<double> average_o1(std::span<const double> omega, double a, Boundary bc, int threads = 1) {
  if (!(a >= 0.0 && a < 0.5)) throw ValidationError("average_o1: a must lie in [0, 1/2)");
  const std::size_t n = omega.size();
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const double left = omega[neighbor_index(ii - 1, n, bc)];
    const double right = omega[neighbor_index(ii + 1, n, bc)];
    out[i] = omega[i] + a * ((left - omega[i]) + (right - omega[i]));
  });
  return out;
}

/// omega_i + (r mu / h)(omega_{i+1} - 2 omega_i + omega_{i-1}).
inline std::vector<double> viscous_increment(std::span<const double> omega, double mu, double r, double h,
                                             Boundary bc) {
  if (!(mu >= 0.0)) throw ValidationError("viscous_increment: mu must be >= 0");
  const double k = r * mu / h;
  if (k > 0.5) {
    std::ostringstream os;
    os << "r mu / h = " << k << " exceeds 1/2";
    throw NumericalError(NumericalErrorKind::DiffusionStability, os.str());
  }
  const std::size_t n = omega.size();
  std::vector<double> out(omega.begin(), omega.end());
  if (k == 0.0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const double left = omega[neighbor_index(ii - 1, n, bc)];
    const double right = omega[neighbor_index(ii + 1, n, bc)];
    out[i] = omega[i] + k * ((left - omega[i]) + (right - omega[i]));
  }
  return out;
}

struct CorrectionParams {
  double r = 0.0;
  double h = 0.0;
  double g = 0.0;
  Boundary bc = Boundary::Transmissive;
  CenteredDiff diff = &centered_diff_o1;
};

/// Canonical-form pressure correction from the averaged fields `bar` (energy
/// slot F_j) and their closure. Returns (r_j, m_j^{n+1}, F_j^*); p_prev is
/// carried over from `bar`.
inline FieldSet pressure_correction_canonical(const FieldSet& bar, const ClosureOut& cl,
                                              const CorrectionParams& cp) {
  const std::size_t n = bar.size();
  const auto d_alpha = cp.diff(cl.alpha[0], cp.bc);
  const auto d_p = cp.diff(cl.p, cp.bc);
  const double rhg = cp.r * cp.h * cp.g;

  FieldSet out = bar;
  for (std::size_t i = 0; i < n; ++i) {
    const double interface = cp.r * cl.dp[i] * d_alpha[i];
    const double work = cl.v_tau[i] * interface;
    out.m[0][i] = bar.m[0][i] - interface - cp.r * cl.alpha[0][i] * d_p[i] + rhg * bar.r[0][i];
    out.m[1][i] = bar.m[1][i] + interface - cp.r * cl.alpha[1][i] * d_p[i] + rhg * bar.r[1][i];
    out.e[0][i] = bar.e[0][i] - work + rhg * bar.m[0][i];
    out.e[1][i] = bar.e[1][i] + work + rhg * bar.m[1][i];
  }
  return out;
}

/// The energy flux terms T_1, T_2 of the solved form, built from time-n
/// closure values. `diff` returns half central differences, so the full
/// differences (omega_{i+1} - omega_{i-1}) below are 2 * diff.
inline PerPhase<std::vector<double>> flux_terms(const ClosureOut& cl, Boundary bc,
                                                CenteredDiff diff = &centered_diff_o1) {
  const std::size_t n = cl.size();
  std::vector<double> a1v1(n), a2v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    a1v1[i] = cl.alpha[0][i] * cl.v[0][i];
    a2v2[i] = cl.alpha[1][i] * cl.v[1][i];
  }
  auto full = [&](std::span<const double> w) {
    auto d = diff(w, bc);
    for (auto& x : d) x *= 2.0;
    return d;
  };
  const auto jp = full(cl.p);
  const auto ja = full(cl.alpha[0]);
  const auto j1 = full(a1v1);
  const auto j2 = full(a2v2);

  PerPhase<std::vector<double>> T{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double a1 = cl.alpha[0][i], a2 = cl.alpha[1][i];
    const double v1 = cl.v[0][i], v2 = cl.v[1][i];
    const double eta = cl.eta[i];
    const double slip = eta * a1 * a2 * (v1 - v2) * jp[i];
    const double work = cl.v_tau[i] * cl.dp[i] * ja[i];
    const double k1 = eta * cl.rho[1][i] * a1 * cl.c_sq[1][i];
    const double k2 = eta * cl.rho[0][i] * a2 * cl.c_sq[0][i];
    T[0][i] = a1 * v1 * jp[i] - slip + k1 * j1[i] + k1 * j2[i] + work;
    T[1][i] = a2 * v2 * jp[i] + slip + k2 * j1[i] + k2 * j2[i] - work;
  }
  return T;
}

/// Solved-form pressure correction. `bar` holds the averaged (r, m, E);
/// `now` the time-n fields and `cl` their closure.
inline FieldSet pressure_correction_solved(const FieldSet& bar, const FieldSet& now, const ClosureOut& cl,
                                           const CorrectionParams& cp) {
  const std::size_t n = bar.size();
  const auto d_alpha = cp.diff(cl.alpha[0], cp.bc);
  const auto d_p = cp.diff(cl.p, cp.bc);
  const auto T = flux_terms(cl, cp.bc, cp.diff);
  const double rhg = cp.r * cp.h * cp.g;

  FieldSet out = bar;
  for (std::size_t i = 0; i < n; ++i) {
    const double interface = cp.r * cl.dp[i] * d_alpha[i];
    out.m[0][i] = bar.m[0][i] - interface - cp.r * cl.alpha[0][i] * d_p[i] + rhg * now.r[0][i];
    out.m[1][i] = bar.m[1][i] + interface - cp.r * cl.alpha[1][i] * d_p[i] + rhg * now.r[1][i];
    for (std::size_t j = 0; j < kPhases; ++j)
      out.e[j][i] = bar.e[j][i] - 0.5 * cp.r * T[j][i] + rhg * now.m[j][i];
    out.p_prev[i] = cl.p[i];
  }
  return out;
}

}  // namespace twofluid
