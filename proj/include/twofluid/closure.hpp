#pragma once

// Algebraic recovery of primitive and interface quantities from conserved
// values. alpha1 is the root in (0,1) of A X^2 + B X + C = 0; the two
// coefficient routes differ in whether the energy slot carries F_j = E_j +
// p_prev alpha_j (canonical form) or E_j (solved form).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "twofluid/errors.hpp"
#include "twofluid/parallel.hpp"
#include "twofluid/state.hpp"

namespace twofluid {

struct QuadCoeffs {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

inline constexpr double kDegenerateQuadratic = 1e-12;
inline constexpr double kRootMargin = 1e-14;
inline constexpr double kPressureAgreement = 1e-9;

/// Coefficients for the canonical form; `F` are the F_j = E_j + p_prev alpha_j slots.
inline QuadCoeffs quad_coeffs_canonical(const PerPhase<double>& F, const PerPhase<double>& m,
                                        const PerPhase<double>& v, double p_prev,
                                        const EosParams& eos) {
  const double K1 = eos.K(0), K2 = eos.K(1);
  const double pi1 = eos.p_inf(0), pi2 = eos.p_inf(1);
  QuadCoeffs q;
  q.A = (K1 - 1.0) * p_prev + K1 * pi1 - (K2 - 1.0) * p_prev - K2 * pi2;
  q.B = -(K1 - 1.0) * F[0] - (K2 - 1.0) * F[1] - K1 * pi1 + K2 * pi2 +
        0.5 * (K1 - 1.0) * m[0] * v[0] + 0.5 * (K2 - 1.0) * m[1] * v[1] + (K2 - K1) * p_prev;
  q.C = (K1 - 1.0) * F[0] - 0.5 * (K1 - 1.0) * m[0] * v[0];
  return q;
}

/// Coefficients for the solved form; A does not depend on the pressure here.
inline QuadCoeffs quad_coeffs_solved(const PerPhase<double>& E, const PerPhase<double>& m,
                                     const PerPhase<double>& v, const EosParams& eos) {
  const double K1 = eos.K(0), K2 = eos.K(1);
  const double pi1 = eos.p_inf(0), pi2 = eos.p_inf(1);
  QuadCoeffs q;
  q.A = K1 * pi1 - K2 * pi2;
  q.B = -(K1 - 1.0) * E[0] - (K2 - 1.0) * E[1] - K1 * pi1 + K2 * pi2 +
        0.5 * (K1 - 1.0) * m[0] * v[0] + 0.5 * (K2 - 1.0) * m[1] * v[1];
  q.C = (K1 - 1.0) * E[0] - 0.5 * (K1 - 1.0) * m[0] * v[0];
  return q;
}

namespace detail {
inline bool admissible_fraction(double x) noexcept {
  return x > kRootMargin && x < 1.0 - kRootMargin;
}

inline std::string describe(const QuadCoeffs& q) {
  std::ostringstream os;
  os.precision(17);
  os << "A=" << q.A << " B=" << q.B << " C=" << q.C;
  return os.str();
}
}  // namespace detail

/// The unique root of A X^2 + B X + C in the open interval (0,1).
inline double solve_alpha(const QuadCoeffs& q) {
  if (!std::isfinite(q.A) || !std::isfinite(q.B) || !std::isfinite(q.C))
    throw NumericalError(NumericalErrorKind::NonFinite, "non-finite quadratic " + detail::describe(q));

  if (std::abs(q.A) <= kDegenerateQuadratic * std::max(std::abs(q.B), std::abs(q.C))) {
    if (q.B == 0.0)
      throw NumericalError(NumericalErrorKind::NoAdmissibleRoot, "degenerate quadratic " + detail::describe(q));
    const double x = -q.C / q.B;
    if (!detail::admissible_fraction(x))
      throw NumericalError(NumericalErrorKind::NoAdmissibleRoot, "linear root outside (0,1), " + detail::describe(q));
    return x;
  }

  const double disc = q.B * q.B - 4.0 * q.A * q.C;
  if (disc < 0.0)
    throw NumericalError(NumericalErrorKind::NoAdmissibleRoot, "complex roots, " + detail::describe(q));
  const double s = std::sqrt(disc);
  const double t = -0.5 * (q.B + std::copysign(s, q.B));
  const double x1 = t / q.A;
  const double x2 = t != 0.0 ? q.C / t : x1;

  const bool ok1 = detail::admissible_fraction(x1);
  const bool ok2 = detail::admissible_fraction(x2) && x2 != x1;
  if (ok1 && ok2)
    throw NumericalError(NumericalErrorKind::TwoAdmissibleRoots, "both roots in (0,1), " + detail::describe(q));
  if (ok1) return x1;
  if (ok2) return x2;
  throw NumericalError(NumericalErrorKind::NoAdmissibleRoot, "no root in (0,1), " + detail::describe(q));
}

/// Interface pressure correction (delta-weighted) and interface velocity.
struct InterfaceTerms {
  double dp = 0.0;
  double v_tau = 0.0;
};

inline InterfaceTerms interface_terms(double alpha1, double alpha2, double rho1, double rho2,
                                      double v1, double v2, double delta, const EosParams& eos) {
  const double dv = v1 - v2;
  InterfaceTerms t;
  t.dp = delta * (alpha1 * alpha2 * rho1 * rho2) / (rho1 * alpha2 + rho2 * alpha1) * dv * dv;
  const double g1 = eos.gamma(0), g2 = eos.gamma(1);
  t.v_tau = (alpha2 * g1 * v1 + alpha1 * g2 * v2) / (alpha2 * g1 + alpha1 * g2);
  return t;
}

/// Everything the corrections need about one cell.
struct CellClosure {
  PerPhase<double> alpha{};
  PerPhase<double> rho{};
  PerPhase<double> v{};
  PerPhase<double> E{};
  PerPhase<double> p_phase{};
  PerPhase<double> c_sq{};  // squared sound speeds, (p + K_j p_inf_j) / rho_j
  double p = 0.0;
  double eta = 0.0;
  double dp = 0.0;
  double v_tau = 0.0;

  Primitive primitive() const { return Primitive{alpha[0], rho, v, p}; }
};

namespace detail {
inline void finish_cell(CellClosure& c, double alpha1, const Conserved& u,
                        const PerPhase<double>& E, double delta, const EosParams& eos) {
  c.alpha = {alpha1, 1.0 - alpha1};
  c.E = E;
  for (std::size_t j = 0; j < kPhases; ++j) {
    c.rho[j] = u.r[j] / c.alpha[j];
    c.p_phase[j] =
        eos.gamma(j) * (E[j] / c.alpha[j] - 0.5 * c.rho[j] * c.v[j] * c.v[j]) - eos.K(j) * eos.p_inf(j);
  }
  const double scale = std::max({std::abs(c.p_phase[0]), std::abs(c.p_phase[1]), 1.0});
  if (!(std::abs(c.p_phase[0] - c.p_phase[1]) <= kPressureAgreement * scale)) {
    std::ostringstream os;
    os.precision(17);
    os << "phase pressures disagree: p1=" << c.p_phase[0] << " p2=" << c.p_phase[1];
    throw NumericalError(NumericalErrorKind::ClosureInconsistency, os.str());
  }
  c.p = 0.5 * (c.p_phase[0] + c.p_phase[1]);
  for (std::size_t j = 0; j < kPhases; ++j) c.c_sq[j] = (c.p + eos.K(j) * eos.p_inf(j)) / c.rho[j];
  c.eta = c.p / (c.c_sq[1] * c.alpha[0] * c.rho[1] + c.c_sq[0] * c.alpha[1] * c.rho[0]);
  const auto it = interface_terms(c.alpha[0], c.alpha[1], c.rho[0], c.rho[1], c.v[0], c.v[1], delta, eos);
  c.dp = it.dp;
  c.v_tau = it.v_tau;
}
}  // namespace detail

/// Canonical-form recovery. `u.e` carries F_j; E_j = F_j - p_prev alpha_j.
inline CellClosure recover_canonical_cell(const Conserved& u, double p_prev, double delta,
                                          const EosParams& eos) {
  CellClosure c;
  for (std::size_t j = 0; j < kPhases; ++j) c.v[j] = u.m[j] / u.r[j];
  const double alpha1 = solve_alpha(quad_coeffs_canonical(u.e, u.m, c.v, p_prev, eos));
  const PerPhase<double> E{u.e[0] - p_prev * alpha1, u.e[1] - p_prev * (1.0 - alpha1)};
  detail::finish_cell(c, alpha1, u, E, delta, eos);
  return c;
}

/// Solved-form recovery; `u.e` carries E_j directly.
inline CellClosure recover_solved_cell(const Conserved& u, double delta, const EosParams& eos) {
  CellClosure c;
  for (std::size_t j = 0; j < kPhases; ++j) c.v[j] = u.m[j] / u.r[j];
  const double alpha1 = solve_alpha(quad_coeffs_solved(u.e, u.m, c.v, eos));
  detail::finish_cell(c, alpha1, u, u.e, delta, eos);
  for (std::size_t j = 0; j < kPhases; ++j)
    if (!(c.c_sq[j] > 0.0))
      throw NumericalError(NumericalErrorKind::SoundSpeed,
                           "non-positive c" + std::to_string(j + 1) + "^2 = " + std::to_string(c.c_sq[j]));
  return c;
}

/// Per-cell closure arrays.
struct ClosureOut {
  PerPhase<std::vector<double>> alpha;
  PerPhase<std::vector<double>> rho;
  PerPhase<std::vector<double>> v;
  PerPhase<std::vector<double>> E;
  PerPhase<std::vector<double>> c_sq;
  std::vector<double> p;
  std::vector<double> eta;
  std::vector<double> dp;
  std::vector<double> v_tau;

  ClosureOut() = default;
  explicit ClosureOut(std::size_t n) : p(n), eta(n), dp(n), v_tau(n) {
    for (std::size_t j = 0; j < kPhases; ++j) {
      alpha[j].resize(n);
      rho[j].resize(n);
      v[j].resize(n);
      E[j].resize(n);
      c_sq[j].resize(n);
    }
  }

  std::size_t size() const noexcept { return p.size(); }

  void store(std::size_t i, const CellClosure& c) {
    for (std::size_t j = 0; j < kPhases; ++j) {
      alpha[j][i] = c.alpha[j];
      rho[j][i] = c.rho[j];
      v[j][i] = c.v[j];
      E[j][i] = c.E[j];
      c_sq[j][i] = c.c_sq[j];
    }
    p[i] = c.p;
    eta[i] = c.eta;
    dp[i] = c.dp;
    v_tau[i] = c.v_tau;
  }
};

inline Conserved cell_of(const FieldSet& f, std::size_t i) {
  Conserved u;
  for (std::size_t j = 0; j < kPhases; ++j) {
    u.r[j] = f.r[j][i];
    u.m[j] = f.m[j][i];
    u.e[j] = f.e[j][i];
  }
  return u;
}

/// Field-wide canonical recovery with pressure memory `p_prev` (one value per cell).
inline ClosureOut recover_canonical(const FieldSet& f, const std::vector<double>& p_prev, double delta,
                                    const EosParams& eos, int threads = 1) {
  ClosureOut out(f.size());
  parallel_for(f.size(), threads, [&](std::size_t i) {
    try {
      out.store(i, recover_canonical_cell(cell_of(f, i), p_prev[i], delta, eos));
    } catch (const NumericalError& e) {
      throw e.with_cell(i);
    }
  });
  return out;
}

inline ClosureOut recover_solved(const FieldSet& f, double delta, const EosParams& eos, int threads = 1) {
  ClosureOut out(f.size());
  parallel_for(f.size(), threads, [&](std::size_t i) {
    try {
      out.store(i, recover_solved_cell(cell_of(f, i), delta, eos));
    } catch (const NumericalError& e) {
      throw e.with_cell(i);
    }
  });
  return out;
}

}  // namespace twofluid
