#pragma once

// Core data types shared by every step of the scheme: equation-of-state
// constants, model switches, the grid, and the per-cell field arrays.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "twofluid/errors.hpp"

namespace twofluid {

inline constexpr std::size_t kPhases = 2;

template <class T>
using PerPhase = std::array<T, kPhases>;

/// Stiffened-gas constants of one phase: p = (K-1)(E/alpha - rho v^2/2) - K p_inf.
struct PhaseEos {
  double K = 1.4;
  double p_inf = 0.0;

  double gamma() const noexcept { return K - 1.0; }
};

struct EosParams {
  PerPhase<PhaseEos> phase{};

  double K(std::size_t j) const noexcept { return phase[j].K; }
  double p_inf(std::size_t j) const noexcept { return phase[j].p_inf; }
  double gamma(std::size_t j) const noexcept { return phase[j].gamma(); }

  void validate() const {
    for (std::size_t j = 0; j < kPhases; ++j) {
      const auto n = std::to_string(j + 1);
      if (!(phase[j].K > 1.0)) throw ValidationError("eos: K" + n + " must be > 1");
      if (!(phase[j].p_inf >= 0.0)) throw ValidationError("eos: p_inf" + n + " must be >= 0");
    }
  }
};

enum class Form { Canonical, Solved };
enum class Order { P1, P3 };
enum class Boundary { Transmissive, Periodic };

/// Which values feed the closure of the solved form. TimeN is the published
/// choice; Bar closes on the averaged values (experimental).
enum class SolvedClosureStage { TimeN, Bar };
// Energy slot fed to the canonical pressure correction: F_j re-expressed with
// the bar-stage pressure (Rebased), or the transported F_j as is (Literal).
enum class CorrectionBase { Rebased, Literal };

inline std::size_t stencil_halfwidth(Order order) { return order == Order::P1 ? 1 : 3; }

struct ModelConfig {
  double delta = 2.0;
  Form form = Form::Canonical;
  Order order = Order::P1;
  double r = 0.0012;  // dt / h
  double a = 0.3;     // averaging weight
  double g = 0.0;     // gravity along the tube
  PerPhase<double> mu{0.0, 0.0};
  std::size_t post_treatment_halfwidth = 0;
  SolvedClosureStage solved_closure = SolvedClosureStage::TimeN;
  CorrectionBase correction_base = CorrectionBase::Rebased;

  void validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("model: r must be > 0");
    if (!(delta >= 0.0)) throw ValidationError("model: delta must be >= 0");
    if (!std::isfinite(g)) throw ValidationError("model: g must be finite");
    if (!(mu[0] >= 0.0) || !(mu[1] >= 0.0)) throw ValidationError("model: mu1, mu2 must be >= 0");
    if (order == Order::P1) {
      if (!(a >= 0.0 && a < 0.5)) throw ValidationError("model: a must lie in [0, 1/2) for order 1");
    } else if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ValidationError("model: a must be >= 0 for order 3");
    }
  }
};

struct Grid {
  std::size_t n_cells = 0;
  double h = 0.0;
  double x0 = 0.0;

  double center(std::size_t i) const noexcept { return x0 + (static_cast<double>(i) + 0.5) * h; }
  double length() const noexcept { return h * static_cast<double>(n_cells); }

  void validate(Order order) const {
    const auto min_cells = 2 * stencil_halfwidth(order) + 1;
    if (n_cells < min_cells)
      throw ValidationError("grid: n_cells must be >= " + std::to_string(min_cells));
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("grid: h must be > 0");
  }
};

/// Index of the cell read as neighbor `i` (possibly a ghost) of an n-cell array.
/// Transmissive ghosts copy the nearest interior cell.
inline std::size_t neighbor_index(std::ptrdiff_t i, std::size_t n, Boundary bc) noexcept {
  const auto ni = static_cast<std::ptrdiff_t>(n);
  if (bc == Boundary::Periodic) return static_cast<std::size_t>(((i % ni) + ni) % ni);
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, ni - 1));
}

/// Conserved arrays. `e` holds E_j for the solved form and F_j = E_j + p alpha_j
/// for the canonical form; `p_prev` is the pressure memory of the closure.
struct FieldSet {
  PerPhase<std::vector<double>> r;
  PerPhase<std::vector<double>> m;
  PerPhase<std::vector<double>> e;
  std::vector<double> p_prev;

  FieldSet() = default;
  explicit FieldSet(std::size_t n) : p_prev(n, 0.0) {
    for (std::size_t j = 0; j < kPhases; ++j) {
      r[j].assign(n, 0.0);
      m[j].assign(n, 0.0);
      e[j].assign(n, 0.0);
    }
  }

  std::size_t size() const noexcept { return p_prev.size(); }

  bool consistent() const noexcept {
    const auto n = size();
    for (std::size_t j = 0; j < kPhases; ++j)
      if (r[j].size() != n || m[j].size() != n || e[j].size() != n) return false;
    return true;
  }
};

/// Primitive state of one cell.
struct Primitive {
  double alpha1 = 0.5;
  PerPhase<double> rho{1.0, 1.0};
  PerPhase<double> v{0.0, 0.0};
  double p = 0.0;

  double alpha(std::size_t j) const noexcept { return j == 0 ? alpha1 : 1.0 - alpha1; }
};

/// Conserved state of one cell; `e` is E_j (energy density, not F_j).
struct Conserved {
  PerPhase<double> r{};
  PerPhase<double> m{};
  PerPhase<double> e{};
};

/// Throws ValidationError unless 0 < alpha1 < 1, rho_j > 0 and p + K_j p_inf_j > 0.
inline void validate_primitive(const Primitive& w, const EosParams& eos, const std::string& where) {
  if (!(w.alpha1 > 0.0 && w.alpha1 < 1.0))
    throw ValidationError(where + ": alpha1 must lie in (0, 1)");
  for (std::size_t j = 0; j < kPhases; ++j) {
    const auto n = std::to_string(j + 1);
    if (!(w.rho[j] > 0.0) || !std::isfinite(w.rho[j]))
      throw ValidationError(where + ": rho" + n + " must be > 0");
    if (!std::isfinite(w.v[j])) throw ValidationError(where + ": v" + n + " must be finite");
  }
  if (!std::isfinite(w.p)) throw ValidationError(where + ": p must be finite");
  for (std::size_t j = 0; j < kPhases; ++j)
    if (!(w.p + eos.K(j) * eos.p_inf(j) > 0.0))
      throw ValidationError(where + ": p must exceed -K" + std::to_string(j + 1) + " p_inf" +
                            std::to_string(j + 1));
}

/// Inverts the state laws: E_j = alpha_j [(p + K_j p_inf_j)/(K_j - 1) + rho_j v_j^2 / 2].
inline Conserved primitives_to_conserved(const Primitive& w, const EosParams& eos) {
  for (std::size_t j = 0; j < kPhases; ++j)
    if (!(w.alpha(j) > 0.0) || !(w.rho[j] > 0.0))
      throw ValidationError("primitives_to_conserved: alpha_j and rho_j must be positive");
  Conserved u;
  for (std::size_t j = 0; j < kPhases; ++j) {
    const double alpha = w.alpha(j);
    u.r[j] = w.rho[j] * alpha;
    u.m[j] = u.r[j] * w.v[j];
    u.e[j] = alpha * ((w.p + eos.K(j) * eos.p_inf(j)) / eos.gamma(j) +
                      0.5 * w.rho[j] * w.v[j] * w.v[j]);
  }
  return u;
}

struct OutputPlan {
  std::vector<double> times;
  std::vector<std::string> files;
};

enum class FinalStep { Snap, Shorten };

struct CaseSpec {
  std::string name = "case";
  Grid grid{};
  double t_end = 0.0;
  Primitive left{};
  Primitive right{};
  double interface_position = 0.0;
  EosParams eos{};
  ModelConfig model{};
  Boundary boundary = Boundary::Transmissive;
  FinalStep final_step = FinalStep::Snap;
  bool check_boundaries = true;
  double boundary_tolerance = 1e-8;  // relative change allowed in the end cells at t_end
  OutputPlan output{};

  void validate() const {
    eos.validate();
    model.validate();
    grid.validate(model.order);
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("run: t_end must be >= 0");
    if (!(boundary_tolerance >= 0.0)) throw ValidationError("run: boundary_tolerance must be >= 0");
    validate_primitive(left, eos, "left");
    validate_primitive(right, eos, "right");
    if (output.files.size() != output.times.size())
      throw ValidationError("output: times and files must have the same length");
    for (double t : output.times)
      if (!(t >= 0.0 && t <= t_end * (1.0 + 1e-12) + 1e-300))
        throw ValidationError("output: snapshot times must lie in [0, t_end]");
  }
};

}  // namespace twofluid
