#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "twofluid/twofluid.hpp"

namespace twofluid::testing {

inline EosParams toumi_eos() {
  EosParams eos;
  eos.phase[0] = {1.4, 0.0};
  eos.phase[1] = {2.8, 8.5e8};
  return eos;
}

inline EosParams random_eos(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> K(1.1, 3.0), pinf(0.0, 1e9);
  EosParams eos;
  eos.phase[0] = {K(rng), 0.0};
  eos.phase[1] = {K(rng), pinf(rng)};
  return eos;
}

/// An admissible primitive state with gas-like phase 1 and liquid-like phase 2.
inline Primitive random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> alpha(0.02, 0.98), rho1(1.0, 300.0), rho2(500.0, 1200.0),
      v(-50.0, 50.0), p(1e5, 5e7);
  Primitive w;
  w.alpha1 = alpha(rng);
  w.rho = {rho1(rng), rho2(rng)};
  w.v = {v(rng), v(rng)};
  w.p = p(rng);
  return w;
}

inline Conserved to_canonical(const Primitive& w, const EosParams& eos) {
  Conserved u = primitives_to_conserved(w, eos);
  for (std::size_t j = 0; j < kPhases; ++j) u.e[j] += w.p * w.alpha(j);
  return u;
}

inline double rel_err(double got, double want, double floor = 0.0) {
  return std::abs(got - want) / std::max({std::abs(want), floor, 1e-300});
}

/// Worst component error of a recovered closure against the primitive it came from.
/// Velocities are measured against max(|v|, 1 m/s).
inline double primitive_error(const CellClosure& c, const Primitive& w) {
  double e = rel_err(c.alpha[0], w.alpha1);
  e = std::max(e, rel_err(c.p, w.p));
  for (std::size_t j = 0; j < kPhases; ++j) {
    e = std::max(e, rel_err(c.rho[j], w.rho[j]));
    e = std::max(e, rel_err(c.v[j], w.v[j], 1.0));
  }
  return e;
}

inline CaseSpec load_case(const std::string& file) { return parse_case_file(std::string(TWOFLUID_CASES_DIR) + "/" + file); }

inline CaseSpec resized(CaseSpec cs, std::size_t cells) {
  const double length = cs.grid.length();
  cs.grid.n_cells = cells;
  cs.grid.h = length / static_cast<double>(cells);
  return cs;
}

/// Single-snapshot run at t_end with no file plan.
inline CaseSpec final_only(CaseSpec cs) {
  cs.output = {};
  return cs;
}

/// A uniform periodic case of n cells.
inline CaseSpec uniform_case(std::size_t n, const Primitive& w, Form form, Order order) {
  CaseSpec cs;
  cs.name = "uniform";
  cs.grid = {n, 1.0, 0.0};
  cs.eos = toumi_eos();
  cs.model.form = form;
  cs.model.order = order;
  cs.model.r = order == Order::P1 ? 0.0012 : 0.0002;
  cs.model.a = order == Order::P1 ? 0.3 : 0.025;
  cs.left = cs.right = w;
  cs.interface_position = 0.5 * static_cast<double>(n);
  cs.boundary = Boundary::Periodic;
  return cs;
}

inline Primitive toumi_left() {
  Primitive w;
  w.alpha1 = 0.25;
  w.rho = {226.14444637295406, 1049.1640062219044};
  w.v = {0.0, 0.0};
  w.p = 2.0e7;
  return w;
}

}  // namespace twofluid::testing
