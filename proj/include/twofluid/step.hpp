#pragma once

// One full time step of the splitting scheme for either model form and
// either spatial order.
//
// Canonical form (energy slot F_j):
//   transport -> averaging -> closure with p^n -> pressure correction
//   [-> second implicit averaging, order 3] -> closure with the averaged-stage
//   pressure -> F_j^{n+1} = E_j^{n+1} + p^{n+1} alpha_j^{n+1}.
//   By default F-bar is rewritten as E-bar + p-bar alpha-bar before the
//   correction; without that, the pressure change of the transport stage
//   drops out of the energy balance and acoustic waves run too slowly.
// Solved form (energy slot E_j):
//   transport -> averaging -> closure of the time-n values -> correction with
//   the flux terms T_j [-> second implicit averaging, order 3].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "twofluid/closure.hpp"
#include "twofluid/scheme_o1.hpp"
#include "twofluid/scheme_p3.hpp"
#include "twofluid/state.hpp"

namespace twofluid {

inline constexpr double kVacuumFraction = 1e-12;

struct StepContext {
  EosParams eos{};
  ModelConfig model{};
  double h = 1.0;
  Boundary bc = Boundary::Transmissive;
  int threads = 1;
};

struct StepDiagnostics {
  PerPhase<double> mass_before{};
  PerPhase<double> mass_after_transport{};
  double cfl = 0.0;
};

inline PerPhase<std::vector<double>> velocities(const FieldSet& f) {
  PerPhase<std::vector<double>> v;
  for (std::size_t j = 0; j < kPhases; ++j) {
    v[j].resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[j][i] = f.m[j][i] / f.r[j][i];
  }
  return v;
}

/// Rejects non-finite values and (near-)vacuum partial densities.
inline void check_fields(const FieldSet& f) {
  for (std::size_t j = 0; j < kPhases; ++j) {
    const auto& r = f.r[j];
    double r_max = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i]) || !std::isfinite(f.m[j][i]) || !std::isfinite(f.e[j][i]))
        throw NumericalError(NumericalErrorKind::NonFinite, "non-finite conserved value").with_cell(i);
      r_max = std::max(r_max, r[i]);
    }
    for (std::size_t i = 0; i < r.size(); ++i)
      if (!(r[i] > kVacuumFraction * r_max))
        throw NumericalError(NumericalErrorKind::Vacuum,
                             "partial density r" + std::to_string(j + 1) + " collapsed").with_cell(i);
  }
}

inline double max_cfl(const PerPhase<std::vector<double>>& v, double r) {
  double m = 0.0;
  for (const auto& vj : v)
    for (double x : vj) m = std::max(m, std::abs(x) * r);
  return m;
}

namespace detail {
inline std::vector<double> transport(const std::vector<double>& w, const std::vector<double>& v,
                                     const StepContext& ctx) {
  if (ctx.model.order == Order::P1) return upwind_transport(w, v, ctx.model.r, ctx.bc, ctx.threads);
  return transport_p3(w, v, ctx.model.r, ctx.bc);
}

inline std::vector<double> average(const std::vector<double>& w, const StepContext& ctx) {
  if (ctx.model.order == Order::P1) return average_o1(w, ctx.model.a, ctx.bc, ctx.threads);
  return average_p3(w, ctx.model.a, ctx.bc);
}

inline CorrectionParams correction_params(const StepContext& ctx) {
  return {ctx.model.r, ctx.h, ctx.model.g, ctx.bc,
          ctx.model.order == Order::P1 ? &centered_diff_o1 : &centered_diff_p3};
}

inline double total(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}
}  // namespace detail

/// Transport of (r_j, m_j, energy slot) with the time-n velocities, the
/// viscous increment on momenta and energies, then the first averaging.
inline FieldSet transport_and_average(const FieldSet& f, const StepContext& ctx, StepDiagnostics* diag = nullptr) {
  const auto v = velocities(f);
  const double cfl = max_cfl(v, ctx.model.r);
  if (ctx.model.order == Order::P3) {
    for (const auto& vj : v) check_cfl(vj, ctx.model.r);
  }
  FieldSet out(f.size());
  out.p_prev = f.p_prev;
  for (std::size_t j = 0; j < kPhases; ++j) {
    auto r = detail::transport(f.r[j], v[j], ctx);
    auto m = detail::transport(f.m[j], v[j], ctx);
    auto e = detail::transport(f.e[j], v[j], ctx);
    if (ctx.model.mu[j] > 0.0) {
      m = viscous_increment(m, ctx.model.mu[j], ctx.model.r, ctx.h, ctx.bc);
      e = viscous_increment(e, ctx.model.mu[j], ctx.model.r, ctx.h, ctx.bc);
    }
    out.r[j] = detail::average(r, ctx);
    out.m[j] = detail::average(m, ctx);
    out.e[j] = detail::average(e, ctx);
  }
  if (diag) {
    diag->cfl = cfl;
    for (std::size_t j = 0; j < kPhases; ++j) {
      diag->mass_before[j] = detail::total(f.r[j]);
      diag->mass_after_transport[j] = detail::total(out.r[j]);
    }
  }
  return out;
}

inline void average_all(FieldSet& f, const StepContext& ctx) {
  for (std::size_t j = 0; j < kPhases; ++j) {
    f.r[j] = detail::average(f.r[j], ctx);
    f.m[j] = detail::average(f.m[j], ctx);
    f.e[j] = detail::average(f.e[j], ctx);
  }
}

inline FieldSet step_canonical(const FieldSet& f, const StepContext& ctx, StepDiagnostics* diag = nullptr) {
  FieldSet bar = transport_and_average(f, ctx, diag);
  check_fields(bar);
  const ClosureOut cl_bar = recover_canonical(bar, f.p_prev, ctx.model.delta, ctx.eos, ctx.threads);

  if (ctx.model.correction_base == CorrectionBase::Rebased) {
    // the fifth-step closure reads F* with p-bar as memory, so F-bar must carry p-bar too
    for (std::size_t i = 0; i < bar.size(); ++i)
      for (std::size_t j = 0; j < kPhases; ++j) bar.e[j][i] = cl_bar.E[j][i] + cl_bar.p[i] * cl_bar.alpha[j][i];
  }
  FieldSet star = pressure_correction_canonical(bar, cl_bar, detail::correction_params(ctx));
  if (ctx.model.order == Order::P3) average_all(star, ctx);
  check_fields(star);

  const ClosureOut cl_new = recover_canonical(star, cl_bar.p, ctx.model.delta, ctx.eos, ctx.threads);
  FieldSet out = std::move(star);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < kPhases; ++j) out.e[j][i] = cl_new.E[j][i] + cl_new.p[i] * cl_new.alpha[j][i];
    out.p_prev[i] = cl_new.p[i];
  }
  return out;
}

inline FieldSet step_solved(const FieldSet& f, const StepContext& ctx, StepDiagnostics* diag = nullptr) {
  FieldSet bar = transport_and_average(f, ctx, diag);
  check_fields(bar);
  const bool on_bar = ctx.model.solved_closure == SolvedClosureStage::Bar;
  const FieldSet& base = on_bar ? bar : f;
  const ClosureOut cl = recover_solved(base, ctx.model.delta, ctx.eos, ctx.threads);

  FieldSet out = pressure_correction_solved(bar, base, cl, detail::correction_params(ctx));
  if (ctx.model.order == Order::P3) average_all(out, ctx);
  check_fields(out);
  return out;
}

inline FieldSet step(const FieldSet& f, const StepContext& ctx, StepDiagnostics* diag = nullptr) {
  return ctx.model.form == Form::Canonical ? step_canonical(f, ctx, diag) : step_solved(f, ctx, diag);
}

/// Builds the fields of a primitive profile for the given form.
inline FieldSet fields_from_primitives(const std::vector<Primitive>& cells, const EosParams& eos, Form form) {
  FieldSet f(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Conserved u = primitives_to_conserved(cells[i], eos);
    for (std::size_t j = 0; j < kPhases; ++j) {
      f.r[j][i] = u.r[j];
      f.m[j][i] = u.m[j];
      f.e[j][i] = form == Form::Canonical ? u.e[j] + cells[i].p * cells[i].alpha(j) : u.e[j];
    }
    f.p_prev[i] = cells[i].p;
  }
  return f;
}

/// Closure of the current fields in their form's interpretation.
inline ClosureOut closure_of(const FieldSet& f, const StepContext& ctx) {
  if (ctx.model.form == Form::Canonical) return recover_canonical(f, f.p_prev, ctx.model.delta, ctx.eos, ctx.threads);
  return recover_solved(f, ctx.model.delta, ctx.eos, ctx.threads);
}

}  // namespace twofluid
