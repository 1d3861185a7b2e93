#pragma once

// Time loop over a CaseSpec plus the run diagnostics: snapshots, conservation
// report, cross-run comparison and velocity-peak detection.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twofluid/closure.hpp"
#include "twofluid/errors.hpp"
#include "twofluid/scheme_p3.hpp"
#include "twofluid/state.hpp"
#include "twofluid/step.hpp"

namespace twofluid {

enum class Column : std::size_t { alpha1, rho1, rho2, v1, v2, p, E1, E2 };
inline constexpr std::size_t kColumns = 8;
inline constexpr std::array<std::string_view, kColumns> kColumnNames = {"alpha1", "rho1", "rho2", "v1",
                                                                       "v2",     "p",    "E1",   "E2"};

struct Snapshot {
  double time = 0.0;
  std::size_t step = 0;
  std::vector<double> x;
  std::array<std::vector<double>, kColumns> col;

  std::size_t size() const noexcept { return x.size(); }
  std::vector<double>& operator[](Column c) { return col[static_cast<std::size_t>(c)]; }
  const std::vector<double>& operator[](Column c) const { return col[static_cast<std::size_t>(c)]; }
};

inline Snapshot make_snapshot(const ClosureOut& cl, const Grid& grid, double time, std::size_t step) {
  Snapshot s;
  s.time = time;
  s.step = step;
  s.x.resize(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) s.x[i] = grid.center(i);
  s[Column::alpha1] = cl.alpha[0];
  s[Column::rho1] = cl.rho[0];
  s[Column::rho2] = cl.rho[1];
  s[Column::v1] = cl.v[0];
  s[Column::v2] = cl.v[1];
  s[Column::p] = cl.p;
  s[Column::E1] = cl.E[0];
  s[Column::E2] = cl.E[1];
  return s;
}

inline Snapshot post_treat(Snapshot s, std::size_t halfwidth) {
  if (halfwidth == 0) return s;
  for (auto& c : s.col) c = post_treatment(c, halfwidth);
  return s;
}

/// Block-averages a snapshot onto a grid `factor` times coarser.
inline Snapshot restrict_snapshot(const Snapshot& fine, std::size_t factor) {
  if (factor == 0 || fine.size() % factor != 0)
    throw ValidationError("restrict_snapshot: cell count not divisible by factor");
  const std::size_t n = fine.size() / factor;
  Snapshot s;
  s.time = fine.time;
  s.step = fine.step;
  auto block = [&](const std::vector<double>& w) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < factor; ++k) sum += w[i * factor + k];
      out[i] = sum / static_cast<double>(factor);
    }
    return out;
  };
  s.x = block(fine.x);
  for (std::size_t c = 0; c < kColumns; ++c) s.col[c] = block(fine.col[c]);
  return s;
}

// ---------------------------------------------------------------------------
// Peaks

struct PeakConfig {
  std::size_t window = 100;    // cells searched on each side for the surrounding step values
  double threshold = 5.0;      // prominence must exceed threshold * spread
  double spread_floor = 1e-3;  // relative to the field magnitude
};

struct PeakReport {
  std::string field;
  double plateau_value = 0.0;
  double peak_value = 0.0;
  std::size_t peak_width = 0;
  double location = 0.0;
  std::size_t cell = 0;
};

namespace detail {
inline double median_of(std::vector<double> w) {
  const std::size_t mid = w.size() / 2;
  std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid), w.end());
  if (w.size() % 2 == 1) return w[mid];
  const double upper = w[mid];
  const double lower = *std::max_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Robust cell-to-cell noise level: MAD of the first differences.
inline double difference_spread(std::span<const double> f) {
  if (f.size() < 3) return 0.0;
  std::vector<double> d(f.size() - 1);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) d[i] = f[i + 1] - f[i];
  const double med = median_of(d);
  for (auto& x : d) x = std::abs(x - med);
  return 1.4826 * median_of(std::move(d)) / std::sqrt(2.0);
}
}  // namespace detail

/// Local maxima standing out of the surrounding step values. A maximum's
/// reference level is the higher of the lowest values reached on each side
/// (within `window` cells, stopping at any higher cell); its prominence must
/// exceed threshold * spread, with spread the cell noise floored at
/// spread_floor times the field magnitude. Monotone profiles give nothing.
inline std::vector<PeakReport> detect_peaks(std::span<const double> field, std::span<const double> x,
                                            const PeakConfig& cfg = {}, std::string_view name = "") {
  const std::size_t n = field.size();
  std::vector<PeakReport> peaks;
  if (n < 3) return peaks;
  double magnitude = 0.0;
  for (double v : field) magnitude = std::max(magnitude, std::abs(v));
  const double spread = std::max({detail::difference_spread(field), cfg.spread_floor * magnitude, 1e-300});
  const double cut = cfg.threshold * spread;

  std::size_t s = 1;
  while (s + 1 < n) {
    std::size_t e = s;
    while (e + 1 < n && field[e + 1] == field[s]) ++e;
    const bool is_max = field[s - 1] < field[s] && e + 1 < n && field[e + 1] < field[e];
    if (!is_max) {
      s = e + 1;
      continue;
    }
    const double top = field[s];
    std::size_t l = s, r = e;
    double lmin = top, rmin = top;
    for (std::size_t k = 0; k < cfg.window && l > 0 && field[l - 1] <= top; ++k) lmin = std::min(lmin, field[--l]);
    for (std::size_t k = 0; k < cfg.window && r + 1 < n && field[r + 1] <= top; ++k) rmin = std::min(rmin, field[++r]);
    const double ref = std::max(lmin, rmin);
    const double prominence = top - ref;
    if (prominence > cut) {
      std::size_t a = s, b = e;
      while (a > 0 && field[a - 1] >= ref + 0.5 * prominence) --a;
      while (b + 1 < n && field[b + 1] >= ref + 0.5 * prominence) ++b;
      // the step value on the side that sets the reference level
      std::vector<double> side;
      if (lmin >= rmin) {
        for (std::size_t k = l; k < a; ++k) side.push_back(field[k]);
      } else {
        for (std::size_t k = b + 1; k <= r; ++k) side.push_back(field[k]);
      }
      PeakReport pk;
      pk.field = std::string(name);
      pk.plateau_value = side.empty() ? ref : detail::median_of(std::move(side));
      pk.peak_value = top;
      pk.peak_width = b - a + 1;
      pk.cell = (s + e) / 2;
      pk.location = x.empty() ? static_cast<double>(pk.cell) : x[pk.cell];
      peaks.push_back(pk);
    }
    s = e + 1;
  }
  return peaks;
}

// ---------------------------------------------------------------------------
// Comparison

struct CompareOptions {
  std::size_t exclude_cells = 10;
  double plateau_variation = 1e-2;  // window spread allowed in a constant state, relative to the field scale
};

struct FieldDiff {
  std::string field;
  double linf = 0.0;
  double l1 = 0.0;
  double plateau_linf = 0.0;
  double plateau_l1 = 0.0;
};

struct CompareReport {
  std::array<FieldDiff, kColumns> fields;
  std::size_t plateau_cells = 0;
  std::size_t cells = 0;

  double max_plateau_linf() const {
    double m = 0.0;
    for (const auto& f : fields) m = std::max(m, f.plateau_linf);
    return m;
  }
  const FieldDiff& operator[](Column c) const { return fields[static_cast<std::size_t>(c)]; }
};

namespace detail {
inline double scale_of(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s = std::max(s, std::abs(x));
  return s > 0.0 ? s : 1.0;
}
}  // namespace detail

/// Cells inside constant states of both runs: every field varies by at most
/// plateau_variation * scale over the window of exclude_cells on each side.
/// Shocks, contacts, rarefaction fans and peaks all fall outside.
inline std::vector<bool> plateau_mask(const Snapshot& a, const Snapshot& b, const CompareOptions& opt) {
  const std::size_t n = a.size();
  const std::size_t k = opt.exclude_cells;
  std::vector<bool> plateau(n, true);
  for (std::size_t c = 0; c < kColumns; ++c) {
    const double tol = opt.plateau_variation * detail::scale_of(a.col[c]);
    for (const Snapshot* s : {&a, &b}) {
      const auto& w = s->col[c];
      for (std::size_t i = 0; i < n; ++i) {
        if (!plateau[i]) continue;
        const std::size_t lo = i >= k ? i - k : 0;
        const std::size_t hi = std::min(n - 1, i + k);
        const auto [mn, mx] = std::minmax_element(w.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  w.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        if (*mx - *mn > tol) plateau[i] = false;
      }
    }
  }
  return plateau;
}

/// Relative differences of b against reference a. L-infinity is scaled by
/// max|a|, L1 by sum|a| (over the same cell set).
inline CompareReport compare_runs(const Snapshot& a, const Snapshot& b, const CompareOptions& opt = {}) {
  if (a.size() != b.size()) throw ValidationError("compare_runs: grids differ in cell count");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.x[i] - b.x[i]) > 1e-9 * std::max({std::abs(a.x[i]), std::abs(b.x[i]), 1.0}))
      throw ValidationError("compare_runs: grids differ in cell positions");

  const auto plateau = plateau_mask(a, b, opt);
  CompareReport rep;
  rep.cells = a.size();
  rep.plateau_cells = static_cast<std::size_t>(std::count(plateau.begin(), plateau.end(), true));
  for (std::size_t c = 0; c < kColumns; ++c) {
    const auto& wa = a.col[c];
    const auto& wb = b.col[c];
    const double scale = detail::scale_of(wa);
    double linf = 0.0, l1 = 0.0, ref = 0.0, p_linf = 0.0, p_l1 = 0.0, p_ref = 0.0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
      const double d = std::abs(wb[i] - wa[i]);
      linf = std::max(linf, d);
      l1 += d;
      ref += std::abs(wa[i]);
      if (plateau[i]) {
        p_linf = std::max(p_linf, d);
        p_l1 += d;
        p_ref += std::abs(wa[i]);
      }
    }
    FieldDiff& fd = rep.fields[c];
    fd.field = std::string(kColumnNames[c]);
    fd.linf = linf / scale;
    fd.l1 = ref > 0.0 ? l1 / ref : l1;
    fd.plateau_linf = p_linf / scale;
    fd.plateau_l1 = p_ref > 0.0 ? p_l1 / p_ref : p_l1;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Time loop

struct RunOptions {
  int threads = 1;
  bool track_peaks = false;
  PeakConfig peaks{};
};

struct AbortRecord {
  std::string kind;
  std::optional<std::size_t> step;
  std::optional<std::size_t> cell;
  std::string message;
};

struct PeakSample {
  double time = 0.0;
  std::string field;
  double peak_value = 0.0;
  double plateau_value = 0.0;
};

struct RunReport {
  std::size_t steps_taken = 0;
  double final_time = 0.0;
  double wall_time = 0.0;
  PerPhase<double> mass_drift{};  // max relative change of sum r_j over transport + averaging
  double max_cfl_seen = 0.0;
  std::optional<AbortRecord> aborted;
  std::vector<PeakSample> peak_history;

  bool ok() const noexcept { return !aborted.has_value(); }
};

struct RunResult {
  std::vector<Snapshot> snapshots;  // one per requested output time, in request order; after an abort only those reached
  std::vector<std::size_t> slots;   // index into the requested output times, per snapshot
  Snapshot initial;
  RunReport report;
};

inline std::vector<Primitive> initial_cells(const CaseSpec& cs) {
  std::vector<Primitive> cells(cs.grid.n_cells);
  for (std::size_t i = 0; i < cs.grid.n_cells; ++i)
    cells[i] = cs.grid.center(i) < cs.interface_position ? cs.left : cs.right;
  return cells;
}

inline std::size_t steps_for(double t, double dt) {
  if (t <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
}

namespace detail {
inline void check_boundary_cells(const Snapshot& init, const Snapshot& now, double tol) {
  const std::size_t n = init.size();
  for (std::size_t c = 0; c < kColumns; ++c) {
    const double scale = std::max(scale_of(init.col[c]), scale_of(now.col[c]));
    for (std::size_t i : {std::size_t{0}, n - 1}) {
      if (std::abs(now.col[c][i] - init.col[c][i]) > tol * scale)
        throw NumericalError(NumericalErrorKind::BoundaryContamination,
                             "waves reached the boundary (" + std::string(kColumnNames[c]) + ")")
            .with_cell(i);
    }
  }
}
}  // namespace detail

/// Runs a case to t_end. Numerical aborts do not throw: they are recorded in
/// the report and the snapshots taken so far are returned.
inline RunResult run_case(const CaseSpec& cs, const RunOptions& opt = {}) {
  cs.validate();
  const auto started = std::chrono::steady_clock::now();

  StepContext ctx;
  ctx.eos = cs.eos;
  ctx.model = cs.model;
  ctx.h = cs.grid.h;
  ctx.bc = cs.boundary;
  ctx.threads = opt.threads;

  const double dt = cs.model.r * cs.grid.h;
  const std::size_t n_steps = steps_for(cs.t_end, dt);
  auto time_at = [&](std::size_t k) {
    if (cs.final_step == FinalStep::Shorten && k == n_steps) return cs.t_end;
    return static_cast<double>(k) * dt;
  };

  std::vector<double> times = cs.output.times;
  if (times.empty()) times.push_back(cs.t_end);
  std::vector<std::size_t> at_step(times.size());
  for (std::size_t s = 0; s < times.size(); ++s) at_step[s] = std::min(n_steps, steps_for(times[s], dt));

  RunResult result;
  result.snapshots.resize(times.size());
  result.slots.resize(times.size());
  for (std::size_t s = 0; s < times.size(); ++s) result.slots[s] = s;
  std::vector<bool> taken(times.size(), false);

  FieldSet f = fields_from_primitives(initial_cells(cs), cs.eos, cs.model.form);
  result.initial = make_snapshot(closure_of(f, ctx), cs.grid, 0.0, 0);

  const std::size_t w = cs.model.post_treatment_halfwidth;
  auto emit = [&](std::size_t k, const Snapshot& snap) {
    for (std::size_t s = 0; s < times.size(); ++s) {
      if (taken[s] || at_step[s] != k) continue;
      result.snapshots[s] = post_treat(snap, w);
      taken[s] = true;
      if (opt.track_peaks) {
        for (Column c : {Column::v1, Column::v2}) {
          const auto name = kColumnNames[static_cast<std::size_t>(c)];
          for (const auto& pk : detect_peaks(snap[c], snap.x, opt.peaks, name))
            result.report.peak_history.push_back({snap.time, pk.field, pk.peak_value, pk.plateau_value});
        }
      }
    }
  };

  RunReport& rep = result.report;
  std::size_t k = 0;
  try {
    emit(0, result.initial);
    for (k = 1; k <= n_steps; ++k) {
      StepContext sc = ctx;
      if (cs.final_step == FinalStep::Shorten && k == n_steps)
        sc.model.r = (cs.t_end - static_cast<double>(k - 1) * dt) / cs.grid.h;
      StepDiagnostics diag;
      f = step(f, sc, &diag);
      rep.max_cfl_seen = std::max(rep.max_cfl_seen, diag.cfl);
      for (std::size_t j = 0; j < kPhases; ++j) {
        const double drift = std::abs(diag.mass_after_transport[j] - diag.mass_before[j]) / diag.mass_before[j];
        rep.mass_drift[j] = std::max(rep.mass_drift[j], drift);
      }
      rep.steps_taken = k;
      rep.final_time = time_at(k);
      if (std::find(at_step.begin(), at_step.end(), k) != at_step.end() || k == n_steps) {
        const Snapshot snap = make_snapshot(closure_of(f, ctx), cs.grid, time_at(k), k);
        emit(k, snap);
        if (k == n_steps && cs.check_boundaries && cs.boundary == Boundary::Transmissive)
          detail::check_boundary_cells(result.initial, snap, cs.boundary_tolerance);
      }
    }
  } catch (const NumericalError& e) {
    const NumericalError located = e.with_step(k);
    rep.aborted = AbortRecord{to_string(located.kind()), located.step(), located.cell(), located.describe()};
    // keep only the snapshots reached before the abort
    std::vector<Snapshot> reached;
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < times.size(); ++s) {
      if (!taken[s]) continue;
      reached.push_back(std::move(result.snapshots[s]));
      slots.push_back(s);
    }
    result.snapshots = std::move(reached);
    result.slots = std::move(slots);
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace twofluid
