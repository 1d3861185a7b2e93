// Acceptance checks C1..C9. One PASS/FAIL line per criterion; the exit code is
// the number of failing criteria.

#include <boost/rational.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "support.hpp"

using namespace twofluid;
using namespace twofluid::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Snapshot final_snapshot(const CaseSpec& cs) {
  const RunResult res = run_case(final_only(cs));
  if (!res.report.ok()) throw std::runtime_error(cs.name + ": " + res.report.aborted->message);
  return res.snapshots.back();
}

// worst plateau field and its value
std::pair<std::string, double> worst_plateau(const CompareReport& rep) {
  std::pair<std::string, double> w{"", -1.0};
  for (const auto& f : rep.fields)
    if (f.plateau_linf > w.second) w = {f.field, f.plateau_linf};
  return w;
}

// --- C1 ---------------------------------------------------------------------
Verdict c1_form_equivalence() {
  std::string detail;
  bool pass = true;
  for (const char* file : {"toumi_delta2.case", "toumi_delta0.case"}) {
    CaseSpec cs = resized(load_case(file), 2000);
    cs.model.form = Form::Canonical;
    const Snapshot can = final_snapshot(cs);
    cs.model.form = Form::Solved;
    const Snapshot sol = final_snapshot(cs);
    const auto [field, v] = worst_plateau(compare_runs(can, sol));
    pass = pass && v <= 0.01;
    detail += fmt("delta=%g r=%g: plateau Linf %.3g%% (%s)  ", cs.model.delta, cs.model.r, 100 * v, field.c_str());
  }
  return {pass, detail + "[limit 1%]"};
}

// --- C2 ---------------------------------------------------------------------
Verdict c2_closure_round_trip() {
  std::mt19937_64 rng(2024);
  double worst_c = 0.0, worst_s = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const EosParams eos = k % 2 ? toumi_eos() : random_eos(rng);
    const Primitive w = random_state(rng);
    worst_c = std::max(worst_c, primitive_error(recover_canonical_cell(to_canonical(w, eos), w.p, 2.0, eos), w));
    worst_s = std::max(worst_s, primitive_error(recover_solved_cell(primitives_to_conserved(w, eos), 2.0, eos), w));
  }
  return {worst_c <= 1e-9 && worst_s <= 1e-9,
          fmt("10^4 states: canonical %.2e, solved %.2e [limit 1e-9]", worst_c, worst_s)};
}

// --- C3 ---------------------------------------------------------------------
Verdict c3_conservation() {
  const EosParams eos = toumi_eos();
  std::string detail;
  bool pass = true;
  for (Order order : {Order::P1, Order::P3}) {
    const std::size_t n = 256;
    std::vector<Primitive> cells(n, toumi_left());
    for (std::size_t i = 0; i < n; ++i) {
      const double x = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      cells[i].alpha1 = 0.25 + 0.1 * std::sin(x);
      cells[i].rho[0] *= 1.0 + 0.2 * std::cos(3 * x);
      cells[i].v = {30.0 + 10.0 * std::sin(x), -5.0 + 3.0 * std::cos(2 * x)};
    }
    ModelConfig m;
    m.order = order;
    m.form = Form::Solved;
    m.r = order == Order::P1 ? 0.0012 : 0.0002;
    m.a = order == Order::P1 ? 0.3 : 0.025;
    const StepContext ctx{eos, m, 0.1, Boundary::Periodic, 1};
    FieldSet f = fields_from_primitives(cells, eos, m.form);
    PerPhase<double> start{};
    for (std::size_t j = 0; j < kPhases; ++j)
      for (double x : f.r[j]) start[j] += x;
    double drift = 0.0;
    for (int k = 0; k < 1000; ++k) {
      f = transport_and_average(f, ctx);
      for (std::size_t j = 0; j < kPhases; ++j) {
        double s = 0.0;
        for (double x : f.r[j]) s += x;
        drift = std::max(drift, std::abs(s - start[j]) / start[j]);
      }
    }
    pass = pass && drift <= 1e-12;
    detail += fmt("%s drift %.2e  ", order == Order::P1 ? "P1" : "P3", drift);
  }
  return {pass, detail + "[limit 1e-12, 1000 steps]"};
}

// --- C4 ---------------------------------------------------------------------
Verdict c4_nonhyperbolic_peaks() {
  CaseSpec cs = resized(load_case("toumi_delta2.case"), 2000);
  cs.model.form = Form::Solved;
  const Snapshot hyp = final_snapshot(cs);
  cs.model.delta = 0.0;
  const Snapshot non = final_snapshot(cs);

  const auto [field, v] = worst_plateau(compare_runs(hyp, non));
  const std::size_t p1_non = detect_peaks(non[Column::v1], non.x).size();
  const std::size_t p2_non = detect_peaks(non[Column::v2], non.x).size();
  const std::size_t p1_hyp = detect_peaks(hyp[Column::v1], hyp.x).size();
  const std::size_t p2_hyp = detect_peaks(hyp[Column::v2], hyp.x).size();
  const bool pass = v <= 0.02 && p1_non >= 1 && p2_non >= 1 && p1_hyp == 0 && p2_hyp == 0;
  return {pass, fmt("plateau Linf %.3g%% (%s) [limit 2%%]; peaks delta=0 v1 %zu v2 %zu [need >=1 each]; "
                    "delta=2 v1 %zu v2 %zu [need 0]",
                    100 * v, field.c_str(), p1_non, p2_non, p1_hyp, p2_hyp)};
}

// --- C5 ---------------------------------------------------------------------
Verdict c5_stencils() {
  using Q = boost::rational<long long>;
  auto ipow = [](long long k, int q) {
    Q r = 1;
    for (int i = 0; i < q; ++i) r *= k;
    return r;
  };
  const Q cc[3] = {Q(69, 101), Q(-39, 404), Q(1, 303)};
  auto centered = [&](int q) {
    Q s = 0;
    for (long long k = 1; k <= 3; ++k) s += cc[k - 1] * (ipow(k, q) - ipow(-k, q));
    return s;
  };
  const Q up[4] = {Q(-1, 3), Q(3, 2), Q(-3), Q(11, 6)};
  auto upwind = [&](int q) {
    Q s = 0;
    for (long long k = -3; k <= 0; ++k) s += up[k + 3] * ipow(k, q);
    return s;
  };
  const long long sm[7] = {-1, 6, -15, 20, -15, 6, -1};
  auto smooth = [&](int q) {
    Q s = 0;
    for (long long k = -3; k <= 3; ++k) s += sm[k + 3] * ipow(k, q);
    return s;
  };

  bool centered_ok = centered(1) == Q(1) && centered(5) != Q(0);
  for (int q : {0, 2, 3, 4}) centered_ok = centered_ok && centered(q) == Q(0);
  // floating-point check of the operator itself
  double float_err = 0.0;
  for (int q = 0; q <= 4; ++q) {
    std::vector<double> w(21);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(static_cast<double>(i) - 10.0, q);
    float_err = std::max(float_err, std::abs(centered_diff_p3(w, Boundary::Transmissive)[10] - (q == 1 ? 1.0 : 0.0)));
  }
  centered_ok = centered_ok && float_err <= 1e-12;

  bool upwind_ok = upwind(1) == Q(1);
  for (int q : {0, 2, 3}) upwind_ok = upwind_ok && upwind(q) == Q(0);
  const auto gen = gen_upwind_coeffs(3);
  double gen_err = 0.0;
  for (std::size_t k = 0; k < 4; ++k) gen_err = std::max(gen_err, std::abs(gen[k] - kUpwindP3[k]));
  upwind_ok = upwind_ok && gen_err <= 1e-12;

  bool smooth_ok = true;
  for (int q = 0; q <= 5; ++q) smooth_ok = smooth_ok && smooth(q) == Q(0);

  return {centered_ok && upwind_ok && smooth_ok,
          fmt("centered exact deg<=4 %s, inexact deg 5 (moment %s), float err %.1e; upwind exact deg<=3 %s, "
              "generator err %.1e; smoothing annihilates deg<=5 %s",
              centered_ok ? "yes" : "no",
              (std::to_string(centered(5).numerator()) + "/" + std::to_string(centered(5).denominator())).c_str(),
              float_err, upwind_ok ? "yes" : "no", gen_err, smooth_ok ? "yes" : "no")};
}

// --- C6 ---------------------------------------------------------------------
double advection_error(Order order, std::size_t n) {
  const double h = 1.0 / static_cast<double>(n), v = 1.0, t_end = 0.25;
  // order 3: dt ~ h^3 so the first-order implicit time error does not mask the space order
  const double r = order == Order::P1 ? 0.5 : 0.5 * std::pow(32.0 / static_cast<double>(n), 2);
  const std::size_t steps = steps_for(t_end, r * h);
  const double t = static_cast<double>(steps) * r * h;
  auto exact = [&](double x) { return std::sin(2 * std::numbers::pi * x); };
  std::vector<double> w(n), vel(n, v);
  for (std::size_t i = 0; i < n; ++i) w[i] = exact((static_cast<double>(i) + 0.5) * h);
  for (std::size_t k = 0; k < steps; ++k)
    w = order == Order::P1 ? upwind_transport(w, vel, r, Boundary::Periodic) : transport_p3(w, vel, r, Boundary::Periodic);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += std::abs(w[i] - exact((static_cast<double>(i) + 0.5) * h - v * t)) * h;
  return e;
}

Verdict c6_order_study() {
  std::string detail;
  bool pass = true;
  for (Order order : {Order::P1, Order::P3}) {
    std::vector<double> err;
    for (std::size_t n : {32u, 64u, 128u, 256u}) err.push_back(advection_error(order, n));
    double worst = 1e300;
    std::string slopes;
    for (std::size_t k = 1; k < err.size(); ++k) {
      const double s = std::log2(err[k - 1] / err[k]);
      worst = std::min(worst, s);
      slopes += fmt("%.2f ", s);
    }
    const double limit = order == Order::P1 ? 0.9 : 2.5;
    pass = pass && worst >= limit;
    detail += fmt("%s slopes %s[limit %.1f]  ", order == Order::P1 ? "P1" : "P3", slopes.c_str(), limit);
  }
  return {pass, detail};
}

// --- C7 ---------------------------------------------------------------------
Verdict c7_high_order_payoff() {
  const Snapshot p3 = final_snapshot(resized(load_case("toumi_p3_delta2.case"), 500));
  const Snapshot p1 = final_snapshot(resized(load_case("toumi_delta2.case"), 2000));
  const auto [field, v] = worst_plateau(compare_runs(restrict_snapshot(p1, 4), p3));
  return {v <= 0.03, fmt("P3 500 cells vs P1 2000 cells: plateau Linf %.3g%% (%s) [limit 3%%]", 100 * v, field.c_str())};
}

// --- C8 ---------------------------------------------------------------------
Verdict c8_viscosity() {
  const CaseSpec viscous = resized(load_case("toumi_viscous.case"), 2000);
  CaseSpec inviscid = viscous;
  inviscid.model.mu = {0.0, 0.0};
  const auto [field, v] = worst_plateau(compare_runs(final_snapshot(inviscid), final_snapshot(viscous)));
  return {v <= 0.03, fmt("mu1=%g mu2=%g vs inviscid: plateau Linf %.3g%% (%s) [limit 3%%]", viscous.model.mu[0],
                         viscous.model.mu[1], 100 * v, field.c_str())};
}

// --- C9 ---------------------------------------------------------------------
Verdict c9_gravity() {
  double worst = 0.0;
  for (Form form : {Form::Canonical, Form::Solved}) {
    CaseSpec cs = uniform_case(32, toumi_left(), form, Order::P1);
    cs.model.g = -9.81;
    const StepContext ctx{cs.eos, cs.model, 0.1, Boundary::Periodic, 1};
    FieldSet f = fields_from_primitives(initial_cells(cs), cs.eos, form);
    const FieldSet f0 = f;
    const double rhg = cs.model.r * ctx.h * cs.model.g;
    for (int k = 1; k <= 100; ++k) {
      f = step(f, ctx);
      for (std::size_t j = 0; j < kPhases; ++j)
        for (std::size_t i = 0; i < f.size(); ++i) {
          const double want = f0.m[j][i] + k * rhg * f0.r[j][i];
          worst = std::max(worst, std::abs(f.m[j][i] - want) / std::abs(want));
        }
    }
  }
  return {worst <= 1e-13, fmt("uniform state, g=-9.81, 100 steps, both forms: momentum error %.2e [limit 1e-13]", worst)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"C1", c1_form_equivalence}, {"C2", c2_closure_round_trip}, {"C3", c3_conservation},
      {"C4", c4_nonhyperbolic_peaks}, {"C5", c5_stencils},         {"C6", c6_order_study},
      {"C7", c7_high_order_payoff},  {"C8", c8_viscosity},          {"C9", c9_gravity},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s  %s (%.1f s)\n", name, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of 9 criteria failed\n", failed);
  return failed;
}
