// Command-line front end: run, compare, convergence, gen-coeffs.
//
// Exit codes: 0 success, 1 validation or usage error, 2 numerical abort.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "twofluid/twofluid.hpp"

namespace fs = std::filesystem;
using namespace twofluid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAbort = 2;

struct Common {
  std::size_t cells = 0;  // 0 keeps the case's n_cells
  int threads = 0;        // 0 defers to TWOFLUID_THREADS
};

int resolve_threads(int requested) { return requested > 0 ? requested : threads_from_env(); }

CaseSpec load_case(const std::string& path, std::size_t cells) {
  CaseSpec cs = parse_case_file(path);
  if (cells > 0) {
    const double length = cs.grid.length();
    cs.grid.n_cells = cells;
    cs.grid.h = length / static_cast<double>(cells);
    cs.validate();
  }
  return cs;
}

std::string format_abort(const AbortRecord& a) {
  std::ostringstream os;
  os << "numerical abort: " << a.message;
  return os.str();
}

std::string report_text(const CaseSpec& cs, const RunResult& res) {
  const auto& r = res.report;
  std::ostringstream os;
  os.precision(10);
  os << "case            " << cs.name << "\n"
     << "cells           " << cs.grid.n_cells << "\n"
     << "dt              " << cs.model.r * cs.grid.h << "\n"
     << "steps           " << r.steps_taken << "\n"
     << "final_time      " << r.final_time << "\n"
     << "wall_time_s     " << r.wall_time << "\n"
     << "mass_drift      " << r.mass_drift[0] << " " << r.mass_drift[1] << "\n"
     << "max_cfl         " << r.max_cfl_seen << "\n"
     << "status          " << (r.ok() ? "ok" : "aborted") << "\n";
  if (r.aborted) os << "abort           " << r.aborted->message << "\n";
  for (const auto& pk : r.peak_history)
    os << "peak            t=" << pk.time << " " << pk.field << " value=" << pk.peak_value
       << " plateau=" << pk.plateau_value << "\n";
  return os.str();
}

int cmd_run(const std::string& case_path, const std::string& out_dir, const Common& common, bool peaks) {
  const CaseSpec cs = load_case(case_path, common.cells);
  RunOptions opt;
  opt.threads = resolve_threads(common.threads);
  opt.track_peaks = peaks;
  const RunResult res = run_case(cs, opt);

  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
    const Snapshot& snap = res.snapshots[k];
    const std::size_t slot = res.slots[k];
    const std::string file =
        slot < cs.output.files.size() ? cs.output.files[slot] : cs.name + "_t" + std::to_string(snap.time) + ".csv";
    const fs::path path = fs::path(out_dir) / file;
    write_snapshot_csv(snap, path.string());
    written.push_back(file);
    std::cout << "wrote " << path.string() << " (t = " << snap.time << ")\n";
  }

  const fs::path script = fs::path(out_dir) / (cs.name + ".gp");
  std::ofstream(script) << plot_script(written, cs.name + ".png");
  const fs::path report = fs::path(out_dir) / (cs.name + "_report.txt");
  const std::string text = report_text(cs, res);
  std::ofstream(report) << text;
  std::cout << text;

  if (!res.report.ok()) {
    std::cerr << format_abort(*res.report.aborted) << "\n";
    return kExitAbort;
  }
  return kExitOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, std::size_t exclude, const Common& common) {
  const CaseSpec a = load_case(a_path, common.cells);
  const CaseSpec b = load_case(b_path, common.cells);
  RunOptions opt;
  opt.threads = resolve_threads(common.threads);
  const RunResult ra = run_case(a, opt);
  const RunResult rb = run_case(b, opt);
  for (const RunResult* r : {&ra, &rb}) {
    if (!r->report.ok()) {
      std::cerr << format_abort(*r->report.aborted) << "\n";
      return kExitAbort;
    }
  }
  CompareOptions copt;
  copt.exclude_cells = exclude;
  const CompareReport rep = compare_runs(ra.snapshots.back(), rb.snapshots.back(), copt);
  std::printf("%s vs %s at t = %.6g, %zu cells (%zu in plateaus)\n", a.name.c_str(), b.name.c_str(),
              ra.snapshots.back().time, rep.cells, rep.plateau_cells);
  std::printf("%-8s %14s %14s %14s %14s\n", "field", "linf", "l1", "plateau_linf", "plateau_l1");
  for (const auto& f : rep.fields)
    std::printf("%-8s %14.6e %14.6e %14.6e %14.6e\n", f.field.c_str(), f.linf, f.l1, f.plateau_linf, f.plateau_l1);
  return kExitOk;
}

int cmd_convergence(const std::string& case_path, std::size_t levels, const Common& common) {
  if (levels < 2) throw ValidationError("convergence: --levels must be >= 2");
  const CaseSpec base = load_case(case_path, common.cells);
  RunOptions opt;
  opt.threads = resolve_threads(common.threads);

  std::vector<Snapshot> finals;
  for (std::size_t l = 0; l < levels; ++l) {
    CaseSpec cs = base;
    cs.grid.n_cells = base.grid.n_cells << l;
    cs.grid.h = base.grid.h / static_cast<double>(std::size_t{1} << l);
    cs.output = {};
    const RunResult res = run_case(cs, opt);
    if (!res.report.ok()) {
      std::cerr << "level " << l << ": " << format_abort(*res.report.aborted) << "\n";
      return kExitAbort;
    }
    finals.push_back(res.snapshots.back());
    std::printf("level %zu: %zu cells, %zu steps, %.2f s\n", l, cs.grid.n_cells, res.report.steps_taken,
                res.report.wall_time);
  }

  // differences between successive levels, on the coarser grid
  std::vector<double> err(levels - 1);
  for (std::size_t l = 0; l + 1 < levels; ++l) {
    const CompareReport rep = compare_runs(finals[l], restrict_snapshot(finals[l + 1], 2));
    double worst = 0.0;
    for (const auto& f : rep.fields) worst = std::max(worst, f.l1);
    err[l] = worst;
    std::printf("L1 |u_%zu - u_%zu| = %.6e", l, l + 1, worst);
    if (l > 0 && worst > 0.0) std::printf("   observed order %.3f", std::log2(err[l - 1] / worst));
    std::printf("\n");
  }
  return kExitOk;
}

int cmd_gen_coeffs(std::size_t p) {
  const StencilCoeffs c = StencilCoeffs::generate(p);
  std::printf("upwind (offsets -%zu..0):\n", p);
  for (std::size_t k = 0; k < c.upwind.size(); ++k)
    std::printf("  %+3td  %.17g\n", static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(p), c.upwind[k]);
  std::printf("centered (offsets 1..%zu, antisymmetric):\n", p);
  for (std::size_t k = 0; k < c.centered.size(); ++k) std::printf("  +%zu  %.17g\n", k + 1, c.centered[k]);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-fluid one-pressure shock-tube solver"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--cells", common.cells, "override n_cells of the case");
    sub->add_option("--threads", common.threads, "worker threads (default: TWOFLUID_THREADS or all cores)");
  };

  std::string case_a, case_b, out_dir = ".";
  std::size_t exclude = CompareOptions{}.exclude_cells;
  std::size_t levels = 3;
  std::size_t p = 3;
  bool peaks = false;

  auto* run = app.add_subcommand("run", "run a case and write CSV snapshots, a plot script and a report");
  run->add_option("case", case_a, "case file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--peaks", peaks, "record velocity peaks at each snapshot");
  add_common(run);

  auto* cmp = app.add_subcommand("compare", "run two cases and difference their final snapshots");
  cmp->add_option("caseA", case_a, "reference case")->required();
  cmp->add_option("caseB", case_b, "other case")->required();
  cmp->add_option("--exclude-cells", exclude, "half window of the plateau test");
  add_common(cmp);

  auto* conv = app.add_subcommand("convergence", "run a case on successively doubled grids");
  conv->add_option("case", case_a, "case file")->required();
  conv->add_option("--levels", levels, "number of grids")->required();
  add_common(conv);

  auto* gen = app.add_subcommand("gen-coeffs", "print the upwind and centered stencils of order p");
  gen->add_option("--p", p, "odd stencil order")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitInvalid;
  }

  try {
    if (*run) return cmd_run(case_a, out_dir, common, peaks);
    if (*cmp) return cmd_compare(case_a, case_b, exclude, common);
    if (*conv) return cmd_convergence(case_a, levels, common);
    if (*gen) return cmd_gen_coeffs(p);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.describe() << "\n";
    return kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
