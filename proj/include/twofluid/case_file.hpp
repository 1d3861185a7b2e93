#pragma once

// Case files: INI-style sections [grid] [eos] [model] [left] [right] [run]
// [output] with `key = value` lines and `#` comments. Unknown sections and
// keys are rejected; EOS constants and Riemann states have no defaults.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "twofluid/errors.hpp"
#include "twofluid/state.hpp"

namespace twofluid {

class CaseParseError : public ValidationError {
 public:
  CaseParseError(std::size_t line, const std::string& what)
      : ValidationError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

inline const std::map<std::string, std::set<std::string>>& case_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"grid", {"n_cells", "length", "x0"}},
      {"eos", {"K1", "K2", "p_inf1", "p_inf2"}},
      {"model",
       {"delta", "form", "order", "r", "a", "g", "mu1", "mu2", "post_treatment_halfwidth", "solved_closure",
        "correction_base"}},
      {"left", {"alpha1", "rho1", "rho2", "v1", "v2", "p"}},
      {"right", {"alpha1", "rho1", "rho2", "v1", "v2", "p"}},
      {"run", {"t_end", "interface_position", "boundary", "final_step", "check_boundaries", "boundary_tolerance"}},
      {"output", {"times", "files"}},
  };
  return schema;
}

class Document {
 public:
  explicit Document(std::istream& in) {
    std::string raw;
    std::string current;
    std::size_t line = 0;
    const auto& schema = case_schema();
    while (std::getline(in, raw)) {
      ++line;
      std::string_view s = raw;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') throw CaseParseError(line, "malformed section header");
        current = std::string(trim(s.substr(1, s.size() - 2)));
        if (!schema.count(current)) throw CaseParseError(line, "unknown section [" + current + "]");
        if (sections_.count(current)) throw CaseParseError(line, "duplicate section [" + current + "]");
        sections_[current];
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) throw CaseParseError(line, "expected key = value");
      if (current.empty()) throw CaseParseError(line, "key outside of any section");
      const std::string key(trim(s.substr(0, eq)));
      const std::string value(trim(s.substr(eq + 1)));
      if (!schema.at(current).count(key))
        throw CaseParseError(line, "unknown key '" + key + "' in [" + current + "]");
      auto& sec = sections_[current];
      if (sec.count(key)) throw CaseParseError(line, "duplicate key '" + key + "' in [" + current + "]");
      sec[key] = Entry{value, line, false};
    }
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const Entry& require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw CaseParseError(0, "missing required key '" + key + "' in [" + section + "]");
    return *e;
  }

 private:
  std::map<std::string, Section> sections_;
};

inline double parse_double(const Entry& e, const std::string& key) {
  const std::string& v = e.value;
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out))
    throw CaseParseError(e.line, "key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

inline std::size_t parse_count(const Entry& e, const std::string& key) {
  const std::string& v = e.value;
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw CaseParseError(e.line, "key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return out;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto item = trim(std::string_view(v).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

}  // namespace detail

/// Parses and validates a case. `name` seeds default output file names.
inline CaseSpec parse_case(std::istream& in, const std::string& name = "case") {
  using detail::parse_count;
  using detail::parse_double;
  const detail::Document doc(in);
  CaseSpec cs;
  cs.name = name;

  auto num = [&](const char* sec, const char* key) { return parse_double(doc.require(sec, key), key); };
  auto num_or = [&](const char* sec, const char* key, double fallback) {
    const auto* e = doc.find(sec, key);
    return e ? parse_double(*e, key) : fallback;
  };
  auto word = [&](const char* sec, const char* key, const char* fallback) -> std::pair<std::string, std::size_t> {
    const auto* e = doc.find(sec, key);
    return e ? std::pair{e->value, e->line} : std::pair{std::string(fallback), std::size_t{0}};
  };

  const auto& n_entry = doc.require("grid", "n_cells");
  cs.grid.n_cells = parse_count(n_entry, "n_cells");
  const double length = num("grid", "length");
  if (!(length > 0.0)) throw CaseParseError(doc.require("grid", "length").line, "key 'length' must be > 0");
  cs.grid.x0 = num_or("grid", "x0", 0.0);
  if (cs.grid.n_cells == 0) throw CaseParseError(n_entry.line, "key 'n_cells' must be positive");
  cs.grid.h = length / static_cast<double>(cs.grid.n_cells);

  cs.eos.phase[0] = {num("eos", "K1"), num("eos", "p_inf1")};
  cs.eos.phase[1] = {num("eos", "K2"), num("eos", "p_inf2")};

  ModelConfig& m = cs.model;
  m.delta = num("model", "delta");
  m.r = num("model", "r");
  m.a = num("model", "a");
  m.g = num_or("model", "g", 0.0);
  m.mu = {num_or("model", "mu1", 0.0), num_or("model", "mu2", 0.0)};
  {
    const auto [form, line] = word("model", "form", "");
    if (form == "canonical") m.form = Form::Canonical;
    else if (form == "solved") m.form = Form::Solved;
    else throw CaseParseError(line, "key 'form' must be 'canonical' or 'solved'");
  }
  {
    const auto& e = doc.require("model", "order");
    if (e.value == "1") m.order = Order::P1;
    else if (e.value == "3") m.order = Order::P3;
    else throw CaseParseError(e.line, "key 'order' must be 1 or 3");
  }
  if (const auto* e = doc.find("model", "post_treatment_halfwidth"))
    m.post_treatment_halfwidth = parse_count(*e, "post_treatment_halfwidth");
  else
    m.post_treatment_halfwidth = m.order == Order::P3 ? 2 : 0;
  {
    const auto [stage, line] = word("model", "solved_closure", "time_n");
    if (stage == "time_n") m.solved_closure = SolvedClosureStage::TimeN;
    else if (stage == "bar") m.solved_closure = SolvedClosureStage::Bar;
    else throw CaseParseError(line, "key 'solved_closure' must be 'time_n' or 'bar'");
  }
  {
    const auto [base, line] = word("model", "correction_base", "rebased");
    if (base == "rebased") m.correction_base = CorrectionBase::Rebased;
    else if (base == "literal") m.correction_base = CorrectionBase::Literal;
    else throw CaseParseError(line, "key 'correction_base' must be 'rebased' or 'literal'");
  }

  auto state = [&](const char* sec) {
    Primitive w;
    w.alpha1 = num(sec, "alpha1");
    w.rho = {num(sec, "rho1"), num(sec, "rho2")};
    w.v = {num(sec, "v1"), num(sec, "v2")};
    w.p = num(sec, "p");
    const auto& a = doc.require(sec, "alpha1");
    if (!(w.alpha1 > 0.0 && w.alpha1 < 1.0))
      throw CaseParseError(a.line, std::string("key 'alpha1' in [") + sec + "] must lie in (0, 1)");
    for (const char* key : {"rho1", "rho2"}) {
      const auto& e = doc.require(sec, key);
      if (!(parse_double(e, key) > 0.0))
        throw CaseParseError(e.line, std::string("key '") + key + "' in [" + sec + "] must be > 0");
    }
    return w;
  };
  cs.left = state("left");
  cs.right = state("right");

  cs.t_end = num("run", "t_end");
  cs.interface_position = num("run", "interface_position");
  {
    const auto [bc, line] = word("run", "boundary", "transmissive");
    if (bc == "transmissive") cs.boundary = Boundary::Transmissive;
    else if (bc == "periodic") cs.boundary = Boundary::Periodic;
    else throw CaseParseError(line, "key 'boundary' must be 'transmissive' or 'periodic'");
  }
  {
    const auto [mode, line] = word("run", "final_step", "snap");
    if (mode == "snap") cs.final_step = FinalStep::Snap;
    else if (mode == "shorten") cs.final_step = FinalStep::Shorten;
    else throw CaseParseError(line, "key 'final_step' must be 'snap' or 'shorten'");
  }
  {
    const auto [flag, line] = word("run", "check_boundaries", "true");
    if (flag == "true") cs.check_boundaries = true;
    else if (flag == "false") cs.check_boundaries = false;
    else throw CaseParseError(line, "key 'check_boundaries' must be 'true' or 'false'");
  }
  cs.boundary_tolerance = num_or("run", "boundary_tolerance", cs.boundary_tolerance);

  if (const auto* e = doc.find("output", "times")) {
    for (const auto& item : detail::split_list(e->value))
      cs.output.times.push_back(parse_double(detail::Entry{item, e->line, false}, "times"));
  } else {
    cs.output.times.push_back(cs.t_end);
  }
  if (const auto* e = doc.find("output", "files")) {
    cs.output.files = detail::split_list(e->value);
    if (cs.output.files.size() != cs.output.times.size())
      throw CaseParseError(e->line, "key 'files' must list one file per snapshot time");
  } else {
    for (std::size_t s = 0; s < cs.output.times.size(); ++s) {
      std::ostringstream os;
      os << name << "_t" << cs.output.times[s] << ".csv";
      cs.output.files.push_back(os.str());
    }
  }

  try {
    cs.validate();
  } catch (const CaseParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw CaseParseError(0, e.what());
  }
  return cs;
}

inline CaseSpec parse_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseParseError(0, "cannot open case file '" + path + "'");
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  try {
    return parse_case(in, stem);
  } catch (const CaseParseError& e) {
    throw CaseParseError(0, path + ": " + e.what());
  }
}

/// Writes a case back in the same format (all keys explicit).
inline std::string format_case(const CaseSpec& cs) {
  std::ostringstream os;
  os.precision(17);
  auto list = [&](const auto& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::ostringstream item;
      item.precision(17);
      item << items[i];
      out += (i ? ", " : "") + item.str();
    }
    return out;
  };
  os << "[grid]\nn_cells = " << cs.grid.n_cells << "\nlength = " << cs.grid.length() << "\nx0 = " << cs.grid.x0
     << "\n\n[eos]\nK1 = " << cs.eos.K(0) << "\np_inf1 = " << cs.eos.p_inf(0) << "\nK2 = " << cs.eos.K(1)
     << "\np_inf2 = " << cs.eos.p_inf(1) << "\n\n[model]\ndelta = " << cs.model.delta
     << "\nform = " << (cs.model.form == Form::Canonical ? "canonical" : "solved")
     << "\norder = " << (cs.model.order == Order::P1 ? 1 : 3) << "\nr = " << cs.model.r << "\na = " << cs.model.a
     << "\ng = " << cs.model.g << "\nmu1 = " << cs.model.mu[0] << "\nmu2 = " << cs.model.mu[1]
     << "\npost_treatment_halfwidth = " << cs.model.post_treatment_halfwidth
     << "\nsolved_closure = " << (cs.model.solved_closure == SolvedClosureStage::TimeN ? "time_n" : "bar")
     << "\ncorrection_base = " << (cs.model.correction_base == CorrectionBase::Rebased ? "rebased" : "literal")
     << "\n";
  for (const auto& [sec, w] : {std::pair{"left", cs.left}, std::pair{"right", cs.right}})
    os << "\n[" << sec << "]\nalpha1 = " << w.alpha1 << "\nrho1 = " << w.rho[0] << "\nrho2 = " << w.rho[1]
       << "\nv1 = " << w.v[0] << "\nv2 = " << w.v[1] << "\np = " << w.p << "\n";
  os << "\n[run]\nt_end = " << cs.t_end << "\ninterface_position = " << cs.interface_position
     << "\nboundary = " << (cs.boundary == Boundary::Transmissive ? "transmissive" : "periodic")
     << "\nfinal_step = " << (cs.final_step == FinalStep::Snap ? "snap" : "shorten")
     << "\ncheck_boundaries = " << (cs.check_boundaries ? "true" : "false")
     << "\nboundary_tolerance = " << cs.boundary_tolerance << "\n\n[output]\ntimes = "
     << list(cs.output.times) << "\nfiles = " << list(cs.output.files) << "\n";
  return os.str();
}

}  // namespace twofluid
