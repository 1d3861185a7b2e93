#pragma once

// Snapshot CSV files (`x,alpha1,rho1,rho2,v1,v2,p,E1,E2`, 17 significant
// digits, LF endings) and the companion gnuplot script.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "twofluid/driver.hpp"
#include "twofluid/errors.hpp"

namespace twofluid {

inline constexpr std::string_view kCsvHeader = "x,alpha1,rho1,rho2,v1,v2,p,E1,E2";

namespace detail {
inline void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}
}  // namespace detail

inline std::string snapshot_csv(const Snapshot& s) {
  std::string out(kCsvHeader);
  out += '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    detail::append_number(out, s.x[i]);
    for (const auto& c : s.col) {
      out += ',';
      detail::append_number(out, c[i]);
    }
    out += '\n';
  }
  return out;
}

inline void write_snapshot_csv(const Snapshot& s, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::system_error(errno, std::generic_category(), "cannot write " + path);
  const auto text = snapshot_csv(s);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw std::system_error(errno, std::generic_category(), "write failed: " + path);
}

inline Snapshot parse_snapshot_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ValidationError("snapshot csv: bad header");
  Snapshot s;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> values;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw ValidationError("snapshot csv: bad number on line " + std::to_string(row));
      values.push_back(v);
      if (ptr == end) break;
      if (*ptr != ',') throw ValidationError("snapshot csv: bad separator on line " + std::to_string(row));
      p = ptr + 1;
    }
    if (values.size() != kColumns + 1)
      throw ValidationError("snapshot csv: expected 9 columns on line " + std::to_string(row));
    s.x.push_back(values[0]);
    for (std::size_t c = 0; c < kColumns; ++c) s.col[c].push_back(values[c + 1]);
  }
  return s;
}

inline Snapshot read_snapshot_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot read " + path);
  return parse_snapshot_csv(in);
}

/// A gnuplot script that draws the six primitive columns of each CSV.
inline std::string plot_script(const std::vector<std::string>& csv_files, const std::string& png) {
  std::ostringstream os;
  os << "# gnuplot " << "script generated with the snapshots\n"
     << "set datafile separator ','\nset terminal pngcairo size 1400,900\nset output '" << png << "'\n"
     << "set multiplot layout 2,3\nset key off\n";
  const char* titles[] = {"alpha1", "rho1", "rho2", "v1", "v2", "p"};
  for (int c = 0; c < 6; ++c) {
    os << "set title '" << titles[c] << "'\nplot ";
    for (std::size_t f = 0; f < csv_files.size(); ++f)
      os << (f ? ", " : "") << "'" << csv_files[f] << "' using 1:" << c + 2 << " every ::1 with lines";
    os << "\n";
  }
  os << "unset multiplot\n";
  return os.str();
}

}  // namespace twofluid
