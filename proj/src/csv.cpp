#include "vsheet/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "vsheet/error.hpp"

namespace vsheet {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Io, "cannot parse number '" + s + "'");
  }
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  require(r.ec == std::errc() && r.ptr == s.data() + s.size(), ErrorKind::Io, "cannot parse integer '" + s + "'");
  return v;
}

bool is_header(const std::string& line) { return !line.empty() && (line[0] == 't' || line[0] == 'k'); }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const SpectralField& field, bool header) {
  if (header) os << "k,re,im\n";
  const auto& g = field.grid();
  for (int k = g.k_min(); k <= g.k_max(); ++k)
    os << k << ',' << format_double(field[k].real()) << ',' << format_double(field[k].imag()) << '\n';
}

void write_csv(std::ostream& os, const SpaceTimeField& field, bool header) {
  if (header) os << "t,k,re,im\n";
  const auto& g = field.grid();
  for (int i = 0; i < field.size(); ++i) {
    const std::string t = format_double(field.times()[i]);
    for (int k = g.k_min(); k <= g.k_max(); ++k)
      os << t << ',' << k << ',' << format_double(field[i][k].real()) << ','
         << format_double(field[i][k].imag()) << '\n';
  }
}

SpectralField read_spectral_csv(std::istream& is, const FrequencyGrid& grid) {
  SpectralField f(grid);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || is_header(line)) continue;
    const auto cells = split(line);
    require(cells.size() == 3, ErrorKind::Io, "expected 3 columns: " + line);
    const int k = parse_int(cells[0]);
    require(k >= grid.k_min() && k <= grid.k_max(), ErrorKind::Io, "mode out of range: " + line);
    f[k] = cplx(parse_double(cells[1]), parse_double(cells[2]));
    ++rows;
  }
  require(rows == grid.n_modes(), ErrorKind::Io, "row count does not match grid");
  return f;
}

SpaceTimeField read_spacetime_csv(std::istream& is, const FrequencyGrid& grid) {
  std::vector<double> times;
  std::vector<SpectralField> slices;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || is_header(line)) continue;
    const auto cells = split(line);
    require(cells.size() == 4, ErrorKind::Io, "expected 4 columns: " + line);
    const double t = parse_double(cells[0]);
    if (times.empty() || times.back() != t) {
      times.push_back(t);
      slices.emplace_back(grid);
    }
    const int k = parse_int(cells[1]);
    require(k >= grid.k_min() && k <= grid.k_max(), ErrorKind::Io, "mode out of range: " + line);
    slices.back()[k] = cplx(parse_double(cells[2]), parse_double(cells[3]));
  }
  require(!slices.empty(), ErrorKind::Io, "empty space-time csv");
  return SpaceTimeField(TimeGrid(std::move(times)), std::move(slices));
}

}  // namespace vsheet
