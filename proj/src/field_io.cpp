#include "sparse_ocp/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "sparse_ocp/error.hpp"

namespace sparse_ocp {

namespace {

std::string header(const SpaceTimeGrid& g, bool slice) {
  std::string h = slice ? "" : "k,";
  h += g.dim() == 1 ? "i0" : "i0,i1";
  return h + ",value";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const Field& f, std::ostream& out) {
  const SpaceTimeGrid& g = f.grid();
  out << header(g, f.is_slice()) << '\n';
  for (int k = 1; k <= f.levels(); ++k) {
    auto lvl = f.level(k);
    for (std::size_t n = 0; n < g.nodes(); ++n) {
      if (!f.is_slice()) out << k << ',';
      out << g.axis_index(n, 0);
      if (g.dim() == 2) out << ',' << g.axis_index(n, 1);
      out << ',' << format_double(lvl[n]) << '\n';
    }
  }
}

void write_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  write_csv(f, out);
}

Field read_csv(const SpaceTimeGrid& grid, FieldKind kind, std::istream& in) {
  const bool slice = kind == FieldKind::TerminalSlice;
  Field f = slice ? Field::terminal_slice(grid) : Field::space_time(grid);
  std::vector<bool> seen(f.size(), false);

  std::string line;
  if (!std::getline(in, line) || line != header(grid, slice))
    throw InvalidInput("field csv: expected header '" + header(grid, slice) + "'");

  const int columns = (slice ? 0 : 1) + grid.dim() + 1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != columns)
      throw InvalidInput("field csv line " + std::to_string(line_no) + ": wrong column count");
    try {
      int c = 0;
      const int k = slice ? 1 : std::stoi(cells[c++]);
      const int i0 = std::stoi(cells[c++]);
      const int i1 = grid.dim() == 2 ? std::stoi(cells[c++]) : 0;
      const double value = std::stod(cells[c]);
      if (k < 1 || k > f.levels() || i0 < 0 || i0 >= grid.nx() || i1 < 0 || i1 >= grid.nx())
        throw InvalidInput("index out of range");
      const std::size_t flat =
          static_cast<std::size_t>(k - 1) * grid.nodes() + i0 + static_cast<std::size_t>(i1) * grid.nx();
      f[flat] = value;
      seen[flat] = true;
    } catch (const std::exception& e) {
      throw InvalidInput("field csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (bool s : seen)
    if (!s) throw InvalidInput("field csv: missing nodes");
  return f;
}

Field read_csv(const SpaceTimeGrid& grid, FieldKind kind, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_csv(grid, kind, in);
}

}  // namespace sparse_ocp
