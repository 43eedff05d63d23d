#include "costate/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace costate {

std::string csv_header(int n) {
  std::ostringstream out;
  out << "t";
  auto block = [&](const char* stem) {
    for (int i = 0; i < n; ++i) out << ',' << stem << i;
  };
  block("q");
  block("qdot");
  block("lam");
  block("lamdot");
  block("u");
  out << ",H_tilde,noether,objective_running";
  return out.str();
}

namespace {

std::string format_cell(double x, int precision) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", precision - 1, x);
  return buf;
}

void append_vector(std::string& line, const Vector& x, int precision) {
  for (int i = 0; i < x.size(); ++i) {
    line += ',';
    line += format_cell(x(i), precision);
  }
}

void append_blanks(std::string& line, int count) {
  line.append(static_cast<size_t>(count), ',');
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  size_t begin = 0;
  while (true) {
    const size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(begin));
      return cells;
    }
    cells.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

double parse_cell(const std::string& cell, int line_no) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("csv: unparseable number '" + cell + "' at line " +
                             std::to_string(line_no));
  if (!std::isfinite(value))
    throw std::runtime_error("csv: non-finite value at line " + std::to_string(line_no));
  return value;
}

// Reads n consecutive cells as a vector; all blank yields nothing, a mix of
// blank and numeric cells is a schema violation.
std::optional<Vector> parse_group(const std::vector<std::string>& cells, int offset, int n,
                                  int line_no) {
  int blanks = 0;
  for (int i = 0; i < n; ++i)
    if (cells[offset + i].empty()) ++blanks;
  if (blanks == n) return std::nullopt;
  if (blanks != 0)
    throw std::runtime_error("csv: partially blank vector block at line " +
                             std::to_string(line_no));
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = parse_cell(cells[offset + i], line_no);
  return x;
}

} // namespace

void write_csv(const std::string& path, const CsvTable& table, int precision) {
  if (precision < 1 || precision > 17)
    throw std::invalid_argument("write_csv: precision must be in [1, 17]");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  const int n = table.dim;
  out << csv_header(n) << '\n';
  for (const CsvRow& row : table.rows) {
    std::string line = format_cell(row.t, precision);
    append_vector(line, row.q, precision);
    append_vector(line, row.qdot, precision);
    if (row.lam)
      append_vector(line, *row.lam, precision);
    else
      append_blanks(line, n);
    if (row.lamdot)
      append_vector(line, *row.lamdot, precision);
    else
      append_blanks(line, n);
    append_vector(line, row.u, precision);
    line += ',';
    if (row.h_tilde) line += format_cell(*row.h_tilde, precision);
    line += ',';
    if (row.noether) line += format_cell(*row.noether, precision);
    line += ',';
    line += format_cell(row.objective_running, precision);
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file");
  const int cols = static_cast<int>(split_row(line).size());
  if (cols < 9 || (cols - 4) % 5 != 0)
    throw std::runtime_error("read_csv: header has unexpected column count");
  const int n = (cols - 4) / 5;
  if (line != csv_header(n)) throw std::runtime_error("read_csv: header does not match schema");

  CsvTable table;
  table.dim = n;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    if (static_cast<int>(cells.size()) != cols)
      throw std::runtime_error("read_csv: wrong column count at line " + std::to_string(line_no));
    CsvRow row;
    row.t = parse_cell(cells[0], line_no);
    auto required = [&](int offset, const char* what) {
      const std::optional<Vector> x = parse_group(cells, offset, n, line_no);
      if (!x)
        throw std::runtime_error(std::string("read_csv: blank ") + what + " block at line " +
                                 std::to_string(line_no));
      return *x;
    };
    row.q = required(1, "q");
    row.qdot = required(1 + n, "qdot");
    row.lam = parse_group(cells, 1 + 2 * n, n, line_no);
    row.lamdot = parse_group(cells, 1 + 3 * n, n, line_no);
    row.u = required(1 + 4 * n, "u");
    if (!cells[1 + 5 * n].empty()) row.h_tilde = parse_cell(cells[1 + 5 * n], line_no);
    if (!cells[2 + 5 * n].empty()) row.noether = parse_cell(cells[2 + 5 * n], line_no);
    row.objective_running = parse_cell(cells[3 + 5 * n], line_no);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw std::runtime_error("read_csv: no data rows");
  return table;
}

CsvTable tabulate(const DiscreteTrajectory& traj, const ForceField& force,
                  const SymmetryGenerator* gen) {
  CsvTable table;
  table.dim = traj.dim();
  const double h = traj.grid.h();
  double running = 0.0;
  double prev_integrand = 0.0;
  for (size_t k = 0; k < traj.nodes.size(); ++k) {
    const auto [y, ydot] = legendre_inverse(traj.nodes[k]);
    const double integrand = 0.5 * y.lam.squaredNorm();
    if (k > 0) running += 0.5 * h * (prev_integrand + integrand);
    prev_integrand = integrand;
    CsvRow row;
    row.t = traj.grid.node(static_cast<int>(k));
    row.q = y.q;
    row.qdot = ydot.qdot;
    row.lam = y.lam;
    row.lamdot = ydot.lamdot;
    row.u = y.lam;
    row.h_tilde = new_hamiltonian(traj.nodes[k], force);
    if (gen) row.noether = noether_momentum(traj.nodes[k], *gen);
    row.objective_running = running;
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable tabulate(const DirectResult& result) {
  CsvTable table;
  table.dim = result.controls.dim();
  const double h = result.states.grid.h();
  double running = 0.0;
  const size_t count = result.states.q.size();
  for (size_t k = 0; k < count; ++k) {
    CsvRow row;
    row.t = result.states.grid.node(static_cast<int>(k));
    row.q = result.states.q[k];
    row.qdot = result.states.v[k];
    row.u = result.controls.u[std::min(k, result.controls.u.size() - 1)];
    row.objective_running = running;
    table.rows.push_back(std::move(row));
    if (k < result.controls.u.size()) running += 0.5 * h * result.controls.u[k].squaredNorm();
  }
  return table;
}

} // namespace costate
