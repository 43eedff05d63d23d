#pragma once

#include <optional>
#include <string>
#include <vector>

#include "costate/bvp.hpp"
#include "costate/diagnostics.hpp"
#include "costate/direct.hpp"
#include "costate/integrator.hpp"
#include "costate/model.hpp"

namespace costate {

/// One exported node. Empty optional fields print as blank cells.
struct CsvRow {
  double t = 0.0;
  Vector q;
  Vector qdot;
  std::optional<Vector> lam;
  std::optional<Vector> lamdot;
  Vector u;
  std::optional<double> h_tilde;
  std::optional<double> noether;
  double objective_running = 0.0;
};

struct CsvTable {
  int dim = 0;
  std::vector<CsvRow> rows;
};

std::string csv_header(int n);

/// Rows carry `precision` significant digits in scientific notation.
void write_csv(const std::string& path, const CsvTable& table, int precision = 17);

/// Strict reader: header must match csv_header(n) for the n implied by it,
/// every row needs the full column count, numeric cells must parse exactly.
CsvTable read_csv(const std::string& path);

/// Trajectory of the combined system -> table. The noether column is filled
/// only when a generator is supplied.
CsvTable tabulate(const DiscreteTrajectory& traj, const ForceField& force,
                  const SymmetryGenerator* gen = nullptr);

/// Direct-solve export: costate columns stay blank, the final row repeats the
/// last control.
CsvTable tabulate(const DirectResult& result);

} // namespace costate
