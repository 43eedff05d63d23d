#pragma once

#include <optional>
#include <string>
#include <vector>

#include "costate/types.hpp"

namespace costate::cli {

/// Shared command-line options after parsing.
struct CommonArgs {
  std::string config_path;
  std::string method = "variational";
  std::optional<std::string> out_path;
  std::optional<Vector> lam0;
  std::optional<Vector> lamdot0;
  std::optional<unsigned> seed;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad arguments or config
inline constexpr int kExitNoConverge = 2;

int cmd_solve(const CommonArgs& args);
int cmd_simulate(const CommonArgs& args);
int cmd_direct(const CommonArgs& args);
int cmd_verify(const CommonArgs& args);
int cmd_compare(const CommonArgs& args);

/// Full argv dispatch; what tools/main.cpp calls.
int run(const std::vector<std::string>& argv);

} // namespace costate::cli
