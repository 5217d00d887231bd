#pragma once

#include "io.hpp"

#include <iosfwd>
#include <string>

namespace funcctl::cli {

struct AnalyzeArgs {
  std::string input;
  std::string out_path;  // empty: stdout
};

struct DesignArgs {
  std::string input;
  std::string controller_poles;
  std::string observer_poles;
  std::string augment = "auto";  // none | auto | file
  std::string out_path;
  bool allow_unstable_poles = false;
};

struct SimulateArgs {
  DesignArgs design;
  std::string x0;  // comma list; empty: all ones
  std::string w0;  // comma list; empty: zeros
  double dt = 1e-3;
  double t_final = 10.0;
  std::string out_path;  // empty: stdout
};

struct ReproduceArgs {
  std::string example;  // example1 | example2 | example3
  std::string out_path;
};

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_design(const DesignArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_reproduce(const ReproduceArgs& args, std::ostream& out, std::ostream& err);

/// Full argv dispatch; returns the process exit code
/// (0 ok, 2 input error, 3 infeasible design).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace funcctl::cli
