#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gconv/graph.hpp"

namespace gconv {

class Rng;

// Faults the suite can inject into its own L̂ construction, to show that the
// checks actually bite.
enum class CheckFault { kNone, kDropSelfLoops };

struct CheckOptions {
  std::uint64_t seed = 0;
  CheckFault fault = CheckFault::kNone;
};

struct CheckResult {
  std::string name;
  std::string property;  // the mathematical property the check certifies
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

// Runs the whole invariant suite on fresh random instances drawn from
// options.seed.
std::vector<CheckResult> run_check_suite(const CheckOptions& options);

// Erdős–Rényi graph with n nodes and edge probability p.
Graph random_graph(Rng& rng, int n, double p);

// Random symmetric n×n matrix with entries in [-1, 1].
Eigen::MatrixXd random_symmetric(Rng& rng, int n);

}  // namespace gconv
