#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gcs/conic.hpp"
#include "gcs/formulation.hpp"
#include "gcs/graph.hpp"

namespace gcs {

enum class BranchingRule : std::uint8_t { kMostFractional, kPseudoCost };

struct BnbConfig {
  double integrality_tol{1e-5};
  double rel_gap_tol{1e-6};
  double abs_gap_tol{1e-9};
  long node_limit{100000};
  double time_limit{3600.0};  // seconds
  BranchingRule branching{BranchingRule::kMostFractional};
  int root_rounding{1};
  int node_rounding{0};
  TighteningOptions tightening;
  ToleranceConfig solver;
  // Nodes evaluated per batch; 1 is strictly sequential.
  int jobs{1};
  // Receives each per-node log line as it is produced.
  std::function<void(const std::string&)> on_log;
};

enum class BnbStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kNodeLimit,
  kTimeLimit,
  kNumericalFailure,
};

const char* ToString(BnbStatus status);

struct BnbReport {
  BnbStatus status{BnbStatus::kInfeasible};
  FlowSolution incumbent;          // integral flows of the best path
  std::optional<PathResult> path;  // the same solution as a path
  double cost{std::numeric_limits<double>::infinity()};
  double lower_bound{-std::numeric_limits<double>::infinity()};
  double root_bound{-std::numeric_limits<double>::infinity()};
  double gap{std::numeric_limits<double>::infinity()};
  long nodes{0};
  double seconds{0.0};
  std::vector<std::string> log;
  std::string error;
};

/// Global optimum of the mixed-integer program by best-bound branch and
/// bound on the flow variables.
BnbReport SolveMicp(const Gcs& g, const BnbConfig& cfg = {});
BnbReport SolveMicp(std::shared_ptr<const Gcs> g, const BnbConfig& cfg = {});

/// Depth-first walk from the source, always trying the largest unvisited
/// outgoing flow first; on reaching the target, solves the program with the
/// flows fixed to that path. nullopt when no path is found or the restricted
/// program is infeasible. When
/// `fixed` is given it receives the restricted solution.
std::optional<PathResult> RoundIncumbent(const RelaxationProgram& prog, const FlowSolution& relax,
                                         const ToleranceConfig& tol = {},
                                         FlowSolution* fixed = nullptr);

/// Path and positions of an integral flow solution.
PathResult ToPathResult(const Gcs& g, const FlowSolution& sol);

}  // namespace gcs
