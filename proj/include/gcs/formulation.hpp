#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gcs/conic.hpp"
#include "gcs/graph.hpp"

namespace gcs {

/// Degree and two-cycle rows; emitted only for cyclic graphs.
struct TighteningOptions {
  bool degree{true};
  bool two_cycle{true};
};

struct EdgeVariables {
  int y{-1};
  int z{-1};   // first of dim(u) entries
  int zp{-1};  // first of dim(v) entries
  int t{-1};
};

struct VariableLayout {
  std::vector<EdgeVariables> edges;
  int num_variables{0};
  // Scalar row count per constraint family.
  std::map<RowTag, int> row_counts;
};

struct RelaxationProgram {
  ConicProgram program;
  VariableLayout layout;
  std::shared_ptr<const Gcs> graph;
  bool tightened{false};
  // Constraint indices used for dual extraction; -1 where absent.
  int source_row{-1};
  int target_row{-1};
  std::vector<int> conservation_row;
  std::vector<int> conservation_vector_row;
};

/// Classical network-flow LP with scalar lengths; y_e is variable e.
ConicProgram BuildFlowLp(const Gcs& g, const std::vector<double>& lengths);

/// Convex relaxation of the mixed-integer program (integrality dropped).
RelaxationProgram BuildRelaxation(std::shared_ptr<const Gcs> g,
                                  const TighteningOptions& opts = {});
RelaxationProgram BuildRelaxation(const Gcs& g, const TighteningOptions& opts = {});

struct FlowBound {
  double lo{0.0};
  double hi{1.0};
};

/// Copy of the program with y_e restricted to [lo, hi] for each listed edge.
RelaxationProgram FixFlows(const RelaxationProgram& prog, const std::map<int, FlowBound>& fix);

struct FlowSolution {
  SolveStatus status{SolveStatus::kNumericalFailure};
  double cost{0.0};
  Eigen::VectorXd y;
  std::vector<Eigen::VectorXd> z;
  std::vector<Eigen::VectorXd> zp;
  Eigen::VectorXd t;
  std::vector<Eigen::VectorXd> x;  // per vertex
  std::vector<bool> visited;       // false where x is the Chebyshev-center fallback
  std::vector<std::optional<Eigen::VectorXd>> zbar;
  std::vector<std::optional<Eigen::VectorXd>> zpbar;
  std::vector<int> path;  // vertex path when the flows are integral
  double lower_bound{0.0};
  double upper_bound{0.0};
  std::vector<double> p;               // potentials, when extracted
  std::vector<Eigen::VectorXd> r;
};

/// Flow below this value counts as zero when dividing by it.
inline constexpr double kFlowZero = 1e-7;

FlowSolution Reconstruct(const RelaxationProgram& prog, const ConicSolution& raw,
                         double integrality_tol = 1e-5);

/// Walks from the source along edges with y_e >= 1 - tol; empty unless this
/// reaches the target on distinct vertices.
std::vector<int> IntegralPath(const Gcs& g, const Eigen::VectorXd& y, double tol);

/// c'y + d >= 0.
struct Halfspace {
  Eigen::VectorXd c;
  double d{0.0};
};

/// Conic block over (x [n], y [m], Z [n x m] column-major) enforcing
/// (Z c_j + d_j x, c_j'y + d_j) in the perspective cone of X for every j.
/// Requires the trivial inequality (0, d > 0) among the halfspaces.
ConstraintBlock RelaxBilinear(const ConvexSet& X, const std::vector<Halfspace>& Y);

}  // namespace gcs
