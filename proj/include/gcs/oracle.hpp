#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gcs/conic.hpp"
#include "gcs/formulation.hpp"
#include "gcs/graph.hpp"

namespace gcs {

enum class CertifyStatus : std::uint8_t { kOptimal, kInfeasible, kOverflow, kNumericalFailure };

const char* ToString(CertifyStatus status);

struct CertifyResult {
  CertifyStatus status{CertifyStatus::kInfeasible};
  double cost{0.0};
  PathResult best;
  size_t paths_checked{0};
};

/// Convex program for a fixed vertex path: positions constrained to their
/// sets, edge lengths through epigraphs. Returns nullopt when infeasible or
/// when consecutive vertices are not joined by an edge.
std::optional<PathResult> SolvePath(const Gcs& g, const std::vector<int>& path,
                                    const ToleranceConfig& tol = {});

/// Global optimum by enumerating every simple s-t path (at most max_paths)
/// and solving each one. jobs > 1 spreads the path solves over threads.
CertifyResult Certify(const Gcs& g, size_t max_paths, const ToleranceConfig& tol = {},
                      int jobs = 1);

struct ExactnessReport {
  int trials{0};
  int solved{0};
  double max_product_error{0.0};     // max |Z - x y'|
  double max_membership_error{0.0};  // distance of the reconstructed x outside X
  bool pass{false};
};

/// Samples block-feasible (x, y, Z) with y held at `y_point` by minimizing
/// random linear objectives, then measures how far Z is from x y'.
ExactnessReport CheckExtremeExactness(const ConvexSet& X, const std::vector<Halfspace>& Y,
                                      const Eigen::VectorXd& y_point, int trials,
                                      std::uint64_t seed = 1, double tol = 1e-6);

}  // namespace gcs
