#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gcs/graph.hpp"

namespace gcs {

/// s+ = A s + B a with s in S and a in A_set.
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  ConvexSet state_set;
  ConvexSet control_set;
  Eigen::VectorXd s0;

  int q() const { return static_cast<int>(A.rows()); }
  int r() const { return static_cast<int>(B.cols()); }
  /// Throws std::invalid_argument on inconsistent dimensions or s0 outside S.
  void Validate() const;
};

/// gamma(s, a) = ||C [s; a] + d||^2 + c0
struct StageCost {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
  double c0{0.0};

  double Evaluate(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const;
};

/// s+ = A s + B a + c while s is in S.
struct PwaMode {
  ConvexSet S;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd c;
};

struct PwaSystem {
  std::vector<PwaMode> modes;
  ConvexSet control_set;
  StageCost stage;
  int horizon{1};
  Eigen::VectorXd s0;
  // Defaults to the origin.
  std::optional<ConvexSet> terminal_set;
  // Over the terminal state only: ||C s_T + d||^2 + c0.
  std::optional<StageCost> terminal_cost;

  int q() const { return static_cast<int>(s0.size()); }
  int r() const { return control_set.dim(); }
  /// Throws std::invalid_argument on inconsistent dimensions, horizon < 1,
  /// or s0 in no mode set.
  void Validate() const;
};

/// Chain s = v0, v1, ..., t of t_max + 1 vertices; every non-target vertex
/// has an edge to its successor and one to t, of unit length subject to the
/// dynamics. Positions are (state, control) pairs; the target is the origin
/// with zero control.
Gcs BuildMinTimeGcs(const LinearSystem& sys, int t_max);

/// Source, horizon layers of one vertex per mode, target. Source edges copy
/// the state at zero cost; every other edge costs the stage cost of its tail
/// subject to the tail's mode dynamics. Source and target controls are 0.
Gcs BuildPwaGcs(const PwaSystem& sys);

struct Trajectory {
  std::vector<Eigen::VectorXd> states;    // horizon + 1
  std::vector<Eigen::VectorXd> controls;  // horizon
  std::vector<int> modes;                 // PWA only, one per control
  double cost{0.0};
  int horizon() const { return static_cast<int>(controls.size()); }
};

/// States and controls along an optimal path of the min-time graph; the
/// horizon is the number of path edges.
Trajectory ExtractMinTime(const LinearSystem& sys, const Gcs& g, const PathResult& path);

/// States and controls along an optimal path of the layered PWA graph.
Trajectory ExtractPwa(const PwaSystem& sys, const Gcs& g, const PathResult& path);

/// Largest |s_{k+1} - (A s_k + B a_k)| over the trajectory.
double DynamicsResidual(const LinearSystem& sys, const Trajectory& traj);
double DynamicsResidual(const PwaSystem& sys, const Trajectory& traj);

/// Mode index of the layered vertex v, or -1 for source and target.
int PwaModeOf(const Gcs& g, int v);

/// Planar double integrator with state (q, v), q+ = q + v, v+ = v + eta a,
/// |v|_inf <= 1, |a|_inf <= 1, stage cost |v|^2 / 5 + |a|^2, driven from
/// (0.5, -3.5) to rest at (6.5, 3.5). Seven recreated position regions: five
/// with eta = 1 forming a winding corridor and two shortcuts with eta = 0.1.
PwaSystem FootstepSystem(int horizon = 30);

/// Four-region version small enough to enumerate every mode sequence: rest
/// at the origin to rest at (2, 0), direct route through an eta = 0.1 region
/// or a detour above it.
PwaSystem SmallFootstepSystem(int horizon);

}  // namespace gcs
