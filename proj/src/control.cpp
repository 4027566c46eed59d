#include "gcs/control.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace gcs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd Concat(const VectorXd& a, const VectorXd& b) {
  VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

// x_v's state equals A s_u + B a_u + c, with x = (s, a).
AffineEdgeConstraint Dynamics(const MatrixXd& A, const MatrixXd& B, const VectorXd& c) {
  const int q = static_cast<int>(A.rows());
  const int r = static_cast<int>(B.cols());
  AffineEdgeConstraint k;
  k.E.resize(q, q + r);
  k.E << -A, -B;
  k.F = MatrixXd::Zero(q, q + r);
  k.F.leftCols(q).setIdentity();
  k.g = c;
  return k;
}

ConvexSet ZeroControls(const VectorXd& s, int r) {
  return ConvexSet::MakeSingleton(Concat(s, VectorXd::Zero(r)));
}

// Positions (s, a) of a path vertex.
VectorXd StateOf(const VectorXd& x, int q) { return x.head(q); }
VectorXd ControlOf(const VectorXd& x, int q) { return x.tail(x.size() - q); }

}  // namespace

void LinearSystem::Validate() const {
  if (A.rows() != A.cols()) throw std::invalid_argument("linear system: A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("linear system: B rows must match A");
  if (state_set.dim() != q() || s0.size() != q()) {
    throw std::invalid_argument("linear system: state dimension mismatch");
  }
  if (control_set.dim() != r()) throw std::invalid_argument("linear system: control dimension mismatch");
  if (!state_set.Contains(s0, 1e-9)) throw std::invalid_argument("linear system: s0 outside the state set");
}

double StageCost::Evaluate(const VectorXd& s, const VectorXd& a) const {
  return (C * Concat(s, a) + d).squaredNorm() + c0;
}

void PwaSystem::Validate() const {
  if (horizon < 1) throw std::invalid_argument("pwa system: horizon must be at least 1");
  if (modes.empty()) throw std::invalid_argument("pwa system: no modes");
  bool covered = false;
  for (size_t i = 0; i < modes.size(); ++i) {
    const PwaMode& m = modes[i];
    if (m.S.dim() != q() || m.A.rows() != q() || m.A.cols() != q() || m.B.rows() != q() ||
        m.B.cols() != r() || m.c.size() != q()) {
      throw std::invalid_argument(fmt::format("pwa system: mode {} has inconsistent dimensions", i));
    }
    covered = covered || m.S.Contains(s0, 1e-9);
  }
  if (stage.C.cols() != q() + r() || stage.C.rows() != stage.d.size()) {
    throw std::invalid_argument("pwa system: stage cost dimension mismatch");
  }
  if (terminal_set && terminal_set->dim() != q()) {
    throw std::invalid_argument("pwa system: terminal set dimension mismatch");
  }
  if (terminal_cost && (terminal_cost->C.cols() != q() ||
                        terminal_cost->C.rows() != terminal_cost->d.size())) {
    throw std::invalid_argument("pwa system: terminal cost dimension mismatch");
  }
  if (!covered) throw std::invalid_argument("pwa system: s0 lies in no mode set");
}

Gcs BuildMinTimeGcs(const LinearSystem& sys, int t_max) {
  if (t_max < 1) throw std::invalid_argument("min-time: horizon limit must be at least 1");
  sys.Validate();
  const int q = sys.q(), r = sys.r();
  std::vector<VertexSpec> vs;
  vs.push_back({"s", ConvexSet::MakeProduct({ConvexSet::MakeSingleton(sys.s0), sys.control_set})});
  for (int k = 1; k < t_max; ++k) {
    vs.push_back({fmt::format("v{}", k), ConvexSet::MakeProduct({sys.state_set, sys.control_set})});
  }
  vs.push_back({"t", ZeroControls(VectorXd::Zero(q), r)});

  const EdgeLength step(ConstantWithConstraint{1.0, Dynamics(sys.A, sys.B, VectorXd::Zero(q))});
  std::vector<EdgeSpec> es;
  for (int k = 0; k < t_max; ++k) {
    es.push_back({vs[k].id, vs[k + 1].id, step});
    if (k + 1 < t_max) es.push_back({vs[k].id, "t", step});
  }
  return Gcs::Build(std::move(vs), std::move(es), "s", "t");
}

Gcs BuildPwaGcs(const PwaSystem& sys) {
  sys.Validate();
  const int q = sys.q(), r = sys.r();
  const int modes = static_cast<int>(sys.modes.size());
  auto id = [](int layer, int mode) { return fmt::format("L{}m{}", layer, mode); };

  std::vector<VertexSpec> vs;
  vs.push_back({"s", ZeroControls(sys.s0, r)});
  for (int k = 1; k <= sys.horizon; ++k) {
    for (int i = 0; i < modes; ++i) {
      vs.push_back({id(k, i), ConvexSet::MakeProduct({sys.modes[i].S, sys.control_set})});
    }
  }
  const ConvexSet terminal =
      sys.terminal_set ? *sys.terminal_set : ConvexSet::MakeSingleton(VectorXd::Zero(q));
  vs.push_back({"t", ConvexSet::MakeProduct({terminal, ConvexSet::MakeSingleton(VectorXd::Zero(r))})});

  // Stage cost of the tail, padded with zero columns for the head.
  const int n = q + r;
  auto stage_length = [&](const PwaMode& m, bool into_target) {
    SqNorm2Affine quad;
    const int rows = static_cast<int>(sys.stage.C.rows());
    const int extra = into_target && sys.terminal_cost ? static_cast<int>(sys.terminal_cost->C.rows()) : 0;
    quad.C = MatrixXd::Zero(rows + extra, 2 * n);
    quad.C.topLeftCorner(rows, n) = sys.stage.C;
    quad.d = VectorXd::Zero(rows + extra);
    quad.d.head(rows) = sys.stage.d;
    double c0 = sys.stage.c0;
    if (extra > 0) {
      quad.C.block(rows, n, extra, q) = sys.terminal_cost->C;
      quad.d.tail(extra) = sys.terminal_cost->d;
      c0 += sys.terminal_cost->c0;
    }
    return EdgeLength(QuadraticWithConstraint{quad, c0, Dynamics(m.A, m.B, m.c)});
  };
  const EdgeLength copy(ConstantWithConstraint{
      0.0, Dynamics(MatrixXd::Identity(q, q), MatrixXd::Zero(q, r), VectorXd::Zero(q))});

  std::vector<EdgeSpec> es;
  for (int i = 0; i < modes; ++i) es.push_back({"s", id(1, i), copy});
  for (int k = 1; k < sys.horizon; ++k) {
    for (int i = 0; i < modes; ++i) {
      const EdgeLength len = stage_length(sys.modes[i], false);
      for (int j = 0; j < modes; ++j) es.push_back({id(k, i), id(k + 1, j), len});
    }
  }
  for (int i = 0; i < modes; ++i) {
    es.push_back({id(sys.horizon, i), "t", stage_length(sys.modes[i], true)});
  }
  return Gcs::Build(std::move(vs), std::move(es), "s", "t");
}

Trajectory ExtractMinTime(const LinearSystem& sys, const Gcs& g, const PathResult& path) {
  (void)g;
  const int q = sys.q();
  Trajectory traj;
  for (size_t k = 0; k < path.positions.size(); ++k) {
    traj.states.push_back(StateOf(path.positions[k], q));
    if (k + 1 < path.positions.size()) traj.controls.push_back(ControlOf(path.positions[k], q));
  }
  traj.cost = traj.horizon();
  return traj;
}

int PwaModeOf(const Gcs& g, int v) {
  if (v == g.source() || v == g.target()) return -1;
  const std::string& id = g.vertex(v).id;
  const size_t m = id.find('m');
  if (id.empty() || id[0] != 'L' || m == std::string::npos) return -1;
  return std::stoi(id.substr(m + 1));
}

Trajectory ExtractPwa(const PwaSystem& sys, const Gcs& g, const PathResult& path) {
  const int q = sys.q();
  if (path.path.size() != static_cast<size_t>(sys.horizon + 2)) {
    throw std::invalid_argument("pwa trajectory: path must have horizon + 2 vertices");
  }
  Trajectory traj;
  for (int k = 1; k <= sys.horizon; ++k) {
    traj.states.push_back(StateOf(path.positions[k], q));
    traj.controls.push_back(ControlOf(path.positions[k], q));
    traj.modes.push_back(PwaModeOf(g, path.path[k]));
  }
  traj.states.push_back(StateOf(path.positions.back(), q));
  for (int k = 0; k < sys.horizon; ++k) traj.cost += sys.stage.Evaluate(traj.states[k], traj.controls[k]);
  if (sys.terminal_cost) {
    traj.cost += (sys.terminal_cost->C * traj.states.back() + sys.terminal_cost->d).squaredNorm() +
                 sys.terminal_cost->c0;
  }
  return traj;
}

double DynamicsResidual(const LinearSystem& sys, const Trajectory& traj) {
  double worst = 0.0;
  for (int k = 0; k < traj.horizon(); ++k) {
    const VectorXd next = sys.A * traj.states[k] + sys.B * traj.controls[k];
    worst = std::max(worst, (traj.states[k + 1] - next).cwiseAbs().maxCoeff());
  }
  return worst;
}

double DynamicsResidual(const PwaSystem& sys, const Trajectory& traj) {
  double worst = 0.0;
  for (int k = 0; k < traj.horizon(); ++k) {
    const PwaMode& m = sys.modes.at(traj.modes.at(k));
    const VectorXd next = m.A * traj.states[k] + m.B * traj.controls[k] + m.c;
    worst = std::max(worst, (traj.states[k + 1] - next).cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

PwaMode DoubleIntegratorMode(double x0, double y0, double x1, double y1, double eta) {
  VectorXd lo(4), hi(4);
  lo << x0, y0, -1, -1;
  hi << x1, y1, 1, 1;
  MatrixXd A = MatrixXd::Identity(4, 4);
  A.topRightCorner(2, 2).setIdentity();
  MatrixXd B = MatrixXd::Zero(4, 2);
  B.bottomRows(2) = eta * MatrixXd::Identity(2, 2);
  return {ConvexSet::MakeBox(lo, hi), A, B, VectorXd::Zero(4)};
}

PwaSystem DoubleIntegrator(std::vector<PwaMode> modes, const Eigen::Vector2d& start,
                           const Eigen::Vector2d& goal, int horizon) {
  StageCost stage;
  stage.C = MatrixXd::Zero(4, 6);
  stage.C.block(0, 2, 2, 2) = MatrixXd::Identity(2, 2) / std::sqrt(5.0);
  stage.C.block(2, 4, 2, 2).setIdentity();
  stage.d = VectorXd::Zero(4);
  return {std::move(modes),
          ConvexSet::MakeBox(-VectorXd::Ones(2), VectorXd::Ones(2)),
          stage,
          horizon,
          Concat(start, VectorXd::Zero(2)),
          ConvexSet::MakeSingleton(Concat(goal, VectorXd::Zero(2))),
          std::nullopt};
}

}  // namespace

PwaSystem FootstepSystem(int horizon) {
  std::vector<PwaMode> modes{
      DoubleIntegratorMode(0.0, -4.0, 7.0, -3.0, 1.0),  // bottom corridor
      DoubleIntegratorMode(6.0, -3.5, 7.0, 0.0, 1.0),   // right riser
      DoubleIntegratorMode(0.0, -0.5, 7.0, 0.5, 1.0),   // middle corridor
      DoubleIntegratorMode(0.0, 0.0, 1.0, 3.5, 1.0),    // left riser
      DoubleIntegratorMode(0.0, 3.0, 7.0, 4.0, 1.0),    // top corridor
      DoubleIntegratorMode(1.0, -3.0, 6.0, -0.5, 0.1),  // lower shortcut
      DoubleIntegratorMode(1.0, 0.5, 6.0, 3.0, 0.1),    // upper shortcut
  };
  return DoubleIntegrator(std::move(modes), {0.5, -3.5}, {6.5, 3.5}, horizon);
}

PwaSystem SmallFootstepSystem(int horizon) {
  std::vector<PwaMode> modes{
      DoubleIntegratorMode(-0.5, -0.4, 0.8, 0.4, 1.0),  // start
      DoubleIntegratorMode(0.8, -0.4, 1.2, 0.4, 0.1),   // shortcut
      DoubleIntegratorMode(0.5, 0.4, 1.5, 1.2, 1.0),    // detour
      DoubleIntegratorMode(1.2, -0.4, 2.5, 0.4, 1.0),   // goal
  };
  return DoubleIntegrator(std::move(modes), {0.0, 0.0}, {2.0, 0.0}, horizon);
}

}  // namespace gcs
