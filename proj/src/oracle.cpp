#include "gcs/oracle.hpp"

#include <atomic>
#include <limits>
#include <random>
#include <thread>

namespace gcs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* ToString(CertifyStatus status) {
  switch (status) {
    case CertifyStatus::kOptimal: return "optimal";
    case CertifyStatus::kInfeasible: return "infeasible";
    case CertifyStatus::kOverflow: return "overflow";
    case CertifyStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

std::optional<PathResult> SolvePath(const Gcs& g, const std::vector<int>& path,
                                    const ToleranceConfig& tol) {
  ConicProgram prog;
  std::vector<int> pos(path.size());
  for (size_t k = 0; k < path.size(); ++k) {
    const int v = path[k];
    pos[k] = prog.AddVariables(g.dim(v));
    LinExprVec args = Vars(pos[k], g.dim(v));
    args.emplace_back(1.0);
    prog.AddBlock(g.vertex(v).set.Perspective(), args, RowTag::kPerspective, v);
  }
  LinExpr obj;
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const int u = path[k], v = path[k + 1];
    const int e = g.FindEdge(u, v);
    if (e < 0) return std::nullopt;
    const int t = prog.AddVariables(1);
    LinExprVec args = Vars(pos[k], g.dim(u));
    for (auto& a : Vars(pos[k + 1], g.dim(v))) args.push_back(a);
    args.emplace_back(1.0);
    args.push_back(LinExpr::Var(t));
    prog.AddBlock(g.edge(e).length.PerspectiveEpigraph(g.dim(u), g.dim(v)), args,
                  RowTag::kEpigraph, e);
    obj += LinExpr::Var(t);
  }
  prog.AddToObjective(obj);
  const ConicSolution sol = Solve(prog, tol);
  if (sol.status != SolveStatus::kOptimal) return std::nullopt;
  PathResult out;
  out.path = path;
  for (size_t k = 0; k < path.size(); ++k) {
    out.positions.push_back(sol.primal.segment(pos[k], g.dim(path[k])));
  }
  out.cost = sol.objective;
  return out;
}

CertifyResult Certify(const Gcs& g, size_t max_paths, const ToleranceConfig& tol, int jobs) {
  CertifyResult out;
  const PathEnumeration all = EnumeratePaths(g, max_paths);
  if (all.overflow) {
    out.status = CertifyStatus::kOverflow;
    return out;
  }
  std::vector<std::optional<PathResult>> results(all.paths.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < all.paths.size(); i = next++) {
      results[i] = SolvePath(g, all.paths[i], tol);
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(all.paths.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  out.paths_checked = all.paths.size();
  double best = std::numeric_limits<double>::infinity();
  // Merge in enumeration order so ties resolve the same way for any jobs.
  for (auto& r : results) {
    if (r && r->cost < best) {
      best = r->cost;
      out.best = *r;
    }
  }
  if (std::isfinite(best)) {
    out.status = CertifyStatus::kOptimal;
    out.cost = best;
  }
  return out;
}

ExactnessReport CheckExtremeExactness(const ConvexSet& X, const std::vector<Halfspace>& Y,
                                      const VectorXd& y_point, int trials, std::uint64_t seed,
                                      double tol) {
  const ConstraintBlock block = RelaxBilinear(X, Y);
  const int n = X.dim();
  const int m = static_cast<int>(y_point.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ExactnessReport rep;
  rep.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    ConicProgram prog;
    prog.AddVariables(block.num_local_vars);
    prog.AddBlock(block, Vars(0, block.num_local_vars), RowTag::kNone);
    LinExprVec fix;
    for (int k = 0; k < m; ++k) fix.push_back(LinExpr::Var(n + k) - y_point[k]);
    prog.AddConstraint(ConeType::kZero, fix, RowTag::kBound);
    LinExpr obj;
    for (int i = 0; i < n; ++i) obj += normal(rng) * LinExpr::Var(i);
    for (int i = 0; i < n * m; ++i) obj += normal(rng) * LinExpr::Var(n + m + i);
    prog.AddToObjective(obj);
    const ConicSolution sol = Solve(prog);
    if (sol.status != SolveStatus::kOptimal) continue;
    ++rep.solved;
    const VectorXd x = sol.primal.head(n);
    const MatrixXd Z = Eigen::Map<const MatrixXd>(sol.primal.data() + n + m, n, m);
    // Generic reconstruction: sum_j (Z c_j + d_j x) / sum_j (c_j'y + d_j).
    VectorXd num = VectorXd::Zero(n);
    double den = 0.0;
    for (const auto& h : Y) {
      num += Z * h.c + h.d * x;
      den += h.c.dot(y_point) + h.d;
    }
    const VectorXd xr = den > kFlowZero ? VectorXd(num / den) : X.ChebyshevCenter();
    rep.max_product_error =
        std::max(rep.max_product_error, (Z - xr * y_point.transpose()).lpNorm<Eigen::Infinity>());
    double outside = 0.0;
    if (!X.Contains(xr)) {
      // Bisect along the segment to the center for the distance outside.
      const VectorXd c = X.ChebyshevCenter();
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (X.Contains(c + mid * (xr - c)) ? lo : hi) = mid;
      }
      outside = (1.0 - lo) * (xr - c).norm();
    }
    rep.max_membership_error = std::max(rep.max_membership_error, outside);
  }
  rep.pass = rep.solved == trials && rep.max_product_error <= tol &&
             rep.max_membership_error <= tol;
  return rep;
}

}  // namespace gcs
