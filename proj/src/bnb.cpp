#include "gcs/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <thread>

#include <fmt/format.h>

namespace gcs {

using Eigen::VectorXd;

const char* ToString(BnbStatus status) {
  switch (status) {
    case BnbStatus::kOptimal: return "optimal";
    case BnbStatus::kInfeasible: return "infeasible";
    case BnbStatus::kNodeLimit: return "node-limit";
    case BnbStatus::kTimeLimit: return "time-limit";
    case BnbStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

PathResult ToPathResult(const Gcs& g, const FlowSolution& sol) {
  (void)g;
  PathResult p;
  p.path = sol.path;
  for (int v : sol.path) p.positions.push_back(sol.x[v]);
  p.cost = sol.cost;
  return p;
}

namespace {

std::map<int, FlowBound> ToBounds(const std::vector<int8_t>& fix) {
  std::map<int, FlowBound> out;
  for (int e = 0; e < static_cast<int>(fix.size()); ++e) {
    if (fix[e] == 0) out[e] = {0.0, 0.0};
    if (fix[e] == 1) out[e] = {1.0, 1.0};
  }
  return out;
}

FlowSolution Evaluate(const RelaxationProgram& root, const std::vector<int8_t>& fix,
                      const ToleranceConfig& tol, double itol) {
  const RelaxationProgram prog = FixFlows(root, ToBounds(fix));
  return Reconstruct(prog, Solve(prog.program, tol), itol);
}

struct Node {
  long id{0};
  double bound{0.0};  // parent's bound until evaluated
  long order{0};
  int depth{0};
  std::vector<int8_t> fix;  // -1 free, 0 or 1 fixed
  int branch_edge{-1};
  int direction{-1};
  double frac{0.0};
  double parent_cost{0.0};
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.order > b.order;
  }
};

struct PseudoCosts {
  std::vector<double> sum[2];
  std::vector<int> count[2];

  explicit PseudoCosts(int m) {
    for (int d = 0; d < 2; ++d) {
      sum[d].assign(m, 0.0);
      count[d].assign(m, 0);
    }
  }

  void Update(int e, int dir, double gain, double frac) {
    const double dist = dir == 0 ? frac : 1.0 - frac;
    if (dist < 1e-9 || !std::isfinite(gain)) return;
    sum[dir][e] += std::max(gain, 0.0) / dist;
    ++count[dir][e];
  }

  double Estimate(int e, int dir) const {
    if (count[dir][e] > 0) return sum[dir][e] / count[dir][e];
    double s = 0.0;
    int c = 0;
    for (size_t k = 0; k < sum[dir].size(); ++k) {
      s += sum[dir][k];
      c += count[dir][k];
    }
    return c > 0 ? s / c : 1.0;
  }
};

}  // namespace

std::optional<PathResult> RoundIncumbent(const RelaxationProgram& prog, const FlowSolution& relax,
                                         const ToleranceConfig& tol, FlowSolution* fixed) {
  if (relax.status != SolveStatus::kOptimal) return std::nullopt;
  const Gcs& g = *prog.graph;
  // Depth-first search over the flow support, largest flow first,
  // backtracking out of dead ends.
  std::vector<std::vector<int>> choices(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) {
    for (int e : g.out_edges(v)) {
      if (relax.y[e] > 1e-6) choices[v].push_back(e);
    }
    std::stable_sort(choices[v].begin(), choices[v].end(),
                     [&](int a, int b) { return relax.y[a] > relax.y[b]; });
  }
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<int> path{g.source()};
  std::vector<int> edges;
  std::vector<size_t> next{0};
  seen[g.source()] = 1;
  long budget = 100L * (g.num_edges() + 1);
  while (path.back() != g.target()) {
    if (--budget < 0 || path.empty()) return std::nullopt;
    const int v = path.back();
    if (next.back() >= choices[v].size()) {
      seen[v] = 0;
      path.pop_back();
      next.pop_back();
      if (path.empty()) return std::nullopt;
      edges.pop_back();
      continue;
    }
    const int e = choices[v][next.back()++];
    const int w = g.edge(e).v;
    if (seen[w]) continue;
    seen[w] = 1;
    path.push_back(w);
    edges.push_back(e);
    next.push_back(0);
  }
  std::map<int, FlowBound> fix;
  for (int e = 0; e < g.num_edges(); ++e) fix[e] = {0.0, 0.0};
  for (int e : edges) fix[e] = {1.0, 1.0};
  const RelaxationProgram restricted = FixFlows(prog, fix);
  FlowSolution sol = Reconstruct(restricted, Solve(restricted.program, tol));
  if (sol.status != SolveStatus::kOptimal) return std::nullopt;
  sol.path = path;
  PathResult out = ToPathResult(g, sol);
  if (fixed != nullptr) *fixed = std::move(sol);
  return out;
}

BnbReport SolveMicp(const Gcs& g, const BnbConfig& cfg) {
  return SolveMicp(std::make_shared<const Gcs>(g), cfg);
}

BnbReport SolveMicp(std::shared_ptr<const Gcs> graph, const BnbConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const Gcs& g = *graph;
  const int m = g.num_edges();
  const RelaxationProgram root = BuildRelaxation(graph, cfg.tightening);
  const double itol = cfg.integrality_tol;

  BnbReport rep;
  auto log = [&](const std::string& line) {
    rep.log.push_back(line);
    if (cfg.on_log) cfg.on_log(line);
  };
  auto prune_tol = [&](double inc) {
    return std::max(cfg.abs_gap_tol, cfg.rel_gap_tol * std::max(std::abs(inc), 1.0));
  };

  double pruned_min = std::numeric_limits<double>::infinity();
  PseudoCosts pseudo(m);
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  long order = 0;

  auto offer = [&](FlowSolution sol, const std::vector<int>& path) {
    if (!(sol.cost < rep.cost)) return false;
    sol.path = path;
    rep.cost = sol.cost;
    rep.incumbent = std::move(sol);
    rep.path = ToPathResult(g, rep.incumbent);
    return true;
  };

  auto handle = [&](Node& node, FlowSolution& sol) {
    if (node.branch_edge >= 0 && sol.status == SolveStatus::kOptimal) {
      pseudo.Update(node.branch_edge, node.direction, sol.cost - node.parent_cost, node.frac);
    }
    if (sol.status == SolveStatus::kInfeasible) {
      log(fmt::format("node {} bound inf frac 0 action prune", node.id));
      return;
    }
    const bool failed = sol.status != SolveStatus::kOptimal;
    const double bound = failed ? node.bound : std::max(sol.cost, node.bound);
    const bool have_y = sol.y.size() == m;
    std::vector<int> frac;
    if (have_y) {
      for (int e = 0; e < m; ++e) {
        if (node.fix[e] < 0 && std::min(sol.y[e], 1.0 - sol.y[e]) > itol) frac.push_back(e);
      }
    }
    const int nfrac = static_cast<int>(frac.size());
    if (bound >= rep.cost - prune_tol(rep.cost)) {
      pruned_min = std::min(pruned_min, bound);
      log(fmt::format("node {} bound {:.9g} frac {} action prune", node.id, bound, nfrac));
      return;
    }
    if (!failed && frac.empty() && !sol.path.empty()) {
      std::vector<char> on_path(m, 0);
      for (int e : PathEdges(g, sol.path)) on_path[e] = 1;
      bool clean = true;
      for (int e = 0; e < m; ++e) clean = clean && (on_path[e] || sol.y[e] <= itol);
      if (clean) {
        offer(sol, sol.path);
        log(fmt::format("node {} bound {:.9g} frac 0 action incumbent", node.id, bound));
        return;
      }
    }
    const int rounds = node.depth == 0 ? cfg.root_rounding : cfg.node_rounding;
    if (!failed && rounds > 0) {
      FlowSolution fixed;
      if (RoundIncumbent(FixFlows(root, ToBounds(node.fix)), sol, cfg.solver, &fixed)) {
        const std::vector<int> path = fixed.path;
        offer(std::move(fixed), path);
      }
    }
    if (bound >= rep.cost - prune_tol(rep.cost)) {
      pruned_min = std::min(pruned_min, bound);
      log(fmt::format("node {} bound {:.9g} frac {} action prune", node.id, bound, nfrac));
      return;
    }

    int pick = -1;
    if (!frac.empty()) {
      double best = -1.0;
      for (int e : frac) {
        const double f = sol.y[e];
        double score;
        if (cfg.branching == BranchingRule::kPseudoCost) {
          score = std::max(pseudo.Estimate(e, 0) * f, 1e-6) *
                  std::max(pseudo.Estimate(e, 1) * (1.0 - f), 1e-6);
        } else {
          score = std::min(f, 1.0 - f);
        }
        if (score > best) {
          best = score;
          pick = e;
        }
      }
    } else {
      // Integral but not a clean path (disjoint cycles) or no usable flows.
      for (int e = 0; e < m && pick < 0; ++e) {
        if (node.fix[e] < 0 && (!have_y || sol.y[e] > itol)) pick = e;
      }
      for (int e = 0; e < m && pick < 0; ++e) {
        if (node.fix[e] < 0) pick = e;
      }
    }
    if (pick < 0) {
      log(fmt::format("node {} bound {:.9g} frac {} action prune", node.id, bound, nfrac));
      return;
    }
    log(fmt::format("node {} bound {:.9g} frac {} action branch", node.id, bound, nfrac));
    const double f = have_y ? sol.y[pick] : 0.5;
    for (int dir = 0; dir < 2; ++dir) {
      Node child;
      child.id = ++next_id;
      child.bound = bound;
      child.order = ++order;
      child.depth = node.depth + 1;
      child.fix = node.fix;
      child.fix[pick] = static_cast<int8_t>(dir);
      child.branch_edge = pick;
      child.direction = dir;
      child.frac = f;
      child.parent_cost = failed ? bound : sol.cost;
      if (dir == 1 && root.tightened && cfg.tightening.degree) {
        const Edge& e = g.edge(pick);
        for (int k : g.out_edges(e.u)) {
          if (k != pick && child.fix[k] < 0) child.fix[k] = 0;
        }
        for (int k : g.in_edges(e.v)) {
          if (k != pick && child.fix[k] < 0) child.fix[k] = 0;
        }
      }
      open.push(std::move(child));
    }
  };

  // Root.
  Node root_node;
  root_node.bound = -std::numeric_limits<double>::infinity();
  root_node.fix.assign(m, -1);
  FlowSolution root_sol = Evaluate(root, root_node.fix, cfg.solver, itol);
  rep.nodes = 1;
  if (root_sol.status == SolveStatus::kInfeasible) {
    log(fmt::format("node 0 bound inf frac 0 action prune"));
    rep.status = BnbStatus::kInfeasible;
    rep.seconds = elapsed();
    return rep;
  }
  if (root_sol.status != SolveStatus::kOptimal) {
    rep.status = BnbStatus::kNumericalFailure;
    rep.error = fmt::format("root relaxation failed ({})", ToString(root_sol.status));
    rep.seconds = elapsed();
    return rep;
  }
  rep.root_bound = root_sol.cost;
  handle(root_node, root_sol);

  std::optional<BnbStatus> limit;
  const int jobs = std::max(1, cfg.jobs);
  while (!open.empty()) {
    if (rep.nodes >= cfg.node_limit) {
      limit = BnbStatus::kNodeLimit;
      break;
    }
    if (elapsed() >= cfg.time_limit) {
      limit = BnbStatus::kTimeLimit;
      break;
    }
    std::vector<Node> batch;
    while (!open.empty() && static_cast<int>(batch.size()) < jobs &&
           rep.nodes + static_cast<long>(batch.size()) < cfg.node_limit) {
      Node node = open.top();
      open.pop();
      if (node.bound >= rep.cost - prune_tol(rep.cost)) {
        pruned_min = std::min(pruned_min, node.bound);
        log(fmt::format("node {} bound {:.9g} frac - action prune", node.id, node.bound));
        continue;
      }
      batch.push_back(std::move(node));
    }
    if (batch.empty()) continue;
    std::vector<FlowSolution> results(batch.size());
    if (batch.size() == 1) {
      results[0] = Evaluate(root, batch[0].fix, cfg.solver, itol);
    } else {
      std::vector<std::thread> pool;
      for (size_t i = 0; i < batch.size(); ++i) {
        pool.emplace_back([&, i] { results[i] = Evaluate(root, batch[i].fix, cfg.solver, itol); });
      }
      for (auto& th : pool) th.join();
    }
    rep.nodes += static_cast<long>(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) handle(batch[i], results[i]);
  }

  double lb = std::min(rep.cost, pruned_min);
  if (limit) {
    while (!open.empty()) {
      lb = std::min(lb, open.top().bound);
      open.pop();
    }
    rep.status = *limit;
  } else {
    rep.status = std::isfinite(rep.cost) ? BnbStatus::kOptimal : BnbStatus::kInfeasible;
  }
  rep.lower_bound = std::isfinite(rep.cost) || limit ? lb : rep.lower_bound;
  if (std::isfinite(rep.cost)) {
    rep.gap = (rep.cost - rep.lower_bound) / std::max(std::abs(rep.cost), 1.0);
    rep.incumbent.lower_bound = rep.lower_bound;
    rep.incumbent.upper_bound = rep.cost;
  }
  rep.seconds = elapsed();
  return rep;
}

}  // namespace gcs
