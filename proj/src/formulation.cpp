#include "gcs/formulation.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace gcs {

using Eigen::VectorXd;

namespace {

void CountRows(RelaxationProgram* prog) {
  prog->layout.row_counts.clear();
  for (const auto& c : prog->program.constraints()) {
    prog->layout.row_counts[c.tag] += static_cast<int>(c.rows.size());
  }
}

LinExprVec Sum(const std::vector<LinExprVec>& terms, int n) {
  LinExprVec out(n);
  for (const auto& t : terms) {
    for (int i = 0; i < n; ++i) out[i] += t[i];
  }
  return out;
}

}  // namespace

ConicProgram BuildFlowLp(const Gcs& g, const std::vector<double>& lengths) {
  if (static_cast<int>(lengths.size()) != g.num_edges()) {
    throw std::invalid_argument("flow LP: one length per edge required");
  }
  ConicProgram prog;
  prog.AddVariables(g.num_edges());
  LinExpr obj;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (!(lengths[e] >= 0.0)) throw std::invalid_argument("flow LP: negative edge length");
    obj += lengths[e] * LinExpr::Var(e);
  }
  prog.AddToObjective(obj);
  LinExpr out_s(-1.0), in_t(-1.0);
  for (int e : g.out_edges(g.source())) out_s += LinExpr::Var(e);
  for (int e : g.in_edges(g.target())) in_t += LinExpr::Var(e);
  prog.AddConstraint(ConeType::kZero, {out_s}, RowTag::kSourceTarget, g.source());
  prog.AddConstraint(ConeType::kZero, {in_t}, RowTag::kSourceTarget, g.target());
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (v == g.source() || v == g.target()) continue;
    if (g.out_edges(v).empty() && g.in_edges(v).empty()) continue;
    LinExpr row;
    for (int e : g.out_edges(v)) row += LinExpr::Var(e);
    for (int e : g.in_edges(v)) row -= LinExpr::Var(e);
    prog.AddConstraint(ConeType::kZero, {row}, RowTag::kConservation, v);
  }
  if (g.num_edges() > 0) {
    prog.AddConstraint(ConeType::kNonnegative, Vars(0, g.num_edges()), RowTag::kBound);
  }
  return prog;
}

RelaxationProgram BuildRelaxation(const Gcs& g, const TighteningOptions& opts) {
  return BuildRelaxation(std::make_shared<const Gcs>(g), opts);
}

RelaxationProgram BuildRelaxation(std::shared_ptr<const Gcs> graph,
                                  const TighteningOptions& opts) {
  const Gcs& g = *graph;
  RelaxationProgram out;
  out.graph = graph;
  ConicProgram& prog = out.program;
  auto& vars = out.layout.edges;
  vars.resize(g.num_edges());

  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edge(e);
    vars[e].y = prog.AddVariables(1);
    vars[e].z = prog.AddVariables(g.dim(edge.u));
    vars[e].zp = prog.AddVariables(g.dim(edge.v));
    vars[e].t = prog.AddVariables(1);
  }
  out.layout.num_variables = prog.num_variables();

  auto y = [&](int e) { return LinExpr::Var(vars[e].y); };
  auto z = [&](int e) { return Vars(vars[e].z, g.dim(g.edge(e).u)); };
  auto zp = [&](int e) { return Vars(vars[e].zp, g.dim(g.edge(e).v)); };

  // Objective and epigraphs.
  LinExpr obj;
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edge(e);
    obj += LinExpr::Var(vars[e].t);
    LinExprVec args = z(e);
    for (auto& a : zp(e)) args.push_back(a);
    args.push_back(y(e));
    args.push_back(LinExpr::Var(vars[e].t));
    prog.AddBlock(edge.length.PerspectiveEpigraph(g.dim(edge.u), g.dim(edge.v)), args,
                  RowTag::kEpigraph, e);
  }
  prog.AddToObjective(obj);

  // Unit flow out of the source and into the target.
  LinExpr out_s(-1.0), in_t(-1.0);
  for (int e : g.out_edges(g.source())) out_s += y(e);
  for (int e : g.in_edges(g.target())) in_t += y(e);
  out.source_row = prog.AddConstraint(ConeType::kZero, {out_s}, RowTag::kSourceTarget, g.source());
  out.target_row = prog.AddConstraint(ConeType::kZero, {in_t}, RowTag::kSourceTarget, g.target());

  // Joint conservation of (z, y).
  out.conservation_row.assign(g.num_vertices(), -1);
  out.conservation_vector_row.assign(g.num_vertices(), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (v == g.source() || v == g.target()) continue;
    if (g.out_edges(v).empty() && g.in_edges(v).empty()) continue;
    const int n = g.dim(v);
    LinExpr flow;
    LinExprVec vec(n);
    for (int e : g.out_edges(v)) {
      flow += y(e);
      const LinExprVec ze = z(e);
      for (int i = 0; i < n; ++i) vec[i] += ze[i];
    }
    for (int e : g.in_edges(v)) {
      flow -= y(e);
      const LinExprVec ze = zp(e);
      for (int i = 0; i < n; ++i) vec[i] -= ze[i];
    }
    out.conservation_row[v] = prog.AddConstraint(ConeType::kZero, {flow}, RowTag::kConservation, v);
    out.conservation_vector_row[v] =
        prog.AddConstraint(ConeType::kZero, std::move(vec), RowTag::kConservationVector, v);
  }

  // Perspective membership of both endpoints.
  std::vector<ConstraintBlock> persp;
  persp.reserve(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) persp.push_back(g.vertex(v).set.Perspective());
  for (int e = 0; e < g.num_edges(); ++e) {
    LinExprVec tail = z(e);
    tail.push_back(y(e));
    prog.AddBlock(persp[g.edge(e).u], tail, RowTag::kPerspective, e);
    LinExprVec head = zp(e);
    head.push_back(y(e));
    prog.AddBlock(persp[g.edge(e).v], head, RowTag::kPerspective, e);
  }

  // Tightening for cyclic graphs.
  if (!g.is_acyclic() && (opts.degree || opts.two_cycle)) {
    out.tightened = true;
    for (int v = 0; v < g.num_vertices(); ++v) {
      if (v == g.source() || v == g.target() || g.out_edges(v).empty()) continue;
      LinExpr out_flow;
      std::vector<LinExprVec> out_z;
      for (int e : g.out_edges(v)) {
        out_flow += y(e);
        out_z.push_back(z(e));
      }
      if (opts.degree) {
        prog.AddConstraint(ConeType::kNonnegative, {1.0 - out_flow}, RowTag::kDegree, v);
      }
      if (!opts.two_cycle) continue;
      const LinExprVec out_zsum = Sum(out_z, g.dim(v));
      for (int e : g.in_edges(v)) {
        const int f = g.FindEdge(v, g.edge(e).u);
        if (f < 0) continue;
        LinExprVec args = out_zsum;
        const LinExprVec zpe = zp(e), zf = z(f);
        for (int i = 0; i < g.dim(v); ++i) args[i] -= zpe[i] + zf[i];
        args.push_back(out_flow - y(e) - y(f));
        prog.AddBlock(persp[v], args, RowTag::kTwoCycle, v);
      }
    }
  }
  CountRows(&out);
  return out;
}

RelaxationProgram FixFlows(const RelaxationProgram& prog, const std::map<int, FlowBound>& fix) {
  RelaxationProgram out = prog;
  std::vector<char> zero(prog.layout.edges.size(), 0);
  for (const auto& [e, b] : fix) {
    if (e < 0 || e >= static_cast<int>(prog.layout.edges.size())) {
      throw std::out_of_range(fmt::format("fix_flows: unknown edge {}", e));
    }
    if (b.lo > b.hi) throw std::invalid_argument(fmt::format("fix_flows: inverted interval on edge {}", e));
    if (b.lo < 0.0 || b.hi > 1.0) {
      throw std::invalid_argument(fmt::format("fix_flows: interval on edge {} leaves [0, 1]", e));
    }
    const LinExpr y = LinExpr::Var(prog.layout.edges[e].y);
    if (b.hi == 0.0) {
      zero[e] = 1;
      continue;
    }
    if (b.lo == b.hi) {
      out.program.AddConstraint(ConeType::kZero, {y - b.lo}, RowTag::kBound, e);
      continue;
    }
    LinExprVec rows;
    if (b.lo > 0.0) rows.push_back(y - b.lo);
    rows.push_back(b.hi - y);
    out.program.AddConstraint(ConeType::kNonnegative, std::move(rows), RowTag::kBound, e);
  }
  // Zero flow forces z = z' = 0, and t = 0 is optimal. Those variables are
  // pinned by equalities, and every cone left with only pinned variables is
  // dropped when its constant part is feasible (it would have no interior).
  const Gcs& g = *prog.graph;
  std::vector<char> pinned(prog.layout.num_variables, 0);
  for (size_t e = 0; e < zero.size(); ++e) {
    if (!zero[e]) continue;
    const auto& ev = prog.layout.edges[e];
    pinned[ev.y] = pinned[ev.t] = 1;
    for (int i = 0; i < g.dim(g.edge(e).u); ++i) pinned[ev.z + i] = 1;
    for (int i = 0; i < g.dim(g.edge(e).v); ++i) pinned[ev.zp + i] = 1;
  }
  const std::vector<int> index = out.program.RemoveConstraints([&](const Constraint& c) {
    VectorXd constant(c.rows.size());
    for (size_t i = 0; i < c.rows.size(); ++i) {
      for (const auto& [j, a] : c.rows[i].terms()) {
        if (a != 0.0 && (j >= prog.layout.num_variables || !pinned[j])) return false;
      }
      constant[i] = c.rows[i].constant();
    }
    return ConeViolation(c.cone, constant) == 0.0;
  });
  auto remap = [&](int& k) {
    if (k >= 0) k = index[k];
  };
  remap(out.source_row);
  remap(out.target_row);
  for (int& k : out.conservation_row) remap(k);
  for (int& k : out.conservation_vector_row) remap(k);
  for (size_t e = 0; e < zero.size(); ++e) {
    if (!zero[e]) continue;
    const auto& ev = prog.layout.edges[e];
    LinExprVec rows{LinExpr::Var(ev.y), LinExpr::Var(ev.t)};
    for (auto& r : Vars(ev.z, g.dim(g.edge(e).u))) rows.push_back(r);
    for (auto& r : Vars(ev.zp, g.dim(g.edge(e).v))) rows.push_back(r);
    out.program.AddConstraint(ConeType::kZero, std::move(rows), RowTag::kBound,
                              static_cast<int>(e));
  }
  CountRows(&out);
  return out;
}

std::vector<int> IntegralPath(const Gcs& g, const VectorXd& y, double tol) {
  std::vector<int> path{g.source()};
  std::vector<char> seen(g.num_vertices(), 0);
  seen[g.source()] = 1;
  int v = g.source();
  while (v != g.target()) {
    int next = -1;
    for (int e : g.out_edges(v)) {
      if (y[e] >= 1.0 - tol) {
        next = g.edge(e).v;
        break;
      }
    }
    if (next < 0 || seen[next]) return {};
    seen[next] = 1;
    path.push_back(next);
    v = next;
  }
  return path;
}

FlowSolution Reconstruct(const RelaxationProgram& prog, const ConicSolution& raw,
                         double integrality_tol) {
  const Gcs& g = *prog.graph;
  FlowSolution out;
  out.status = raw.status;
  out.cost = raw.objective;
  out.lower_bound = raw.objective;
  out.upper_bound = std::numeric_limits<double>::infinity();
  if (raw.primal.size() < prog.layout.num_variables) return out;
  const VectorXd& x = raw.primal;
  const int m = g.num_edges();
  out.y.resize(m);
  out.t.resize(m);
  out.z.resize(m);
  out.zp.resize(m);
  out.zbar.resize(m);
  out.zpbar.resize(m);
  for (int e = 0; e < m; ++e) {
    const auto& ev = prog.layout.edges[e];
    const Edge& edge = g.edge(e);
    out.y[e] = x[ev.y];
    out.t[e] = x[ev.t];
    out.z[e] = x.segment(ev.z, g.dim(edge.u));
    out.zp[e] = x.segment(ev.zp, g.dim(edge.v));
    if (out.y[e] >= kFlowZero) {
      out.zbar[e] = out.z[e] / out.y[e];
      out.zpbar[e] = out.zp[e] / out.y[e];
    }
  }
  out.x.resize(g.num_vertices());
  out.visited.assign(g.num_vertices(), false);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const bool use_in = v == g.target();
    const auto& edges = use_in ? g.in_edges(v) : g.out_edges(v);
    VectorXd sum = VectorXd::Zero(g.dim(v));
    double flow = 0.0;
    for (int e : edges) {
      sum += use_in ? out.zp[e] : out.z[e];
      flow += out.y[e];
    }
    if (flow >= kFlowZero) {
      out.x[v] = sum / flow;
      out.visited[v] = true;
    } else {
      out.x[v] = g.vertex(v).set.ChebyshevCenter();
    }
  }
  out.path = IntegralPath(g, out.y, integrality_tol);
  return out;
}

ConstraintBlock RelaxBilinear(const ConvexSet& X, const std::vector<Halfspace>& Y) {
  if (Y.empty()) throw std::invalid_argument("relax_bilinear: no halfspaces");
  const int n = X.dim();
  const int m = static_cast<int>(Y[0].c.size());
  bool trivial = false;
  for (const auto& h : Y) {
    if (h.c.size() != m) throw std::invalid_argument("relax_bilinear: inconsistent halfspace sizes");
    if (h.c.isZero(0.0) && h.d > 0.0) trivial = true;
  }
  if (!trivial) throw std::invalid_argument("relax_bilinear: trivial inequality (0, 1) missing");
  const ConstraintBlock persp = X.Perspective();
  ConstraintBlock block;
  block.num_local_vars = n + m + n * m;
  auto Z = [&](int i, int k) { return LinExpr::Var(n + m + i + k * n); };
  for (const auto& h : Y) {
    LinExprVec args(n + 1);
    for (int i = 0; i < n; ++i) {
      args[i] = h.d * LinExpr::Var(i);
      for (int k = 0; k < m; ++k) {
        if (h.c[k] != 0.0) args[i] += h.c[k] * Z(i, k);
      }
    }
    args[n] = LinExpr(h.d);
    for (int k = 0; k < m; ++k) {
      if (h.c[k] != 0.0) args[n] += h.c[k] * LinExpr::Var(n + k);
    }
    block.Append(persp, args);
  }
  for (auto& c : block.constraints) {
    for (auto& r : c.rows) r = r.Simplified();
  }
  return block;
}

}  // namespace gcs
