#include "gcs/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace gcs {

Gcs Gcs::Build(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
               const std::string& source, const std::string& target) {
  Gcs g;
  g.vertices_ = std::move(vertices);
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (!g.index_.emplace(g.vertices_[i].id, i).second) {
      throw std::invalid_argument(fmt::format("duplicate vertex id '{}'", g.vertices_[i].id));
    }
  }
  g.source_ = g.FindVertex(source);
  g.target_ = g.FindVertex(target);
  if (g.source_ < 0) throw std::invalid_argument(fmt::format("source '{}' not found", source));
  if (g.target_ < 0) throw std::invalid_argument(fmt::format("target '{}' not found", target));
  if (g.source_ == g.target_) throw std::invalid_argument("source and target coincide");

  std::set<std::pair<int, int>> seen;
  for (auto& spec : edges) {
    const int u = g.FindVertex(spec.u);
    const int v = g.FindVertex(spec.v);
    if (u < 0 || v < 0) {
      throw std::invalid_argument(
          fmt::format("edge ({}, {}) has an unknown endpoint", spec.u, spec.v));
    }
    if (u == v) throw std::invalid_argument(fmt::format("self-loop at '{}'", spec.u));
    if (!seen.insert({u, v}).second) {
      throw std::invalid_argument(fmt::format("parallel edge ({}, {})", spec.u, spec.v));
    }
    try {
      spec.length.CheckDimensions(g.dim(u), g.dim(v));
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(fmt::format("edge ({}, {}): {}", spec.u, spec.v, err.what()));
    }
    if (v == g.source_) {
      g.warnings_.push_back(fmt::format("dropped edge ({}, {}) entering the source", spec.u, spec.v));
      continue;
    }
    if (u == g.target_) {
      g.warnings_.push_back(fmt::format("dropped edge ({}, {}) leaving the target", spec.u, spec.v));
      continue;
    }
    g.edges_.push_back({u, v, std::move(spec.length)});
  }

  g.out_.assign(g.num_vertices(), {});
  g.in_.assign(g.num_vertices(), {});
  for (int e = 0; e < g.num_edges(); ++e) {
    g.out_[g.edges_[e].u].push_back(e);
    g.in_[g.edges_[e].v].push_back(e);
  }

  // Kahn's algorithm.
  std::vector<int> indeg(g.num_vertices(), 0);
  for (const auto& e : g.edges_) ++indeg[e.v];
  std::vector<int> stack;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (indeg[v] == 0) stack.push_back(v);
  }
  int visited = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++visited;
    for (int e : g.out_[v]) {
      if (--indeg[g.edges_[e].v] == 0) stack.push_back(g.edges_[e].v);
    }
  }
  g.acyclic_ = visited == g.num_vertices();
  return g;
}

int Gcs::FindVertex(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

int Gcs::FindEdge(int u, int v) const {
  if (u < 0 || u >= num_vertices()) return -1;
  for (int e : out_[u]) {
    if (edges_[e].v == v) return e;
  }
  return -1;
}

std::vector<EdgeSpec> Gcs::edge_specs() const {
  std::vector<EdgeSpec> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back({vertices_[e.u].id, vertices_[e.v].id, e.length});
  return out;
}

std::vector<int> PathEdges(const Gcs& g, const std::vector<int>& path) {
  std::vector<int> out;
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const int e = g.FindEdge(path[k], path[k + 1]);
    if (e < 0) {
      throw std::invalid_argument(fmt::format("no edge ({}, {})", g.vertex(path[k]).id,
                                              g.vertex(path[k + 1]).id));
    }
    out.push_back(e);
  }
  return out;
}

double PathCost(const Gcs& g, const PathResult& p) {
  if (p.positions.size() != p.path.size()) {
    throw std::invalid_argument("path and positions differ in length");
  }
  double cost = 0.0;
  for (size_t k = 0; k + 1 < p.path.size(); ++k) {
    const int e = g.FindEdge(p.path[k], p.path[k + 1]);
    if (e < 0) throw std::invalid_argument("path uses a missing edge");
    cost += g.edge(e).length.Evaluate(p.positions[k], p.positions[k + 1]);
  }
  return cost;
}

PathEnumeration EnumeratePaths(const Gcs& g, size_t max_paths) {
  PathEnumeration out;
  std::vector<char> on_path(g.num_vertices(), 0);
  std::vector<int> path{g.source()};
  std::vector<size_t> next{0};
  on_path[g.source()] = 1;
  while (!path.empty()) {
    const int v = path.back();
    const auto& outs = g.out_edges(v);
    if (v == g.target() || next.back() >= outs.size()) {
      if (v == g.target()) {
        if (out.paths.size() >= max_paths) {
          out.overflow = true;
          return out;
        }
        out.paths.push_back(path);
      }
      on_path[v] = 0;
      path.pop_back();
      next.pop_back();
      continue;
    }
    const int w = g.edge(outs[next.back()++]).v;
    if (on_path[w]) continue;
    on_path[w] = 1;
    path.push_back(w);
    next.push_back(0);
  }
  return out;
}

}  // namespace gcs
