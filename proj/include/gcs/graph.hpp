#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gcs/costs.hpp"
#include "gcs/geometry.hpp"

namespace gcs {

struct VertexSpec {
  std::string id;
  ConvexSet set;
};

struct EdgeSpec {
  std::string u;
  std::string v;
  EdgeLength length;
};

struct Edge {
  int u{-1};
  int v{-1};
  EdgeLength length;
};

/// Directed graph of convex sets. Immutable after Build.
class Gcs {
 public:
  /// Validates the data and drops edges entering the source or leaving the
  /// target (each drop is recorded in warnings()). Throws
  /// std::invalid_argument on missing/equal source and target, duplicate
  /// ids, dangling endpoints, self-loops, parallel edges, or dimension
  /// mismatches between a length and its endpoints.
  static Gcs Build(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
                   const std::string& source, const std::string& target);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const VertexSpec& vertex(int v) const { return vertices_[v]; }
  const std::vector<VertexSpec>& vertices() const { return vertices_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  int source() const { return source_; }
  int target() const { return target_; }
  bool is_acyclic() const { return acyclic_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const std::vector<int>& out_edges(int v) const { return out_[v]; }
  const std::vector<int>& in_edges(int v) const { return in_[v]; }
  int dim(int v) const { return vertices_[v].set.dim(); }

  /// Vertex index for an id, or -1.
  int FindVertex(const std::string& id) const;
  /// Edge index for (u, v), or -1.
  int FindEdge(int u, int v) const;

  /// The input description of this graph (after preprocessing).
  std::vector<EdgeSpec> edge_specs() const;

 private:
  std::vector<VertexSpec> vertices_;
  std::vector<Edge> edges_;
  int source_{-1};
  int target_{-1};
  bool acyclic_{true};
  std::vector<std::string> warnings_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::unordered_map<std::string, int> index_;
};

/// A feasible solution of the shortest-path problem: distinct vertices from
/// source to target with positions, and the sum of edge lengths.
struct PathResult {
  std::vector<int> path;                   // vertex indices, s first, t last
  std::vector<Eigen::VectorXd> positions;  // one per path vertex
  double cost{0.0};
};

/// Edge indices along a vertex path; throws if consecutive vertices are not
/// joined by an edge.
std::vector<int> PathEdges(const Gcs& g, const std::vector<int>& path);

/// Sum of edge lengths along the path at the stored positions.
double PathCost(const Gcs& g, const PathResult& p);

struct PathEnumeration {
  std::vector<std::vector<int>> paths;
  bool overflow{false};
};

/// All simple s-t paths by depth-first search, at most max_paths of them.
PathEnumeration EnumeratePaths(const Gcs& g, size_t max_paths);

}  // namespace gcs
