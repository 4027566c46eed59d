#include "gcs/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace gcs {

using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

EdgeLength MakeLength(LengthKind kind) {
  return kind == LengthKind::kEuclidean ? EdgeLength::MakeEuclidean()
                                        : EdgeLength::MakeSquaredEuclidean();
}

}  // namespace

Gcs HppChain(int m) {
  if (m < 0) throw std::invalid_argument("hpp_chain: m must be nonnegative");
  std::vector<VertexSpec> vs{{"s", ConvexSet::MakeSingleton(VectorXd::Zero(1))}};
  for (int i = 1; i <= m; ++i) {
    vs.push_back({fmt::format("v{}", i),
                  ConvexSet::MakeBox(VectorXd::Zero(1), VectorXd::Ones(1))});
  }
  vs.push_back({"t", ConvexSet::MakeSingleton(VectorXd::Ones(1))});
  std::vector<EdgeSpec> es;
  for (const auto& a : vs) {
    if (a.id == "t") continue;
    for (const auto& b : vs) {
      if (b.id == "s" || b.id == a.id) continue;
      es.push_back({a.id, b.id, EdgeLength::MakeSquaredEuclidean()});
    }
  }
  return Gcs::Build(std::move(vs), std::move(es), "s", "t");
}

Gcs RandomInstance(std::uint64_t seed, int n, int nV, int nE, double volume, LengthKind length) {
  if (n < 1) throw std::invalid_argument("random_instance: n must be positive");
  if (nV < 3) throw std::invalid_argument("random_instance: need at least 3 vertices");
  if (!(volume > 0.0)) throw std::invalid_argument("random_instance: volume must be positive");
  const long max_edges = static_cast<long>(nV - 1) * (nV - 2) + 1;
  if (nE < nV - 1 || nE > max_edges) {
    throw std::invalid_argument(
        fmt::format("random_instance: nE must lie in [{}, {}]", nV - 1, max_edges));
  }
  std::mt19937_64 rng(seed);
  const int inner = nV - 2;
  const double side = std::pow(volume, 1.0 / n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<VertexSpec> vs{{"s", ConvexSet::MakeSingleton(VectorXd::Zero(n))}};
  for (int i = 1; i <= inner; ++i) {
    VectorXd c(n);
    for (int k = 0; k < n; ++k) c[k] = unit(rng);
    vs.push_back({fmt::format("v{}", i),
                  ConvexSet::MakeBox(c.array() - side / 2, c.array() + side / 2)});
  }
  vs.push_back({"t", ConvexSet::MakeSingleton(VectorXd::Ones(n))});
  const int s = 0, t = nV - 1;

  // Partition the interior into k paths: shuffled order, k - 1 distinct cuts.
  const int k_max = std::min(inner, nE - nV + 2);
  const int k = std::uniform_int_distribution<int>(1, k_max)(rng);
  std::vector<int> order(inner);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> gaps(inner - 1);
  std::iota(gaps.begin(), gaps.end(), 1);
  std::shuffle(gaps.begin(), gaps.end(), rng);
  std::vector<int> cuts(gaps.begin(), gaps.begin() + (k - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(inner);

  std::set<std::pair<int, int>> edges;
  std::vector<std::pair<int, int>> list;
  auto add = [&](int u, int v) {
    if (edges.insert({u, v}).second) list.emplace_back(u, v);
  };
  for (int p = 0; p < k; ++p) {
    int prev = s;
    for (int i = cuts[p]; i < cuts[p + 1]; ++i) {
      add(prev, order[i]);
      prev = order[i];
    }
    add(prev, t);
  }
  // Extra edges drawn uniformly from the remaining admissible pairs.
  std::vector<std::pair<int, int>> pool;
  for (int u = 0; u < nV; ++u) {
    for (int v = 0; v < nV; ++v) {
      if (u == v || v == s || u == t || edges.count({u, v})) continue;
      pool.emplace_back(u, v);
    }
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  for (size_t i = 0; static_cast<int>(list.size()) < nE; ++i) add(pool[i].first, pool[i].second);

  std::vector<EdgeSpec> es;
  for (const auto& [u, v] : list) es.push_back({vs[u].id, vs[v].id, MakeLength(length)});
  return Gcs::Build(std::move(vs), std::move(es), "s", "t");
}

Gcs SymmetryInstance() {
  std::vector<VertexSpec> vs{
      {"s", ConvexSet::MakeSingleton(Vector2d(0, 0))},
      {"1", ConvexSet::MakeSingleton(Vector2d(2, 2))},
      {"2", ConvexSet::MakeSingleton(Vector2d(2, -2))},
      {"3", ConvexSet::MakeBox(Vector2d(3, -2), Vector2d(4, 2))},
      {"t", ConvexSet::MakeSingleton(Vector2d(7, 0))},
  };
  std::vector<EdgeSpec> es;
  for (const auto& [u, v] :
       std::vector<std::pair<std::string, std::string>>{{"s", "1"}, {"s", "2"}, {"1", "3"},
                                                        {"2", "3"}, {"3", "t"}}) {
    es.push_back({u, v, EdgeLength::MakeEuclidean()});
  }
  return Gcs::Build(std::move(vs), std::move(es), "s", "t");
}

Gcs TwoDimExample(double sigma, LengthKind length) {
  if (!(sigma > 0.0)) throw std::invalid_argument("two_dim_example: sigma must be positive");
  auto box = [](double x0, double y0, double x1, double y1) {
    return ConvexSet::MakeBox(Vector2d(x0, y0), Vector2d(x1, y1));
  };
  auto poly = [](std::initializer_list<std::pair<Vector2d, double>> rows) {
    Eigen::MatrixXd A(rows.size(), 2);
    VectorXd b(rows.size());
    int i = 0;
    for (const auto& [a, c] : rows) {
      A.row(i) = a.transpose();
      b[i++] = c;
    }
    return ConvexSet::MakePolyhedron(A, b);
  };
  // Top row a, b, c; bottom row d, e, f; g in the middle.
  std::vector<VertexSpec> vs{
      {"s", ConvexSet::MakeSingleton(Vector2d(0, 0))},
      {"a", box(1.2, 0.8, 2.8, 2.4)},
      {"b", poly({{Vector2d(0, -1), -1.0}, {Vector2d(1, 1), 7.2}, {Vector2d(-1, 1), -1.8}})},
      {"c", box(6.2, 0.6, 7.6, 2.2)},
      {"d", box(1.0, -2.2, 2.6, -0.9)},
      {"e", ConvexSet::MakeEllipsoid(Eigen::Matrix2d{{1.0 / 1.1, 0.0}, {0.0, 1.0 / 0.6}},
                                     Vector2d(-4.5 / 1.1, 1.6 / 0.6))},
      {"f", box(6.4, -2.3, 7.8, -0.8)},
      {"g", poly({{Vector2d(-1, 0), -3.9}, {Vector2d(1, 0), 5.1}, {Vector2d(0, -1), 0.5},
                  {Vector2d(1, 2), 5.8}})},
      {"t", ConvexSet::MakeSingleton(Vector2d(9, 0))},
  };
  for (auto& v : vs) {
    if (v.id == "s" || v.id == "t" || sigma == 1.0) continue;
    v.set = v.set.Scaled(sigma, v.set.ChebyshevCenter());
  }
  const std::vector<std::pair<const char*, const char*>> pairs{
      {"a", "b"}, {"b", "c"}, {"d", "e"}, {"e", "f"}, {"a", "d"},
      {"c", "f"}, {"g", "b"}, {"a", "g"}, {"g", "c"}};
  std::vector<EdgeSpec> es{{"s", "a", MakeLength(length)},
                           {"s", "d", MakeLength(length)},
                           {"c", "t", MakeLength(length)},
                           {"f", "t", MakeLength(length)}};
  for (const auto& [u, v] : pairs) {
    es.push_back({u, v, MakeLength(length)});
    es.push_back({v, u, MakeLength(length)});
  }
  return Gcs::Build(std::move(vs), std::move(es), "s", "t");
}

GeneratedInstance Generate(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw std::invalid_argument("empty generator spec");
  auto bad = [&] { return std::invalid_argument(fmt::format("malformed generator spec '{}'", spec)); };
  auto num = [&](size_t i) {
    try {
      size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw bad();
      return v;
    } catch (const std::invalid_argument&) {
      throw bad();
    } catch (const std::out_of_range&) {
      throw bad();
    }
  };
  auto integer = [&](size_t i) {
    const double v = num(i);
    if (v != std::floor(v)) throw bad();
    return static_cast<long long>(v);
  };
  const std::string& kind = parts[0];
  if (kind == "hpp" && parts.size() == 2) {
    return {HppChain(static_cast<int>(integer(1))), spec, false};
  }
  if (kind == "random" && (parts.size() == 6 || parts.size() == 7)) {
    LengthKind len = LengthKind::kEuclidean;
    if (parts.size() == 7) {
      if (parts[6] != "sq") throw bad();
      len = LengthKind::kSquaredEuclidean;
    }
    return {RandomInstance(static_cast<std::uint64_t>(integer(1)), static_cast<int>(integer(2)),
                           static_cast<int>(integer(3)), static_cast<int>(integer(4)), num(5), len),
            spec, false};
  }
  if (kind == "symmetry" && parts.size() == 1) return {SymmetryInstance(), spec, true};
  if (kind == "2d" && (parts.size() == 2 || parts.size() == 3)) {
    LengthKind len = LengthKind::kSquaredEuclidean;
    if (parts.size() == 3) {
      if (parts[2] != "euclid") throw bad();
      len = LengthKind::kEuclidean;
    }
    return {TwoDimExample(num(1), len), spec, true};
  }
  throw bad();
}

}  // namespace gcs
