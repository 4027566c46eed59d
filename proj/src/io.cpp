#include "gcs/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace gcs {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Json = nlohmann::ordered_json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ---- writing ----

Json VecJson(const VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json MatJson(const MatrixXd& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(VecJson(m.row(i).transpose()));
  return out;
}

Json SetJson(const ConvexSet& set) {
  Json out;
  out["type"] = set.type_name();
  std::visit(Overloaded{
                 [&](const Singleton& s) { out["theta"] = VecJson(s.theta); },
                 [&](const Box& b) {
                   out["lo"] = VecJson(b.lo);
                   out["hi"] = VecJson(b.hi);
                 },
                 [&](const PolyhedronH& p) {
                   out["A"] = MatJson(p.A);
                   out["b"] = VecJson(p.b);
                 },
                 [&](const Ellipsoid& e) {
                   out["A"] = MatJson(e.A);
                   out["b"] = VecJson(e.b);
                 },
                 [&](const Product& p) {
                   out["factors"] = Json::array();
                   for (const ConvexSet& f : p.factors) out["factors"].push_back(SetJson(f));
                 },
             },
             set.data());
  return out;
}

void PutConstraint(const std::optional<AffineEdgeConstraint>& k, Json* out) {
  if (!k) return;
  Json dyn;
  dyn["E"] = MatJson(k->E);
  dyn["F"] = MatJson(k->F);
  dyn["g"] = VecJson(k->g);
  dyn["relation"] = k->relation == AffineEdgeConstraint::Relation::kEquality ? "eq" : "le";
  (*out)["dyn"] = std::move(dyn);
}

Json LengthJson(const EdgeLength& len) {
  Json out;
  out["type"] = len.type_name();
  std::visit(Overloaded{
                 [](const Euclidean&) {},
                 [](const SquaredEuclidean&) {},
                 [&](const Norm2Affine& n) {
                   out["C"] = MatJson(n.C);
                   out["d"] = VecJson(n.d);
                 },
                 [&](const SqNorm2Affine& n) {
                   out["C"] = MatJson(n.C);
                   out["d"] = VecJson(n.d);
                 },
                 [&](const ConstantWithConstraint& c) {
                   out["c"] = c.c;
                   PutConstraint(c.constraint, &out);
                 },
                 [&](const QuadraticWithConstraint& q) {
                   out["C"] = MatJson(q.quad.C);
                   out["d"] = VecJson(q.quad.d);
                   out["c0"] = q.c0;
                   PutConstraint(q.constraint, &out);
                 },
             },
             len.data());
  return out;
}

Json StageJson(const StageCost& s) {
  Json out;
  out["C"] = MatJson(s.C);
  out["d"] = VecJson(s.d);
  out["c0"] = s.c0;
  return out;
}

// ---- reading ----

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw IoError(fmt::format("{}: {}", where, what));
}

const Json& Field(const Json& j, const std::string& where, const char* key) {
  if (!j.is_object()) Fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) Fail(where, fmt::format("missing field '{}'", key));
  return *it;
}

std::string Sub(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double Number(const Json& j, const std::string& where) {
  if (!j.is_number()) Fail(where, "expected a number");
  return j.get<double>();
}

int Integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) Fail(where, "expected an integer");
  return j.get<int>();
}

std::string String(const Json& j, const std::string& where) {
  if (!j.is_string()) Fail(where, "expected a string");
  return j.get<std::string>();
}

VectorXd Vec(const Json& j, const std::string& where) {
  if (!j.is_array()) Fail(where, "expected an array of numbers");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = Number(j[i], fmt::format("{}[{}]", where, i));
  return v;
}

// An empty array is a 0 x cols matrix.
MatrixXd Mat(const Json& j, const std::string& where, int cols = -1) {
  if (!j.is_array()) Fail(where, "expected an array of rows");
  if (j.empty()) return MatrixXd::Zero(0, std::max(cols, 0));
  const std::string first = where + "[0]";
  if (!j[0].is_array()) Fail(first, "expected an array of numbers");
  MatrixXd m(j.size(), j[0].size());
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string w = fmt::format("{}[{}]", where, i);
    const VectorXd row = Vec(j[i], w);
    if (row.size() != m.cols()) Fail(w, fmt::format("expected {} entries", m.cols()));
    m.row(i) = row.transpose();
  }
  if (cols >= 0 && m.cols() != cols) Fail(where, fmt::format("expected {} columns", cols));
  return m;
}

template <class F>
auto Guard(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const IoError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    Fail(where, e.what());
  }
}

ConvexSet SetFrom(const Json& j, const std::string& where) {
  const std::string type = String(Field(j, where, "type"), Sub(where, "type"));
  auto get = [&](const char* key) -> const Json& { return Field(j, where, key); };
  auto at = [&](const char* key) { return Sub(where, key); };
  if (type == "singleton") {
    VectorXd theta = Vec(get("theta"), at("theta"));
    return Guard(where, [&] { return ConvexSet::MakeSingleton(std::move(theta)); });
  }
  if (type == "box") {
    VectorXd lo = Vec(get("lo"), at("lo"));
    VectorXd hi = Vec(get("hi"), at("hi"));
    return Guard(where, [&] { return ConvexSet::MakeBox(std::move(lo), std::move(hi)); });
  }
  if (type == "polyhedron" || type == "ellipsoid") {
    MatrixXd A = Mat(get("A"), at("A"));
    VectorXd b = Vec(get("b"), at("b"));
    return Guard(where, [&] {
      return type == "polyhedron" ? ConvexSet::MakePolyhedron(std::move(A), std::move(b))
                                  : ConvexSet::MakeEllipsoid(std::move(A), std::move(b));
    });
  }
  if (type == "product") {
    const Json& fs = get("factors");
    if (!fs.is_array()) Fail(at("factors"), "expected an array of sets");
    std::vector<ConvexSet> factors;
    for (size_t i = 0; i < fs.size(); ++i) {
      factors.push_back(SetFrom(fs[i], fmt::format("{}[{}]", at("factors"), i)));
    }
    return Guard(where, [&] { return ConvexSet::MakeProduct(std::move(factors)); });
  }
  Fail(at("type"), fmt::format("unknown set type '{}'", type));
}

std::optional<AffineEdgeConstraint> ConstraintFrom(const Json& j, const std::string& where,
                                                   int nu, int nv) {
  auto it = j.find("dyn");
  if (it == j.end()) return std::nullopt;
  const std::string w = Sub(where, "dyn");
  AffineEdgeConstraint k;
  k.E = Mat(Field(*it, w, "E"), Sub(w, "E"), nu);
  k.F = Mat(Field(*it, w, "F"), Sub(w, "F"), nv);
  k.g = Vec(Field(*it, w, "g"), Sub(w, "g"));
  if (it->contains("relation")) {
    const std::string rel = String((*it)["relation"], Sub(w, "relation"));
    if (rel == "le") {
      k.relation = AffineEdgeConstraint::Relation::kInequality;
    } else if (rel != "eq") {
      Fail(Sub(w, "relation"), "expected \"eq\" or \"le\"");
    }
  }
  return k;
}

EdgeLength LengthFrom(const Json& j, const std::string& where, int nu, int nv) {
  const std::string type = String(Field(j, where, "type"), Sub(where, "type"));
  auto affine = [&](MatrixXd* C, VectorXd* d) {
    *C = Mat(Field(j, where, "C"), Sub(where, "C"), nu + nv);
    *d = Vec(Field(j, where, "d"), Sub(where, "d"));
  };
  return Guard(where, [&]() -> EdgeLength {
    if (type == "euclidean") return EdgeLength::MakeEuclidean();
    if (type == "sq_euclidean") return EdgeLength::MakeSquaredEuclidean();
    if (type == "norm2") {
      Norm2Affine n;
      affine(&n.C, &n.d);
      return EdgeLength(n);
    }
    if (type == "sq_norm2") {
      SqNorm2Affine n;
      affine(&n.C, &n.d);
      return EdgeLength(n);
    }
    if (type == "const") {
      ConstantWithConstraint c;
      c.c = Number(Field(j, where, "c"), Sub(where, "c"));
      c.constraint = ConstraintFrom(j, where, nu, nv);
      return EdgeLength(c);
    }
    if (type == "quad") {
      QuadraticWithConstraint q;
      affine(&q.quad.C, &q.quad.d);
      if (j.contains("c0")) q.c0 = Number(j["c0"], Sub(where, "c0"));
      q.constraint = ConstraintFrom(j, where, nu, nv);
      return EdgeLength(q);
    }
    Fail(Sub(where, "type"), fmt::format("unknown length type '{}'", type));
  });
}

StageCost StageFrom(const Json& j, const std::string& where, int cols) {
  StageCost s;
  s.C = Mat(Field(j, where, "C"), Sub(where, "C"), cols);
  s.d = Vec(Field(j, where, "d"), Sub(where, "d"));
  if (j.contains("c0")) s.c0 = Number(j["c0"], Sub(where, "c0"));
  return s;
}

Json Parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const size_t upto = std::min<size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw IoError(fmt::format("line {}: {}", line, e.what()));
  }
}

}  // namespace

std::string InstanceToJson(const Gcs& g, int indent) {
  Json out;
  out["vertices"] = Json::object();
  for (const VertexSpec& v : g.vertices()) out["vertices"][v.id] = SetJson(v.set);
  out["edges"] = Json::array();
  for (const EdgeSpec& e : g.edge_specs()) {
    Json je;
    je["u"] = e.u;
    je["v"] = e.v;
    je["length"] = LengthJson(e.length);
    out["edges"].push_back(std::move(je));
  }
  out["source"] = g.vertex(g.source()).id;
  out["target"] = g.vertex(g.target()).id;
  return out.dump(indent);
}

Gcs InstanceFromJson(const std::string& text) {
  const Json j = Parse(text);
  const Json& jv = Field(j, "", "vertices");
  if (!jv.is_object()) Fail("vertices", "expected an object");
  std::vector<VertexSpec> vertices;
  std::map<std::string, int> dims;
  for (auto it = jv.begin(); it != jv.end(); ++it) {
    ConvexSet set = SetFrom(it.value(), "vertices." + it.key());
    dims[it.key()] = set.dim();
    vertices.push_back({it.key(), std::move(set)});
  }
  const Json& je = Field(j, "", "edges");
  if (!je.is_array()) Fail("edges", "expected an array");
  std::vector<EdgeSpec> edges;
  for (size_t i = 0; i < je.size(); ++i) {
    const std::string w = fmt::format("edges[{}]", i);
    const std::string u = String(Field(je[i], w, "u"), w + ".u");
    const std::string v = String(Field(je[i], w, "v"), w + ".v");
    if (!dims.count(u)) Fail(w + ".u", fmt::format("unknown vertex '{}'", u));
    if (!dims.count(v)) Fail(w + ".v", fmt::format("unknown vertex '{}'", v));
    edges.push_back({u, v, LengthFrom(Field(je[i], w, "length"), w + ".length", dims[u], dims[v])});
  }
  const std::string source = String(Field(j, "", "source"), "source");
  const std::string target = String(Field(j, "", "target"), "target");
  return Guard("instance", [&] {
    return Gcs::Build(std::move(vertices), std::move(edges), source, target);
  });
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("{}: cannot open file", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("{}: cannot write file", path));
  out << text;
}

Gcs LoadInstance(const std::string& path) { return InstanceFromJson(ReadFile(path)); }

void SaveInstance(const Gcs& g, const std::string& path) { WriteFile(path, InstanceToJson(g) + "\n"); }

ControlProblem ControlFromJson(const std::string& text) {
  const Json j = Parse(text);
  const std::string kind = String(Field(j, "", "kind"), "kind");
  if (kind == "mintime") {
    MatrixXd A = Mat(Field(j, "", "A"), "A");
    MatrixXd B = Mat(Field(j, "", "B"), "B");
    LinearSystem sys{A, B, SetFrom(Field(j, "", "state_set"), "state_set"),
                     SetFrom(Field(j, "", "control_set"), "control_set"),
                     Vec(Field(j, "", "s0"), "s0")};
    Guard("system", [&] {
      sys.Validate();
      return 0;
    });
    return MinTimeProblem{std::move(sys), Integer(Field(j, "", "t_max"), "t_max")};
  }
  if (kind == "pwa") {
    const Json& jm = Field(j, "", "modes");
    if (!jm.is_array()) Fail("modes", "expected an array");
    std::vector<PwaMode> modes;
    for (size_t i = 0; i < jm.size(); ++i) {
      const std::string w = fmt::format("modes[{}]", i);
      modes.push_back({SetFrom(Field(jm[i], w, "S"), w + ".S"), Mat(Field(jm[i], w, "A"), w + ".A"),
                       Mat(Field(jm[i], w, "B"), w + ".B"), Vec(Field(jm[i], w, "c"), w + ".c")});
    }
    const VectorXd s0 = Vec(Field(j, "", "s0"), "s0");
    const ConvexSet controls = SetFrom(Field(j, "", "control_set"), "control_set");
    const int q = static_cast<int>(s0.size());
    PwaSystem sys{std::move(modes),
                  controls,
                  StageFrom(Field(j, "", "stage"), "stage", q + controls.dim()),
                  Integer(Field(j, "", "horizon"), "horizon"),
                  s0,
                  std::nullopt,
                  std::nullopt};
    if (j.contains("terminal_set")) sys.terminal_set = SetFrom(j["terminal_set"], "terminal_set");
    if (j.contains("terminal_cost")) sys.terminal_cost = StageFrom(j["terminal_cost"], "terminal_cost", q);
    Guard("system", [&] {
      sys.Validate();
      return 0;
    });
    return sys;
  }
  Fail("kind", fmt::format("expected \"mintime\" or \"pwa\", got '{}'", kind));
}

std::string ControlToJson(const ControlProblem& problem, int indent) {
  Json out;
  std::visit(Overloaded{
                 [&](const MinTimeProblem& p) {
                   out["kind"] = "mintime";
                   out["A"] = MatJson(p.system.A);
                   out["B"] = MatJson(p.system.B);
                   out["state_set"] = SetJson(p.system.state_set);
                   out["control_set"] = SetJson(p.system.control_set);
                   out["s0"] = VecJson(p.system.s0);
                   out["t_max"] = p.t_max;
                 },
                 [&](const PwaSystem& s) {
                   out["kind"] = "pwa";
                   out["modes"] = Json::array();
                   for (const PwaMode& m : s.modes) {
                     Json jm;
                     jm["S"] = SetJson(m.S);
                     jm["A"] = MatJson(m.A);
                     jm["B"] = MatJson(m.B);
                     jm["c"] = VecJson(m.c);
                     out["modes"].push_back(std::move(jm));
                   }
                   out["control_set"] = SetJson(s.control_set);
                   out["stage"] = StageJson(s.stage);
                   out["horizon"] = s.horizon;
                   out["s0"] = VecJson(s.s0);
                   if (s.terminal_set) out["terminal_set"] = SetJson(*s.terminal_set);
                   if (s.terminal_cost) out["terminal_cost"] = StageJson(*s.terminal_cost);
                 },
             },
             problem);
  return out.dump(indent);
}

std::string TrajectoryCsv(const Trajectory& traj) {
  const int q = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  const int r = traj.controls.empty() ? 0 : static_cast<int>(traj.controls[0].size());
  const bool modes = !traj.modes.empty();
  std::string out = "tau";
  for (int i = 0; i < q; ++i) out += fmt::format(",s{}", i);
  for (int i = 0; i < r; ++i) out += fmt::format(",a{}", i);
  if (modes) out += ",mode";
  out += "\n";
  for (size_t k = 0; k < traj.states.size(); ++k) {
    out += fmt::format("{}", k);
    for (int i = 0; i < q; ++i) out += fmt::format(",{}", traj.states[k][i]);
    const bool has = k < traj.controls.size();
    for (int i = 0; i < r; ++i) out += has ? fmt::format(",{}", traj.controls[k][i]) : ",";
    if (modes) out += has ? fmt::format(",{}", traj.modes[k]) : ",";
    out += "\n";
  }
  return out;
}

std::string RenderSvg(const Gcs& g, const std::optional<PathResult>& path, const SvgOptions& opts) {
  int n = 0;
  for (int v = 0; v < g.num_vertices(); ++v) n = std::max(n, g.dim(v));
  const int px = opts.proj_x, py = opts.proj_y;
  if (px < 0 || py < 0 || px >= n || py >= n || px == py) {
    throw std::invalid_argument(
        fmt::format("projection ({}, {}) is invalid for dimension {}", px, py, n));
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (g.dim(v) <= std::max(px, py)) {
      throw std::invalid_argument(fmt::format("vertex '{}' has dimension {}", g.vertex(v).id, g.dim(v)));
    }
  }

  // Projected outlines from support points along directions in the plane.
  constexpr int kDirections = 96;
  std::vector<std::vector<Eigen::Vector2d>> outline(g.num_vertices());
  std::vector<Eigen::Vector2d> center(g.num_vertices());
  std::vector<bool> point(g.num_vertices());
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  auto grow = [&](const Eigen::Vector2d& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (int v = 0; v < g.num_vertices(); ++v) {
    const ConvexSet& set = g.vertex(v).set;
    const VectorXd c = set.ChebyshevCenter();
    center[v] = {c[px], c[py]};
    grow(center[v]);
    for (int k = 0; k < kDirections; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kDirections;
      VectorXd d = VectorXd::Zero(set.dim());
      d[px] = std::cos(a);
      d[py] = std::sin(a);
      const VectorXd s = set.Support(d);
      const Eigen::Vector2d p(s[px], s[py]);
      if (outline[v].empty() || (p - outline[v].back()).norm() > 1e-9) outline[v].push_back(p);
      grow(p);
    }
    point[v] = (hi - lo).norm() == 0.0 ||
               std::all_of(outline[v].begin(), outline[v].end(),
                           [&](const Eigen::Vector2d& p) { return (p - center[v]).norm() < 1e-9; });
  }
  if (path) {
    for (const VectorXd& x : path->positions) grow({x[px], x[py]});
  }

  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-9});
  const double margin = 0.06 * span;
  const double scale = opts.width / (span + 2.0 * margin);
  const double height = (hi.y() - lo.y() + 2.0 * margin) * scale;
  const double width = (hi.x() - lo.x() + 2.0 * margin) * scale;
  auto X = [&](double x) { return (x - lo.x() + margin) * scale; };
  auto Y = [&](double y) { return (hi.y() - y + margin) * scale; };
  const double radius = std::max(3.0, 0.006 * opts.width);

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.1f}\" height=\"{:.1f}\" "
      "viewBox=\"0 0 {:.1f} {:.1f}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height, width, height);
  svg += "<g stroke=\"#999999\" stroke-width=\"1\">\n";
  for (const Edge& e : g.edges()) {
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n",
                       X(center[e.u].x()), Y(center[e.u].y()), X(center[e.v].x()),
                       Y(center[e.v].y()));
  }
  svg += "</g>\n<g fill=\"#cfe0f5\" fill-opacity=\"0.8\" stroke=\"#1f4e8c\" stroke-width=\"1.2\">\n";
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (point[v]) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"#1f4e8c\"/>\n",
                         X(center[v].x()), Y(center[v].y()), radius);
      continue;
    }
    std::string pts;
    for (const Eigen::Vector2d& p : outline[v]) pts += fmt::format("{:.2f},{:.2f} ", X(p.x()), Y(p.y()));
    svg += fmt::format("<polygon points=\"{}\"/>\n", pts);
  }
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
  for (int v = 0; v < g.num_vertices(); ++v) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", X(center[v].x()) + radius,
                       Y(center[v].y()) - radius, g.vertex(v).id);
  }
  svg += "</g>\n";
  if (path && !path->positions.empty()) {
    std::string pts;
    for (const VectorXd& x : path->positions) pts += fmt::format("{:.2f},{:.2f} ", X(x[px]), Y(x[py]));
    svg += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"2\" "
        "stroke-dasharray=\"4 4\"/>\n<g fill=\"white\" stroke=\"black\" stroke-width=\"1\">\n",
        pts);
    for (const VectorXd& x : path->positions) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\"/>\n", X(x[px]), Y(x[py]),
                         radius);
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace gcs
