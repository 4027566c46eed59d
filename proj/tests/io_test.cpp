#include <cmath>
#include <cstdio>
#include <string>

#include <gtest/gtest.h>

#include "gcs/bnb.hpp"
#include "gcs/instances.hpp"
#include "gcs/io.hpp"

namespace gcs {
namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

void ExpectSameGraph(const Gcs& a, const Gcs& b) {
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  for (int v = 0; v < a.num_vertices(); ++v) {
    EXPECT_EQ(a.vertex(v).id, b.vertex(v).id);
    EXPECT_TRUE(a.vertex(v).set == b.vertex(v).set) << a.vertex(v).id;
  }
  const std::vector<EdgeSpec> ea = a.edge_specs(), eb = b.edge_specs();
  ASSERT_EQ(ea.size(), eb.size());
  for (size_t e = 0; e < ea.size(); ++e) {
    EXPECT_EQ(ea[e].u, eb[e].u);
    EXPECT_EQ(ea[e].v, eb[e].v);
    EXPECT_TRUE(ea[e].length == eb[e].length) << ea[e].u << "->" << ea[e].v;
  }
  EXPECT_EQ(a.source(), b.source());
  EXPECT_EQ(a.target(), b.target());
}

// Every set and length type, with values that do not print exactly.
Gcs Mixed() {
  MatrixXd P(3, 2);
  P << 1, 0, 0, 1, -1.0 / 3.0, -std::sqrt(2.0);
  MatrixXd Q(2, 2);
  Q << 1.0 / 7.0, 0.1, 0.0, 0.3;
  AffineEdgeConstraint ineq{MatrixXd::Identity(1, 2), -MatrixXd::Identity(1, 2),
                            VectorXd::Constant(1, 0.1 + 0.2),
                            AffineEdgeConstraint::Relation::kInequality};
  SqNorm2Affine quad{MatrixXd::Identity(2, 4) * std::exp(1.0), VectorXd::Constant(2, 1e-300)};
  return Gcs::Build(
      {{"s", ConvexSet::MakeSingleton(Vector2d(0.1, -0.7))},
       {"box", ConvexSet::MakeBox(Vector2d(1.0 / 3.0, 0), Vector2d(2, 2.5))},
       {"poly", ConvexSet::MakePolyhedron(P, Eigen::Vector3d(3, 3, 1e-3))},
       {"ell", ConvexSet::MakeEllipsoid(Q, Vector2d(-0.2, 0.05))},
       {"prod", ConvexSet::MakeProduct({ConvexSet::MakeSingleton(VectorXd::Constant(1, 4.0)),
                                        ConvexSet::MakeBox(VectorXd::Zero(1), VectorXd::Ones(1))})},
       {"t", ConvexSet::MakeSingleton(Vector2d(5, 5))}},
      {{"s", "box", EdgeLength::MakeEuclidean()},
       {"box", "poly", EdgeLength::MakeSquaredEuclidean()},
       {"poly", "ell", EdgeLength(Norm2Affine{MatrixXd::Identity(3, 4), VectorXd::Zero(3)})},
       {"ell", "prod", EdgeLength(ConstantWithConstraint{2.5, ineq})},
       {"box", "prod", EdgeLength(ConstantWithConstraint{1.0, std::nullopt})},
       {"prod", "t", EdgeLength(QuadraticWithConstraint{quad, 0.125, std::nullopt})},
       {"ell", "t", EdgeLength(quad)}},
      "s", "t");
}

TEST(InstanceJson, RoundTripIsFieldExact) {
  std::vector<Gcs> graphs{Mixed(), HppChain(3), SymmetryInstance(), TwoDimExample(0.37),
                          TwoDimExample(3.0, LengthKind::kEuclidean),
                          RandomInstance(11, 4, 12, 30, 0.01)};
  for (const Gcs& g : graphs) {
    const std::string text = InstanceToJson(g);
    const Gcs back = InstanceFromJson(text);
    ExpectSameGraph(g, back);
    EXPECT_EQ(InstanceToJson(back), text);
  }
}

TEST(InstanceJson, FileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/instance_roundtrip.json";
  const Gcs g = Mixed();
  SaveInstance(g, path);
  ExpectSameGraph(g, LoadInstance(path));
  std::remove(path.c_str());
}

TEST(InstanceJson, SchemaShape) {
  const std::string text = InstanceToJson(HppChain(1), -1);
  EXPECT_EQ(text.rfind("{\"vertices\":{\"s\":{\"type\":\"singleton\",\"theta\":[0.0]}", 0), 0u);
  EXPECT_NE(text.find("\"edges\":[{\"u\":\"s\",\"v\":"), std::string::npos);
  EXPECT_NE(text.find("\"length\":{\"type\":\"sq_euclidean\"}"), std::string::npos);
  EXPECT_NE(text.find("\"source\":\"s\",\"target\":\"t\"}"), std::string::npos);
}

std::string ErrorOf(const std::string& text) {
  try {
    InstanceFromJson(text);
  } catch (const IoError& e) {
    return e.what();
  }
  return "";
}

TEST(InstanceJson, DiagnosticsNameLineOrField) {
  EXPECT_EQ(ErrorOf("{\n\"vertices\": {\n,}\n}").rfind("line 3", 0), 0u);
  EXPECT_EQ(ErrorOf("{\"edges\": []}").rfind(": missing field 'vertices'", 0), 0u);
  const std::string base =
      R"({"vertices": {"s": {"type": "singleton", "theta": [0]}, "t": %s},
          "edges": [{"u": "s", "v": "t", "length": %s}], "source": "s", "target": "t"})";
  auto make = [&](const char* set, const char* len) {
    char buf[512];
    std::snprintf(buf, sizeof buf, base.c_str(), set, len);
    return std::string(buf);
  };
  const char* good_set = R"({"type": "singleton", "theta": [1]})";
  const char* good_len = R"({"type": "euclidean"})";
  EXPECT_NO_THROW(InstanceFromJson(make(good_set, good_len)));
  EXPECT_EQ(ErrorOf(make(R"({"type": "box", "lo": [0], "hi": "x"})", good_len))
                .rfind("vertices.t.hi: expected an array", 0),
            0u);
  EXPECT_EQ(ErrorOf(make(R"({"type": "cone"})", good_len)).rfind("vertices.t.type: unknown", 0), 0u);
  EXPECT_EQ(ErrorOf(make(R"({"type": "box", "lo": [1], "hi": [0]})", good_len))
                .rfind("vertices.t:", 0),
            0u);
  EXPECT_EQ(ErrorOf(make(good_set, R"({"type": "const"})")).rfind("edges[0].length: missing field 'c'", 0),
            0u);
  EXPECT_EQ(ErrorOf(make(good_set, R"({"type": "norm2", "C": [[1, 2, 3]], "d": [0]})"))
                .rfind("edges[0].length.C: expected 2 columns", 0),
            0u);
  EXPECT_THROW(LoadInstance("/nonexistent/missing.json"), IoError);
}

TEST(ControlJson, RoundTrip) {
  const PwaSystem pwa = SmallFootstepSystem(4);
  const std::string text = ControlToJson(pwa);
  const ControlProblem back = ControlFromJson(text);
  ASSERT_TRUE(std::holds_alternative<PwaSystem>(back));
  EXPECT_EQ(ControlToJson(back), text);
  const PwaSystem& p = std::get<PwaSystem>(back);
  EXPECT_EQ(p.horizon, 4);
  EXPECT_EQ(p.modes.size(), pwa.modes.size());
  EXPECT_TRUE(p.terminal_set->operator==(*pwa.terminal_set));
  EXPECT_EQ(InstanceToJson(BuildPwaGcs(p)), InstanceToJson(BuildPwaGcs(pwa)));

  MinTimeProblem mt{{MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                     ConvexSet::MakeBox(VectorXd::Constant(1, -5), VectorXd::Constant(1, 5)),
                     ConvexSet::MakeBox(VectorXd::Constant(1, -1), VectorXd::Constant(1, 1)),
                     VectorXd::Constant(1, 3)},
                    5};
  const std::string mtext = ControlToJson(mt);
  const ControlProblem mback = ControlFromJson(mtext);
  ASSERT_TRUE(std::holds_alternative<MinTimeProblem>(mback));
  EXPECT_EQ(std::get<MinTimeProblem>(mback).t_max, 5);
  EXPECT_EQ(ControlToJson(mback), mtext);
}

TEST(ControlJson, RejectsBadSystems) {
  EXPECT_THROW(ControlFromJson(R"({"kind": "hybrid"})"), IoError);
  EXPECT_THROW(ControlFromJson(R"({"kind": "mintime", "A": [[1]], "B": [[1]],
      "state_set": {"type": "box", "lo": [-1], "hi": [1]},
      "control_set": {"type": "box", "lo": [-1], "hi": [1]}, "s0": [3], "t_max": 2})"),
               IoError);
}

TEST(TrajectoryCsv, Layout) {
  Trajectory traj;
  traj.states = {Vector2d(0, 1), Vector2d(0.5, 1), Vector2d(1, 1)};
  traj.controls = {VectorXd::Constant(1, 0.5), VectorXd::Constant(1, -0.25)};
  traj.modes = {2, 0};
  EXPECT_EQ(TrajectoryCsv(traj),
            "tau,s0,s1,a0,mode\n0,0,1,0.5,2\n1,0.5,1,-0.25,0\n2,1,1,,\n");
}

TEST(Svg, DrawsSetsEdgesAndPath) {
  const Gcs g = TwoDimExample(1.0, LengthKind::kEuclidean);
  const BnbReport r = SolveMicp(g);
  ASSERT_TRUE(r.path.has_value());
  const std::string svg = RenderSvg(g, r.path);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  auto count = [&](const std::string& tag) {
    size_t n = 0;
    for (size_t p = svg.find(tag); p != std::string::npos; p = svg.find(tag, p + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("<line "), static_cast<size_t>(g.num_edges()));
  EXPECT_EQ(count("<polygon ") + count("fill=\"#1f4e8c\"/>"), static_cast<size_t>(g.num_vertices()));
  EXPECT_EQ(count("<polyline "), 1u);
  EXPECT_NE(svg.find("stroke=\"red\""), std::string::npos);
}

TEST(Svg, ProjectsHigherDimensions) {
  const Gcs g = RandomInstance(5, 4, 8, 14, 0.05);
  SvgOptions opts;
  opts.proj_x = 1;
  opts.proj_y = 3;
  EXPECT_NE(RenderSvg(g, std::nullopt, opts).find("<polygon"), std::string::npos);
  opts.proj_y = 4;
  EXPECT_THROW(RenderSvg(g, std::nullopt, opts), std::invalid_argument);
  opts.proj_y = 1;
  EXPECT_THROW(RenderSvg(g, std::nullopt, opts), std::invalid_argument);
}

}  // namespace
}  // namespace gcs
