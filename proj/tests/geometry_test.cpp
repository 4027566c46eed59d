#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gcs/geometry.hpp"

namespace gcs {
namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

VectorXd V(std::initializer_list<double> v) {
  VectorXd out(v.size());
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ConvexSet Interval01Polyhedron() {
  MatrixXd A(2, 1);
  A << 1, -1;
  return ConvexSet::MakePolyhedron(A, V({1, 0}));
}

ConvexSet Triangle() {
  MatrixXd A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  return ConvexSet::MakePolyhedron(A, V({0, 0, 2}));
}

std::vector<ConvexSet> Zoo() {
  MatrixXd E(2, 2);
  E << 2, 0.5, 0, 1;
  return {
      ConvexSet::MakeSingleton(V({1, -1})),
      ConvexSet::MakeBox(V({0, -1}), V({2, 3})),
      ConvexSet::MakeBox(V({0, 1}), V({2, 1})),
      Triangle(),
      ConvexSet::MakeEllipsoid(E, V({-1, 0.5})),
      ConvexSet::MakeProduct({Interval01Polyhedron(), ConvexSet::MakeSingleton(V({4}))}),
  };
}

TEST(ContainsTest, Examples) {
  EXPECT_TRUE(ConvexSet::MakeBox(V({0}), V({1})).Contains(V({0.5}), 0.0));
  EXPECT_TRUE(ConvexSet::MakeSingleton(V({1, 1})).Contains(V({1, 1}), 0.0));
  EXPECT_FALSE(Interval01Polyhedron().Contains(V({2}), 1e-9));
  EXPECT_THROW(Interval01Polyhedron().Contains(V({1, 2}), 0.0), std::invalid_argument);
}

TEST(ConstructionTest, RejectsBadSets) {
  EXPECT_THROW(ConvexSet::MakeBox(V({1}), V({0})), std::invalid_argument);
  MatrixXd half(1, 1);
  half << 1;
  EXPECT_THROW(ConvexSet::MakePolyhedron(half, V({1})), std::invalid_argument);
  MatrixXd empty(2, 1);
  empty << 1, -1;
  EXPECT_THROW(ConvexSet::MakePolyhedron(empty, V({0, -1})), std::invalid_argument);
  MatrixXd flat(2, 2);
  flat << 1, 0, 0, 0;
  EXPECT_THROW(ConvexSet::MakeEllipsoid(flat, V({0, 0})), std::invalid_argument);
  // ||(x, x + 3)|| >= 3 / sqrt(2) > 1.
  MatrixXd tall(2, 1);
  tall << 1, 1;
  EXPECT_THROW(ConvexSet::MakeEllipsoid(tall, V({0, 3})), std::invalid_argument);
}

TEST(PerspectiveTest, Examples) {
  const ConstraintBlock p = Interval01Polyhedron().Perspective();
  EXPECT_TRUE(p.IsFeasible(V({0.5, 1}), 0.0));
  EXPECT_FALSE(p.IsFeasible(V({2, 1}), 0.0));
  EXPECT_TRUE(p.IsFeasible(V({0, 0}), 0.0));

  const ConstraintBlock disk =
      ConvexSet::MakeEllipsoid(MatrixXd::Identity(2, 2), V({0, 0})).Perspective();
  EXPECT_TRUE(disk.IsFeasible(V({0.5, 0, 1}), 0.0));

  const ConstraintBlock point = ConvexSet::MakeSingleton(V({3})).Perspective();
  EXPECT_TRUE(point.IsFeasible(V({6, 2}), 0.0));
  EXPECT_FALSE(point.IsFeasible(V({6, 1}), 1e-9));
}

TEST(PerspectiveTest, OriginAndHomogeneity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> alpha(0.0, 5.0);
  for (const auto& set : Zoo()) {
    const ConstraintBlock block = set.Perspective();
    EXPECT_TRUE(block.IsFeasible(VectorXd::Zero(set.dim() + 1), 0.0)) << set.type_name();
    for (int k = 0; k < 50; ++k) {
      VectorXd local(set.dim() + 1);
      local << set.Sample(rng), 1.0;
      ASSERT_TRUE(block.IsFeasible(local, 1e-9)) << set.type_name();
      const double a = alpha(rng);
      EXPECT_TRUE(block.IsFeasible(a * local, 1e-9 * (1.0 + a))) << set.type_name();
    }
  }
}

// Block feasibility at (x, lambda) agrees with membership of x / lambda.
TEST(PerspectiveTest, SamplingSoundness) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.1, 3.0);
  std::uniform_real_distribution<double> coord(-4.0, 6.0);
  std::bernoulli_distribution inside(0.5);
  for (const auto& set : Zoo()) {
    const ConstraintBlock block = set.Perspective();
    int agree = 0;
    for (int k = 0; k < 1000; ++k) {
      const double l = lam(rng);
      VectorXd x(set.dim());
      if (inside(rng)) {
        x = l * set.Sample(rng);
      } else {
        for (int i = 0; i < set.dim(); ++i) x[i] = coord(rng);
      }
      VectorXd local(set.dim() + 1);
      local << x, l;
      const double tol = 1e-9;
      if (block.IsFeasible(local, tol * l) == set.Contains(x / l, tol)) ++agree;
    }
    EXPECT_EQ(agree, 1000) << set.type_name();
  }
}

TEST(PerspectiveTest, SliceMatchesContains) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-3.0, 5.0);
  for (const auto& set : Zoo()) {
    const ConstraintBlock block = set.Perspective();
    for (int k = 0; k < 300; ++k) {
      VectorXd x = k % 2 ? set.Sample(rng) : VectorXd::NullaryExpr(set.dim(), [&] {
        return coord(rng);
      });
      VectorXd local(set.dim() + 1);
      local << x, 1.0;
      EXPECT_EQ(block.IsFeasible(local, 1e-9), set.Contains(x, 1e-9)) << set.type_name();
    }
  }
}

TEST(ChebyshevTest, Examples) {
  const VectorXd c = ConvexSet::MakeBox(V({0, 0}), V({2, 2})).ChebyshevCenter();
  EXPECT_NEAR(c[0], 1.0, 1e-12);
  EXPECT_NEAR(c[1], 1.0, 1e-12);
  EXPECT_EQ(ConvexSet::MakeSingleton(V({3, 4})).ChebyshevCenter(), V({3, 4}));
  // Incenter of the right triangle with legs 2: r = area / semiperimeter.
  const double r = 2.0 / (2.0 + std::sqrt(2.0));
  const VectorXd t = Triangle().ChebyshevCenter();
  EXPECT_NEAR(t[0], r, 1e-6);
  EXPECT_NEAR(t[1], r, 1e-6);
  const VectorXd e = ConvexSet::MakeEllipsoid(MatrixXd::Identity(2, 2), V({-1, 2}))
                         .ChebyshevCenter();
  EXPECT_NEAR(e[0], 1.0, 1e-12);
  EXPECT_NEAR(e[1], -2.0, 1e-12);
}

TEST(ScaleTest, Examples) {
  const ConvexSet box = ConvexSet::MakeBox(V({0, 0}), V({2, 2}));
  EXPECT_TRUE(box.Scaled(1.0, V({5, -3})) == box);
  const ConvexSet half = box.Scaled(0.5, V({1, 1}));
  const auto& b = std::get<Box>(half.data());
  EXPECT_EQ(b.lo, V({0.5, 0.5}));
  EXPECT_EQ(b.hi, V({1.5, 1.5}));
  EXPECT_THROW(box.Scaled(0.0, V({1, 1})), std::invalid_argument);
}

// Scaling maps members to members and non-members to non-members.
TEST(ScaleTest, MapsMembership) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(-4.0, 6.0);
  const VectorXd center = V({0.3, 0.7});
  for (const auto& set : Zoo()) {
    if (set.dim() != 2) continue;
    for (double sigma : {0.25, 1.0, 3.0}) {
      const ConvexSet scaled = set.Scaled(sigma, center);
      EXPECT_EQ(scaled.type_name(), set.type_name());
      for (int k = 0; k < 200; ++k) {
        const VectorXd x =
            k % 2 ? set.Sample(rng) : VectorXd(V({coord(rng), coord(rng)}));
        const VectorXd y = center + sigma * (x - center);
        EXPECT_EQ(set.Contains(x, 1e-9), scaled.Contains(y, 1e-9 * std::max(1.0, sigma)))
            << set.type_name() << " sigma " << sigma;
      }
    }
  }
}

TEST(SupportTest, MaximizesDirection) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (const auto& set : Zoo()) {
    for (int k = 0; k < 10; ++k) {
      VectorXd d(set.dim());
      for (int i = 0; i < d.size(); ++i) d[i] = normal(rng);
      const VectorXd s = set.Support(d);
      EXPECT_TRUE(set.Contains(s, 1e-7)) << set.type_name();
      for (int j = 0; j < 50; ++j) {
        EXPECT_LE(d.dot(set.Sample(rng)), d.dot(s) + 1e-7) << set.type_name();
      }
    }
  }
}

}  // namespace
}  // namespace gcs
