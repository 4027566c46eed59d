#pragma once

#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "gcs/conic.hpp"

namespace gcs {

class ConvexSet;

struct Singleton {
  Eigen::VectorXd theta;
};

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// {x : A x <= b}
struct PolyhedronH {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// {x : ||A x + b|| <= 1}, A with full column rank.
struct Ellipsoid {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct Product {
  std::vector<ConvexSet> factors;
};

/// A compact convex set. Immutable; copies share the representation.
class ConvexSet {
 public:
  using Variant = std::variant<Singleton, Box, PolyhedronH, Ellipsoid, Product>;

  // Factories validate the representation and throw std::invalid_argument
  // on empty, unbounded, or malformed input.
  static ConvexSet MakeSingleton(Eigen::VectorXd theta);
  static ConvexSet MakeBox(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ConvexSet MakePolyhedron(Eigen::MatrixXd A, Eigen::VectorXd b);
  static ConvexSet MakeEllipsoid(Eigen::MatrixXd A, Eigen::VectorXd b);
  static ConvexSet MakeProduct(std::vector<ConvexSet> factors);

  int dim() const { return dim_; }
  const Variant& data() const { return impl_->v; }
  /// "singleton", "box", "polyhedron", "ellipsoid" or "product".
  std::string type_name() const;

  bool Contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 0.0) const;

  /// Perspective cone over local variables (x_0..x_{n-1}, lambda = x_n).
  ConstraintBlock Perspective() const;

  /// Center of a largest inscribed ball; for ellipsoids the minimizer of
  /// ||A x + b||.
  Eigen::VectorXd ChebyshevCenter() const;

  /// Image under x -> center + sigma (x - center).
  ConvexSet Scaled(double sigma, const Eigen::Ref<const Eigen::VectorXd>& center) const;

  /// A maximizer of direction' x over the set.
  Eigen::VectorXd Support(const Eigen::Ref<const Eigen::VectorXd>& direction) const;

  /// Random member: a point on the segment from the Chebyshev center to the
  /// boundary along a random direction (on the boundary half of the time).
  Eigen::VectorXd Sample(std::mt19937_64& rng) const;

  /// Largest t with point + t * direction in the set (point must be inside).
  double RayExit(const Eigen::Ref<const Eigen::VectorXd>& point,
                 const Eigen::Ref<const Eigen::VectorXd>& direction) const;

  bool operator==(const ConvexSet& other) const;

 private:
  struct Impl {
    Variant v;
    Eigen::VectorXd center;
  };
  ConvexSet(Variant v, int dim);

  std::shared_ptr<const Impl> impl_;
  int dim_{0};
};

}  // namespace gcs
