#pragma once

#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "gcs/conic.hpp"

namespace gcs {

/// Edge set X_e:  E x_u + F x_v = g  (or <= g componentwise).
struct AffineEdgeConstraint {
  enum class Relation { kEquality, kInequality };
  Eigen::MatrixXd E;
  Eigen::MatrixXd F;
  Eigen::VectorXd g;
  Relation relation{Relation::kEquality};
};

/// ||x_v - x_u||
struct Euclidean {};
/// ||x_v - x_u||^2
struct SquaredEuclidean {};
/// ||C [x_u; x_v] + d||
struct Norm2Affine {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};
/// ||C [x_u; x_v] + d||^2
struct SqNorm2Affine {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};
/// c on X_e, infinite elsewhere.
struct ConstantWithConstraint {
  double c{0.0};
  std::optional<AffineEdgeConstraint> constraint;
};
/// ||C [x_u; x_v] + d||^2 + c0 on X_e, infinite elsewhere.
struct QuadraticWithConstraint {
  SqNorm2Affine quad;
  double c0{0.0};
  std::optional<AffineEdgeConstraint> constraint;
};

class EdgeLength {
 public:
  using Variant = std::variant<Euclidean, SquaredEuclidean, Norm2Affine, SqNorm2Affine,
                               ConstantWithConstraint, QuadraticWithConstraint>;

  EdgeLength() = default;
  explicit EdgeLength(Variant v);

  static EdgeLength MakeEuclidean() { return EdgeLength(Euclidean{}); }
  static EdgeLength MakeSquaredEuclidean() { return EdgeLength(SquaredEuclidean{}); }

  const Variant& data() const { return v_; }
  /// JSON type tag: "euclidean", "sq_euclidean", "norm2", "sq_norm2",
  /// "const" or "quad".
  std::string type_name() const;

  /// Throws std::invalid_argument unless the length fits endpoints of the
  /// given dimensions.
  void CheckDimensions(int nu, int nv) const;

  /// Exact value; +inf when the edge constraint is violated by more than 1e-6.
  double Evaluate(const Eigen::Ref<const Eigen::VectorXd>& xu,
                  const Eigen::Ref<const Eigen::VectorXd>& xv) const;

  /// Conic block over locals (z [nu], z' [nv], y, t) whose feasible set is
  /// t >= perspective of the length at (z, z', y), with y >= 0.
  ConstraintBlock PerspectiveEpigraph(int nu, int nv) const;

  bool operator==(const EdgeLength& other) const;

 private:
  Variant v_{Euclidean{}};
};

}  // namespace gcs
