#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gcs {

/// A sparse affine expression  sum_k coef_k * x[var_k] + constant.
class LinExpr {
 public:
  LinExpr() = default;
  // Implicit so that constants mix freely with expressions.
  LinExpr(double constant) : constant_(constant) {}  // NOLINT

  static LinExpr Var(int index, double coef = 1.0);

  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }

  /// Merges repeated indices and drops exact zeros.
  LinExpr Simplified() const;

  double Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Replaces every variable index i by the expression args[i].
  LinExpr Substitute(std::span<const LinExpr> args) const;

  /// Largest variable index referenced, or -1.
  int MaxIndex() const;

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double scale);

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_{0.0};
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double scale, LinExpr a);
LinExpr operator*(LinExpr a, double scale);

using LinExprVec = std::vector<LinExpr>;

/// Expressions x[start], ..., x[start + count - 1].
LinExprVec Vars(int start, int count);

/// Expressions for a dense matrix-vector product  M * v.
LinExprVec MatVec(const Eigen::MatrixXd& m, std::span<const LinExpr> v);

enum class ConeType : std::uint8_t {
  kZero,                // every row == 0
  kNonnegative,         // every row >= 0
  kSecondOrder,         // rows[0] >= ||rows[1:]||
  kRotatedSecondOrder,  // rows[0] * rows[1] >= ||rows[2:]||^2, rows[0], rows[1] >= 0
};

const char* ToString(ConeType cone);

/// Provenance of a constraint row group.
enum class RowTag : std::uint8_t {
  kNone,
  kSourceTarget,
  kConservation,
  kConservationVector,
  kPerspective,
  kDegree,
  kTwoCycle,
  kEpigraph,
  kBound,
};

const char* ToString(RowTag tag);

/// One cone constraint: the vector of affine rows lies in the cone.
struct Constraint {
  ConeType cone{ConeType::kZero};
  LinExprVec rows;
  RowTag tag{RowTag::kNone};
  // Formulation-defined owner (vertex or edge index); -1 when unused.
  int owner{-1};
};

/// Amount by which `values` lies outside `cone`; zero when inside.
/// Second-order rows follow ||.|| <= rhs + tol semantics.
double ConeViolation(ConeType cone, const Eigen::Ref<const Eigen::VectorXd>& values);

/// A list of cone constraints over a local variable vector, e.g. the
/// perspective cone of a set over (x, lambda). Emitted into a program by
/// substituting each local variable with an affine expression.
struct ConstraintBlock {
  int num_local_vars{0};
  std::vector<Constraint> constraints;

  bool IsFeasible(const Eigen::Ref<const Eigen::VectorXd>& local, double tol) const;
  double MaxViolation(const Eigen::Ref<const Eigen::VectorXd>& local) const;
  void Append(const ConstraintBlock& other, std::span<const LinExpr> args);
};

/// minimize  objective(x)  subject to cone constraints on affine rows.
class ConicProgram {
 public:
  /// Returns the index of the first new variable.
  int AddVariables(int count);
  int num_variables() const { return num_variables_; }

  void AddToObjective(const LinExpr& expr);
  const LinExpr& objective() const { return objective_; }

  /// Returns the constraint index. Throws on empty rows or a cone whose
  /// dimension is too small.
  int AddConstraint(ConeType cone, LinExprVec rows, RowTag tag = RowTag::kNone,
                    int owner = -1);
  int AddConstraint(Constraint constraint);

  /// Emits `block` with local variable i replaced by args[i].
  void AddBlock(const ConstraintBlock& block, std::span<const LinExpr> args,
                RowTag tag, int owner = -1);

  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Drops every constraint for which `drop` is true. Returns the new index
  /// of each old constraint, -1 for dropped ones.
  std::vector<int> RemoveConstraints(const std::function<bool(const Constraint&)>& drop);

  /// Human-readable listing of objective, rows, and cones.
  std::string Dump() const;

 private:
  int num_variables_{0};
  LinExpr objective_;
  std::vector<Constraint> constraints_;
};

struct ToleranceConfig {
  double feas_tol{1e-8};
  double gap_tol{1e-8};
  int max_iters{100};
};

enum class SolveStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kNumericalFailure,
};

const char* ToString(SolveStatus status);

struct ConicSolution {
  SolveStatus status{SolveStatus::kNumericalFailure};
  Eigen::VectorXd primal;
  // One multiplier vector per constraint, sized like its rows. With the
  // Lagrangian  c'x - sum_k duals[k]' rows_k(x),  cone multipliers lie in
  // the dual cone and equality multipliers are free.
  std::vector<Eigen::VectorXd> duals;
  double objective{0.0};
  double dual_objective{0.0};
  double primal_residual{0.0};
  double dual_residual{0.0};
  double gap{0.0};
  int iterations{0};
  double solve_seconds{0.0};
};

/// Primal-dual interior-point solve (homogeneous self-dual embedding with
/// Nesterov-Todd scaling). Never throws on numerical trouble; reports
/// kNumericalFailure instead. Reentrant.
ConicSolution Solve(const ConicProgram& program, const ToleranceConfig& tol = {});

}  // namespace gcs
