#include "gcs/costs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace gcs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConstraintTol = 1e-6;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckAffine(const MatrixXd& C, const VectorXd& d, const char* what) {
  if (C.rows() != d.size()) {
    throw std::invalid_argument(fmt::format("{}: C has {} rows but d has {}", what, C.rows(),
                                            d.size()));
  }
  if (!C.allFinite() || !d.allFinite()) throw std::invalid_argument(fmt::format("{}: non-finite data", what));
}

void CheckConstraint(const AffineEdgeConstraint& k) {
  if (k.E.rows() != k.g.size() || k.F.rows() != k.g.size()) {
    throw std::invalid_argument("edge constraint: E, F and g disagree in row count");
  }
}

void CheckConstraintDims(const std::optional<AffineEdgeConstraint>& k, int nu, int nv) {
  if (!k) return;
  if (k->E.cols() != nu || k->F.cols() != nv) {
    throw std::invalid_argument(fmt::format(
        "edge constraint: E is {}x{}, F is {}x{}, endpoints have dimensions {} and {}",
        k->E.rows(), k->E.cols(), k->F.rows(), k->F.cols(), nu, nv));
  }
}

void CheckAffineDims(const MatrixXd& C, int nu, int nv) {
  if (C.cols() != nu + nv) {
    throw std::invalid_argument(
        fmt::format("edge length: C has {} columns, expected {}", C.cols(), nu + nv));
  }
}

bool Satisfies(const std::optional<AffineEdgeConstraint>& k, const VectorXd& xu,
               const VectorXd& xv) {
  if (!k) return true;
  const VectorXd r = k->E * xu + k->F * xv - k->g;
  if (r.size() == 0) return true;
  if (k->relation == AffineEdgeConstraint::Relation::kEquality) {
    return r.cwiseAbs().maxCoeff() <= kConstraintTol;
  }
  return r.maxCoeff() <= kConstraintTol;
}

VectorXd Stack(const VectorXd& a, const VectorXd& b) {
  VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

// Perspective of the edge constraint over (z, z', y).
void EmitConstraint(const std::optional<AffineEdgeConstraint>& k, const LinExprVec& z,
                    const LinExprVec& zp, const LinExpr& y, ConstraintBlock* block) {
  if (!k || k->g.size() == 0) return;
  LinExprVec ez = MatVec(k->E, z);
  LinExprVec fz = MatVec(k->F, zp);
  LinExprVec rows(k->g.size());
  const bool eq = k->relation == AffineEdgeConstraint::Relation::kEquality;
  for (int i = 0; i < k->g.size(); ++i) {
    // Equality: E z + F z' - g y = 0. Inequality: g y - E z - F z' >= 0.
    rows[i] = ez[i] + fz[i] - k->g[i] * y;
    if (!eq) rows[i] = -1.0 * rows[i];
  }
  block->constraints.push_back({eq ? ConeType::kZero : ConeType::kNonnegative, std::move(rows)});
}

LinExprVec AffineRows(const MatrixXd& C, const VectorXd& d, const LinExprVec& w,
                      const LinExpr& y) {
  LinExprVec out = MatVec(C, w);
  for (int i = 0; i < d.size(); ++i) out[i] += d[i] * y;
  return out;
}

}  // namespace

EdgeLength::EdgeLength(Variant v) : v_(std::move(v)) {
  std::visit(Overloaded{
                 [](const Euclidean&) {},
                 [](const SquaredEuclidean&) {},
                 [](const Norm2Affine& n) { CheckAffine(n.C, n.d, "norm2"); },
                 [](const SqNorm2Affine& n) { CheckAffine(n.C, n.d, "sq_norm2"); },
                 [](const ConstantWithConstraint& c) {
                   if (!(c.c >= 0.0) || !std::isfinite(c.c)) {
                     throw std::invalid_argument("const: c must be finite and >= 0");
                   }
                   if (c.constraint) CheckConstraint(*c.constraint);
                 },
                 [](const QuadraticWithConstraint& q) {
                   CheckAffine(q.quad.C, q.quad.d, "quad");
                   if (!(q.c0 >= 0.0) || !std::isfinite(q.c0)) {
                     throw std::invalid_argument("quad: c0 must be finite and >= 0");
                   }
                   if (q.constraint) CheckConstraint(*q.constraint);
                 },
             },
             v_);
}

std::string EdgeLength::type_name() const {
  return std::visit(Overloaded{
                        [](const Euclidean&) { return "euclidean"; },
                        [](const SquaredEuclidean&) { return "sq_euclidean"; },
                        [](const Norm2Affine&) { return "norm2"; },
                        [](const SqNorm2Affine&) { return "sq_norm2"; },
                        [](const ConstantWithConstraint&) { return "const"; },
                        [](const QuadraticWithConstraint&) { return "quad"; },
                    },
                    v_);
}

void EdgeLength::CheckDimensions(int nu, int nv) const {
  std::visit(Overloaded{
                 [&](const Euclidean&) {
                   if (nu != nv) throw std::invalid_argument("euclidean: endpoint dimensions differ");
                 },
                 [&](const SquaredEuclidean&) {
                   if (nu != nv) {
                     throw std::invalid_argument("sq_euclidean: endpoint dimensions differ");
                   }
                 },
                 [&](const Norm2Affine& n) { CheckAffineDims(n.C, nu, nv); },
                 [&](const SqNorm2Affine& n) { CheckAffineDims(n.C, nu, nv); },
                 [&](const ConstantWithConstraint& c) { CheckConstraintDims(c.constraint, nu, nv); },
                 [&](const QuadraticWithConstraint& q) {
                   CheckAffineDims(q.quad.C, nu, nv);
                   CheckConstraintDims(q.constraint, nu, nv);
                 },
             },
             v_);
}

double EdgeLength::Evaluate(const Eigen::Ref<const VectorXd>& xu_ref,
                            const Eigen::Ref<const VectorXd>& xv_ref) const {
  const int nu = static_cast<int>(xu_ref.size());
  const int nv = static_cast<int>(xv_ref.size());
  CheckDimensions(nu, nv);
  const VectorXd xu = xu_ref, xv = xv_ref;
  return std::visit(
      Overloaded{
          [&](const Euclidean&) { return (xv - xu).norm(); },
          [&](const SquaredEuclidean&) { return (xv - xu).squaredNorm(); },
          [&](const Norm2Affine& n) { return (n.C * Stack(xu, xv) + n.d).norm(); },
          [&](const SqNorm2Affine& n) { return (n.C * Stack(xu, xv) + n.d).squaredNorm(); },
          [&](const ConstantWithConstraint& c) {
            return Satisfies(c.constraint, xu, xv) ? c.c : kInf;
          },
          [&](const QuadraticWithConstraint& q) {
            if (!Satisfies(q.constraint, xu, xv)) return kInf;
            return (q.quad.C * Stack(xu, xv) + q.quad.d).squaredNorm() + q.c0;
          },
      },
      v_);
}

ConstraintBlock EdgeLength::PerspectiveEpigraph(int nu, int nv) const {
  CheckDimensions(nu, nv);
  ConstraintBlock block;
  block.num_local_vars = nu + nv + 2;
  const LinExprVec z = Vars(0, nu);
  const LinExprVec zp = Vars(nu, nv);
  const LinExprVec w = Vars(0, nu + nv);
  const LinExpr y = LinExpr::Var(nu + nv);
  const LinExpr t = LinExpr::Var(nu + nv + 1);
  std::visit(
      Overloaded{
          [&](const Euclidean&) {
            LinExprVec rows{t};
            for (int i = 0; i < nu; ++i) rows.push_back(zp[i] - z[i]);
            block.constraints.push_back({ConeType::kSecondOrder, std::move(rows)});
          },
          [&](const SquaredEuclidean&) {
            LinExprVec rows{t, y};
            for (int i = 0; i < nu; ++i) rows.push_back(zp[i] - z[i]);
            block.constraints.push_back({ConeType::kRotatedSecondOrder, std::move(rows)});
          },
          [&](const Norm2Affine& n) {
            LinExprVec rows{t};
            for (auto& r : AffineRows(n.C, n.d, w, y)) rows.push_back(std::move(r));
            block.constraints.push_back({ConeType::kSecondOrder, std::move(rows)});
          },
          [&](const SqNorm2Affine& n) {
            LinExprVec rows{t, y};
            for (auto& r : AffineRows(n.C, n.d, w, y)) rows.push_back(std::move(r));
            block.constraints.push_back({ConeType::kRotatedSecondOrder, std::move(rows)});
          },
          [&](const ConstantWithConstraint& c) {
            block.constraints.push_back({ConeType::kNonnegative, {t - c.c * y}});
            EmitConstraint(c.constraint, z, zp, y, &block);
          },
          [&](const QuadraticWithConstraint& q) {
            LinExprVec rows{t - q.c0 * y, y};
            for (auto& r : AffineRows(q.quad.C, q.quad.d, w, y)) rows.push_back(std::move(r));
            block.constraints.push_back({ConeType::kRotatedSecondOrder, std::move(rows)});
            EmitConstraint(q.constraint, z, zp, y, &block);
          },
      },
      v_);
  block.constraints.push_back({ConeType::kNonnegative, {y}});
  return block;
}

namespace {
bool SameConstraint(const std::optional<AffineEdgeConstraint>& a,
                    const std::optional<AffineEdgeConstraint>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->relation == b->relation && a->E.rows() == b->E.rows() &&
         a->E.cols() == b->E.cols() && a->F.cols() == b->F.cols() && a->E == b->E &&
         a->F == b->F && a->g == b->g;
}
bool SameAffine(const MatrixXd& C1, const VectorXd& d1, const MatrixXd& C2, const VectorXd& d2) {
  return C1.rows() == C2.rows() && C1.cols() == C2.cols() && C1 == C2 && d1 == d2;
}
}  // namespace

bool EdgeLength::operator==(const EdgeLength& other) const {
  if (v_.index() != other.v_.index()) return false;
  return std::visit(
      Overloaded{
          [](const Euclidean&) { return true; },
          [](const SquaredEuclidean&) { return true; },
          [&](const Norm2Affine& n) {
            const auto& o = std::get<Norm2Affine>(other.v_);
            return SameAffine(n.C, n.d, o.C, o.d);
          },
          [&](const SqNorm2Affine& n) {
            const auto& o = std::get<SqNorm2Affine>(other.v_);
            return SameAffine(n.C, n.d, o.C, o.d);
          },
          [&](const ConstantWithConstraint& c) {
            const auto& o = std::get<ConstantWithConstraint>(other.v_);
            return c.c == o.c && SameConstraint(c.constraint, o.constraint);
          },
          [&](const QuadraticWithConstraint& q) {
            const auto& o = std::get<QuadraticWithConstraint>(other.v_);
            return q.c0 == o.c0 && SameAffine(q.quad.C, q.quad.d, o.quad.C, o.quad.d) &&
                   SameConstraint(q.constraint, o.constraint);
          },
      },
      v_);
}

}  // namespace gcs
