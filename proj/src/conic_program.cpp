#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "gcs/conic.hpp"

namespace gcs {

LinExpr LinExpr::Var(int index, double coef) {
  if (index < 0) throw std::invalid_argument("LinExpr::Var: negative index");
  LinExpr e;
  e.terms_.emplace_back(index, coef);
  return e;
}

LinExpr LinExpr::Simplified() const {
  std::map<int, double> merged;
  for (const auto& [i, c] : terms_) merged[i] += c;
  LinExpr out(constant_);
  for (const auto& [i, c] : merged) {
    if (c != 0.0) out.terms_.emplace_back(i, c);
  }
  return out;
}

double LinExpr::Evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double v = constant_;
  for (const auto& [i, c] : terms_) v += c * x[i];
  return v;
}

LinExpr LinExpr::Substitute(std::span<const LinExpr> args) const {
  LinExpr out(constant_);
  for (const auto& [i, c] : terms_) {
    if (i >= static_cast<int>(args.size())) {
      throw std::out_of_range("LinExpr::Substitute: index beyond argument list");
    }
    out += c * args[i];
  }
  return out;
}

int LinExpr::MaxIndex() const {
  int m = -1;
  for (const auto& [i, c] : terms_) m = std::max(m, i);
  return m;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const auto& [i, c] : other.terms_) terms_.emplace_back(i, -c);
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double scale) {
  for (auto& term : terms_) term.second *= scale;
  constant_ *= scale;
  return *this;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double scale, LinExpr a) { return a *= scale; }
LinExpr operator*(LinExpr a, double scale) { return a *= scale; }

LinExprVec Vars(int start, int count) {
  LinExprVec out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(LinExpr::Var(start + i));
  return out;
}

LinExprVec MatVec(const Eigen::MatrixXd& m, std::span<const LinExpr> v) {
  if (m.cols() != static_cast<Eigen::Index>(v.size())) {
    throw std::invalid_argument("MatVec: dimension mismatch");
  }
  LinExprVec out(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) out[r] += m(r, c) * v[c];
    }
  }
  return out;
}

const char* ToString(ConeType cone) {
  switch (cone) {
    case ConeType::kZero: return "zero";
    case ConeType::kNonnegative: return "nonneg";
    case ConeType::kSecondOrder: return "soc";
    case ConeType::kRotatedSecondOrder: return "rsoc";
  }
  return "?";
}

const char* ToString(RowTag tag) {
  switch (tag) {
    case RowTag::kNone: return "none";
    case RowTag::kSourceTarget: return "source-target";
    case RowTag::kConservation: return "conservation";
    case RowTag::kConservationVector: return "conservation-vector";
    case RowTag::kPerspective: return "perspective-membership";
    case RowTag::kDegree: return "degree";
    case RowTag::kTwoCycle: return "two-cycle";
    case RowTag::kEpigraph: return "epigraph";
    case RowTag::kBound: return "bound";
  }
  return "?";
}

const char* ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "?";
}

double ConeViolation(ConeType cone, const Eigen::Ref<const Eigen::VectorXd>& v) {
  switch (cone) {
    case ConeType::kZero:
      return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
    case ConeType::kNonnegative:
      return v.size() == 0 ? 0.0 : std::max(0.0, -v.minCoeff());
    case ConeType::kSecondOrder:
      return std::max(0.0, v.tail(v.size() - 1).norm() - v[0]);
    case ConeType::kRotatedSecondOrder: {
      // ||(2w, a - b)|| <= a + b  is the same cone.
      Eigen::VectorXd u(v.size());
      u[0] = v[0] - v[1];
      u.tail(v.size() - 2) = 2.0 * v.tail(v.size() - 2);
      return std::max(0.0, u.norm() - (v[0] + v[1]));
    }
  }
  return 0.0;
}

double ConstraintBlock::MaxViolation(const Eigen::Ref<const Eigen::VectorXd>& local) const {
  double worst = 0.0;
  for (const auto& con : constraints) {
    Eigen::VectorXd vals(con.rows.size());
    for (size_t i = 0; i < con.rows.size(); ++i) vals[i] = con.rows[i].Evaluate(local);
    worst = std::max(worst, ConeViolation(con.cone, vals));
  }
  return worst;
}

bool ConstraintBlock::IsFeasible(const Eigen::Ref<const Eigen::VectorXd>& local,
                                 double tol) const {
  if (local.size() != num_local_vars) {
    throw std::invalid_argument("ConstraintBlock: wrong number of local values");
  }
  return MaxViolation(local) <= tol;
}

void ConstraintBlock::Append(const ConstraintBlock& other, std::span<const LinExpr> args) {
  for (const auto& con : other.constraints) {
    Constraint c{con.cone, {}, con.tag, con.owner};
    c.rows.reserve(con.rows.size());
    for (const auto& row : con.rows) c.rows.push_back(row.Substitute(args));
    constraints.push_back(std::move(c));
  }
}

int ConicProgram::AddVariables(int count) {
  if (count < 0) throw std::invalid_argument("AddVariables: negative count");
  const int first = num_variables_;
  num_variables_ += count;
  return first;
}

void ConicProgram::AddToObjective(const LinExpr& expr) {
  if (expr.MaxIndex() >= num_variables_) {
    throw std::out_of_range("AddToObjective: unknown variable");
  }
  objective_ += expr;
  objective_ = objective_.Simplified();
}

int ConicProgram::AddConstraint(ConeType cone, LinExprVec rows, RowTag tag, int owner) {
  return AddConstraint(Constraint{cone, std::move(rows), tag, owner});
}

std::vector<int> ConicProgram::RemoveConstraints(
    const std::function<bool(const Constraint&)>& drop) {
  std::vector<int> index(constraints_.size(), -1);
  std::vector<Constraint> kept;
  kept.reserve(constraints_.size());
  for (size_t k = 0; k < constraints_.size(); ++k) {
    if (drop(constraints_[k])) continue;
    index[k] = static_cast<int>(kept.size());
    kept.push_back(std::move(constraints_[k]));
  }
  constraints_ = std::move(kept);
  return index;
}

int ConicProgram::AddConstraint(Constraint constraint) {
  const size_t dim = constraint.rows.size();
  if (dim == 0) throw std::invalid_argument("AddConstraint: empty row list");
  if (constraint.cone == ConeType::kSecondOrder && dim < 1) {
    throw std::invalid_argument("AddConstraint: SOC needs at least one row");
  }
  if (constraint.cone == ConeType::kRotatedSecondOrder && dim < 2) {
    throw std::invalid_argument("AddConstraint: rotated SOC needs at least two rows");
  }
  for (auto& row : constraint.rows) {
    if (row.MaxIndex() >= num_variables_) {
      throw std::out_of_range("AddConstraint: unknown variable");
    }
    row = row.Simplified();
  }
  constraints_.push_back(std::move(constraint));
  return static_cast<int>(constraints_.size()) - 1;
}

void ConicProgram::AddBlock(const ConstraintBlock& block, std::span<const LinExpr> args,
                            RowTag tag, int owner) {
  if (static_cast<int>(args.size()) != block.num_local_vars) {
    throw std::invalid_argument("AddBlock: argument count does not match block");
  }
  for (const auto& con : block.constraints) {
    LinExprVec rows;
    rows.reserve(con.rows.size());
    for (const auto& row : con.rows) rows.push_back(row.Substitute(args));
    AddConstraint(con.cone, std::move(rows), tag, owner);
  }
}

namespace {
std::string FormatExpr(const LinExpr& e) {
  std::string s;
  for (const auto& [i, c] : e.terms()) {
    s += fmt::format("{:+g}*x{} ", c, i);
  }
  if (e.constant() != 0.0 || s.empty()) s += fmt::format("{:+g}", e.constant());
  return s;
}
}  // namespace

std::string ConicProgram::Dump() const {
  std::ostringstream out;
  out << "variables " << num_variables_ << "\n";
  out << "minimize " << FormatExpr(objective_) << "\n";
  for (size_t k = 0; k < constraints_.size(); ++k) {
    const auto& con = constraints_[k];
    out << "c" << k << " " << ToString(con.cone) << " [" << ToString(con.tag);
    if (con.owner >= 0) out << " " << con.owner;
    out << "]\n";
    for (const auto& row : con.rows) out << "  " << FormatExpr(row) << "\n";
  }
  return out.str();
}

}  // namespace gcs
