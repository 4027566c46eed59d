#include "gcs/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <fmt/format.h>

namespace gcs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool AllFinite(const Eigen::Ref<const MatrixXd>& m) { return m.allFinite(); }

// max d'x  s.t.  A x <= b.
ConicSolution PolyhedronLp(const MatrixXd& A, const VectorXd& b, const VectorXd& d) {
  ConicProgram prog;
  const int n = static_cast<int>(A.cols());
  const int x = prog.AddVariables(n);
  const LinExprVec xs = Vars(x, n);
  LinExpr obj;
  for (int i = 0; i < n; ++i) obj -= d[i] * xs[i];
  prog.AddToObjective(obj);
  LinExprVec rows = MatVec(-A, xs);
  for (int i = 0; i < A.rows(); ++i) rows[i] += b[i];
  prog.AddConstraint(ConeType::kNonnegative, std::move(rows));
  return Solve(prog);
}

VectorXd EllipsoidCenter(const Ellipsoid& e) {
  return e.A.colPivHouseholderQr().solve(-e.b);
}

VectorXd PolyhedronCenter(const PolyhedronH& p) {
  const int n = static_cast<int>(p.A.cols());
  ConicProgram prog;
  const int x = prog.AddVariables(n);
  const int r = prog.AddVariables(1);
  const LinExprVec xs = Vars(x, n);
  prog.AddToObjective(-1.0 * LinExpr::Var(r));
  LinExprVec rows;
  for (int i = 0; i < p.A.rows(); ++i) {
    const double norm = p.A.row(i).norm();
    if (norm == 0.0) continue;
    LinExpr row(p.b[i]);
    for (int j = 0; j < n; ++j) row -= p.A(i, j) * xs[j];
    row -= norm * LinExpr::Var(r);
    rows.push_back(std::move(row));
  }
  rows.push_back(LinExpr::Var(r));
  prog.AddConstraint(ConeType::kNonnegative, std::move(rows));
  const ConicSolution sol = Solve(prog);
  if (sol.status != SolveStatus::kOptimal) {
    throw std::runtime_error(
        fmt::format("chebyshev center: LP ended with status {}", ToString(sol.status)));
  }
  return sol.primal.head(n);
}

VectorXd ComputeCenter(const ConvexSet::Variant& v) {
  return std::visit(
      Overloaded{
          [](const Singleton& s) -> VectorXd { return s.theta; },
          [](const Box& b) -> VectorXd { return 0.5 * (b.lo + b.hi); },
          [](const PolyhedronH& p) -> VectorXd { return PolyhedronCenter(p); },
          [](const Ellipsoid& e) -> VectorXd { return EllipsoidCenter(e); },
          [](const Product& p) -> VectorXd {
            int n = 0;
            for (const auto& f : p.factors) n += f.dim();
            VectorXd c(n);
            int off = 0;
            for (const auto& f : p.factors) {
              c.segment(off, f.dim()) = f.ChebyshevCenter();
              off += f.dim();
            }
            return c;
          },
      },
      v);
}

void EmitPerspective(const ConvexSet& set, int offset, int lambda, ConstraintBlock* block) {
  const LinExpr lam = LinExpr::Var(lambda);
  const LinExprVec x = Vars(offset, set.dim());
  std::visit(
      Overloaded{
          [&](const Singleton& s) {
            LinExprVec rows;
            for (int i = 0; i < set.dim(); ++i) rows.push_back(x[i] - s.theta[i] * lam);
            block->constraints.push_back({ConeType::kZero, std::move(rows)});
          },
          [&](const Box& b) {
            LinExprVec eq, ineq;
            for (int i = 0; i < set.dim(); ++i) {
              if (b.lo[i] == b.hi[i]) {
                eq.push_back(x[i] - b.lo[i] * lam);
              } else {
                ineq.push_back(x[i] - b.lo[i] * lam);
                ineq.push_back(b.hi[i] * lam - x[i]);
              }
            }
            if (!eq.empty()) block->constraints.push_back({ConeType::kZero, std::move(eq)});
            if (!ineq.empty()) {
              block->constraints.push_back({ConeType::kNonnegative, std::move(ineq)});
            }
          },
          [&](const PolyhedronH& p) {
            LinExprVec rows = MatVec(-p.A, x);
            for (int i = 0; i < p.A.rows(); ++i) rows[i] += p.b[i] * lam;
            block->constraints.push_back({ConeType::kNonnegative, std::move(rows)});
          },
          [&](const Ellipsoid& e) {
            LinExprVec rows{lam};
            LinExprVec ax = MatVec(e.A, x);
            for (int i = 0; i < e.A.rows(); ++i) rows.push_back(ax[i] + e.b[i] * lam);
            block->constraints.push_back({ConeType::kSecondOrder, std::move(rows)});
          },
          [&](const Product& p) {
            int off = offset;
            for (const auto& f : p.factors) {
              EmitPerspective(f, off, lambda, block);
              off += f.dim();
            }
          },
      },
      set.data());
}

}  // namespace

ConvexSet::ConvexSet(Variant v, int dim) : dim_(dim) {
  auto impl = std::make_shared<Impl>();
  impl->v = std::move(v);
  impl->center = ComputeCenter(impl->v);
  impl_ = std::move(impl);
}

ConvexSet ConvexSet::MakeSingleton(VectorXd theta) {
  if (theta.size() < 1) throw std::invalid_argument("singleton: dimension must be >= 1");
  if (!AllFinite(theta)) throw std::invalid_argument("singleton: non-finite coordinate");
  const int n = static_cast<int>(theta.size());
  return ConvexSet(Singleton{std::move(theta)}, n);
}

ConvexSet ConvexSet::MakeBox(VectorXd lo, VectorXd hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) {
    throw std::invalid_argument("box: lo and hi must have equal positive length");
  }
  if (!AllFinite(lo) || !AllFinite(hi)) throw std::invalid_argument("box: non-finite bound");
  for (int i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw std::invalid_argument(fmt::format("box: lo[{}] > hi[{}]", i, i));
  }
  const int n = static_cast<int>(lo.size());
  return ConvexSet(Box{std::move(lo), std::move(hi)}, n);
}

ConvexSet ConvexSet::MakePolyhedron(MatrixXd A, VectorXd b) {
  if (A.cols() < 1 || A.rows() < 1 || A.rows() != b.size()) {
    throw std::invalid_argument("polyhedron: A must be m x n with m = len(b), n >= 1");
  }
  if (!AllFinite(A) || !AllFinite(b)) throw std::invalid_argument("polyhedron: non-finite data");
  const int n = static_cast<int>(A.cols());
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      VectorXd d = VectorXd::Zero(n);
      d[i] = sign;
      const ConicSolution sol = PolyhedronLp(A, b, d);
      if (sol.status == SolveStatus::kInfeasible) {
        throw std::invalid_argument("polyhedron: set is empty");
      }
      if (sol.status == SolveStatus::kUnbounded) {
        throw std::invalid_argument("polyhedron: set is unbounded");
      }
      if (sol.status != SolveStatus::kOptimal) {
        throw std::invalid_argument("polyhedron: boundedness check failed numerically");
      }
    }
  }
  return ConvexSet(PolyhedronH{std::move(A), std::move(b)}, n);
}

ConvexSet ConvexSet::MakeEllipsoid(MatrixXd A, VectorXd b) {
  if (A.cols() < 1 || A.rows() != b.size()) {
    throw std::invalid_argument("ellipsoid: A must be m x n with m = len(b), n >= 1");
  }
  if (!AllFinite(A) || !AllFinite(b)) throw std::invalid_argument("ellipsoid: non-finite data");
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  if (qr.rank() < A.cols()) throw std::invalid_argument("ellipsoid: A lacks full column rank");
  const VectorXd c = qr.solve(-b);
  if ((A * c + b).norm() > 1.0 + 1e-12) throw std::invalid_argument("ellipsoid: set is empty");
  const int n = static_cast<int>(A.cols());
  return ConvexSet(Ellipsoid{std::move(A), std::move(b)}, n);
}

ConvexSet ConvexSet::MakeProduct(std::vector<ConvexSet> factors) {
  if (factors.empty()) throw std::invalid_argument("product: no factors");
  int n = 0;
  for (const auto& f : factors) n += f.dim();
  return ConvexSet(Product{std::move(factors)}, n);
}

std::string ConvexSet::type_name() const {
  return std::visit(Overloaded{
                        [](const Singleton&) { return "singleton"; },
                        [](const Box&) { return "box"; },
                        [](const PolyhedronH&) { return "polyhedron"; },
                        [](const Ellipsoid&) { return "ellipsoid"; },
                        [](const Product&) { return "product"; },
                    },
                    data());
}

bool ConvexSet::Contains(const Eigen::Ref<const VectorXd>& x, double tol) const {
  if (x.size() != dim_) {
    throw std::invalid_argument(
        fmt::format("contains: point has dimension {}, set has {}", x.size(), dim_));
  }
  if (tol < 0.0) throw std::invalid_argument("contains: negative tolerance");
  return std::visit(
      Overloaded{
          [&](const Singleton& s) { return ((x - s.theta).cwiseAbs().array() <= tol).all(); },
          [&](const Box& b) {
            return ((x - b.lo).array() >= -tol).all() && ((b.hi - x).array() >= -tol).all();
          },
          [&](const PolyhedronH& p) { return ((p.A * x - p.b).array() <= tol).all(); },
          [&](const Ellipsoid& e) { return (e.A * x + e.b).norm() <= 1.0 + tol; },
          [&](const Product& p) {
            int off = 0;
            for (const auto& f : p.factors) {
              if (!f.Contains(x.segment(off, f.dim()), tol)) return false;
              off += f.dim();
            }
            return true;
          },
      },
      data());
}

ConstraintBlock ConvexSet::Perspective() const {
  ConstraintBlock block;
  block.num_local_vars = dim_ + 1;
  EmitPerspective(*this, 0, dim_, &block);
  block.constraints.push_back({ConeType::kNonnegative, {LinExpr::Var(dim_)}});
  return block;
}

VectorXd ConvexSet::ChebyshevCenter() const { return impl_->center; }

ConvexSet ConvexSet::Scaled(double sigma, const Eigen::Ref<const VectorXd>& center) const {
  if (!(sigma > 0.0)) throw std::invalid_argument("scale: sigma must be positive");
  if (center.size() != dim_) throw std::invalid_argument("scale: center has wrong dimension");
  return std::visit(
      Overloaded{
          [&](const Singleton& s) {
            return MakeSingleton(center + sigma * (s.theta - center));
          },
          [&](const Box& b) {
            return MakeBox(center + sigma * (b.lo - center), center + sigma * (b.hi - center));
          },
          [&](const PolyhedronH& p) {
            return MakePolyhedron(p.A, sigma * p.b + (1.0 - sigma) * (p.A * center));
          },
          [&](const Ellipsoid& e) {
            const VectorXd ac = e.A * center;
            return MakeEllipsoid(e.A / sigma, e.b + ac - ac / sigma);
          },
          [&](const Product& p) {
            std::vector<ConvexSet> out;
            int off = 0;
            for (const auto& f : p.factors) {
              out.push_back(f.Scaled(sigma, center.segment(off, f.dim())));
              off += f.dim();
            }
            return MakeProduct(std::move(out));
          },
      },
      data());
}

VectorXd ConvexSet::Support(const Eigen::Ref<const VectorXd>& direction) const {
  if (direction.size() != dim_) throw std::invalid_argument("support: wrong dimension");
  return std::visit(
      Overloaded{
          [&](const Singleton& s) -> VectorXd { return s.theta; },
          [&](const Box& b) -> VectorXd {
            VectorXd x(dim_);
            for (int i = 0; i < dim_; ++i) x[i] = direction[i] >= 0.0 ? b.hi[i] : b.lo[i];
            return x;
          },
          [&](const PolyhedronH& p) -> VectorXd {
            const ConicSolution sol = PolyhedronLp(p.A, p.b, direction);
            if (sol.status != SolveStatus::kOptimal) {
              throw std::runtime_error("support: LP did not solve");
            }
            return sol.primal;
          },
          [&](const Ellipsoid& e) -> VectorXd {
            const VectorXd& c = impl_->center;
            const double r2 = std::max(0.0, 1.0 - (e.A * c + e.b).squaredNorm());
            const Eigen::LLT<MatrixXd> llt(e.A.transpose() * e.A);
            const VectorXd md = llt.solve(direction.eval());
            const double q = direction.dot(md);
            if (q <= 0.0) return c;
            return c + std::sqrt(r2 / q) * md;
          },
          [&](const Product& p) -> VectorXd {
            VectorXd x(dim_);
            int off = 0;
            for (const auto& f : p.factors) {
              x.segment(off, f.dim()) = f.Support(direction.segment(off, f.dim()));
              off += f.dim();
            }
            return x;
          },
      },
      data());
}

double ConvexSet::RayExit(const Eigen::Ref<const VectorXd>& point,
                          const Eigen::Ref<const VectorXd>& direction) const {
  return std::visit(
      Overloaded{
          [&](const Singleton&) { return 0.0; },
          [&](const Box& b) {
            double t = kInf;
            for (int i = 0; i < dim_; ++i) {
              if (direction[i] > 0.0) t = std::min(t, (b.hi[i] - point[i]) / direction[i]);
              if (direction[i] < 0.0) t = std::min(t, (b.lo[i] - point[i]) / direction[i]);
            }
            return std::max(0.0, t);
          },
          [&](const PolyhedronH& p) {
            const VectorXd ad = p.A * direction;
            const VectorXd slack = p.b - p.A * point;
            double t = kInf;
            for (int i = 0; i < ad.size(); ++i) {
              if (ad[i] > 0.0) t = std::min(t, slack[i] / ad[i]);
            }
            return std::max(0.0, t);
          },
          [&](const Ellipsoid& e) {
            const VectorXd ad = e.A * direction;
            const VectorXd r = e.A * point + e.b;
            const double a = ad.squaredNorm();
            if (a == 0.0) return kInf;
            const double beta = ad.dot(r);
            const double gamma = r.squaredNorm() - 1.0;
            const double disc = std::max(0.0, beta * beta - a * gamma);
            return std::max(0.0, (-beta + std::sqrt(disc)) / a);
          },
          [&](const Product& p) {
            double t = kInf;
            int off = 0;
            for (const auto& f : p.factors) {
              const auto d = direction.segment(off, f.dim());
              if (d.squaredNorm() > 0.0) {
                t = std::min(t, f.RayExit(point.segment(off, f.dim()), d));
              }
              off += f.dim();
            }
            return t;
          },
      },
      data());
}

VectorXd ConvexSet::Sample(std::mt19937_64& rng) const {
  if (const auto* p = std::get_if<Product>(&data())) {
    VectorXd x(dim_);
    int off = 0;
    for (const auto& f : p->factors) {
      x.segment(off, f.dim()) = f.Sample(rng);
      off += f.dim();
    }
    return x;
  }
  const VectorXd& c = impl_->center;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  VectorXd d(dim_);
  for (int i = 0; i < dim_; ++i) d[i] = normal(rng);
  double t = RayExit(c, d);
  if (!std::isfinite(t)) t = 0.0;
  const double u = unit(rng) < 0.5 ? 1.0 : unit(rng);
  return c + u * t * d;
}

bool ConvexSet::operator==(const ConvexSet& other) const {
  if (dim_ != other.dim_ || data().index() != other.data().index()) return false;
  return std::visit(
      Overloaded{
          [&](const Singleton& s) { return s.theta == std::get<Singleton>(other.data()).theta; },
          [&](const Box& b) {
            const auto& o = std::get<Box>(other.data());
            return b.lo == o.lo && b.hi == o.hi;
          },
          [&](const PolyhedronH& p) {
            const auto& o = std::get<PolyhedronH>(other.data());
            return p.A.rows() == o.A.rows() && p.A == o.A && p.b == o.b;
          },
          [&](const Ellipsoid& e) {
            const auto& o = std::get<Ellipsoid>(other.data());
            return e.A.rows() == o.A.rows() && e.A == o.A && e.b == o.b;
          },
          [&](const Product& p) {
            const auto& o = std::get<Product>(other.data());
            if (p.factors.size() != o.factors.size()) return false;
            for (size_t i = 0; i < p.factors.size(); ++i) {
              if (!(p.factors[i] == o.factors[i])) return false;
            }
            return true;
          },
      },
      data());
}

}  // namespace gcs
