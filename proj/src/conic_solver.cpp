// Homogeneous self-dual interior-point method for
//
//   minimize    c'x
//   subject to  A x = b,  G x + s = h,  s in K,
//
// with K a product of a nonnegative orthant and second-order cones. Rotated
// cones are mapped onto second-order cones on entry. Search directions use
// Nesterov-Todd scaling and a Mehrotra predictor-corrector; the KKT system is
// solved by a regularized sparse LDL' factorization plus iterative refinement.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "gcs/conic.hpp"
#include "ldl.hpp"

namespace gcs {
namespace {

constexpr double kInaccurateFactor = 100.0;
// Iterations without a 2x merit improvement before an acceptable iterate is returned.
constexpr int kStallWindow = 10;

using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct StandardForm {
  int n{0};
  SpMat A;  // p x n
  VectorXd b;
  SpMat G;  // m x n
  VectorXd h;
  VectorXd c;
  double c0{0.0};
  int l{0};                // orthant rows come first
  std::vector<int> q;      // second-order cone sizes, in order
  std::vector<int> q_start;
  // Per original constraint: where its rows went.
  struct Where {
    bool equality{false};
    bool rotated{false};
    int offset{0};
    int size{0};
  };
  std::vector<Where> where;
};

StandardForm ToStandardForm(const ConicProgram& prog) {
  StandardForm sf;
  sf.n = prog.num_variables();
  sf.c = VectorXd::Zero(sf.n);
  for (const auto& [i, v] : prog.objective().terms()) sf.c[i] += v;
  sf.c0 = prog.objective().constant();

  const auto& cons = prog.constraints();
  sf.where.resize(cons.size());
  int p = 0;
  int l = 0;
  for (size_t k = 0; k < cons.size(); ++k) {
    const auto& con = cons[k];
    const int d = static_cast<int>(con.rows.size());
    if (con.cone == ConeType::kZero) {
      sf.where[k] = {true, false, p, d};
      p += d;
    } else if (con.cone == ConeType::kNonnegative) {
      sf.where[k] = {false, false, l, d};
      l += d;
    }
  }
  sf.l = l;
  int m = l;
  for (size_t k = 0; k < cons.size(); ++k) {
    const auto& con = cons[k];
    const int d = static_cast<int>(con.rows.size());
    if (con.cone == ConeType::kSecondOrder || con.cone == ConeType::kRotatedSecondOrder) {
      sf.where[k] = {false, con.cone == ConeType::kRotatedSecondOrder, m, d};
      sf.q.push_back(d);
      sf.q_start.push_back(m);
      m += d;
    }
  }

  std::vector<Triplet> ta, tg;
  sf.b = VectorXd::Zero(p);
  sf.h = VectorXd::Zero(m);
  auto put_g = [&](int row, const LinExpr& e) {
    // s = h - G x  must equal the affine row.
    for (const auto& [i, v] : e.terms()) tg.emplace_back(row, i, -v);
    sf.h[row] = e.constant();
  };
  for (size_t k = 0; k < cons.size(); ++k) {
    const auto& con = cons[k];
    const auto& w = sf.where[k];
    if (w.equality) {
      for (int r = 0; r < w.size; ++r) {
        for (const auto& [i, v] : con.rows[r].terms()) ta.emplace_back(w.offset + r, i, v);
        sf.b[w.offset + r] = -con.rows[r].constant();
      }
    } else if (!w.rotated) {
      for (int r = 0; r < w.size; ++r) put_g(w.offset + r, con.rows[r]);
    } else {
      const LinExpr& a = con.rows[0];
      const LinExpr& bb = con.rows[1];
      put_g(w.offset, a + bb);
      put_g(w.offset + 1, a - bb);
      for (int r = 2; r < w.size; ++r) put_g(w.offset + r, 2.0 * con.rows[r]);
    }
  }
  sf.A.resize(p, sf.n);
  sf.A.setFromTriplets(ta.begin(), ta.end());
  sf.G.resize(m, sf.n);
  sf.G.setFromTriplets(tg.begin(), tg.end());
  return sf;
}

// Cone algebra on the product of an orthant and second-order cones.
class Cones {
 public:
  Cones(int l, std::vector<int> q, std::vector<int> q_start)
      : l_(l), q_(std::move(q)), q_start_(std::move(q_start)) {
    m_ = l_;
    for (int d : q_) m_ += d;
  }

  int size() const { return m_; }
  int degree() const { return l_ + static_cast<int>(q_.size()); }

  VectorXd Identity() const {
    VectorXd e = VectorXd::Zero(m_);
    e.head(l_).setOnes();
    for (int s : q_start_) e[s] = 1.0;
    return e;
  }

  // Smallest eigenvalue in the Jordan-algebra sense.
  double MinEig(const VectorXd& u) const {
    double v = std::numeric_limits<double>::infinity();
    if (l_ > 0) v = u.head(l_).minCoeff();
    for (size_t k = 0; k < q_.size(); ++k) {
      const int s = q_start_[k];
      const int d = q_[k];
      v = std::min(v, u[s] - u.segment(s + 1, d - 1).norm());
    }
    return v;
  }

  VectorXd Product(const VectorXd& u, const VectorXd& v) const {
    VectorXd w(m_);
    w.head(l_) = u.head(l_).cwiseProduct(v.head(l_));
    for (size_t k = 0; k < q_.size(); ++k) {
      const int s = q_start_[k];
      const int d = q_[k];
      w[s] = u.segment(s, d).dot(v.segment(s, d));
      w.segment(s + 1, d - 1) = u[s] * v.segment(s + 1, d - 1) + v[s] * u.segment(s + 1, d - 1);
    }
    return w;
  }

  // Solves  lambda o u = r  for u.
  VectorXd Divide(const VectorXd& lambda, const VectorXd& r) const {
    VectorXd u(m_);
    u.head(l_) = r.head(l_).cwiseQuotient(lambda.head(l_));
    for (size_t k = 0; k < q_.size(); ++k) {
      const int s = q_start_[k];
      const int d = q_[k];
      const double l0 = lambda[s];
      const auto l1 = lambda.segment(s + 1, d - 1);
      const double det = l0 * l0 - l1.squaredNorm();
      const double u0 = (l0 * r[s] - l1.dot(r.segment(s + 1, d - 1))) / det;
      u[s] = u0;
      u.segment(s + 1, d - 1) = (r.segment(s + 1, d - 1) - u0 * l1) / l0;
    }
    return u;
  }

  // Largest alpha in [0, cap] keeping u + alpha du in the cone.
  double MaxStep(const VectorXd& u, const VectorXd& du, double cap) const {
    double alpha = cap;
    for (int i = 0; i < l_; ++i) {
      if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
    }
    for (size_t k = 0; k < q_.size(); ++k) {
      alpha = std::min(alpha, SocStep(u.segment(q_start_[k], q_[k]),
                                      du.segment(q_start_[k], q_[k]), cap));
    }
    return std::max(alpha, 0.0);
  }

  struct Scaling {
    VectorXd d;                 // orthant: W = diag(d)
    std::vector<double> beta;   // per SOC
    std::vector<VectorXd> w;    // per SOC reflector v
    VectorXd lambda;            // W z = W^{-1} s
  };

  bool ComputeScaling(const VectorXd& s, const VectorXd& z, Scaling* sc) const {
    sc->d.resize(l_);
    for (int i = 0; i < l_; ++i) {
      if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
      sc->d[i] = std::sqrt(s[i] / z[i]);
    }
    sc->beta.assign(q_.size(), 0.0);
    sc->w.assign(q_.size(), VectorXd());
    for (size_t k = 0; k < q_.size(); ++k) {
      const int st = q_start_[k];
      const int d = q_[k];
      const VectorXd sk = s.segment(st, d);
      const VectorXd zk = z.segment(st, d);
      const double sj = JNorm2(sk);
      const double zj = JNorm2(zk);
      if (!(sj > 0.0) || !(zj > 0.0) || sk[0] <= 0.0 || zk[0] <= 0.0) return false;
      const VectorXd sb = sk / std::sqrt(sj);
      const VectorXd zb = zk / std::sqrt(zj);
      const double gamma = std::sqrt(std::max((1.0 + sb.dot(zb)) / 2.0, 0.0));
      if (!(gamma > 0.0)) return false;
      VectorXd wk(d);
      wk[0] = sb[0] + zb[0];
      wk.tail(d - 1) = sb.tail(d - 1) - zb.tail(d - 1);
      wk /= 2.0 * gamma;
      // W = beta (2 v v' - J) with v the hyperbolic reflector of wk.
      wk[0] += 1.0;
      wk /= std::sqrt(2.0 * wk[0]);
      sc->w[k] = wk;
      sc->beta[k] = std::pow(sj / zj, 0.25);
    }
    sc->lambda = Apply(*sc, z);
    return true;
  }

  // W u.
  VectorXd Apply(const Scaling& sc, const VectorXd& u) const {
    VectorXd out(m_);
    out.head(l_) = sc.d.cwiseProduct(u.head(l_));
    for (size_t k = 0; k < q_.size(); ++k) {
      const int st = q_start_[k];
      const int d = q_[k];
      const VectorXd& w = sc.w[k];
      const auto uk = u.segment(st, d);
      VectorXd r = 2.0 * w.dot(uk) * w;
      r[0] -= uk[0];
      r.tail(d - 1) += uk.tail(d - 1);
      out.segment(st, d) = sc.beta[k] * r;
    }
    return out;
  }

  // W^{-1} u.
  VectorXd ApplyInverse(const Scaling& sc, const VectorXd& u) const {
    VectorXd out(m_);
    out.head(l_) = u.head(l_).cwiseQuotient(sc.d);
    for (size_t k = 0; k < q_.size(); ++k) {
      const int st = q_start_[k];
      const int d = q_[k];
      VectorXd jw = sc.w[k];
      jw.tail(d - 1) *= -1.0;
      const auto uk = u.segment(st, d);
      VectorXd r = 2.0 * jw.dot(uk) * jw;
      r[0] -= uk[0];
      r.tail(d - 1) += uk.tail(d - 1);
      out.segment(st, d) = r / sc.beta[k];
    }
    return out;
  }

  // Dense W^2 block for cone k.
  Eigen::MatrixXd SocW2(const Scaling& sc, size_t k) const {
    const int d = q_[k];
    const VectorXd& w = sc.w[k];
    Eigen::MatrixXd W = 2.0 * w * w.transpose();
    W(0, 0) -= 1.0;
    for (int i = 1; i < d; ++i) W(i, i) += 1.0;
    W *= sc.beta[k];
    return W * W;
  }

  int l() const { return l_; }
  const std::vector<int>& q() const { return q_; }
  const std::vector<int>& q_start() const { return q_start_; }

 private:
  static double JNorm2(const VectorXd& u) {
    return u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
  }

  static double SocStep(const VectorXd& u, const VectorXd& du, double cap) {
    // (u0 + a du0)^2 - ||u1 + a du1||^2 >= 0 with u0 + a du0 >= 0.
    const auto u1 = u.tail(u.size() - 1);
    const auto d1 = du.tail(du.size() - 1);
    const double qa = du[0] * du[0] - d1.squaredNorm();
    const double qb = 2.0 * (u[0] * du[0] - u1.dot(d1));
    const double qc = u[0] * u[0] - u1.squaredNorm();
    double alpha = cap;
    if (du[0] < 0.0) alpha = std::min(alpha, -u[0] / du[0]);
    if (qc <= 0.0) return 0.0;
    // Smallest positive root of qa a^2 + qb a + qc.
    const double scale = std::max({std::abs(qa), std::abs(qb), qc});
    if (std::abs(qa) <= 1e-14 * scale) {
      if (qb < 0.0) alpha = std::min(alpha, -qc / qb);
      return alpha;
    }
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return alpha;  // qa > 0 here: never crosses
    const double sq = std::sqrt(disc);
    const double t = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
    double r1 = t / qa;
    double r2 = qc / t;
    for (double r : {r1, r2}) {
      if (r > 0.0 && std::isfinite(r)) alpha = std::min(alpha, r);
    }
    return alpha;
  }

  int l_;
  std::vector<int> q_;
  std::vector<int> q_start_;
  int m_;
};

class KktSolver {
 public:
  KktSolver(const StandardForm& sf, const Cones& cones) : sf_(sf), cones_(cones) {
    n_ = sf.n;
    p_ = static_cast<int>(sf.A.rows());
    m_ = static_cast<int>(sf.G.rows());
    dim_ = n_ + p_ + m_;
    std::vector<int> rows, cols, signs(dim_, -1);
    for (int i = 0; i < n_; ++i) {
      rows.push_back(i);
      cols.push_back(i);
      signs[i] = 1;
    }
    for (int k = 0; k < sf_.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(sf_.A, k); it; ++it) {
        rows.push_back(n_ + static_cast<int>(it.row()));
        cols.push_back(static_cast<int>(it.col()));
      }
    }
    for (int i = 0; i < p_; ++i) {
      rows.push_back(n_ + i);
      cols.push_back(n_ + i);
    }
    for (int k = 0; k < sf_.G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(sf_.G, k); it; ++it) {
        rows.push_back(n_ + p_ + static_cast<int>(it.row()));
        cols.push_back(static_cast<int>(it.col()));
      }
    }
    scaling_offset_ = static_cast<int>(rows.size());
    const int off = n_ + p_;
    for (int i = 0; i < cones_.l(); ++i) {
      rows.push_back(off + i);
      cols.push_back(off + i);
    }
    for (size_t k = 0; k < cones_.q().size(); ++k) {
      const int st = off + cones_.q_start()[k];
      const int d = cones_.q()[k];
      for (int j = 0; j < d; ++j) {
        for (int i = j; i < d; ++i) {
          rows.push_back(st + i);
          cols.push_back(st + j);
        }
      }
    }
    values_.assign(rows.size(), 0.0);
    // Constant part: A and G entries.
    int idx = n_;
    for (int k = 0; k < sf_.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(sf_.A, k); it; ++it) values_[idx++] = it.value();
    }
    idx += p_;
    for (int k = 0; k < sf_.G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(sf_.G, k); it; ++it) values_[idx++] = it.value();
    }
    ldl_ = std::make_unique<internal::QuasiDefiniteLdl>(dim_, rows, cols, std::move(signs));
  }

  bool Factor(const Cones::Scaling& sc) {
    int idx = scaling_offset_;
    for (int i = 0; i < cones_.l(); ++i) values_[idx++] = -sc.d[i] * sc.d[i];
    w2_.resize(cones_.q().size());
    for (size_t k = 0; k < cones_.q().size(); ++k) {
      const int d = cones_.q()[k];
      w2_[k] = cones_.SocW2(sc, k);
      for (int j = 0; j < d; ++j) {
        for (int i = j; i < d; ++i) values_[idx++] = -w2_[k](i, j);
      }
    }
    d_orth_ = sc.d;
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    static_reg_ = kStaticReg;
    ldl_->Factor(values_, static_reg_, kDynamicEps, kDynamicReg);
    return true;
  }

  // Solves [0 A' G'; A 0 0; G 0 -W^2] [x; y; z] = [bx; by; bz].
  // A solve whose refined residual stays large refactors with a heavier
  // static regularization and retries.
  void Solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd* x,
             VectorXd* y, VectorXd* z) {
    VectorXd rhs(dim_);
    rhs << bx, by, bz;
    const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
    VectorXd sol;
    while (true) {
      const double rn = Refine(rhs, &sol);
      if ((std::isfinite(rn) && rn <= kAcceptResidual * (1.0 + rhs_norm)) ||
          static_reg_ >= kMaxStaticReg) {
        break;
      }
      static_reg_ *= 100.0;
      ldl_->Factor(values_, static_reg_, kDynamicEps, kDynamicReg);
    }
    *x = sol.head(n_);
    *y = sol.segment(n_, p_);
    *z = sol.tail(m_);
  }

 private:
  double Refine(const VectorXd& rhs, VectorXd* sol) const {
    *sol = rhs;
    ldl_->Solve(*sol);
    const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kRefineSteps; ++it) {
      VectorXd res = rhs - Multiply(*sol);
      const double rn = res.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(rn)) return rn;
      if (rn <= 1e-14 * (1.0 + rhs_norm) || rn >= prev) return std::min(rn, prev);
      prev = rn;
      ldl_->Solve(res);
      *sol += res;
    }
    return (rhs - Multiply(*sol)).lpNorm<Eigen::Infinity>();
  }

  VectorXd Multiply(const VectorXd& u) const {
    const auto ux = u.head(n_);
    const auto uy = u.segment(n_, p_);
    const auto uz = u.tail(m_);
    VectorXd out(dim_);
    out.head(n_) = sf_.A.transpose() * uy + sf_.G.transpose() * uz;
    out.segment(n_, p_) = sf_.A * ux;
    VectorXd w2z(m_);
    w2z.head(cones_.l()) = d_orth_.cwiseProduct(d_orth_).cwiseProduct(uz.head(cones_.l()));
    for (size_t k = 0; k < cones_.q().size(); ++k) {
      const int st = cones_.q_start()[k];
      const int d = cones_.q()[k];
      w2z.segment(st, d) = w2_[k] * uz.segment(st, d);
    }
    out.tail(m_) = sf_.G * ux - w2z;
    return out;
  }

  static constexpr double kStaticReg = 1e-8;
  static constexpr double kDynamicEps = 1e-13;
  static constexpr double kDynamicReg = 1e-7;
  static constexpr double kMaxStaticReg = 1e-4;
  static constexpr double kAcceptResidual = 1e-7;
  static constexpr int kRefineSteps = 10;

  const StandardForm& sf_;
  const Cones& cones_;
  int n_, p_, m_, dim_;
  int scaling_offset_{0};
  double static_reg_{kStaticReg};
  std::vector<double> values_;
  std::unique_ptr<internal::QuasiDefiniteLdl> ldl_;
  std::vector<Eigen::MatrixXd> w2_;
  VectorXd d_orth_;
};

struct Iterate {
  VectorXd x, y, z, s;
  double tau{1.0};
  double kappa{1.0};
};

}  // namespace

ConicSolution Solve(const ConicProgram& program, const ToleranceConfig& tol) {
  const auto t_start = std::chrono::steady_clock::now();
  ConicSolution out;
  const StandardForm sf = ToStandardForm(program);
  const Cones cones(sf.l, sf.q, sf.q_start);
  const int n = sf.n;
  const int p = static_cast<int>(sf.A.rows());
  const int m = cones.size();

  auto finish = [&](SolveStatus status, const Iterate* it) {
    out.status = status;
    out.primal = VectorXd::Zero(n);
    out.duals.clear();
    VectorXd y = VectorXd::Zero(p), z = VectorXd::Zero(m);
    if (it != nullptr) {
      const double scale = status == SolveStatus::kOptimal ? 1.0 / it->tau : 1.0;
      out.primal = it->x * scale;
      y = it->y * scale;
      z = it->z * scale;
    }
    const auto& cons = program.constraints();
    out.duals.resize(cons.size());
    for (size_t k = 0; k < cons.size(); ++k) {
      const auto& w = sf.where[k];
      if (w.equality) {
        out.duals[k] = -y.segment(w.offset, w.size);
      } else if (!w.rotated) {
        out.duals[k] = z.segment(w.offset, w.size);
      } else {
        const auto zk = z.segment(w.offset, w.size);
        VectorXd lam(w.size);
        lam[0] = zk[0] + zk[1];
        lam[1] = zk[0] - zk[1];
        lam.tail(w.size - 2) = 2.0 * zk.tail(w.size - 2);
        out.duals[k] = lam;
      }
    }
    out.objective = sf.c.dot(out.primal) + sf.c0;
    out.dual_objective = -sf.b.dot(y) - sf.h.dot(z) + sf.c0;
    out.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
  };

  KktSolver kkt(sf, cones);
  const VectorXd e = cones.Identity();

  // Starting point from two least-squares solves with W = I.
  Iterate it;
  {
    Cones::Scaling unit;
    unit.d = VectorXd::Ones(cones.l());
    for (size_t k = 0; k < cones.q().size(); ++k) {
      VectorXd w = VectorXd::Zero(cones.q()[k]);
      w[0] = 1.0;
      unit.w.push_back(w);
      unit.beta.push_back(1.0);
    }
    if (!kkt.Factor(unit)) return finish(SolveStatus::kNumericalFailure, nullptr);
    VectorXd x, y, z;
    kkt.Solve(VectorXd::Zero(n), sf.b, sf.h, &x, &y, &z);
    it.x = x;
    it.s = -z;
    kkt.Solve(-sf.c, VectorXd::Zero(p), VectorXd::Zero(m), &x, &y, &z);
    it.y = y;
    it.z = z;
    if (m > 0) {
      const double ts = -cones.MinEig(it.s);
      if (ts >= -1e-8 * std::max(it.s.norm(), 1.0)) it.s += (1.0 + ts) * e;
      const double tz = -cones.MinEig(it.z);
      if (tz >= -1e-8 * std::max(it.z.norm(), 1.0)) it.z += (1.0 + tz) * e;
    }
  }

  const double resx0 = std::max(1.0, sf.c.norm());
  const double resy0 = std::max(1.0, sf.b.norm());
  const double resz0 = std::max(1.0, sf.h.norm());
  const int degree = cones.degree();

  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();
  std::array<double, 3> best_stats{};
  int stalls = 0;
  int since_progress = 0;
  double progress_merit = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter <= tol.max_iters; ++iter) {
    out.iterations = iter;
    // Residuals of the embedding.
    const VectorXd hrx = sf.A.transpose() * it.y + sf.G.transpose() * it.z;
    const VectorXd rx = hrx + sf.c * it.tau;
    const VectorXd hry = sf.A * it.x;
    const VectorXd ry = sf.b * it.tau - hry;
    const VectorXd hrz = it.s + sf.G * it.x;
    const VectorXd rz = hrz - sf.h * it.tau;
    const double cx = sf.c.dot(it.x);
    const double by = sf.b.dot(it.y);
    const double hz = sf.h.dot(it.z);
    const double rt = it.kappa + cx + by + hz;
    const double gap = it.s.dot(it.z);
    const double mu = (gap + it.kappa * it.tau) / (degree + 1);

    const double pcost = cx / it.tau;
    const double dcost = -(by + hz) / it.tau;
    const double pres = std::max(ry.norm() / it.tau / resy0, rz.norm() / it.tau / resz0);
    const double dres = rx.norm() / it.tau / resx0;
    const double ngap = gap / (it.tau * it.tau);
    const double scale_obj = std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

    out.primal_residual = pres;
    out.dual_residual = dres;
    out.gap = ngap;

    if (pres <= tol.feas_tol && dres <= tol.feas_tol &&
        ngap <= tol.gap_tol * scale_obj && std::abs(pcost - dcost) <= tol.gap_tol * scale_obj * 10.0) {
      return finish(SolveStatus::kOptimal, &it);
    }
    // Infeasibility certificates.
    if (hz + by < 0.0) {
      const double pinf = hrx.norm() / resx0 / (-(hz + by));
      if (pinf <= tol.feas_tol) return finish(SolveStatus::kInfeasible, &it);
    }
    if (cx < 0.0) {
      const double dinf = std::max(hry.norm() / resy0, hrz.norm() / resz0) / (-cx);
      if (dinf <= tol.feas_tol) return finish(SolveStatus::kUnbounded, &it);
    }
    const double merit = std::max({pres / tol.feas_tol, dres / tol.feas_tol,
                                   ngap / scale_obj / tol.gap_tol,
                                   std::abs(pcost - dcost) / scale_obj / (10.0 * tol.gap_tol)});
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
      best_stats = {pres, dres, ngap};
    }
    if (best_merit < 0.5 * progress_merit) {
      progress_merit = best_merit;
      since_progress = 0;
    } else if (++since_progress >= kStallWindow && best_merit <= kInaccurateFactor) {
      break;
    }
    if (iter == tol.max_iters) break;

    Cones::Scaling sc;
    if (m > 0) {
      if (!cones.ComputeScaling(it.s, it.z, &sc)) break;
    } else {
      sc.lambda = VectorXd();
    }
    if (!kkt.Factor(sc)) break;

    // Direction for the tau column.
    VectorXd x1, y1, z1;
    kkt.Solve(-sf.c, sf.b, sf.h, &x1, &y1, &z1);
    const double denom = sf.c.dot(x1) + sf.b.dot(y1) + sf.h.dot(z1) - it.kappa / it.tau;

    auto solve_newton = [&](double eta, const VectorXd& r5, double r6, VectorXd* dx,
                            VectorXd* dy, VectorXd* dz, VectorXd* ds, double* dtau,
                            double* dkappa) {
      const VectorXd r1 = -eta * rx;
      const VectorXd r2 = -eta * ry;
      const VectorXd r3 = -eta * rz;
      const double r4 = -eta * rt;
      VectorXd lr5 = m > 0 ? cones.Divide(sc.lambda, r5) : VectorXd();
      VectorXd wl = m > 0 ? cones.Apply(sc, lr5) : VectorXd();
      VectorXd x2, y2, z2;
      kkt.Solve(r1, -r2, m > 0 ? VectorXd(r3 - wl) : VectorXd(), &x2, &y2, &z2);
      const double num = r4 - r6 / it.tau - sf.c.dot(x2) - sf.b.dot(y2) - sf.h.dot(z2);
      *dtau = num / denom;
      *dx = x2 + *dtau * x1;
      *dy = y2 + *dtau * y1;
      *dz = z2 + *dtau * z1;
      if (m > 0) {
        *ds = cones.Apply(sc, VectorXd(lr5 - cones.Apply(sc, *dz)));
      } else {
        *ds = VectorXd();
      }
      *dkappa = (r6 - it.kappa * *dtau) / it.tau;
    };

    auto step_length = [&](const VectorXd& ds, const VectorXd& dz, double dtau,
                           double dkappa) {
      double a = 1.0;
      if (m > 0) {
        a = std::min(a, cones.MaxStep(it.s, ds, 1.0));
        a = std::min(a, cones.MaxStep(it.z, dz, 1.0));
      }
      if (dtau < 0.0) a = std::min(a, -it.tau / dtau);
      if (dkappa < 0.0) a = std::min(a, -it.kappa / dkappa);
      return a;
    };

    // Predictor.
    VectorXd dx, dy, dz, ds;
    double dtau, dkappa;
    const VectorXd lam2 = m > 0 ? cones.Product(sc.lambda, sc.lambda) : VectorXd();
    solve_newton(1.0, m > 0 ? VectorXd(-lam2) : VectorXd(), -it.kappa * it.tau, &dx, &dy,
                 &dz, &ds, &dtau, &dkappa);
    const double alpha_aff = step_length(ds, dz, dtau, dkappa);
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // Corrector.
    VectorXd r5;
    if (m > 0) {
      const VectorXd wids = cones.ApplyInverse(sc, ds);
      const VectorXd wdz = cones.Apply(sc, dz);
      r5 = -lam2 + sigma * mu * e - cones.Product(wids, wdz);
    }
    const double r6 = -it.kappa * it.tau + sigma * mu - dtau * dkappa;
    solve_newton(1.0 - sigma, r5, r6, &dx, &dy, &dz, &ds, &dtau, &dkappa);
    double alpha = step_length(ds, dz, dtau, dkappa);
    alpha = std::min(1.0, 0.99 * alpha);
    if (!dx.allFinite() || !dy.allFinite() || !dz.allFinite() || !ds.allFinite() ||
        !std::isfinite(dtau) || !std::isfinite(dkappa)) {
      break;
    }
    if (!(alpha > 1e-12)) {
      if (++stalls > 3) break;
      continue;
    }

    it.x += alpha * dx;
    it.y += alpha * dy;
    it.z += alpha * dz;
    it.s += alpha * ds;
    it.tau += alpha * dtau;
    it.kappa += alpha * dkappa;
    if (!(it.tau > 0.0) || !(it.kappa > 0.0)) break;
  }

  // Out of iterations or stuck: the best iterate still counts as optimal
  // when it is within kInaccurateFactor of every tolerance.
  ConicSolution last = finish(SolveStatus::kOptimal, &best);
  last.primal_residual = best_stats[0];
  last.dual_residual = best_stats[1];
  last.gap = best_stats[2];
  if (!(best_merit <= kInaccurateFactor)) last.status = SolveStatus::kNumericalFailure;
  return last;
}

}  // namespace gcs
