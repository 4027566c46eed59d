// End-to-end checks; prints one PASS/FAIL line per check and exits
// nonzero when any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gcs/bnb.hpp"
#include "gcs/control.hpp"
#include "gcs/duals.hpp"
#include "gcs/formulation.hpp"
#include "gcs/instances.hpp"
#include "gcs/oracle.hpp"

namespace {

using namespace gcs;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

constexpr TighteningOptions kPlain{false, false};

double Rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Outcome {
  bool pass{true};
  std::string detail;
  void Require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

// Instances whose relaxations feed the certificate check.
std::vector<std::pair<std::string, Gcs>> g_certificate_pool;

void Pool(const std::string& name, const Gcs& g) { g_certificate_pool.emplace_back(name, g); }

Gcs OracleInstance(int k) {
  const int n = 2 + k % 2;
  const int nV = 6 + k % 4;
  const int nE = std::min(16, nV + 4 + k % 5);
  const LengthKind len = (k / 2) % 2 ? LengthKind::kSquaredEuclidean : LengthKind::kEuclidean;
  return RandomInstance(1000 + k, n, nV, nE, 0.05, len);
}

Outcome OracleEquivalence() {
  Outcome out;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Gcs g = OracleInstance(k);
    Pool(fmt::format("random#{}", k), g);
    const BnbReport r = SolveMicp(g);
    const CertifyResult c = Certify(g, 1000000);
    if (c.status == CertifyStatus::kInfeasible) {
      out.Require(r.status == BnbStatus::kInfeasible, fmt::format("instance {}: oracle infeasible", k));
      continue;
    }
    out.Require(c.status == CertifyStatus::kOptimal, fmt::format("instance {}: oracle failed", k));
    out.Require(r.status == BnbStatus::kOptimal, fmt::format("instance {}: {}", k, ToString(r.status)));
    if (r.status != BnbStatus::kOptimal || c.status != CertifyStatus::kOptimal) continue;
    worst = std::max(worst, Rel(r.cost, c.cost));
    out.Require(Rel(r.cost, c.cost) <= 1e-5, fmt::format("instance {}: {} vs {}", k, r.cost, c.cost));
  }
  if (out.pass) out.detail = fmt::format("50 instances, max relative difference {:.2e}", worst);
  return out;
}

Outcome HppChains() {
  Outcome out;
  double worst = 0.0;
  for (int m = 0; m <= 6; ++m) {
    const Gcs g = HppChain(m);
    Pool(fmt::format("hpp:{}", m), g);
    const BnbReport r = SolveMicp(g);
    out.Require(r.status == BnbStatus::kOptimal && r.path.has_value(),
                fmt::format("m={}: {}", m, ToString(r.status)));
    if (!r.path) continue;
    worst = std::max(worst, std::abs(r.cost - 1.0 / (m + 1)));
    out.Require(std::abs(r.cost - 1.0 / (m + 1)) <= 1e-6, fmt::format("m={}: cost {}", m, r.cost));
    const std::set<int> seen(r.path->path.begin(), r.path->path.end());
    out.Require(r.path->path.size() == static_cast<size_t>(m + 2) && seen.size() == r.path->path.size(),
                fmt::format("m={}: path is not Hamiltonian", m));
  }
  if (out.pass) out.detail = fmt::format("m = 0..6, max error {:.2e}, all paths Hamiltonian", worst);
  return out;
}

Gcs Singletons(std::uint64_t seed) {
  const Gcs g = RandomInstance(seed, 2 + seed % 2, 10, 20, 0.01);
  std::vector<VertexSpec> vs;
  for (const auto& v : g.vertices()) vs.push_back({v.id, ConvexSet::MakeSingleton(v.set.ChebyshevCenter())});
  return Gcs::Build(vs, g.edge_specs(), "s", "t");
}

Outcome SingletonExactness() {
  Outcome out;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Gcs g = Singletons(seed);
    Pool(fmt::format("singleton#{}", seed), g);
    std::vector<double> lengths;
    for (const Edge& e : g.edges()) {
      lengths.push_back(e.length.Evaluate(g.vertex(e.u).set.ChebyshevCenter(), g.vertex(e.v).set.ChebyshevCenter()));
    }
    const ConicSolution lp = Solve(BuildFlowLp(g, lengths));
    const ConicSolution relax = Solve(BuildRelaxation(g).program);
    const BnbReport r = SolveMicp(g);
    const bool ok = lp.status == SolveStatus::kOptimal && relax.status == SolveStatus::kOptimal &&
                    r.status == BnbStatus::kOptimal;
    out.Require(ok, fmt::format("seed {}: a solve failed", seed));
    if (!ok) continue;
    const double err = std::max(std::abs(relax.objective - lp.objective), std::abs(r.cost - lp.objective));
    worst = std::max(worst, err);
    out.Require(err <= 1e-6, fmt::format("seed {}: relax {} lp {} micp {}", seed, relax.objective, lp.objective, r.cost));
  }
  if (out.pass) out.detail = fmt::format("20 instances, max difference {:.2e}", worst);
  return out;
}

int LongestPathEdges(const Gcs& g) {
  int best = -1;
  std::vector<bool> used(g.num_vertices(), false);
  std::function<void(int, int)> walk = [&](int v, int depth) {
    if (v == g.target()) {
      best = std::max(best, depth);
      return;
    }
    used[v] = true;
    for (int e : g.out_edges(v)) {
      if (!used[g.edge(e).v]) walk(g.edge(e).v, depth + 1);
    }
    used[v] = false;
  };
  walk(g.source(), 0);
  return best;
}

Outcome LargeSetFormulas() {
  Outcome out;
  const Gcs g = TwoDimExample(1e3);
  Pool("2d:1000", g);
  const VectorXd ds = g.vertex(g.source()).set.ChebyshevCenter();
  const VectorXd dt = g.vertex(g.target()).set.ChebyshevCenter();
  const double dist2 = (dt - ds).squaredNorm();
  const int K = LongestPathEdges(g);
  const double micp_formula = dist2 / K;
  const double relax_formula = dist2 / (g.num_vertices() - 1);
  const BnbReport r = SolveMicp(g);
  const FlowSolution relax = Reconstruct(BuildRelaxation(g), Solve(BuildRelaxation(g).program));
  out.Require(r.status == BnbStatus::kOptimal, fmt::format("micp {}", ToString(r.status)));
  out.Require(relax.status == SolveStatus::kOptimal, "relaxation failed");
  if (!out.pass) return out;
  const double em = std::abs(r.cost - micp_formula) / micp_formula;
  const double er = std::abs(relax.cost - relax_formula) / relax_formula;
  out.Require(em <= 0.01, fmt::format("micp {} vs {}", r.cost, micp_formula));
  out.Require(er <= 0.01, fmt::format("relaxation {} vs {}", relax.cost, relax_formula));
  out.detail = fmt::format("K={}: micp {:.5g} vs {:.5g} ({:.3f}%), relaxation {:.5g} vs {:.5g} ({:.3f}%)", K,
                           r.cost, micp_formula, 100 * em, relax.cost, relax_formula, 100 * er);
  return out;
}

Outcome EuclideanGap() {
  Outcome out;
  std::vector<double> gaps;
  double slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Gcs g = RandomInstance(seed, 4, 20, 40, 0.01);
    Pool(fmt::format("gap#{}", seed), g);
    const auto start = std::chrono::steady_clock::now();
    const ConicSolution relax = Solve(BuildRelaxation(g).program);
    BnbConfig cfg;
    cfg.time_limit = 30.0;
    const BnbReport r = SolveMicp(g, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    slowest = std::max(slowest, secs);
    out.Require(secs < 30.0, fmt::format("seed {}: {:.1f} s", seed, secs));
    out.Require(r.status == BnbStatus::kOptimal && relax.status == SolveStatus::kOptimal,
                fmt::format("seed {}: {}", seed, ToString(r.status)));
    if (r.status == BnbStatus::kOptimal && relax.status == SolveStatus::kOptimal) {
      gaps.push_back((r.cost - relax.objective) / r.cost);
    }
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = gaps.empty() ? NAN : 0.5 * (gaps[(gaps.size() - 1) / 2] + gaps[gaps.size() / 2]);
  out.Require(median <= 0.01, fmt::format("median gap {:.3f}%", 100 * median));
  if (out.pass) {
    out.detail = fmt::format("median gap {:.4f}%, max {:.4f}%, slowest {:.2f} s", 100 * median,
                             100 * gaps.back(), slowest);
  }
  return out;
}

Outcome SymmetryGap() {
  Outcome out;
  const Gcs g = SymmetryInstance();
  Pool("symmetry", g);
  const RelaxationProgram prog = BuildRelaxation(g);
  const FlowSolution relax = Reconstruct(prog, Solve(prog.program));
  const BnbReport r = SolveMicp(g);
  const CertifyResult c = Certify(g, 1000);
  out.Require(relax.status == SolveStatus::kOptimal && r.status == BnbStatus::kOptimal &&
                  c.status == CertifyStatus::kOptimal,
              "a solve failed");
  if (!out.pass) return out;
  const double y13 = relax.y[g.FindEdge(g.FindVertex("1"), g.FindVertex("3"))];
  const double y23 = relax.y[g.FindEdge(g.FindVertex("2"), g.FindVertex("3"))];
  const double gap = (r.cost - relax.cost) / r.cost;
  out.Require(gap >= 0.005, fmt::format("gap {:.3f}%", 100 * gap));
  out.Require(std::abs(y13 - 0.5) <= 1e-3 && std::abs(y23 - 0.5) <= 1e-3, fmt::format("flows {} {}", y13, y23));
  out.Require(std::abs(r.cost - c.cost) <= 1e-6, fmt::format("micp {} oracle {}", r.cost, c.cost));
  out.detail = fmt::format("relaxation {:.6f} < micp {:.6f} (gap {:.2f}%), y = ({:.5f}, {:.5f})", relax.cost,
                           r.cost, 100 * gap, y13, y23);
  return out;
}

Halfspace Hs(VectorXd c, double d) { return {std::move(c), d}; }

std::vector<Halfspace> Simplex(int m) {
  std::vector<Halfspace> out;
  for (int i = 0; i < m; ++i) out.push_back(Hs(VectorXd::Unit(m, i), 0.0));
  out.push_back(Hs(-VectorXd::Ones(m), 1.0));
  out.push_back(Hs(VectorXd::Ones(m), -1.0));
  out.push_back(Hs(VectorXd::Zero(m), 1.0));
  return out;
}

// Unit s-t flows on s->a, s->b, a->b, a->t, b->t with 0 <= y <= 1.
std::vector<Halfspace> FlowPolytope() {
  const int m = 5;
  std::vector<Halfspace> out;
  auto eq = [&](VectorXd c, double d) {
    out.push_back(Hs(c, d));
    out.push_back(Hs(-c, -d));
  };
  VectorXd src(m), a(m), b(m);
  src << 1, 1, 0, 0, 0;
  a << 1, 0, -1, -1, 0;
  b << 0, 1, 1, 0, -1;
  eq(src, -1.0);
  eq(a, 0.0);
  eq(b, 0.0);
  for (int i = 0; i < m; ++i) {
    out.push_back(Hs(VectorXd::Unit(m, i), 0.0));
    out.push_back(Hs(-VectorXd::Unit(m, i), 1.0));
  }
  out.push_back(Hs(VectorXd::Zero(m), 1.0));
  return out;
}

// Rows of a one-dimensional block as (x, y, Z, constant), scaled by the
// largest coefficient.
std::set<std::array<double, 4>> Rows(const ConstraintBlock& block) {
  std::set<std::array<double, 4>> out;
  for (const auto& c : block.constraints) {
    for (const auto& row : c.rows) {
      std::array<double, 4> r{0, 0, 0, row.constant()};
      const LinExpr simple = row.Simplified();
      for (const auto& [i, a] : simple.terms()) r[i] += a;
      double scale = 0.0;
      for (double a : r) scale = std::max(scale, std::abs(a));
      if (scale == 0.0) continue;
      for (double& a : r) a /= scale;
      out.insert(r);
    }
  }
  return out;
}

Outcome ExtremeExactness() {
  Outcome out;
  MatrixXd A(4, 2);
  A << -1, 0, 0, -1, 1, 1, 1, -2;
  const std::vector<ConvexSet> sets{
      ConvexSet::MakeBox(Vector2d(-1, 0.5), Vector2d(2, 3)),
      ConvexSet::MakeEllipsoid(Eigen::Matrix2d{{2.0, 0.5}, {0.0, 1.0}}, Vector2d(-1, 0.3)),
      ConvexSet::MakePolyhedron(A, Eigen::Vector4d(0, 0, 3, 1))};
  VectorXd path(5), direct(5);
  path << 1, 0, 1, 0, 1;
  direct << 0, 1, 0, 0, 1;
  const std::vector<std::pair<std::vector<Halfspace>, VectorXd>> points{
      {Simplex(3), VectorXd::Unit(3, 0)}, {Simplex(3), VectorXd::Unit(3, 2)},
      {FlowPolytope(), path},           {FlowPolytope(), direct}};
  double worst = 0.0;
  int runs = 0;
  for (const ConvexSet& X : sets) {
    for (const auto& [Y, y] : points) {
      const ExactnessReport r = CheckExtremeExactness(X, Y, y, 100, 7 + runs);
      ++runs;
      worst = std::max({worst, r.max_product_error, r.max_membership_error});
      out.Require(r.pass && r.solved == 100, fmt::format("{}: product error {:.2e}", X.type_name(), r.max_product_error));
    }
  }
  const std::vector<Halfspace> unit{Hs(VectorXd::Ones(1), 0.0), Hs(-VectorXd::Ones(1), 1.0), Hs(VectorXd::Zero(1), 1.0)};
  const auto rows = Rows(RelaxBilinear(ConvexSet::MakeBox(VectorXd::Zero(1), VectorXd::Ones(1)), unit));
  const std::set<std::array<double, 4>> mccormick{{0, 0, 1, 0}, {0, 1, -1, 0}, {1, 0, -1, 0}, {-1, -1, 1, 1}};
  const std::set<std::array<double, 4>> bounds{{1, 0, 0, 0}, {-1, 0, 0, 1}, {0, 1, 0, 0}, {0, -1, 0, 1}, {0, 0, 0, 1}};
  bool identity = std::all_of(mccormick.begin(), mccormick.end(), [&](const auto& m) { return rows.count(m) > 0; });
  for (const auto& r : rows) identity = identity && (mccormick.count(r) || bounds.count(r));
  out.Require(identity, "unit-interval block differs from the McCormick envelope");
  if (out.pass) {
    out.detail = fmt::format("{} runs x 100 trials, max violation {:.2e}; McCormick rows identical", runs, worst);
  }
  return out;
}

Outcome Certificates() {
  Outcome out;
  int checked = 0, unattained = 0;
  double worst_potential = 0.0, worst_tight = 0.0;
  for (const auto& [name, g] : g_certificate_pool) {
    const RelaxationProgram prog = BuildRelaxation(g, kPlain);
    const ConicSolution raw = Solve(prog.program);
    if (raw.status != SolveStatus::kOptimal) {
      // Squared lengths on cyclic graphs: the untightened infimum is
      // approached by splitting flow over ever more cycles and not attained.
      const bool expected = !g.is_acyclic();
      out.Require(expected, fmt::format("{}: relaxation {}", name, ToString(raw.status)));
      ++unattained;
      continue;
    }
    const FlowSolution flow = Reconstruct(prog, raw);
    const PotentialCertificate cert = ExtractPotentials(prog, raw);
    const CertificateReport rep = CheckCertificate(cert, g, flow);
    ++checked;
    worst_potential = std::max(worst_potential, rep.max_potential_violation);
    worst_tight = std::max(worst_tight, rep.max_tightness_violation);
    out.Require(rep.pass && rep.weak_duality && rep.potentials_checked,
                fmt::format("{}: {}", name, rep.violations.empty() ? "failed" : rep.violations.front()));
  }
  if (out.pass) {
    out.detail = fmt::format("{} certified (potential {:.2e}, tightness {:.2e}); {} without attained infimum",
                             checked, worst_potential, worst_tight, unattained);
  }
  return out;
}

Outcome TighteningValidity() {
  Outcome out;
  int found = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; found < 10 && seed < 200; ++seed) {
    const Gcs g = RandomInstance(seed, 2, 8, 16, 0.05);
    if (g.is_acyclic()) continue;
    ++found;
    BnbConfig plain;
    plain.tightening = kPlain;
    const BnbReport with = SolveMicp(g);
    const BnbReport without = SolveMicp(g, plain);
    const ConicSolution rw = Solve(BuildRelaxation(g).program);
    const ConicSolution ro = Solve(BuildRelaxation(g, kPlain).program);
    out.Require(with.status == BnbStatus::kOptimal && without.status == BnbStatus::kOptimal &&
                    rw.status == SolveStatus::kOptimal && ro.status == SolveStatus::kOptimal,
                fmt::format("seed {}: a solve failed", seed));
    if (!out.pass) continue;
    worst = std::max(worst, std::abs(with.cost - without.cost));
    out.Require(std::abs(with.cost - without.cost) <= 1e-6,
                fmt::format("seed {}: {} vs {}", seed, with.cost, without.cost));
    out.Require(rw.objective >= ro.objective - 1e-7,
                fmt::format("seed {}: tightened relaxation {} < {}", seed, rw.objective, ro.objective));
  }
  out.Require(found == 10, "fewer than 10 cyclic instances");
  if (out.pass) out.detail = fmt::format("10 cyclic instances, max micp difference {:.2e}", worst);
  return out;
}

int ReachHorizon(double s0, double bound, int limit) {
  double lo = s0, hi = s0;
  for (int k = 1; k <= limit; ++k) {
    lo = std::max(lo - 1.0, -bound);
    hi = std::min(hi + 1.0, bound);
    if (lo <= 1e-12 && hi >= -1e-12) return k;
  }
  return -1;
}

Outcome ControlRoundTrips() {
  Outcome out;
  const LinearSystem sys{MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                         ConvexSet::MakeBox(VectorXd::Constant(1, -5), VectorXd::Constant(1, 5)),
                         ConvexSet::MakeBox(VectorXd::Constant(1, -1), VectorXd::Constant(1, 1)),
                         VectorXd::Constant(1, 3)};
  const Gcs mg = BuildMinTimeGcs(sys, 6);
  const BnbReport mr = SolveMicp(mg);
  out.Require(mr.status == BnbStatus::kOptimal && mr.path.has_value(), "min-time solve failed");
  if (!out.pass) return out;
  const Trajectory mt = ExtractMinTime(sys, mg, *mr.path);
  out.Require(mt.horizon() == 3 && ReachHorizon(3.0, 5.0, 6) == 3, fmt::format("horizon {}", mt.horizon()));
  double residual = DynamicsResidual(sys, mt);

  for (int T : {1, 2, 5, 30}) {
    const PwaSystem fs = T == 30 ? FootstepSystem(30) : SmallFootstepSystem(T);
    const Gcs g = BuildPwaGcs(fs);
    const long I = static_cast<long>(fs.modes.size());
    out.Require(g.num_vertices() == T * I + 2 && g.num_edges() == I + (T - 1) * I * I + I,
                fmt::format("T={}: {} vertices, {} edges", T, g.num_vertices(), g.num_edges()));
  }

  double worst_gap = 0.0;
  for (int T = 3; T <= 6; ++T) {
    const PwaSystem fs = SmallFootstepSystem(T);
    const Gcs g = BuildPwaGcs(fs);
    const BnbReport r = SolveMicp(g);
    const CertifyResult c = Certify(g, 1000000);
    const ConicSolution relax = Solve(BuildRelaxation(g).program);
    out.Require(r.status == BnbStatus::kOptimal && c.status == CertifyStatus::kOptimal &&
                    relax.status == SolveStatus::kOptimal,
                fmt::format("footstep T={}: a solve failed", T));
    if (!out.pass) return out;
    out.Require(Rel(r.cost, c.cost) <= 1e-5, fmt::format("T={}: micp {} oracle {}", T, r.cost, c.cost));
    const double gap = (r.cost - relax.objective) / r.cost;
    worst_gap = std::max(worst_gap, gap);
    out.Require(gap < 0.5, fmt::format("T={}: gap {:.1f}%", T, 100 * gap));
    residual = std::max(residual, DynamicsResidual(fs, ExtractPwa(fs, g, *r.path)));
  }
  out.Require(residual <= 1e-6, fmt::format("dynamics residual {:.2e}", residual));
  if (out.pass) {
    out.detail = fmt::format("horizon 3; counts exact; footstep T=3..6 matches enumeration, max gap {:.1f}%, residual {:.1e}",
                             100 * worst_gap, residual);
  }
  return out;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"oracle equivalence", OracleEquivalence},
      {"hamiltonian chain", HppChains},
      {"singleton exactness", SingletonExactness},
      {"large-set formulas", LargeSetFormulas},
      {"euclidean gap statistic", EuclideanGap},
      {"symmetry gap", SymmetryGap},
      {"extreme-point exactness", ExtremeExactness},
      {"dual certificates", Certificates},
      {"tightening validity", TighteningValidity},
      {"control round trips", ControlRoundTrips},
  };
  int failed = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%-4s %2zu %-24s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first,
                o.detail.c_str(), secs);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
