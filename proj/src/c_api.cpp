#include "gcs/gcs.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "gcs/bnb.hpp"
#include "gcs/control.hpp"
#include "gcs/duals.hpp"
#include "gcs/instances.hpp"
#include "gcs/io.hpp"

using Json = nlohmann::ordered_json;

struct gcs_graph {
  std::shared_ptr<const gcs::Gcs> graph;
  bool recreated{false};
};

struct gcs_control {
  gcs::ControlProblem problem;
};

struct gcs_result {
  std::shared_ptr<const gcs::Gcs> graph;
  gcs_mode mode{GCS_MODE_RELAX};
  gcs_status status{GCS_STATUS_NUMERICAL_FAILURE};
  double cost{std::numeric_limits<double>::quiet_NaN()};
  double bound{std::numeric_limits<double>::quiet_NaN()};
  double relaxation{std::numeric_limits<double>::quiet_NaN()};
  std::string relaxation_status;
  bool tightened{false};
  long nodes{0};
  double relax_seconds{0.0};
  double micp_seconds{0.0};
  double seconds{0.0};
  std::optional<gcs::PathResult> path;
  gcs::FlowSolution flows;
  std::optional<Json> certificate;
  std::optional<gcs::Trajectory> trajectory;
  std::optional<double> dynamics_residual;
  std::string error;
};

namespace {

using Clock = std::chrono::steady_clock;

thread_local std::string last_error;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

gcs_error Fail(gcs_error code, const std::string& message) {
  last_error = message;
  return code;
}

// Runs f, mapping exceptions onto error codes. `parse_code` is used for
// std::invalid_argument, which means a rejected model or spec.
template <class F>
gcs_error Guarded(gcs_error parse_code, F&& f) {
  try {
    f();
    last_error.clear();
    return GCS_OK;
  } catch (const gcs::IoError& e) {
    const std::string what = e.what();
    const bool io = what.find(": cannot open file") != std::string::npos ||
                    what.find(": cannot write file") != std::string::npos;
    return Fail(io ? GCS_E_IO : GCS_E_PARSE, what);
  } catch (const std::invalid_argument& e) {
    return Fail(parse_code, e.what());
  } catch (const std::exception& e) {
    return Fail(GCS_E_INTERNAL, e.what());
  } catch (...) {
    return Fail(GCS_E_INTERNAL, "unknown error");
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gcs_status FromBnb(gcs::BnbStatus s) {
  switch (s) {
    case gcs::BnbStatus::kOptimal: return GCS_STATUS_OPTIMAL;
    case gcs::BnbStatus::kInfeasible: return GCS_STATUS_INFEASIBLE;
    case gcs::BnbStatus::kNodeLimit: return GCS_STATUS_NODE_LIMIT;
    case gcs::BnbStatus::kTimeLimit: return GCS_STATUS_TIME_LIMIT;
    case gcs::BnbStatus::kNumericalFailure: return GCS_STATUS_NUMERICAL_FAILURE;
  }
  return GCS_STATUS_NUMERICAL_FAILURE;
}

gcs_status FromSolver(gcs::SolveStatus s) {
  switch (s) {
    case gcs::SolveStatus::kOptimal: return GCS_STATUS_OPTIMAL;
    case gcs::SolveStatus::kInfeasible: return GCS_STATUS_INFEASIBLE;
    default: return GCS_STATUS_NUMERICAL_FAILURE;
  }
}

const char* StatusName(gcs_status s) {
  switch (s) {
    case GCS_STATUS_OPTIMAL: return "optimal";
    case GCS_STATUS_INFEASIBLE: return "infeasible";
    case GCS_STATUS_NODE_LIMIT: return "node_limit";
    case GCS_STATUS_TIME_LIMIT: return "time_limit";
    case GCS_STATUS_NUMERICAL_FAILURE: return "numerical_failure";
  }
  return "unknown";
}

Json VecJson(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

void CheckOptions(const gcs_options& o) {
  if (o.mode != GCS_MODE_RELAX && o.mode != GCS_MODE_MICP) throw std::invalid_argument("unknown mode");
  if (!(o.tol_feas > 0.0) || !(o.tol_gap >= 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (o.node_limit < 1) throw std::invalid_argument("node limit must be at least 1");
  if (!(o.time_limit > 0.0)) throw std::invalid_argument("time limit must be positive");
  if (o.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

std::unique_ptr<gcs_result> SolveGraph(std::shared_ptr<const gcs::Gcs> g, const gcs_options& o,
                                       gcs_log_fn log, void* user) {
  CheckOptions(o);
  const auto start = Clock::now();
  auto r = std::make_unique<gcs_result>();
  r->graph = g;
  r->mode = o.mode;

  gcs::TighteningOptions tight;
  tight.degree = tight.two_cycle = o.tighten != 0;
  gcs::ToleranceConfig tol;
  tol.feas_tol = o.tol_feas;
  tol.gap_tol = std::min(o.tol_feas, 1e-8);

  const gcs::RelaxationProgram prog = gcs::BuildRelaxation(g, tight);
  r->tightened = prog.tightened;
  const gcs::ConicSolution raw = gcs::Solve(prog.program, tol);
  r->flows = gcs::Reconstruct(prog, raw);
  r->relaxation_status = gcs::ToString(raw.status);
  if (raw.status == gcs::SolveStatus::kOptimal) r->relaxation = raw.objective;
  r->relax_seconds = Seconds(start);

  if (o.certificate && raw.status == gcs::SolveStatus::kOptimal) {
    const gcs::PotentialCertificate cert = gcs::ExtractPotentials(prog, raw);
    const gcs::CertificateReport rep = gcs::CheckCertificate(cert, *g, r->flows);
    Json c = Json::parse(gcs::CertificateToJson(cert, *g));
    c["weak_duality"] = rep.weak_duality;
    c["max_potential_violation"] = rep.potentials_checked ? Json(rep.max_potential_violation) : Json();
    c["max_tightness_violation"] = rep.potentials_checked ? Json(rep.max_tightness_violation) : Json();
    c["pass"] = rep.pass;
    r->certificate = std::move(c);
  }

  if (o.mode == GCS_MODE_RELAX) {
    r->status = FromSolver(raw.status);
    if (r->status == GCS_STATUS_OPTIMAL) {
      r->cost = r->bound = raw.objective;
      if (!r->flows.path.empty()) r->path = gcs::ToPathResult(*g, r->flows);
    }
  } else {
    const auto micp_start = Clock::now();
    gcs::BnbConfig cfg;
    cfg.rel_gap_tol = o.tol_gap;
    cfg.node_limit = o.node_limit;
    cfg.time_limit = o.time_limit;
    cfg.jobs = o.jobs;
    cfg.tightening = tight;
    cfg.solver = tol;
    cfg.branching = o.pseudo_cost ? gcs::BranchingRule::kPseudoCost : gcs::BranchingRule::kMostFractional;
    if (log) cfg.on_log = [log, user](const std::string& line) { log(line.c_str(), user); };
    gcs::BnbReport rep = gcs::SolveMicp(g, cfg);
    r->status = FromBnb(rep.status);
    r->nodes = rep.nodes;
    r->error = rep.error;
    if (std::isfinite(rep.cost)) r->cost = rep.cost;
    if (std::isfinite(rep.lower_bound)) r->bound = rep.lower_bound;
    if (r->status == GCS_STATUS_INFEASIBLE) r->bound = std::numeric_limits<double>::infinity();
    r->path = std::move(rep.path);
    r->micp_seconds = Seconds(micp_start);
  }
  r->seconds = Seconds(start);
  return r;
}

double Gap(const gcs_result& r) {
  if (r.mode != GCS_MODE_MICP || r.status != GCS_STATUS_OPTIMAL) return std::nan("");
  if (!std::isfinite(r.cost) || !std::isfinite(r.relaxation) || r.cost == 0.0) return std::nan("");
  return (r.cost - r.relaxation) / r.cost;
}

Json Number(double v) { return std::isnan(v) ? Json() : Json(v); }

Json ResultJson(const gcs_result& r) {
  const gcs::Gcs& g = *r.graph;
  Json out;
  out["status"] = StatusName(r.status);
  out["mode"] = r.mode == GCS_MODE_MICP ? "micp" : "relax";
  out["cost"] = Number(r.cost);
  out["bound"] = std::isinf(r.bound) ? Json() : Number(r.bound);
  out["relaxation"] = Number(r.relaxation);
  out["relaxation_status"] = r.relaxation_status;
  out["gap"] = Number(Gap(r));
  out["tightened"] = r.tightened;
  out["nodes"] = r.nodes;
  Json path = Json(nullptr), positions = Json(nullptr);
  if (r.path) {
    path = Json::array();
    positions = Json::array();
    for (size_t k = 0; k < r.path->path.size(); ++k) {
      path.push_back(g.vertex(r.path->path[k]).id);
      positions.push_back(VecJson(r.path->positions[k]));
    }
  }
  out["path"] = std::move(path);
  out["positions"] = std::move(positions);
  if (r.mode == GCS_MODE_RELAX && r.status == GCS_STATUS_OPTIMAL) {
    Json flows = Json::array();
    for (int e = 0; e < g.num_edges(); ++e) {
      if (r.flows.y[e] <= 1e-6) continue;
      flows.push_back({{"u", g.vertex(g.edge(e).u).id}, {"v", g.vertex(g.edge(e).v).id},
                       {"y", r.flows.y[e]}});
    }
    out["flows"] = std::move(flows);
  }
  out["certificate"] = r.certificate ? *r.certificate : Json();
  if (r.trajectory) {
    const gcs::Trajectory& t = *r.trajectory;
    Json traj;
    traj["horizon"] = t.horizon();
    traj["cost"] = t.cost;
    traj["dynamics_residual"] = r.dynamics_residual ? Json(*r.dynamics_residual) : Json();
    traj["states"] = Json::array();
    for (const auto& s : t.states) traj["states"].push_back(VecJson(s));
    traj["controls"] = Json::array();
    for (const auto& a : t.controls) traj["controls"].push_back(VecJson(a));
    if (!t.modes.empty()) traj["modes"] = t.modes;
    out["trajectory"] = std::move(traj);
  }
  out["timings"] = {{"relaxation", r.relax_seconds}, {"micp", r.micp_seconds}, {"total", r.seconds}};
  if (!r.error.empty()) out["error"] = r.error;
  return out;
}

std::shared_ptr<const gcs::Gcs> ControlGraph(const gcs::ControlProblem& p) {
  return std::visit(
      [](const auto& v) -> std::shared_ptr<const gcs::Gcs> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, gcs::MinTimeProblem>) {
          return std::make_shared<const gcs::Gcs>(gcs::BuildMinTimeGcs(v.system, v.t_max));
        } else {
          return std::make_shared<const gcs::Gcs>(gcs::BuildPwaGcs(v));
        }
      },
      p);
}

int ParseHorizon(const std::string& text) {
  size_t used = 0;
  const int t = std::stoi(text, &used);
  if (used != text.size() || t < 1) throw std::invalid_argument("bad horizon");
  return t;
}

}  // namespace

extern "C" {

const char* gcs_last_error(void) { return last_error.c_str(); }

const char* gcs_version(void) { return "0.1.0"; }

void gcs_string_free(char* s) { std::free(s); }

void gcs_options_default(gcs_options* opts) {
  if (!opts) return;
  opts->mode = GCS_MODE_MICP;
  opts->tol_feas = 1e-8;
  opts->tol_gap = 1e-6;
  opts->node_limit = 100000;
  opts->time_limit = 3600.0;
  opts->jobs = 1;
  opts->tighten = 1;
  opts->pseudo_cost = 0;
  opts->certificate = 1;
}

gcs_error gcs_graph_load(const char* path, gcs_graph** out) {
  if (!path || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_PARSE, [&] {
    *out = new gcs_graph{std::make_shared<const gcs::Gcs>(gcs::LoadInstance(path)), false};
  });
}

gcs_error gcs_graph_from_json(const char* json, gcs_graph** out) {
  if (!json || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_PARSE, [&] {
    *out = new gcs_graph{std::make_shared<const gcs::Gcs>(gcs::InstanceFromJson(json)), false};
  });
}

gcs_error gcs_graph_generate(const char* spec, gcs_graph** out) {
  if (!spec || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_PARSE, [&] {
    gcs::GeneratedInstance inst = gcs::Generate(spec);
    *out = new gcs_graph{std::make_shared<const gcs::Gcs>(std::move(inst.graph)), inst.recreated};
  });
}

void gcs_graph_free(gcs_graph* g) { delete g; }

gcs_error gcs_graph_to_json(const gcs_graph* g, char** out) {
  if (!g || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_INTERNAL, [&] { *out = Dup(gcs::InstanceToJson(*g->graph)); });
}

int gcs_graph_num_vertices(const gcs_graph* g) { return g ? g->graph->num_vertices() : -1; }

int gcs_graph_num_edges(const gcs_graph* g) { return g ? g->graph->num_edges() : -1; }

int gcs_graph_dim(const gcs_graph* g) {
  if (!g) return -1;
  int n = 0;
  for (int v = 0; v < g->graph->num_vertices(); ++v) n = std::max(n, g->graph->dim(v));
  return n;
}

int gcs_graph_is_acyclic(const gcs_graph* g) { return g ? g->graph->is_acyclic() : -1; }

int gcs_graph_recreated(const gcs_graph* g) { return g ? g->recreated : -1; }

const char* gcs_graph_vertex_id(const gcs_graph* g, int v) {
  if (!g || v < 0 || v >= g->graph->num_vertices()) return nullptr;
  return g->graph->vertex(v).id.c_str();
}

gcs_error gcs_solve(const gcs_graph* g, const gcs_options* opts, gcs_log_fn log, void* user,
                    gcs_result** out) {
  if (!g || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  gcs_options o;
  gcs_options_default(&o);
  if (opts) o = *opts;
  return Guarded(GCS_E_INVALID_ARGUMENT, [&] { *out = SolveGraph(g->graph, o, log, user).release(); });
}

gcs_error gcs_control_load(const char* path, gcs_control** out) {
  if (!path || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_PARSE, [&] { *out = new gcs_control{gcs::ControlFromJson(gcs::ReadFile(path))}; });
}

gcs_error gcs_control_from_json(const char* json, gcs_control** out) {
  if (!json || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_PARSE, [&] { *out = new gcs_control{gcs::ControlFromJson(json)}; });
}

gcs_error gcs_control_builtin(const char* name, gcs_control** out) {
  if (!name || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_PARSE, [&] {
    const std::string spec = name;
    const size_t colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    try {
      if (kind == "footstep") {
        *out = new gcs_control{gcs::FootstepSystem(arg.empty() ? 30 : ParseHorizon(arg))};
        return;
      }
      if (kind == "footstep-small" && !arg.empty()) {
        *out = new gcs_control{gcs::SmallFootstepSystem(ParseHorizon(arg))};
        return;
      }
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument(fmt::format("unknown built-in system '{}'", spec));
  });
}

void gcs_control_free(gcs_control* c) { delete c; }

gcs_error gcs_control_to_json(const gcs_control* c, char** out) {
  if (!c || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_INTERNAL, [&] { *out = Dup(gcs::ControlToJson(c->problem)); });
}

gcs_error gcs_control_graph(const gcs_control* c, gcs_graph** out) {
  if (!c || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_INVALID_ARGUMENT, [&] { *out = new gcs_graph{ControlGraph(c->problem), false}; });
}

gcs_error gcs_control_solve(const gcs_control* c, const gcs_options* opts, gcs_log_fn log,
                            void* user, gcs_result** out) {
  if (!c || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  gcs_options o;
  gcs_options_default(&o);
  if (opts) o = *opts;
  return Guarded(GCS_E_INVALID_ARGUMENT, [&] {
    std::shared_ptr<const gcs::Gcs> g = ControlGraph(c->problem);
    std::unique_ptr<gcs_result> r = SolveGraph(g, o, log, user);
    if (r->path) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, gcs::MinTimeProblem>) {
              r->trajectory = gcs::ExtractMinTime(v.system, *g, *r->path);
              r->dynamics_residual = gcs::DynamicsResidual(v.system, *r->trajectory);
            } else {
              r->trajectory = gcs::ExtractPwa(v, *g, *r->path);
              r->dynamics_residual = gcs::DynamicsResidual(v, *r->trajectory);
            }
          },
          c->problem);
    }
    *out = r.release();
  });
}

void gcs_result_free(gcs_result* r) { delete r; }

gcs_status gcs_result_status(const gcs_result* r) {
  return r ? r->status : GCS_STATUS_NUMERICAL_FAILURE;
}

double gcs_result_cost(const gcs_result* r) { return r ? r->cost : std::nan(""); }

double gcs_result_bound(const gcs_result* r) { return r ? r->bound : std::nan(""); }

double gcs_result_relaxation(const gcs_result* r) { return r ? r->relaxation : std::nan(""); }

double gcs_result_gap(const gcs_result* r) { return r ? Gap(*r) : std::nan(""); }

long gcs_result_nodes(const gcs_result* r) { return r ? r->nodes : -1; }

double gcs_result_seconds(const gcs_result* r) { return r ? r->seconds : std::nan(""); }

int gcs_result_path_length(const gcs_result* r) {
  return r && r->path ? static_cast<int>(r->path->path.size()) : 0;
}

int gcs_result_path_vertex(const gcs_result* r, int k) {
  if (k < 0 || k >= gcs_result_path_length(r)) return -1;
  return r->path->path[k];
}

int gcs_result_position(const gcs_result* r, int k, double* out, int cap) {
  if (k < 0 || k >= gcs_result_path_length(r)) return -1;
  const Eigen::VectorXd& x = r->path->positions[k];
  for (int i = 0; i < std::min<int>(cap, x.size()); ++i) out[i] = x[i];
  return static_cast<int>(x.size());
}

int gcs_result_horizon(const gcs_result* r) {
  return r && r->trajectory ? r->trajectory->horizon() : -1;
}

gcs_error gcs_result_to_json(const gcs_result* r, char** out) {
  if (!r || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_INTERNAL, [&] { *out = Dup(ResultJson(*r).dump(2)); });
}

gcs_error gcs_result_trajectory_csv(const gcs_result* r, char** out) {
  if (!r || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  if (!r->trajectory) return Fail(GCS_E_INVALID_ARGUMENT, "result has no trajectory");
  return Guarded(GCS_E_INTERNAL, [&] { *out = Dup(gcs::TrajectoryCsv(*r->trajectory)); });
}

gcs_error gcs_result_svg(const gcs_result* r, int px, int py, char** out) {
  if (!r || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_INVALID_ARGUMENT, [&] {
    *out = Dup(gcs::RenderSvg(*r->graph, r->path, {px, py}));
  });
}

gcs_error gcs_graph_svg(const gcs_graph* g, int px, int py, char** out) {
  if (!g || !out) return Fail(GCS_E_INVALID_ARGUMENT, "null argument");
  return Guarded(GCS_E_INVALID_ARGUMENT, [&] {
    *out = Dup(gcs::RenderSvg(*g->graph, std::nullopt, {px, py}));
  });
}

}  // extern "C"
