// Command-line front end over the C interface.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gcs/gcs.h"

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;

struct GraphDeleter {
  void operator()(gcs_graph* g) const { gcs_graph_free(g); }
};
struct ControlDeleter {
  void operator()(gcs_control* c) const { gcs_control_free(c); }
};
struct ResultDeleter {
  void operator()(gcs_result* r) const { gcs_result_free(r); }
};
using GraphPtr = std::unique_ptr<gcs_graph, GraphDeleter>;
using ControlPtr = std::unique_ptr<gcs_control, ControlDeleter>;
using ResultPtr = std::unique_ptr<gcs_result, ResultDeleter>;

struct Failure {
  std::string message;
};

void Check(gcs_error err, const std::string& what) {
  if (err == GCS_OK) return;
  const std::string msg = gcs_last_error();
  throw Failure{msg.rfind(what, 0) == 0 ? msg : fmt::format("{}: {}", what, msg)};
}

std::string Take(char* s) {
  std::string out = s ? s : "";
  gcs_string_free(s);
  return out;
}

void Write(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{fmt::format("{}: cannot write file", path)};
  out << text;
  spdlog::info("wrote {}", path);
}

int ExitCode(gcs_status s) {
  switch (s) {
    case GCS_STATUS_OPTIMAL: return kExitOptimal;
    case GCS_STATUS_INFEASIBLE: return kExitInfeasible;
    case GCS_STATUS_NODE_LIMIT:
    case GCS_STATUS_TIME_LIMIT: return kExitLimit;
    default: return kExitError;
  }
}

void SetupLogging() {
  auto logger = spdlog::stderr_color_mt("gcs");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("GCS_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet") {
    spdlog::set_level(spdlog::level::off);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (level != "info") spdlog::warn("GCS_LOG='{}' is not quiet, info or debug; using info", level);
  }
}

void LogLine(const char* line, void*) { spdlog::debug("{}", line); }

// Flags shared by the solving subcommands.
struct SolveFlags {
  std::string mode{"micp"};
  double tol_feas{1e-8};
  double tol_gap{1e-6};
  long node_limit{100000};
  double time_limit{3600.0};
  int jobs{1};
  bool no_tighten{false};
  bool no_certificate{false};
  bool pseudo_cost{false};

  void Register(CLI::App* app, bool with_jobs = true) {
    app->add_option("--mode", mode, "relax or micp")->check(CLI::IsMember({"relax", "micp"}));
    app->add_option("--tol-feas", tol_feas, "solver feasibility tolerance")->check(CLI::PositiveNumber);
    app->add_option("--tol-gap", tol_gap, "relative optimality gap")->check(CLI::NonNegativeNumber);
    app->add_option("--node-limit", node_limit, "branch-and-bound node limit")->check(CLI::PositiveNumber);
    app->add_option("--time-limit", time_limit, "seconds")->check(CLI::PositiveNumber);
    if (with_jobs) app->add_option("--jobs", jobs, "nodes solved per batch")->check(CLI::PositiveNumber);
    app->add_flag("--no-tighten", no_tighten, "omit degree and two-cycle rows");
    app->add_flag("--no-certificate", no_certificate, "skip dual certificate extraction");
    app->add_flag("--pseudo-cost", pseudo_cost, "pseudo-cost branching");
  }

  gcs_options Options() const {
    gcs_options o;
    gcs_options_default(&o);
    o.mode = mode == "relax" ? GCS_MODE_RELAX : GCS_MODE_MICP;
    o.tol_feas = tol_feas;
    o.tol_gap = tol_gap;
    o.node_limit = node_limit;
    o.time_limit = time_limit;
    o.jobs = jobs;
    o.tighten = !no_tighten;
    o.certificate = !no_certificate;
    o.pseudo_cost = pseudo_cost;
    return o;
  }
};

struct OutputFlags {
  std::string out;
  std::string svg;
  std::vector<int> proj{0, 1};

  void Register(CLI::App* app) {
    app->add_option("-o,--out", out, "result JSON path (default: stdout)");
    app->add_option("--svg", svg, "write an SVG drawing");
    app->add_option("--proj", proj, "coordinates drawn in the SVG")->expected(2);
  }

  void Emit(const gcs_result* r) const {
    char* json = nullptr;
    Check(gcs_result_to_json(r, &json), "result");
    const std::string text = Take(json) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      Write(out, text);
    }
    if (!svg.empty()) {
      char* drawing = nullptr;
      Check(gcs_result_svg(r, proj[0], proj[1], &drawing), "svg");
      Write(svg, Take(drawing));
    }
  }
};

const char* StatusName(gcs_status s) {
  static const char* kNames[] = {"optimal", "infeasible", "node_limit", "time_limit",
                                 "numerical_failure"};
  return kNames[s];
}

void Summarize(const gcs_result* r) {
  spdlog::info("{}: cost {:.9g} bound {:.9g} relaxation {:.9g} nodes {} time {:.3f}s",
               StatusName(gcs_result_status(r)), gcs_result_cost(r), gcs_result_bound(r),
               gcs_result_relaxation(r), gcs_result_nodes(r), gcs_result_seconds(r));
}

// Replaces the seed field of a random generator spec.
std::string WithSeed(const std::string& spec, std::optional<long> seed) {
  if (!seed || spec.rfind("random:", 0) != 0) return spec;
  const size_t end = spec.find(':', 7);
  return fmt::format("random:{}{}", *seed, end == std::string::npos ? "" : spec.substr(end));
}

GraphPtr LoadGraph(const std::string& path, const std::string& gen) {
  gcs_graph* g = nullptr;
  if (!gen.empty()) {
    Check(gcs_graph_generate(gen.c_str(), &g), gen);
  } else {
    Check(gcs_graph_load(path.c_str(), &g), path);
  }
  return GraphPtr(g);
}

int CmdSolve(const std::string& path, const std::string& gen, std::optional<long> seed,
             const SolveFlags& flags, const OutputFlags& output) {
  if (path.empty() == gen.empty()) throw Failure{"give exactly one of INSTANCE or --gen"};
  const GraphPtr g = LoadGraph(path, WithSeed(gen, seed));
  spdlog::info("{} vertices, {} edges, dimension {}{}", gcs_graph_num_vertices(g.get()),
               gcs_graph_num_edges(g.get()), gcs_graph_dim(g.get()),
               gcs_graph_is_acyclic(g.get()) ? "" : ", cyclic");
  const gcs_options opts = flags.Options();
  gcs_result* raw = nullptr;
  Check(gcs_solve(g.get(), &opts, LogLine, nullptr, &raw), "solve");
  const ResultPtr r(raw);
  Summarize(r.get());
  output.Emit(r.get());
  return ExitCode(gcs_result_status(r.get()));
}

int CmdControl(const std::string& path, const std::string& builtin, const std::string& kind,
               const std::string& csv, const SolveFlags& flags, const OutputFlags& output) {
  if (path.empty() == builtin.empty()) throw Failure{"give exactly one of SYSTEM or --builtin"};
  gcs_control* raw_c = nullptr;
  if (!builtin.empty()) {
    Check(gcs_control_builtin(builtin.c_str(), &raw_c), builtin);
  } else {
    Check(gcs_control_load(path.c_str(), &raw_c), path);
  }
  const ControlPtr c(raw_c);
  if (!kind.empty()) {
    char* json = nullptr;
    Check(gcs_control_to_json(c.get(), &json), "system");
    if (Take(json).find(fmt::format("\"kind\": \"{}\"", kind)) == std::string::npos) {
      throw Failure{fmt::format("system is not of kind '{}'", kind)};
    }
  }
  const gcs_options opts = flags.Options();
  gcs_result* raw = nullptr;
  Check(gcs_control_solve(c.get(), &opts, LogLine, nullptr, &raw), "control");
  const ResultPtr r(raw);
  Summarize(r.get());
  if (gcs_result_horizon(r.get()) >= 0) spdlog::info("horizon {}", gcs_result_horizon(r.get()));
  output.Emit(r.get());
  if (!csv.empty() && gcs_result_horizon(r.get()) >= 0) {
    char* text = nullptr;
    Check(gcs_result_trajectory_csv(r.get(), &text), "trajectory");
    Write(csv, Take(text));
  }
  return ExitCode(gcs_result_status(r.get()));
}

int CmdGenerate(const std::string& spec, std::optional<long> seed, const std::string& out,
                const std::string& svg, const std::vector<int>& proj) {
  const GraphPtr g = LoadGraph("", WithSeed(spec, seed));
  char* json = nullptr;
  Check(gcs_graph_to_json(g.get(), &json), "export");
  const std::string text = Take(json) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    Write(out, text);
  }
  if (!svg.empty()) {
    char* drawing = nullptr;
    Check(gcs_graph_svg(g.get(), proj[0], proj[1], &drawing), "svg");
    Write(svg, Take(drawing));
  }
  return kExitOptimal;
}

struct BenchRow {
  std::string group;
  std::string instance;
  long seed{-1};
  std::string status;
  double relax{NAN};
  double micp{NAN};
  double gap{NAN};
  long nodes{0};
  double seconds{NAN};
  std::string error;
};

std::string Csv(double v) { return std::isnan(v) ? "" : fmt::format("{:.10g}", v); }

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

double Median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

BenchRow RunRow(const std::string& group, const std::string& instance, long seed, bool from_file,
                gcs_options opts) {
  BenchRow row;
  row.group = group;
  row.instance = instance;
  row.seed = seed;
  gcs_graph* raw_g = nullptr;
  const gcs_error err = from_file ? gcs_graph_load(instance.c_str(), &raw_g)
                                  : gcs_graph_generate(instance.c_str(), &raw_g);
  if (err != GCS_OK) {
    row.status = "error";
    row.error = gcs_last_error();
    return row;
  }
  const GraphPtr g(raw_g);
  opts.mode = GCS_MODE_MICP;
  opts.jobs = 1;
  gcs_result* raw = nullptr;
  if (gcs_solve(g.get(), &opts, nullptr, nullptr, &raw) != GCS_OK) {
    row.status = "error";
    row.error = gcs_last_error();
    return row;
  }
  const ResultPtr r(raw);
  row.status = StatusName(gcs_result_status(r.get()));
  row.relax = gcs_result_relaxation(r.get());
  row.micp = gcs_result_cost(r.get());
  row.gap = gcs_result_gap(r.get());
  row.nodes = gcs_result_nodes(r.get());
  row.seconds = gcs_result_seconds(r.get());
  return row;
}

struct BenchFlags {
  std::vector<int> n{4};
  std::vector<int> nv{50};
  std::vector<int> ne{100};
  std::vector<double> volume{0.01};
  std::vector<std::string> length{"euclid"};
  int seeds{20};
  long first_seed{1};
  std::vector<std::string> instances;
  std::string out;
  int jobs{1};
};

int CmdBench(const BenchFlags& b, const SolveFlags& flags) {
  struct Task {
    std::string group, instance;
    long seed;
    bool file;
  };
  std::vector<Task> tasks;
  for (int n : b.n) {
    for (int nv : b.nv) {
      for (int ne : b.ne) {
        for (double vol : b.volume) {
          for (const std::string& len : b.length) {
            const std::string group = fmt::format("n={} nV={} nE={} volume={} length={}", n, nv, ne, vol, len);
            for (int k = 0; k < b.seeds; ++k) {
              const long seed = b.first_seed + k;
              tasks.push_back({group,
                               fmt::format("random:{}:{}:{}:{}:{}{}", seed, n, nv, ne, vol,
                                           len == "sq" ? ":sq" : ""),
                               seed, false});
            }
          }
        }
      }
    }
  }
  for (const std::string& path : b.instances) tasks.push_back({"file", path, -1, true});

  std::vector<BenchRow> rows(tasks.size());
  std::atomic<size_t> next{0};
  const gcs_options opts = flags.Options();
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      rows[i] = RunRow(tasks[i].group, tasks[i].instance, tasks[i].seed, tasks[i].file, opts);
      spdlog::info("[{}/{}] {} {} gap {} time {:.3f}s", i + 1, tasks.size(), rows[i].instance,
                   rows[i].status, Csv(rows[i].gap), rows[i].seconds);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < b.jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::string csv = "group,instance,seed,status,relax_cost,micp_cost,gap_pct,nodes,time_s,error\n";
  std::map<std::string, std::vector<const BenchRow*>> groups;
  std::vector<std::string> order;
  for (const BenchRow& r : rows) {
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", Quote(r.group), Quote(r.instance),
                       r.seed < 0 ? "" : std::to_string(r.seed), r.status, Csv(r.relax), Csv(r.micp),
                       Csv(100.0 * r.gap), r.nodes, Csv(r.seconds), Quote(r.error));
    if (!groups.count(r.group)) order.push_back(r.group);
    groups[r.group].push_back(&r);
  }
  csv += "\ngroup,solved,excluded,median_gap_pct,max_gap_pct,median_time_s,max_time_s\n";
  for (const std::string& name : order) {
    std::vector<double> gaps, times;
    int excluded = 0;
    for (const BenchRow* r : groups[name]) {
      if (r->status != "optimal" || std::isnan(r->gap)) {
        ++excluded;
        continue;
      }
      gaps.push_back(100.0 * r->gap);
      times.push_back(r->seconds);
    }
    auto max = [](const std::vector<double>& v) {
      return v.empty() ? NAN : *std::max_element(v.begin(), v.end());
    };
    csv += fmt::format("{},{},{},{},{},{},{}\n", Quote(name), gaps.size(), excluded,
                       Csv(Median(gaps)), Csv(max(gaps)), Csv(Median(times)), Csv(max(times)));
    spdlog::info("{}: {} solved, {} excluded, median gap {}%, max gap {}%", name, gaps.size(),
                 excluded, Csv(Median(gaps)), Csv(max(gaps)));
  }
  if (b.out.empty()) {
    std::cout << csv;
  } else {
    Write(b.out, csv);
  }
  const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) {
    return r.status == "optimal" || r.status == "infeasible";
  });
  return all_ok ? kExitOptimal : kExitLimit;
}

}  // namespace

int main(int argc, char** argv) {
  SetupLogging();
  CLI::App app{"Shortest paths in graphs of convex sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gcs_version());

  std::optional<long> seed;

  CLI::App* solve = app.add_subcommand("solve", "solve an instance file or a generated instance");
  std::string instance, gen;
  SolveFlags solve_flags;
  OutputFlags solve_out;
  solve->add_option("INSTANCE", instance, "instance JSON");
  solve->add_option("--gen", gen, "hpp:<m> | random:<seed>:<n>:<nV>:<nE>:<volume>[:sq] | symmetry | 2d:<sigma>[:euclid]");
  solve->add_option("--seed", seed, "seed for a random generator spec");
  solve_flags.Register(solve);
  solve_out.Register(solve);

  CLI::App* control = app.add_subcommand("control", "optimal control through a layered or chain graph");
  std::string system, builtin, kind, csv;
  SolveFlags control_flags;
  OutputFlags control_out;
  control->add_option("SYSTEM", system, "system JSON");
  control->add_option("--builtin", builtin, "footstep[:T] | footstep-small:T");
  control->add_option("--kind", kind, "require mintime or pwa")->check(CLI::IsMember({"mintime", "pwa"}));
  control->add_option("--csv", csv, "trajectory CSV path");
  control_flags.Register(control);
  control_out.Register(control);

  CLI::App* bench = app.add_subcommand("bench", "relaxation gap battery on random instances");
  BenchFlags bench_flags;
  SolveFlags bench_solve;
  bench->add_option("--n", bench_flags.n, "dimensions")->delimiter(',');
  bench->add_option("--nv", bench_flags.nv, "vertex counts")->delimiter(',');
  bench->add_option("--ne", bench_flags.ne, "edge counts")->delimiter(',');
  bench->add_option("--volume", bench_flags.volume, "set volumes")->delimiter(',');
  bench->add_option("--length", bench_flags.length, "euclid and/or sq")
      ->delimiter(',')
      ->check(CLI::IsMember({"euclid", "sq"}));
  bench->add_option("--seeds", bench_flags.seeds, "seeds per grid point")->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", bench_flags.first_seed, "first seed");
  bench->add_option("--instance", bench_flags.instances, "extra instance files");
  bench->add_option("-o,--out", bench_flags.out, "CSV path (default: stdout)");
  bench->add_option("--jobs", bench_flags.jobs, "rows solved in parallel")->check(CLI::PositiveNumber);
  bench_solve.Register(bench, false);

  CLI::App* generate = app.add_subcommand("generate", "write a generated instance as JSON");
  std::string spec, gen_out, gen_svg;
  std::vector<int> gen_proj{0, 1};
  generate->add_option("SPEC", spec, "generator spec")->required();
  generate->add_option("--seed", seed, "seed for a random generator spec");
  generate->add_option("-o,--out", gen_out, "JSON path (default: stdout)");
  generate->add_option("--svg", gen_svg, "write an SVG drawing");
  generate->add_option("--proj", gen_proj, "coordinates drawn in the SVG")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (*solve) return CmdSolve(instance, gen, seed, solve_flags, solve_out);
    if (*control) return CmdControl(system, builtin, kind, csv, control_flags, control_out);
    if (*bench) return CmdBench(bench_flags, bench_solve);
    if (*generate) return CmdGenerate(spec, seed, gen_out, gen_svg, gen_proj);
  } catch (const Failure& f) {
    spdlog::error("{}", f.message);
    return kExitError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitError;
}
