#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gcs/control.hpp"
#include "gcs/graph.hpp"

namespace gcs {

/// Malformed input. The message names the line (syntax errors) or the
/// offending field path, e.g. "vertices.a.lo: expected an array".
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"vertices": {"<id>": set}, "edges": [{"u", "v", "length"}],
///  "source": .., "target": ..}
/// Sets are {"type": "singleton", "theta"}, {"type": "box", "lo", "hi"},
/// {"type": "polyhedron", "A", "b"}, {"type": "ellipsoid", "A", "b"} or
/// {"type": "product", "factors"}; matrices are arrays of rows. Lengths are
/// {"type": "euclidean"}, {"type": "sq_euclidean"}, {"type": "norm2", "C", "d"},
/// {"type": "sq_norm2", "C", "d"}, {"type": "const", "c", "dyn"?} or
/// {"type": "quad", "C", "d", "c0", "dyn"?} with
/// dyn = {"E", "F", "g", "relation": "eq" | "le"}.
std::string InstanceToJson(const Gcs& g, int indent = 2);
Gcs InstanceFromJson(const std::string& text);

Gcs LoadInstance(const std::string& path);
void SaveInstance(const Gcs& g, const std::string& path);

/// Reads a whole file; throws IoError when it cannot be opened.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& text);

/// {"kind": "mintime", "A", "B", "state_set", "control_set", "s0", "t_max"}
struct MinTimeProblem {
  LinearSystem system;
  int t_max{1};
};

/// {"kind": "pwa", "modes": [{"S", "A", "B", "c"}], "control_set",
///  "stage": {"C", "d", "c0"}, "horizon", "s0", "terminal_set"?,
///  "terminal_cost"?}
using ControlProblem = std::variant<MinTimeProblem, PwaSystem>;

ControlProblem ControlFromJson(const std::string& text);
std::string ControlToJson(const ControlProblem& problem, int indent = 2);

/// Header "tau,s0,..,a0,..[,mode]"; one row per state, controls empty on
/// the last row.
std::string TrajectoryCsv(const Trajectory& traj);

struct SvgOptions {
  int proj_x{0};
  int proj_y{1};
  double width{640.0};
};

/// Sets projected onto coordinates (proj_x, proj_y), edges between set
/// centers, and the path as white circles joined by a dotted red line.
/// Throws std::invalid_argument when a projection index is out of range.
std::string RenderSvg(const Gcs& g, const std::optional<PathResult>& path,
                      const SvgOptions& opts = {});

}  // namespace gcs
