#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gcs/conic.hpp"
#include "gcs/formulation.hpp"
#include "gcs/graph.hpp"

namespace gcs {

/// Vertex potentials certifying a lower bound: for every edge (u, v) and all
/// x_u in X_u, x_v in X_v,
///   r_u' x_u + p_u - r_v' x_v - p_v <= l_e(x_u, x_v),
/// with r_s = r_t = 0. The bound is p_s - p_t.
struct PotentialCertificate {
  std::vector<double> p;
  std::vector<Eigen::VectorXd> r;
  double dual_objective{0.0};
  // Extracted from a program with degree or two-cycle rows. Their
  // multipliers are left out of p and r, and dual_objective is the full
  // conic dual bound instead of p_s - p_t.
  bool tightened{false};
};

/// Zero potentials; always feasible, bound 0.
PotentialCertificate ZeroCertificate(const Gcs& g);

/// Reads the potentials off the multipliers of the source, target and
/// conservation rows. Throws std::invalid_argument unless sol is optimal.
PotentialCertificate ExtractPotentials(const RelaxationProgram& prog, const ConicSolution& sol);

struct CertificateOptions {
  int samples{200};  // per edge
  std::uint64_t seed{1};
  double flow_threshold{1e-2};
  double weak_tol{1e-6};
  double potential_tol{1e-6};
  double tightness_tol{1e-5};
};

struct CertificateReport {
  double primal{0.0};
  double dual_objective{0.0};
  bool weak_duality{false};
  bool potentials_checked{false};
  double max_potential_violation{0.0};
  double max_tightness_violation{0.0};
  int tight_edges{0};
  bool pass{false};
  std::vector<std::string> violations;
};

/// (i) p_s - p_t <= primal cost; (ii) the edge inequalities at random
/// samples of X_u x X_v; (iii) equality at the reconstructed endpoints of
/// every edge carrying flow above the threshold. Only (i) applies to a
/// tightened certificate.
CertificateReport CheckCertificate(const PotentialCertificate& cert, const Gcs& g,
                                   const FlowSolution& sol, const CertificateOptions& opts = {});

/// {"bound": .., "tightened": .., "potentials": {"<id>": {"p": .., "r": [..]}}}
std::string CertificateToJson(const PotentialCertificate& cert, const Gcs& g);

}  // namespace gcs
