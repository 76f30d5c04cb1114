#ifndef MDIEW_FOCK_VERIFY_HPP
#define MDIEW_FOCK_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mdiew::fock {

struct VerifyConfig {
  int cutoff = 8;           // per mode, two-mode checks
  int instances = 20;       // random instances per check
  double lambda = 0.5;      // conjugation parameter, in (0, 1)
  double energy_scale = 1;  // N for the admissible-lambda window
  std::uint64_t seed = 0;
  bool with_tomography = false;
};

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  VerifyConfig config;
  std::vector<VerifyCheck> checks;
  bool all_passed = false;
};

/// Runs the Fock-lab verification suite on seeded random instances:
/// projector-contraction vs conjugation POVM equivalence, the transformed
/// witness trace identity, separable-decomposition preservation, the
/// three-mode identity, partial-transpose sign preservation, the lambda
/// window logic, and optionally a tomography round trip.  Throws
/// std::invalid_argument when the configuration itself is inadmissible
/// (e.g. lambda outside the energy-scale window).
VerifyReport run_fock_verification(const VerifyConfig& config);

std::string verify_report_to_json(const VerifyReport& report);

}  // namespace mdiew::fock

#endif  // MDIEW_FOCK_VERIFY_HPP
