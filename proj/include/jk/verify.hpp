#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jk/johnson_scheme.hpp"
#include "jk/losses.hpp"

namespace jk {

/// Deliberate formula corruptions used to show the suite catches them. Each
/// one alters only the suite's formula-side values; the oracles stay clean.
enum class Fault {
  none,
  /// Negates the first row of Delta.
  delta_sign,
  /// Uses C(p, l - 1) for eta_l.
  eta_shift,
  /// Flips the sign of the hinge conjugate.
  conjugate_sign,
};

std::string_view fault_name(Fault fault) noexcept;
Fault parse_fault(std::string_view name);

struct CheckResult {
  std::string module;
  std::string check;
  nlohmann::json params;
  bool passed = true;
  std::string detail;
};

struct VerifyOptions {
  int max_n = 8;
  Fault fault = Fault::none;
  /// Random coefficient vectors per layer in the characterization check.
  int trials = 1000;
  std::uint64_t seed = 0;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const noexcept;
  std::vector<const CheckResult*> failures() const;
  nlohmann::json to_json() const;
};

/// Runs every oracle-backed property across the library.
VerifyReport verify_suite(const VerifyOptions& options = {});

/// Formula-side tables with the fault applied.
DeltaMatrix faulted_delta(const LayerParams& layer, Fault fault);
EtaVector faulted_eta(const LayerParams& layer, Fault fault);
double faulted_conjugate(LossSpec loss, double a, double y, Fault fault);

}  // namespace jk
