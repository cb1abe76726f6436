#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sphcs {

enum class Bound {
  at_most,     // pass iff residual <= tolerance
  greater_than // negative control: pass iff residual > tolerance
};

struct VerifyCheck {
  std::string suite;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::at_most;
  bool informational = false; // reported, never fails the run
  bool pass() const;
};

struct SuiteResult {
  std::string suite;
  std::vector<VerifyCheck> checks;
  double seconds = 0.0;
  bool pass() const;
};

struct VerifyOptions {
  std::vector<int> dims;            // empty: every dimension the suite supports
  std::optional<double> tau;        // overrides the suite's tau values
  bool negative_controls = false;
  std::uint64_t seed = 1;
};

/// complexifier, kernels, operators, coherent, resolution, transform, flat,
/// husimi.
const std::vector<std::string> &suite_names();

/// Throws InvalidArgument for an unknown suite.
SuiteResult run_suite(const std::string &name, const VerifyOptions &opt);

} // namespace sphcs
