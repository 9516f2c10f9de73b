#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kernelcat/model_file.hpp"
#include "kernelcat/report.hpp"

namespace kernelcat::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Validates the model (throws Error(ValidationError) before running anything),
/// then executes every query. A failing query is reported in place and does
/// not stop the others.
Report run_model(const ModelFile& file, std::uint64_t seed = kDefaultSeed);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the invariant checks that apply to the model's kind.
std::vector<CheckResult> verify_model(const ModelFile& file, std::uint64_t seed = kDefaultSeed);

/// Names accepted by example_model / run_example, in a fixed order.
std::vector<std::string> example_names();
/// Bundled model text for a named example; throws Error(UnknownExample).
std::string_view example_model(std::string_view name);
/// Throws Error(UnknownExample).
Report run_example(std::string_view name, std::uint64_t seed = kDefaultSeed);
/// "csv" for curve-producing examples, "json" otherwise.
std::string_view example_default_format(std::string_view name);

}  // namespace kernelcat::cli
