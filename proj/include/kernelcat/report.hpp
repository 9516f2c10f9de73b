#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "kernelcat/finite.hpp"
#include "kernelcat/gaussian.hpp"
#include "kernelcat/gp.hpp"

namespace kernelcat::cli {

/// Output JSON keeps insertion order so reports have a fixed field layout.
using OutJson = nlohmann::ordered_json;

std::string hex64(std::uint64_t value);

/// Rounds to 12 significant digits; -0 becomes 0.
double round12(double value);

OutJson encode_dist(const Dist& dist);
OutJson encode_kernel(const Kernel& kernel);
OutJson encode_vector(const Eigen::VectorXd& v);
OutJson encode_matrix(const Eigen::MatrixXd& m);
OutJson encode_gaussian(const Gaussian& g);
OutJson encode_curve(const std::vector<CurvePoint>& curve);

struct QueryResult {
  std::string id;
  std::string type;
  bool ok = true;
  OutJson value;          // when ok
  std::string error_code; // when !ok
  std::string error_message;
};

struct Report {
  std::string kind;
  std::string digest;
  std::uint64_t seed = 42;
  std::vector<QueryResult> results;
  std::vector<std::string> zero_mass_atoms;
  bool jitter_applied = false;
};

OutJson to_json(const Report& report);
/// Curve-only reports become "query,z,mean,lower,upper" rows; anything else is
/// flattened to "query,path,value".
std::string to_csv(const Report& report);

}  // namespace kernelcat::cli
