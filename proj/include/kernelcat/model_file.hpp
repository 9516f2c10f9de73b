#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kernelcat/bayes.hpp"
#include "kernelcat/gp.hpp"
#include "kernelcat/markov.hpp"

namespace kernelcat::cli {

using Json = nlohmann::json;

enum class ModelKind { DiscreteBayes, Gp, Parametric, Hmm, Kalman };

std::string_view to_string(ModelKind kind);

/// A parsed model file: the envelope is checked, the body is validated by the
/// kind-specific builders below.
struct ModelFile {
  int version = 1;
  ModelKind kind = ModelKind::DiscreteBayes;
  Json body;
  Json queries;  // array
  std::string digest;
};

/// Throws Error(ParseError) with a line number on malformed JSON, and
/// Error(ValidationError) naming the field for a bad envelope.
ModelFile parse_model(std::string_view text);
ModelFile load_model(const std::filesystem::path& path);

struct DiscreteModel {
  std::map<std::string, FiniteSpace> spaces;
  BayesModel model;
  std::map<std::string, Kernel> kernels;
  std::optional<Kernel> claimed_inference;
  ZeroMassPolicy policy = ZeroMassPolicy::Uniform;
};

struct GpModel {
  GpState prior;
  std::vector<Observation> data;
};

struct ParametricSpec {
  ParametricModel model;
  std::vector<Observation> data;
};

struct HmmModel {
  std::map<std::string, FiniteSpace> spaces;
  HmmSpec spec;
  std::vector<Dist> measurements;
};

struct KalmanModel {
  LinearGaussianModel model;
  std::vector<Eigen::VectorXd> measurements;
};

// Each builder throws Error(ValidationError) whose message starts with the
// offending field path, e.g. "sampling.rows.u1.b: zero denominator in '1/0'".
DiscreteModel build_discrete(const ModelFile& file);
GpModel build_gp(const ModelFile& file);
ParametricSpec build_parametric(const ModelFile& file);
HmmModel build_hmm(const ModelFile& file);
KalmanModel build_kalman(const ModelFile& file);

/// Validates the body for the file's kind without executing anything.
void validate(const ModelFile& file);

// Shared field decoders, also used when decoding query arguments.
Input decode_input(const Json& value, const std::string& path);
std::vector<Input> decode_inputs(const Json& value, const std::string& path);
Dist decode_dist(const FiniteSpace& space, const Json& value, const std::string& path);
Event decode_event(const FiniteSpace& space, const Json& value, const std::string& path);

MeanFn decode_mean(const Json& value, const std::string& path);
CovFn decode_cov(const Json& value, const std::string& path);
std::vector<Monomial> decode_basis(const Json& value, const std::string& path);
// Encoders emit the same schema the decoders accept; decode(encode(x)) == x.
Json encode_mean(const MeanFn& mean);
Json encode_cov(const CovFn& cov);
Json encode_basis(const std::vector<Monomial>& basis);

}  // namespace kernelcat::cli
