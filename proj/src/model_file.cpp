#include "kernelcat/model_file.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "kernelcat/error.hpp"
#include "kernelcat/report.hpp"

namespace kernelcat::cli {
namespace {

constexpr int kSupportedVersion = 1;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ValidationError, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string join(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) invalid(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) invalid(join(path, key), "missing field");
  return *it;
}

const Json* optional_field(const Json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) invalid(path, "expected a string");
  return v.get<std::string>();
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) invalid(path, "expected a number");
  return v.get<double>();
}

std::size_t natural(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    invalid(path, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

Rational rational(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (!v.is_string()) invalid(path, "expected a rational string \"p/q\"");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

Eigen::VectorXd vector(const Json& v, const std::string& path) {
  if (v.is_number()) return Eigen::VectorXd::Constant(1, v.get<double>());
  if (!v.is_array()) invalid(path, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], join(path, i));
  return out;
}

Eigen::MatrixXd matrix(const Json& v, const std::string& path) {
  if (v.is_number()) return Eigen::MatrixXd::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty()) invalid(path, "expected a nonempty array of rows");
  const auto rows = v.size();
  if (!v[0].is_array()) invalid(join(path, 0), "expected an array of numbers");
  const auto cols = v[0].size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto rp = join(path, r);
    if (!v[r].is_array() || v[r].size() != cols) invalid(rp, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(v[r][c], join(rp, c));
    }
  }
  return out;
}

Gaussian gaussian(const Json& v, const std::string& path) {
  auto mean = vector(field(v, "mean", path), join(path, "mean"));
  auto cov = matrix(field(v, "cov", path), join(path, "cov"));
  try {
    return Gaussian(std::move(mean), std::move(cov));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

std::map<std::string, FiniteSpace> decode_spaces(const Json& body) {
  const auto& v = field(body, "spaces", "");
  if (!v.is_object() || v.empty()) invalid("spaces", "expected a nonempty object of atom lists");
  std::map<std::string, FiniteSpace> spaces;
  for (const auto& [name, atoms] : v.items()) {
    const auto path = join("spaces", name);
    if (!atoms.is_array()) invalid(path, "expected an array of atom labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < atoms.size(); ++i) labels.push_back(text(atoms[i], join(path, i)));
    try {
      spaces.emplace(name, make_space(name, std::move(labels)));
    } catch (const Error& e) {
      invalid(path, std::string(to_string(e.code())) + ": " + e.what());
    }
  }
  return spaces;
}

FiniteSpace space_ref(const std::map<std::string, FiniteSpace>& spaces, const Json& v,
                      const std::string& path) {
  auto lookup = [&](const Json& name, const std::string& p) {
    const auto key = text(name, p);
    auto it = spaces.find(key);
    if (it == spaces.end()) invalid(p, "unknown space '" + key + "'");
    return it->second;
  };
  if (v.is_array()) {
    if (v.empty()) invalid(path, "expected at least one space");
    std::vector<FiniteSpace> factors;
    for (std::size_t i = 0; i < v.size(); ++i) factors.push_back(lookup(v[i], join(path, i)));
    return FiniteSpace::product(factors);
  }
  return lookup(v, path);
}

std::vector<Rational> weights_over(const FiniteSpace& space, const Json& v, const std::string& path) {
  if (!v.is_object()) invalid(path, "expected an object mapping atoms to rationals");
  std::vector<Rational> w(space.size(), Rational(0));
  for (const auto& [label, value] : v.items()) {
    const auto p = join(path, label);
    auto index = space.find(label);
    if (!index) invalid(p, "unknown atom '" + label + "' in space '" + space.name() + "'");
    w[*index] = rational(value, p);
  }
  return w;
}

Kernel decode_kernel(const std::map<std::string, FiniteSpace>& spaces, const Json& v,
                     const std::string& path) {
  const auto domain = space_ref(spaces, field(v, "from", path), join(path, "from"));
  const auto codomain = space_ref(spaces, field(v, "to", path), join(path, "to"));
  const auto& rows = field(v, "rows", path);
  const auto rows_path = join(path, "rows");
  if (!rows.is_object()) invalid(rows_path, "expected an object keyed by domain atoms");
  for (const auto& [label, _] : rows.items()) {
    if (!domain.find(label)) {
      invalid(join(rows_path, label), "unknown domain atom '" + label + "'");
    }
  }
  Kernel::Matrix matrix;
  for (const auto& atom : domain.atoms()) {
    auto it = rows.find(atom);
    if (it == rows.end()) invalid(join(rows_path, atom), "missing row");
    matrix.push_back(weights_over(codomain, *it, join(rows_path, atom)));
  }
  try {
    return Kernel(domain, codomain, std::move(matrix));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

Dist decode_prior(const std::map<std::string, FiniteSpace>& spaces, const Json& v,
                  const std::string& path) {
  if (const auto* parts = optional_field(v, "tensor")) {
    const auto tp = join(path, "tensor");
    if (!parts->is_array() || parts->empty()) invalid(tp, "expected a nonempty array");
    std::optional<Dist> acc;
    for (std::size_t i = 0; i < parts->size(); ++i) {
      auto d = decode_prior(spaces, (*parts)[i], join(tp, i));
      acc = acc ? tensor_independent(*acc, d) : d;
    }
    return *acc;
  }
  const auto space = space_ref(spaces, field(v, "space", path), join(path, "space"));
  return decode_dist(space, field(v, "weights", path), join(path, "weights"));
}

std::vector<Observation> decode_data(const Json& body) {
  std::vector<Observation> out;
  const auto* v = optional_field(body, "data");
  if (v == nullptr) return out;
  if (!v->is_array()) invalid("data", "expected an array of {x, y} objects");
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto p = join("data", i);
    out.push_back({decode_input(field((*v)[i], "x", p), join(p, "x")),
                   number(field((*v)[i], "y", p), join(p, "y"))});
  }
  return out;
}

double decode_noise(const Json& body) {
  const auto* v = optional_field(body, "noise_var");
  if (v == nullptr) return 0.0;
  const double s2 = number(*v, "noise_var");
  if (!(s2 >= 0.0)) invalid("noise_var", "BadVariance: noise variance must be >= 0");
  return s2;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::DiscreteBayes: return "discrete-bayes";
    case ModelKind::Gp: return "gp";
    case ModelKind::Parametric: return "parametric";
    case ModelKind::Hmm: return "hmm";
    case ModelKind::Kalman: return "kalman";
  }
  return "unknown";
}

ModelFile parse_model(std::string_view text_in) {
  Json root;
  try {
    root = Json::parse(text_in.begin(), text_in.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text_in.size(); ++i) {
      if (text_in[i] == '\n') ++line;
    }
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  if (!root.is_object()) invalid("(root)", "expected a JSON object");

  ModelFile file;
  const auto& version = field(root, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kSupportedVersion) {
    invalid("version", "unsupported version (expected " + std::to_string(kSupportedVersion) + ")");
  }
  file.version = version.get<int>();
  const auto kind = text(field(root, "kind", ""), "kind");
  if (kind == "discrete-bayes") file.kind = ModelKind::DiscreteBayes;
  else if (kind == "gp") file.kind = ModelKind::Gp;
  else if (kind == "parametric") file.kind = ModelKind::Parametric;
  else if (kind == "hmm") file.kind = ModelKind::Hmm;
  else if (kind == "kalman") file.kind = ModelKind::Kalman;
  else invalid("kind", "unknown model kind '" + kind + "'");
  file.body = field(root, "body", "");
  if (!file.body.is_object()) invalid("body", "expected an object");
  file.queries = root.contains("queries") ? root["queries"] : Json::array();
  if (!file.queries.is_array()) invalid("queries", "expected an array");
  for (std::size_t i = 0; i < file.queries.size(); ++i) {
    const auto p = join("queries", i);
    text(field(file.queries[i], "id", p), join(p, "id"));
    text(field(file.queries[i], "type", p), join(p, "type"));
  }
  file.digest = "fnv1a64:" + hex64(fnv1a(text_in));
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot read model file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

Input decode_input(const Json& value, const std::string& path) { return vector(value, path); }

std::vector<Input> decode_inputs(const Json& value, const std::string& path) {
  if (!value.is_array()) invalid(path, "expected an array of input points");
  std::vector<Input> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(decode_input(value[i], join(path, i)));
  return out;
}

Dist decode_dist(const FiniteSpace& space, const Json& value, const std::string& path) {
  auto w = weights_over(space, value, path);
  try {
    return Dist(space, std::move(w));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

Event decode_event(const FiniteSpace& space, const Json& value, const std::string& path) {
  if (!value.is_array()) invalid(path, "expected an array of {factor, atoms} constraints");
  Event event;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const auto p = join(path, i);
    FactorEvent part;
    part.factor = natural(field(value[i], "factor", p), join(p, "factor"));
    if (part.factor >= space.factor_count()) {
      invalid(join(p, "factor"), "BadFactor: factor " + std::to_string(part.factor) +
                                     " out of range (" + std::to_string(space.factor_count()) +
                                     " factors)");
    }
    const auto factor = space.factor(part.factor);
    const auto& atoms = field(value[i], "atoms", p);
    if (!atoms.is_array()) invalid(join(p, "atoms"), "expected an array of atom labels");
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const auto label = text(atoms[k], join(join(p, "atoms"), k));
      if (!factor.find(label)) {
        invalid(join(join(p, "atoms"), k), "unknown atom '" + label + "' in '" + factor.name() + "'");
      }
      part.atoms.push_back(label);
    }
    event.push_back(std::move(part));
  }
  return event;
}

std::vector<Monomial> decode_basis(const Json& value, const std::string& path) {
  if (value.is_object()) {
    const auto family = text(field(value, "family", path), join(path, "family"));
    const auto dim = natural(field(value, "dim", path), join(path, "dim"));
    if (family == "affine") return affine_basis(dim);
    if (family == "elliptic") return elliptic_basis(dim);
    invalid(join(path, "family"), "unknown basis family '" + family + "'");
  }
  if (!value.is_array() || value.empty()) {
    invalid(path, "expected a basis family object or a nonempty list of monomials");
  }
  std::vector<Monomial> basis;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const auto p = join(path, i);
    if (!value[i].is_array()) invalid(p, "expected a list of coordinate indices");
    Monomial m;
    for (std::size_t k = 0; k < value[i].size(); ++k) m.coords.push_back(natural(value[i][k], join(p, k)));
    basis.push_back(std::move(m));
  }
  return basis;
}

Json encode_basis(const std::vector<Monomial>& basis) {
  Json out = Json::array();
  for (const auto& m : basis) out.push_back(m.coords);
  return out;
}

MeanFn decode_mean(const Json& value, const std::string& path) {
  const auto family = text(field(value, "family", path), join(path, "family"));
  if (family == "zero") return MeanFn{ZeroMean{}};
  if (family == "constant") return MeanFn{ConstantMean{number(field(value, "value", path), join(path, "value"))}};
  if (family == "linear") {
    return MeanFn{LinearMean{vector(field(value, "weights", path), join(path, "weights")),
                             number(field(value, "bias", path), join(path, "bias"))}};
  }
  if (family == "basis") {
    auto basis = decode_basis(field(value, "basis", path), join(path, "basis"));
    auto coeffs = vector(field(value, "coeffs", path), join(path, "coeffs"));
    if (coeffs.size() != static_cast<Eigen::Index>(basis.size())) {
      invalid(join(path, "coeffs"), "expected one coefficient per basis function");
    }
    return MeanFn{BasisMean{std::move(basis), std::move(coeffs)}};
  }
  invalid(join(path, "family"), "unknown mean family '" + family + "'");
}

Json encode_mean(const MeanFn& mean) {
  Json out = Json::object();
  if (std::holds_alternative<ZeroMean>(mean.form)) {
    out["family"] = "zero";
  } else if (const auto* c = std::get_if<ConstantMean>(&mean.form)) {
    out["family"] = "constant";
    out["value"] = c->value;
  } else if (const auto* l = std::get_if<LinearMean>(&mean.form)) {
    out["family"] = "linear";
    out["weights"] = std::vector<double>(l->weights.data(), l->weights.data() + l->weights.size());
    out["bias"] = l->bias;
  } else if (const auto* b = std::get_if<BasisMean>(&mean.form)) {
    out["family"] = "basis";
    out["basis"] = encode_basis(b->basis);
    out["coeffs"] = std::vector<double>(b->coeffs.data(), b->coeffs.data() + b->coeffs.size());
  }
  return out;
}

CovFn decode_cov(const Json& value, const std::string& path) {
  const auto family = text(field(value, "family", path), join(path, "family"));
  CovFn cov;
  if (family == "squared-exponential") {
    cov = CovFn{SquaredExponential{number(field(value, "variance", path), join(path, "variance")),
                                   number(field(value, "lengthscale", path), join(path, "lengthscale"))}};
  } else if (family == "dot-product") {
    cov = CovFn{DotProduct{decode_basis(field(value, "basis", path), join(path, "basis")),
                           matrix(field(value, "weight_cov", path), join(path, "weight_cov"))}};
  } else if (family == "constant") {
    cov = CovFn{ConstantCov{number(field(value, "value", path), join(path, "value"))}};
  } else if (family == "white-noise") {
    cov = CovFn{WhiteNoise{number(field(value, "variance", path), join(path, "variance"))}};
  } else if (family == "sum") {
    const auto& terms = field(value, "terms", path);
    const auto tp = join(path, "terms");
    if (!terms.is_array() || terms.empty()) invalid(tp, "expected a nonempty array of covariances");
    SumCov sum;
    for (std::size_t i = 0; i < terms.size(); ++i) sum.terms.push_back(decode_cov(terms[i], join(tp, i)));
    cov = CovFn{std::move(sum)};
  } else {
    invalid(join(path, "family"), "unknown covariance family '" + family + "'");
  }
  try {
    cov.validate();
  } catch (const Error& e) {
    invalid(path, std::string(to_string(e.code())) + ": " + e.what());
  }
  return cov;
}

Json encode_cov(const CovFn& cov) {
  Json out = Json::object();
  if (const auto* se = std::get_if<SquaredExponential>(&cov.form)) {
    out["family"] = "squared-exponential";
    out["variance"] = se->variance;
    out["lengthscale"] = se->lengthscale;
  } else if (const auto* dp = std::get_if<DotProduct>(&cov.form)) {
    out["family"] = "dot-product";
    out["basis"] = encode_basis(dp->basis);
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < dp->weight_cov.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < dp->weight_cov.cols(); ++c) row.push_back(dp->weight_cov(r, c));
      rows.push_back(std::move(row));
    }
    out["weight_cov"] = std::move(rows);
  } else if (const auto* c = std::get_if<ConstantCov>(&cov.form)) {
    out["family"] = "constant";
    out["value"] = c->value;
  } else if (const auto* w = std::get_if<WhiteNoise>(&cov.form)) {
    out["family"] = "white-noise";
    out["variance"] = w->variance;
  } else if (const auto* s = std::get_if<SumCov>(&cov.form)) {
    out["family"] = "sum";
    out["terms"] = Json::array();
    for (const auto& t : s->terms) out["terms"].push_back(encode_cov(t));
  }
  return out;
}

DiscreteModel build_discrete(const ModelFile& file) {
  const auto& body = file.body;
  auto spaces = decode_spaces(body);
  auto prior = decode_prior(spaces, field(body, "prior", ""), "prior");
  auto sampling = decode_kernel(spaces, field(body, "sampling", ""), "sampling");
  if (!(sampling.domain() == prior.space())) {
    invalid("sampling.from", "DomainMismatch: sampling domain is not the prior's space");
  }
  DiscreteModel out{spaces, BayesModel(std::move(prior), std::move(sampling)), {}, std::nullopt,
                    ZeroMassPolicy::Uniform};
  if (const auto* kernels = optional_field(body, "kernels")) {
    if (!kernels->is_object()) invalid("kernels", "expected an object of named kernels");
    for (const auto& [name, k] : kernels->items()) {
      out.kernels.emplace(name, decode_kernel(spaces, k, join("kernels", name)));
    }
  }
  if (const auto* inf = optional_field(body, "inference")) {
    auto k = decode_kernel(spaces, *inf, "inference");
    if (!(k.domain() == out.model.data()) || !(k.codomain() == out.model.hypothesis())) {
      invalid("inference", "DomainMismatch: must map the data space to the hypothesis space");
    }
    out.claimed_inference = std::move(k);
  }
  if (const auto* policy = optional_field(body, "zero_mass_policy")) {
    const auto p = text(*policy, "zero_mass_policy");
    if (p == "uniform") out.policy = ZeroMassPolicy::Uniform;
    else if (p == "copy-prior") out.policy = ZeroMassPolicy::CopyPrior;
    else invalid("zero_mass_policy", "expected \"uniform\" or \"copy-prior\"");
  }
  return out;
}

GpModel build_gp(const ModelFile& file) {
  const auto& body = file.body;
  auto mean = decode_mean(field(body, "mean", ""), "mean");
  auto cov = decode_cov(field(body, "cov", ""), "cov");
  return GpModel{GpState(std::move(mean), std::move(cov), decode_noise(body)), decode_data(body)};
}

ParametricSpec build_parametric(const ModelFile& file) {
  const auto& body = file.body;
  const auto dim = natural(field(body, "input_dim", ""), "input_dim");
  auto basis = decode_basis(field(body, "basis", ""), "basis");
  auto prior = gaussian(field(body, "prior", ""), "prior");
  try {
    return ParametricSpec{ParametricModel(dim, std::move(basis), std::move(prior), decode_noise(body)),
                          decode_data(body)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    invalid("basis", std::string(to_string(e.code())) + ": " + e.what());
  }
}

HmmModel build_hmm(const ModelFile& file) {
  const auto& body = file.body;
  auto spaces = decode_spaces(body);
  const auto& times_json = field(body, "times", "");
  if (!times_json.is_array() || times_json.empty()) invalid("times", "expected a nonempty array");
  std::vector<std::string> times;
  for (std::size_t i = 0; i < times_json.size(); ++i) times.push_back(text(times_json[i], join("times", i)));

  const auto& states_json = field(body, "states", "");
  if (!states_json.is_array() || states_json.size() != times.size()) {
    invalid("states", "expected one state space per time");
  }
  std::vector<FiniteSpace> states;
  for (std::size_t i = 0; i < states_json.size(); ++i) {
    states.push_back(space_ref(spaces, states_json[i], join("states", i)));
  }
  auto kernels = [&](const std::string& key, std::size_t expected) {
    const auto& v = field(body, key, "");
    if (!v.is_array() || v.size() != expected) {
      invalid(key, "expected " + std::to_string(expected) + " kernels");
    }
    std::vector<Kernel> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(decode_kernel(spaces, v[i], join(key, i)));
    return out;
  };
  auto transitions = kernels("transitions", times.size() - 1);
  auto sensors = kernels("sensors", times.size());
  auto initial = decode_prior(spaces, field(body, "initial", ""), "initial");

  std::optional<MarkovChain> chain;
  try {
    chain.emplace(times, states, std::move(transitions));
  } catch (const Error& e) {
    invalid("transitions", std::string(to_string(e.code())) + ": " + e.what());
  }
  HmmSpec spec{*chain, std::move(sensors), std::move(initial)};
  try {
    spec.validate();
  } catch (const Error& e) {
    invalid("sensors", std::string(to_string(e.code())) + ": " + e.what());
  }

  std::vector<Dist> measurements;
  if (const auto* ms = optional_field(body, "measurements")) {
    if (!ms->is_array()) invalid("measurements", "expected an array");
    if (ms->size() > times.size()) {
      invalid("measurements", "BadInterval: more measurements than times");
    }
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < ms->size(); ++i) {
      const auto p = join("measurements", i);
      const auto t = text(field((*ms)[i], "time", p), join(p, "time"));
      try {
        indices.push_back(spec.chain.time_index(t));
      } catch (const Error&) {
        invalid(join(p, "time"), "unknown time '" + t + "'");
      }
      if (i > 0 && indices[i] <= indices[i - 1]) {
        invalid(join(p, "time"), "OutOfOrder: measurements must arrive in time order");
      }
    }
    for (std::size_t i = 0; i < ms->size(); ++i) {
      const auto p = join("measurements", i);
      const auto index = indices[i];
      if (index != i) {
        invalid(join(p, "time"), "measurements must cover consecutive times from '" + times[0] + "'");
      }
      const auto& data_space = spec.sensors[index].codomain();
      if (const auto* obs = optional_field((*ms)[i], "observation")) {
        const auto label = text(*obs, join(p, "observation"));
        if (!data_space.find(label)) invalid(join(p, "observation"), "unknown observation '" + label + "'");
        measurements.push_back(dirac(data_space, label));
      } else {
        measurements.push_back(decode_dist(data_space, field((*ms)[i], "dist", p), join(p, "dist")));
      }
    }
  }
  return HmmModel{std::move(spaces), std::move(spec), std::move(measurements)};
}

KalmanModel build_kalman(const ModelFile& file) {
  const auto& body = file.body;
  LinearGaussianModel model{matrix(field(body, "A", ""), "A"), matrix(field(body, "Q", ""), "Q"),
                            matrix(field(body, "H", ""), "H"), matrix(field(body, "R", ""), "R"),
                            gaussian(field(body, "initial", ""), "initial")};
  try {
    model.validate();
  } catch (const Error& e) {
    invalid("(model)", e.what());
  }
  std::vector<Eigen::VectorXd> measurements;
  if (const auto* ms = optional_field(body, "measurements")) {
    if (!ms->is_array()) invalid("measurements", "expected an array");
    for (std::size_t i = 0; i < ms->size(); ++i) {
      auto y = vector((*ms)[i], join("measurements", i));
      if (y.size() != model.observation.rows()) {
        invalid(join("measurements", i), "expected an observation of dimension " +
                                             std::to_string(model.observation.rows()));
      }
      measurements.push_back(std::move(y));
    }
  }
  return KalmanModel{std::move(model), std::move(measurements)};
}

void validate(const ModelFile& file) {
  switch (file.kind) {
    case ModelKind::DiscreteBayes: build_discrete(file); break;
    case ModelKind::Gp: build_gp(file); break;
    case ModelKind::Parametric: build_parametric(file); break;
    case ModelKind::Hmm: build_hmm(file); break;
    case ModelKind::Kalman: build_kalman(file); break;
  }
}

}  // namespace kernelcat::cli
