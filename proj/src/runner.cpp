#include "kernelcat/runner.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "kernelcat/error.hpp"

namespace kernelcat::cli {
namespace {

[[noreturn]] void bad_query(const std::string& what) {
  throw Error(ErrorCode::ValidationError, what);
}

const Json& arg(const Json& query, const std::string& key) {
  auto it = query.find(key);
  if (it == query.end()) bad_query("query field '" + key + "' is missing");
  return *it;
}

std::string text_arg(const Json& query, const std::string& key) {
  const auto& v = arg(query, key);
  if (!v.is_string()) bad_query("query field '" + key + "' must be a string");
  return v.get<std::string>();
}

double number_arg(const Json& query, const std::string& key) {
  const auto& v = arg(query, key);
  if (!v.is_number()) bad_query("query field '" + key + "' must be a number");
  return v.get<double>();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- discrete

Dist measurement_arg(const FiniteSpace& data, const Json& query) {
  if (query.contains("observation")) {
    const auto label = text_arg(query, "observation");
    return dirac(data, label);
  }
  return decode_dist(data, arg(query, "measurement"), "measurement");
}

Dist extended_joint(const DiscreteModel& m, const Json& query) {
  Dist joint = joint_from_prior_and_kernel(m.model.prior(), m.model.sampling());
  if (!query.contains("extend")) return joint;
  const auto& ext = query["extend"];
  if (!ext.is_array()) bad_query("query field 'extend' must be an array of kernel names");
  for (const auto& name : ext) {
    if (!name.is_string()) bad_query("query field 'extend' must list kernel names");
    auto it = m.kernels.find(name.get<std::string>());
    if (it == m.kernels.end()) bad_query("unknown kernel '" + name.get<std::string>() + "'");
    joint = extend_joint(joint, it->second);
  }
  return joint;
}

OutJson run_discrete_query(const DiscreteModel& m, const InferenceResult& inf, const Json& q) {
  const auto type = q["type"].get<std::string>();
  if (type == "evidence") return encode_dist(inf.evidence);
  if (type == "inference") {
    OutJson out = OutJson::object();
    out["rows"] = encode_kernel(inf.inference);
    out["zero_mass_atoms"] = inf.zero_mass_atoms;
    return out;
  }
  if (type == "posterior") return encode_dist(posterior(inf, measurement_arg(m.model.data(), q)));
  if (type == "joint") {
    const auto joint = extended_joint(m, q);
    if (!q.contains("event")) return encode_dist(joint);
    return format_rational(mass(joint, decode_event(joint.space(), q["event"], "event")));
  }
  if (type == "conditional") {
    const auto joint = extended_joint(m, q);
    return format_rational(conditional_query(joint, decode_event(joint.space(), arg(q, "given"), "given"),
                                             decode_event(joint.space(), arg(q, "target"), "target")));
  }
  if (type == "decision") {
    // Compares the mass of one event under alternative final extension kernels.
    const auto& alts = arg(q, "alternatives");
    if (!alts.is_object() || alts.empty()) bad_query("'alternatives' must name kernels");
    OutJson masses = OutJson::object();
    std::vector<std::pair<std::string, Rational>> values;
    for (const auto& [label, kernel_name] : alts.items()) {
      Json sub = q;
      Json ext = q.contains("extend") ? q["extend"] : Json::array();
      ext.push_back(kernel_name);
      sub["extend"] = ext;
      const auto joint = extended_joint(m, sub);
      const auto value = mass(joint, decode_event(joint.space(), arg(q, "event"), "event"));
      masses[label] = format_rational(value);
      values.emplace_back(label, value);
    }
    const bool identical = std::all_of(values.begin(), values.end(),
                                       [&](const auto& v) { return v.second == values.front().second; });
    const auto best = std::max_element(values.begin(), values.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    const auto label = q.contains("label") ? text_arg(q, "label") : std::string("alternatives");
    OutJson out = OutJson::object();
    out["masses"] = std::move(masses);
    out["verdict"] = identical ? std::string("identical") : best->first;
    out["summary"] = identical ? label + " identical: " + format_rational(values.front().second)
                               : label + " favours " + best->first + ": " + format_rational(best->second);
    return out;
  }
  if (type == "recommendation") {
    // Posterior over one hypothesis factor; recommends leaving `current` when another atom is likelier.
    const auto post = posterior(inf, measurement_arg(m.model.data(), q));
    const auto factor = arg(q, "factor");
    if (!factor.is_number_unsigned()) bad_query("query field 'factor' must be a nonnegative integer");
    const auto marg = marginal(post, factor.get<std::size_t>());
    const auto current = text_arg(q, "current");
    const auto stay = marg.weight(current);
    std::string best;
    Rational best_p = -1;
    for (std::size_t i = 0; i < marg.space().size(); ++i) {
      if (marg.space().atom(i) != current && marg[i] > best_p) {
        best = marg.space().atom(i);
        best_p = marg[i];
      }
    }
    OutJson out = OutJson::object();
    out["posterior"] = encode_dist(marg);
    out["stay"] = format_rational(stay);
    out["best_alternative"] = best;
    out["best_alternative_probability"] = format_rational(best_p);
    out["recommendation"] = best_p > stay ? "switch" : (best_p < stay ? "stay" : "indifferent");
    return out;
  }
  if (type == "product_rule") {
    const bool claimed = q.value("claimed", false);
    if (claimed && !m.claimed_inference) bad_query("model declares no inference kernel");
    return format_rational(verify_product_rule(m.model, claimed ? *m.claimed_inference : inf.inference));
  }
  bad_query("unknown discrete-bayes query type '" + type + "'");
}

// ---------------------------------------------------------------------- gp

std::vector<Input> curve_grid(const Json& q, std::vector<double>& zs) {
  const double from = number_arg(q, "from");
  const double to = number_arg(q, "to");
  const auto& count_json = arg(q, "count");
  if (!count_json.is_number_unsigned() || count_json.get<std::size_t>() < 2) {
    bad_query("query field 'count' must be an integer >= 2");
  }
  const auto count = count_json.get<std::size_t>();
  std::vector<Input> points;
  for (std::size_t i = 0; i < count; ++i) {
    const double z = from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
    zs.push_back(z);
    points.push_back(Input::Constant(1, z));
  }
  return points;
}

OutJson run_gp_query(const GpModel& m, const Json& q, Diagnostics& diag) {
  const auto type = q["type"].get<std::string>();
  if (type == "prior_marginal") {
    return encode_gaussian(gp_prior_marginal(m.prior, decode_inputs(arg(q, "points"), "points"), true, &diag));
  }
  GpState posterior_state = m.prior;
  for (const auto& obs : m.data) posterior_state = gp_update_one(posterior_state, obs.x, obs.y);
  if (type == "posterior") {
    const auto points = decode_inputs(arg(q, "points"), "points");
    const auto method = q.value("method", std::string("batch"));
    if (method == "recursive") return encode_gaussian(posterior_state.recursive_posterior(points));
    if (method != "batch") bad_query("method must be \"batch\" or \"recursive\"");
    return encode_gaussian(gp_posterior_batch(posterior_state, points, &diag));
  }
  if (type == "curve") {
    std::vector<double> zs;
    const auto points = curve_grid(q, zs);
    const bool post = q.value("posterior", true);
    const auto marginal = post ? gp_posterior_batch(posterior_state, points, &diag)
                               : gp_posterior_batch(m.prior, points, &diag);
    return encode_curve(gp_curve(marginal, zs));
  }
  bad_query("unknown gp query type '" + type + "'");
}

// -------------------------------------------------------------- parametric

OutJson run_parametric_query(const ParametricSpec& m, const Json& q, Diagnostics& diag) {
  const auto type = q["type"].get<std::string>();
  if (type == "weights") return encode_gaussian(parametric_posterior(m.model, m.data, &diag));
  if (type == "pushforward") {
    return encode_gaussian(gp_posterior_batch(parametric_pushforward(m.model),
                                              decode_inputs(arg(q, "points"), "points"), &diag));
  }
  if (type == "predictive") {
    const auto points = decode_inputs(arg(q, "points"), "points");
    return encode_gaussian(parametric_predictive(m.model, parametric_posterior(m.model, m.data, &diag), points));
  }
  if (type == "function_space") {
    const auto points = decode_inputs(arg(q, "points"), "points");
    return encode_gaussian(gp_posterior_batch(gp_update_all(parametric_pushforward(m.model), m.data), points, &diag));
  }
  bad_query("unknown parametric query type '" + type + "'");
}

// --------------------------------------------------------------------- hmm

OutJson run_hmm_query(const HmmModel& m, const Json& q) {
  const auto type = q["type"].get<std::string>();
  if (type == "filter") {
    const auto posts = run_filter(m.spec, m.measurements);
    OutJson out = OutJson::array();
    for (std::size_t k = 0; k < posts.size(); ++k) {
      out.push_back(OutJson{{"time", m.spec.chain.times()[k]}, {"posterior", encode_dist(posts[k])}});
    }
    return out;
  }
  if (type == "chain") {
    const auto i = m.spec.chain.time_index(text_arg(q, "from"));
    const auto j = m.spec.chain.time_index(text_arg(q, "to"));
    return encode_kernel(chain_compose(m.spec.chain, i, j));
  }
  bad_query("unknown hmm query type '" + type + "'");
}

// ------------------------------------------------------------------ kalman

OutJson run_kalman_query(const KalmanModel& m, const Json& q, Diagnostics& diag) {
  const auto type = q["type"].get<std::string>();
  if (type == "filter") {
    const auto trace = run_filter(m.model, m.measurements, &diag);
    OutJson out = OutJson::array();
    for (std::size_t k = 0; k < trace.size(); ++k) {
      OutJson step = OutJson::object();
      step["step"] = k + 1;
      step["observation"] = encode_vector(m.measurements[k]);
      step["mean"] = encode_vector(trace[k].mean());
      step["cov"] = encode_matrix(trace[k].cov());
      out.push_back(std::move(step));
    }
    return out;
  }
  bad_query("unknown kalman query type '" + type + "'");
}

template <class Fn>
QueryResult guarded(const Json& q, Fn&& fn) {
  QueryResult r;
  r.id = q["id"].get<std::string>();
  r.type = q["type"].get<std::string>();
  try {
    r.value = fn();
  } catch (const Error& e) {
    r.ok = false;
    r.error_code = std::string(to_string(e.code()));
    r.error_message = e.what();
  }
  return r;
}

// ------------------------------------------------------------ verification

CheckResult check(std::string name, bool passed, std::string detail) {
  return CheckResult{std::move(name), passed, std::move(detail)};
}

std::vector<CheckResult> verify_discrete(const DiscreteModel& m) {
  std::vector<CheckResult> out;
  const auto inf = infer(m.model, m.policy);
  const auto& tested = m.claimed_inference ? *m.claimed_inference : inf.inference;
  const auto residual = verify_product_rule(m.model, tested);
  out.push_back(check("product_rule", residual == 0, "max residual " + format_rational(residual)));

  const bool total = posterior(inf, inf.evidence) == m.model.prior();
  out.push_back(check("total_probability", total, "posterior(I, P_D) == P_H"));

  const auto joint = joint_from_prior_and_kernel(m.model.prior(), m.model.sampling());
  const auto h_factors = m.model.hypothesis().factor_count();
  std::vector<std::size_t> h_part, d_part;
  for (std::size_t i = 0; i < joint.space().factor_count(); ++i) (i < h_factors ? h_part : d_part).push_back(i);
  const bool marg = marginal(joint, h_part) == m.model.prior() && marginal(joint, d_part) == inf.evidence;
  out.push_back(check("joint_marginals", marg, "marginals of J reproduce P_H and P_D"));

  const auto alt = infer(m.model, m.policy == ZeroMassPolicy::Uniform ? ZeroMassPolicy::CopyPrior
                                                                      : ZeroMassPolicy::Uniform);
  bool same = true;
  for (std::size_t b = 0; b < m.model.data().size(); ++b) {
    if (inf.evidence[b] == 0) continue;
    same = same && inf.inference.row(b) == alt.inference.row(b);
  }
  out.push_back(check("zero_mass_policy_invariance", same,
                      std::to_string(inf.zero_mass_atoms.size()) + " zero-evidence atoms"));
  return out;
}

std::vector<CheckResult> verify_gp(const GpModel& m, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::vector<Input> query;
  for (const auto& obs : m.data) query.push_back(obs.x);
  // Random probes spanning the data's bounding box, widened by one unit.
  const auto dim = m.data.empty() ? Eigen::Index{1} : m.data.front().x.size();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -1.0), hi = Eigen::VectorXd::Constant(dim, 1.0);
  if (!m.data.empty()) {
    lo = hi = m.data.front().x;
    for (const auto& obs : m.data) {
      lo = lo.cwiseMin(obs.x);
      hi = hi.cwiseMax(obs.x);
    }
    lo.array() -= 1.0;
    hi.array() += 1.0;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Input z(dim);
    for (Eigen::Index d = 0; d < dim; ++d) z[d] = lo[d] + (hi[d] - lo[d]) * unit(rng);
    query.push_back(z);
  }

  const auto state = gp_update_all(m.prior, m.data);
  const auto rec = state.recursive_posterior(query);
  const auto batch = gp_posterior_batch(state, query);
  const double diff = std::max((rec.mean() - batch.mean()).cwiseAbs().maxCoeff(),
                               (rec.cov() - batch.cov()).cwiseAbs().maxCoeff());
  out.push_back(check("recursion_vs_batch", diff <= 1e-8, "max abs difference " + fmt(diff)));

  const auto prior = gp_posterior_batch(m.prior, query);
  const double excess = (batch.cov().diagonal() - prior.cov().diagonal()).maxCoeff();
  out.push_back(check("variance_bound", excess <= 1e-10, "max variance increase " + fmt(excess)));

  if (!m.data.empty()) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.data.size(); ++i) {
      worst = std::max(worst, batch.cov()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    }
    if (m.prior.noise_var() == 0.0) {
      out.push_back(check("noise_free_interpolation", worst <= 1e-10,
                          "max posterior variance at data " + fmt(worst)));
    } else {
      const double half_width = 2.0 * std::sqrt(std::max(worst, 0.0));
      const double bound = 2.0 * std::sqrt(m.prior.noise_var()) * 1.05;
      out.push_back(check("band_at_data", half_width <= bound,
                          "max 2-sigma half-width " + fmt(half_width) + " <= " + fmt(bound)));
    }
  }
  return out;
}

std::vector<CheckResult> verify_parametric(const ParametricSpec& m, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::vector<Input> query;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    Input z(static_cast<Eigen::Index>(m.model.input_dim()));
    for (Eigen::Index d = 0; d < z.size(); ++d) z[d] = coord(rng);
    query.push_back(z);
  }
  const auto weights = parametric_posterior(m.model, m.data);
  const auto ws = parametric_predictive(m.model, weights, query);
  const auto fs = gp_posterior_batch(gp_update_all(parametric_pushforward(m.model), m.data), query);
  const double diff = std::max((ws.mean() - fs.mean()).cwiseAbs().maxCoeff(),
                               (ws.cov() - fs.cov()).cwiseAbs().maxCoeff());
  out.push_back(check("weight_vs_function_space", diff <= 1e-8, "max abs difference " + fmt(diff)));

  Gaussian seq = m.model.prior();
  for (const auto& obs : m.data) seq = parametric_update_one(m.model, seq, obs.x, obs.y);
  const double sdiff = std::max((seq.mean() - weights.mean()).cwiseAbs().maxCoeff(),
                                (seq.cov() - weights.cov()).cwiseAbs().maxCoeff());
  out.push_back(check("sequential_vs_batch", sdiff <= 1e-8, "max abs difference " + fmt(sdiff)));
  return out;
}

/// Filtering posteriors by summing the full joint over state paths; point measurements only.
std::vector<Dist> exhaustive_filter(const HmmModel& m, const std::vector<std::size_t>& observed) {
  const auto& chain = m.spec.chain;
  std::vector<Dist> out;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    std::vector<Rational> w(chain.spaces()[k].size(), Rational(0));
    std::vector<std::size_t> path(k + 1, 0);
    std::function<void(std::size_t, Rational)> walk = [&](std::size_t t, Rational p) {
      if (p == 0) return;
      if (t == k + 1) {
        w[path[k]] += p;
        return;
      }
      for (std::size_t s = 0; s < chain.spaces()[t].size(); ++s) {
        path[t] = s;
        Rational q = t == 0 ? m.spec.initial[s] : p * chain.transitions()[t - 1].at(path[t - 1], s);
        walk(t + 1, q * m.spec.sensors[t].at(s, observed[t]));
      }
    };
    walk(0, Rational(1));
    Rational total = 0;
    for (const auto& x : w) total += x;
    if (total == 0) throw Error(ErrorCode::ZeroMassEvent, "observation sequence has zero probability");
    for (auto& x : w) x /= total;
    out.emplace_back(chain.spaces()[k], std::move(w));
  }
  return out;
}

std::vector<CheckResult> verify_hmm(const HmmModel& m) {
  std::vector<CheckResult> out;
  const auto& chain = m.spec.chain;
  bool functorial = true;
  for (std::size_t i = 0; i < chain.length(); ++i) {
    functorial = functorial && chain_compose(chain, i, i) == identity_kernel(chain.spaces()[i]);
    for (std::size_t k = i; k < chain.length(); ++k) {
      const auto direct = chain_compose(chain, i, k);
      for (std::size_t j = i; j <= k; ++j) {
        functorial = functorial && direct == compose(chain_compose(chain, j, k), chain_compose(chain, i, j));
      }
    }
  }
  out.push_back(check("functoriality", functorial, "all bracketings of the chain agree"));

  std::vector<std::size_t> observed;
  for (std::size_t k = 0; k < m.measurements.size(); ++k) {
    const auto& w = m.measurements[k].weights();
    auto it = std::find(w.begin(), w.end(), Rational(1));
    if (it == w.end()) {
      out.push_back(check("filter_vs_exhaustive_joint", true, "skipped: non-point measurements"));
      return out;
    }
    observed.push_back(static_cast<std::size_t>(it - w.begin()));
  }
  const auto filtered = run_filter(m.spec, m.measurements);
  const auto oracle = exhaustive_filter(m, observed);
  out.push_back(check("filter_vs_exhaustive_joint", filtered == oracle,
                      std::to_string(observed.size()) + " steps compared exactly"));
  return out;
}

std::vector<CheckResult> verify_kalman(const KalmanModel& m) {
  std::vector<CheckResult> out;
  const auto trace = run_filter(m.model, m.measurements);
  // Gain-form recursion: K = P H^T (H P H^T + R)^{-1}.
  const auto& a = m.model.transition;
  const auto& h = m.model.observation;
  Eigen::VectorXd mean = m.model.initial.mean();
  Eigen::MatrixXd cov = m.model.initial.cov();
  double diff = 0.0;
  bool psd = true;
  bool shrinks = true;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    mean = a * mean;
    cov = a * cov * a.transpose() + m.model.process_cov;
    const Eigen::MatrixXd predicted = cov;
    const Eigen::MatrixXd s = h * cov * h.transpose() + m.model.observation_cov;
    const Eigen::MatrixXd gain = cov * h.transpose() * s.inverse();
    mean = mean + gain * (m.measurements[k] - h * mean);
    cov = cov - gain * h * cov;
    diff = std::max({diff, (mean - trace[k].mean()).cwiseAbs().maxCoeff(),
                     (cov - trace[k].cov()).cwiseAbs().maxCoeff()});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> post(trace[k].cov(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gap(predicted - trace[k].cov(), Eigen::EigenvaluesOnly);
    psd = psd && post.eigenvalues().minCoeff() >= -1e-10;
    shrinks = shrinks && gap.eigenvalues().minCoeff() >= -1e-10;
  }
  out.push_back(check("kalman_vs_gain_recursion", diff <= 1e-10, "max abs difference " + fmt(diff)));
  out.push_back(check("covariance_psd", psd, "posterior covariances are PSD"));
  out.push_back(check("loewner_shrinkage", shrinks, "posterior <= predicted covariance"));
  return out;
}

}  // namespace

Report run_model(const ModelFile& file, std::uint64_t seed) {
  Report report;
  report.kind = std::string(to_string(file.kind));
  report.digest = file.digest;
  report.seed = seed;
  Diagnostics diag;

  switch (file.kind) {
    case ModelKind::DiscreteBayes: {
      const auto m = build_discrete(file);
      const auto inf = infer(m.model, m.policy);
      report.zero_mass_atoms = inf.zero_mass_atoms;
      for (const auto& q : file.queries) {
        report.results.push_back(guarded(q, [&] { return run_discrete_query(m, inf, q); }));
      }
      break;
    }
    case ModelKind::Gp: {
      const auto m = build_gp(file);
      for (const auto& q : file.queries) {
        report.results.push_back(guarded(q, [&] { return run_gp_query(m, q, diag); }));
      }
      break;
    }
    case ModelKind::Parametric: {
      const auto m = build_parametric(file);
      for (const auto& q : file.queries) {
        report.results.push_back(guarded(q, [&] { return run_parametric_query(m, q, diag); }));
      }
      break;
    }
    case ModelKind::Hmm: {
      const auto m = build_hmm(file);
      for (const auto& q : file.queries) {
        report.results.push_back(guarded(q, [&] { return run_hmm_query(m, q); }));
      }
      break;
    }
    case ModelKind::Kalman: {
      const auto m = build_kalman(file);
      for (const auto& q : file.queries) {
        report.results.push_back(guarded(q, [&] { return run_kalman_query(m, q, diag); }));
      }
      break;
    }
  }
  report.jitter_applied = diag.jitter_applied;
  return report;
}

std::vector<CheckResult> verify_model(const ModelFile& file, std::uint64_t seed) {
  switch (file.kind) {
    case ModelKind::DiscreteBayes: return verify_discrete(build_discrete(file));
    case ModelKind::Gp: return verify_gp(build_gp(file), seed);
    case ModelKind::Parametric: return verify_parametric(build_parametric(file), seed);
    case ModelKind::Hmm: return verify_hmm(build_hmm(file));
    case ModelKind::Kalman: return verify_kalman(build_kalman(file));
  }
  return {};
}

Report run_example(std::string_view name, std::uint64_t seed) {
  return run_model(parse_model(example_model(name)), seed);
}

}  // namespace kernelcat::cli
