#include "kernelcat/bayes.hpp"

#include "kernelcat/error.hpp"

namespace kernelcat {

BayesModel::BayesModel(Dist prior, Kernel sampling)
    : prior_(std::move(prior)), sampling_(std::move(sampling)) {
  if (!(sampling_.domain() == prior_.space())) {
    throw Error(ErrorCode::DomainMismatch, "sampling domain '" + sampling_.domain().name() +
                                               "' does not match prior space '" +
                                               prior_.space().name() + "'");
  }
}

InferenceResult infer(const BayesModel& model, ZeroMassPolicy policy) {
  const auto& h = model.hypothesis();
  const auto& d = model.data();
  auto evidence = pushforward(model.prior(), model.sampling());

  std::vector<std::string> zero_mass;
  Kernel::Matrix rows(d.size(), std::vector<Rational>(h.size(), Rational(0)));
  for (std::size_t b = 0; b < d.size(); ++b) {
    if (evidence[b] == 0) {
      zero_mass.push_back(d.atom(b));
      for (std::size_t a = 0; a < h.size(); ++a) {
        rows[b][a] = policy == ZeroMassPolicy::Uniform ? Rational(1, h.size()) : model.prior()[a];
      }
      continue;
    }
    for (std::size_t a = 0; a < h.size(); ++a) {
      rows[b][a] = model.sampling().at(a, b) * model.prior()[a] / evidence[b];
    }
  }
  return InferenceResult{Kernel(d, h, std::move(rows)), std::move(evidence), std::move(zero_mass),
                         policy};
}

Dist posterior(const InferenceResult& result, const Dist& measurement) {
  if (!(measurement.space() == result.evidence.space())) {
    throw Error(ErrorCode::DomainMismatch, "measurement space '" + measurement.space().name() +
                                               "' is not the data space '" +
                                               result.evidence.space().name() + "'");
  }
  std::vector<std::string> offending;
  for (const auto& atom : result.zero_mass_atoms) {
    if (measurement.weight(atom) != 0) offending.push_back(atom);
  }
  if (!offending.empty()) {
    std::string list;
    for (const auto& a : offending) list += (list.empty() ? "" : ", ") + a;
    throw NotAbsolutelyContinuousError(
        offending, "measurement puts mass on zero-evidence data atoms: " + list);
  }
  return pushforward(measurement, result.inference);
}

Dist extend_joint(const Dist& joint, const Kernel& next) {
  return joint_from_prior_and_kernel(joint, next);
}

Rational conditional_query(const Dist& joint, const Event& given, const Event& target) {
  const auto given_mass = mass(joint, given);
  if (given_mass == 0) {
    throw Error(ErrorCode::ZeroMassEvent, "conditioning event has zero mass");
  }
  Event both = given;
  both.insert(both.end(), target.begin(), target.end());
  return mass(joint, both) / given_mass;
}

Rational verify_product_rule(const BayesModel& model, const Kernel& inference) {
  if (!(inference.domain() == model.data()) || !(inference.codomain() == model.hypothesis())) {
    throw Error(ErrorCode::DomainMismatch, "inference kernel must map the data space '" +
                                               model.data().name() + "' to the hypothesis space '" +
                                               model.hypothesis().name() + "'");
  }
  const auto evidence = pushforward(model.prior(), model.sampling());
  Rational worst = 0;
  for (std::size_t a = 0; a < model.hypothesis().size(); ++a) {
    for (std::size_t b = 0; b < model.data().size(); ++b) {
      auto r = inference.at(b, a) * evidence[b] - model.sampling().at(a, b) * model.prior()[a];
      if (r < 0) r = -r;
      if (r > worst) worst = r;
    }
  }
  return worst;
}

}  // namespace kernelcat
