#include "kernelcat/finite.hpp"

#include <algorithm>
#include <numeric>

#include "kernelcat/error.hpp"

namespace kernelcat {
namespace {

void require_same(const FiniteSpace& expected, const FiniteSpace& actual, std::string_view what) {
  if (!(expected == actual)) {
    throw Error(ErrorCode::DomainMismatch, std::string(what) + ": space '" + actual.name() +
                                               "' does not match '" + expected.name() + "'");
  }
}

void check_distribution(const FiniteSpace& space, const std::vector<Rational>& weights,
                        std::string_view context) {
  if (weights.size() != space.size()) {
    throw Error(ErrorCode::InvalidDistribution,
                std::string(context) + ": expected " + std::to_string(space.size()) +
                    " weights over '" + space.name() + "', got " + std::to_string(weights.size()));
  }
  Rational total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0) {
      throw Error(ErrorCode::InvalidDistribution, std::string(context) + ": negative weight on '" +
                                                      space.atom(i) + "'");
    }
    total += weights[i];
  }
  if (total != 1) {
    throw Error(ErrorCode::InvalidDistribution,
                std::string(context) + ": weights sum to " + format_rational(total) + ", not 1");
  }
}

}  // namespace

FiniteSpace::FiniteSpace(std::string name, std::vector<std::string> atoms) {
  if (atoms.empty()) {
    throw Error(ErrorCode::EmptySpace, "space '" + name + "' has no atoms");
  }
  auto impl = std::make_shared<Impl>();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].empty() || atoms[i].find(kProductSeparator) != std::string::npos) {
      throw Error(ErrorCode::BadLabel, "atom label '" + atoms[i] + "' in space '" + name +
                                           "' is empty or contains '|'");
    }
    if (!impl->index.emplace(atoms[i], i).second) {
      throw Error(ErrorCode::DuplicateAtom,
                  "duplicate atom '" + atoms[i] + "' in space '" + name + "'");
    }
  }
  impl->name = std::move(name);
  impl->atoms = std::move(atoms);
  impl_ = std::move(impl);
}

FiniteSpace FiniteSpace::product(const std::vector<FiniteSpace>& factors) {
  if (factors.empty()) {
    throw Error(ErrorCode::EmptySpace, "product of zero spaces");
  }
  std::vector<FiniteSpace> flat;
  for (const auto& f : factors) {
    for (std::size_t i = 0; i < f.factor_count(); ++i) flat.push_back(f.factor(i));
  }
  if (flat.size() == 1) return flat.front();

  auto impl = std::make_shared<Impl>();
  std::vector<std::string> names;
  for (const auto& f : factors) names.push_back(f.name());
  impl->name = names.front();
  for (std::size_t i = 1; i < names.size(); ++i) impl->name += "*" + names[i];

  std::vector<std::string> atoms{""};
  for (std::size_t k = 0; k < flat.size(); ++k) {
    std::vector<std::string> next;
    next.reserve(atoms.size() * flat[k].size());
    for (const auto& prefix : atoms) {
      for (const auto& a : flat[k].atoms()) {
        next.push_back(k == 0 ? a : prefix + kProductSeparator + a);
      }
    }
    atoms = std::move(next);
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) impl->index.emplace(atoms[i], i);
  impl->atoms = std::move(atoms);
  impl->factors = std::move(flat);
  return FiniteSpace(std::shared_ptr<const Impl>(std::move(impl)));
}

std::optional<std::size_t> FiniteSpace::find(std::string_view atom) const {
  auto it = impl_->index.find(atom);
  if (it == impl_->index.end()) return std::nullopt;
  return it->second;
}

std::size_t FiniteSpace::index_of(std::string_view atom) const {
  if (auto i = find(atom)) return *i;
  throw Error(ErrorCode::UnknownAtom,
              "atom '" + std::string(atom) + "' is not in space '" + name() + "'");
}

std::size_t FiniteSpace::factor_count() const {
  return is_product() ? impl_->factors.size() : 1;
}

FiniteSpace FiniteSpace::factor(std::size_t i) const {
  if (i >= factor_count()) {
    throw Error(ErrorCode::BadFactor, "factor " + std::to_string(i) + " out of range for '" +
                                          name() + "' with " + std::to_string(factor_count()) +
                                          " factors");
  }
  return is_product() ? impl_->factors[i] : *this;
}

std::vector<std::size_t> FiniteSpace::coordinates(std::size_t atom_index) const {
  if (!is_product()) return {atom_index};
  std::vector<std::size_t> coords(impl_->factors.size());
  for (std::size_t k = impl_->factors.size(); k-- > 0;) {
    const auto n = impl_->factors[k].size();
    coords[k] = atom_index % n;
    atom_index /= n;
  }
  return coords;
}

std::size_t FiniteSpace::index_from_coordinates(std::span<const std::size_t> coords) const {
  if (!is_product()) return coords[0];
  std::size_t index = 0;
  for (std::size_t k = 0; k < impl_->factors.size(); ++k) {
    index = index * impl_->factors[k].size() + coords[k];
  }
  return index;
}

bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
  return a.impl_ == b.impl_ || a.impl_->atoms == b.impl_->atoms;
}

Dist::Dist(FiniteSpace space, std::vector<Rational> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  check_distribution(space_, weights_, "distribution on '" + space_.name() + "'");
}

Kernel::Kernel(FiniteSpace domain, FiniteSpace codomain, Matrix rows)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), rows_(std::move(rows)) {
  if (rows_.size() != domain_.size()) {
    throw Error(ErrorCode::InvalidDistribution,
                "kernel from '" + domain_.name() + "' needs " + std::to_string(domain_.size()) +
                    " rows, got " + std::to_string(rows_.size()));
  }
  for (std::size_t x = 0; x < rows_.size(); ++x) {
    check_distribution(codomain_, rows_[x], "kernel row '" + domain_.atom(x) + "'");
  }
}

FiniteSpace make_space(std::string name, std::vector<std::string> atoms) {
  return FiniteSpace(std::move(name), std::move(atoms));
}

Dist dirac(const FiniteSpace& space, std::string_view atom) {
  std::vector<Rational> w(space.size(), Rational(0));
  w[space.index_of(atom)] = 1;
  return Dist(space, std::move(w));
}

Dist uniform(const FiniteSpace& space) {
  return Dist(space, std::vector<Rational>(space.size(), Rational(1, space.size())));
}

Kernel deterministic_kernel(const FiniteSpace& domain, const FiniteSpace& codomain,
                            const std::map<std::string, std::string, std::less<>>& map) {
  Kernel::Matrix rows(domain.size(), std::vector<Rational>(codomain.size(), Rational(0)));
  for (std::size_t x = 0; x < domain.size(); ++x) {
    auto it = map.find(domain.atom(x));
    if (it == map.end()) {
      throw Error(ErrorCode::IncompleteMap, "map has no image for atom '" + domain.atom(x) + "'");
    }
    rows[x][codomain.index_of(it->second)] = 1;
  }
  return Kernel(domain, codomain, std::move(rows));
}

Kernel identity_kernel(const FiniteSpace& space) {
  Kernel::Matrix rows(space.size(), std::vector<Rational>(space.size(), Rational(0)));
  for (std::size_t i = 0; i < space.size(); ++i) rows[i][i] = 1;
  return Kernel(space, space, std::move(rows));
}

Kernel projection_kernel(const FiniteSpace& product, std::size_t factor) {
  return projection_kernel(product, std::vector<std::size_t>{factor});
}

Kernel projection_kernel(const FiniteSpace& product, const std::vector<std::size_t>& factors) {
  std::vector<FiniteSpace> target_factors;
  for (auto f : factors) target_factors.push_back(product.factor(f));
  const auto target = FiniteSpace::product(target_factors);
  Kernel::Matrix rows(product.size(), std::vector<Rational>(target.size(), Rational(0)));
  std::vector<std::size_t> sub(factors.size());
  for (std::size_t a = 0; a < product.size(); ++a) {
    const auto coords = product.coordinates(a);
    for (std::size_t k = 0; k < factors.size(); ++k) sub[k] = coords[factors[k]];
    rows[a][target.index_from_coordinates(sub)] = 1;
  }
  return Kernel(product, target, std::move(rows));
}

Kernel constant_kernel(const FiniteSpace& domain, const Dist& q) {
  Kernel::Matrix rows(domain.size(), std::vector<Rational>(q.weights().begin(), q.weights().end()));
  return Kernel(domain, q.space(), std::move(rows));
}

Kernel compose(const Kernel& second, const Kernel& first) {
  require_same(second.domain(), first.codomain(), "compose");
  const auto& a = first.matrix();
  const auto& b = second.matrix();
  Kernel::Matrix rows(first.domain().size(),
                      std::vector<Rational>(second.codomain().size(), Rational(0)));
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      if (a[x][y] == 0) continue;
      for (std::size_t z = 0; z < b[y].size(); ++z) rows[x][z] += a[x][y] * b[y][z];
    }
  }
  return Kernel(first.domain(), second.codomain(), std::move(rows));
}

Dist pushforward(const Dist& dist, const Kernel& kernel) {
  require_same(kernel.domain(), dist.space(), "pushforward");
  std::vector<Rational> out(kernel.codomain().size(), Rational(0));
  for (std::size_t x = 0; x < dist.space().size(); ++x) {
    if (dist[x] == 0) continue;
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += dist[x] * kernel.at(x, y);
  }
  return Dist(kernel.codomain(), std::move(out));
}

Dist joint_from_prior_and_kernel(const Dist& prior, const Kernel& h) {
  require_same(h.domain(), prior.space(), "joint_from_prior_and_kernel");
  const auto joint_space = FiniteSpace::product({prior.space(), h.codomain()});
  std::vector<Rational> w;
  w.reserve(joint_space.size());
  for (std::size_t x = 0; x < prior.space().size(); ++x) {
    for (std::size_t y = 0; y < h.codomain().size(); ++y) w.push_back(prior[x] * h.at(x, y));
  }
  return Dist(joint_space, std::move(w));
}

Dist tensor_independent(const Dist& p, const Dist& q) {
  return joint_from_prior_and_kernel(p, constant_kernel(p.space(), q));
}

Kernel graph_kernel(const Kernel& q) {
  const auto target = FiniteSpace::product({q.domain(), q.codomain()});
  const auto ny = q.codomain().size();
  Kernel::Matrix rows(q.domain().size(), std::vector<Rational>(target.size(), Rational(0)));
  for (std::size_t x = 0; x < q.domain().size(); ++x) {
    for (std::size_t y = 0; y < ny; ++y) rows[x][x * ny + y] = q.at(x, y);
  }
  return Kernel(q.domain(), target, std::move(rows));
}

Dist marginal(const Dist& joint, std::size_t factor) {
  return marginal(joint, std::vector<std::size_t>{factor});
}

Dist marginal(const Dist& joint, const std::vector<std::size_t>& factors) {
  return pushforward(joint, projection_kernel(joint.space(), factors));
}

Rational mass(const Dist& joint, const Event& event) {
  const auto& space = joint.space();
  // allowed[c][i]: atom i of factor c is admitted by the event.
  std::vector<std::vector<bool>> allowed;
  for (std::size_t c = 0; c < space.factor_count(); ++c) {
    allowed.emplace_back(space.factor(c).size(), true);
  }
  for (const auto& part : event) {
    const auto factor = space.factor(part.factor);
    std::vector<bool> keep(factor.size(), false);
    for (const auto& a : part.atoms) keep[factor.index_of(a)] = true;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      allowed[part.factor][i] = allowed[part.factor][i] && keep[i];
    }
  }
  Rational total = 0;
  for (std::size_t a = 0; a < space.size(); ++a) {
    if (joint[a] == 0) continue;
    const auto coords = space.coordinates(a);
    bool in = true;
    for (std::size_t c = 0; c < coords.size() && in; ++c) in = allowed[c][coords[c]];
    if (in) total += joint[a];
  }
  return total;
}

}  // namespace kernelcat
