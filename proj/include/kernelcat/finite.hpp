#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kernelcat/rational.hpp"

namespace kernelcat {

/// Separator between factor labels in product-space atoms ("u1|b").
inline constexpr char kProductSeparator = '|';

/// A named finite measurable space with the full powerset as its sigma-algebra.
///
/// Product spaces are FiniteSpaces that additionally remember their (flattened)
/// factors. Nesting is always flattened, so (U x B1) x B2 and U x (B1 x B2) both
/// have factors [U, B1, B2] and atoms "u|b|r" in lexicographic order. Values are
/// immutable and cheap to copy.
class FiniteSpace {
 public:
  /// Base space. Labels must be distinct, nonempty of '|' and the list nonempty.
  FiniteSpace(std::string name, std::vector<std::string> atoms);

  /// Product of the given spaces, first factor most significant.
  static FiniteSpace product(const std::vector<FiniteSpace>& factors);

  const std::string& name() const { return impl_->name; }
  std::span<const std::string> atoms() const { return impl_->atoms; }
  std::size_t size() const { return impl_->atoms.size(); }
  const std::string& atom(std::size_t index) const { return impl_->atoms.at(index); }

  std::optional<std::size_t> find(std::string_view atom) const;
  /// Throws Error(UnknownAtom).
  std::size_t index_of(std::string_view atom) const;

  bool is_product() const { return !impl_->factors.empty(); }
  /// 1 for a base space.
  std::size_t factor_count() const;
  /// The i-th factor; a base space is its own single factor.
  FiniteSpace factor(std::size_t i) const;
  /// Per-factor atom indices of a product atom.
  std::vector<std::size_t> coordinates(std::size_t atom_index) const;
  std::size_t index_from_coordinates(std::span<const std::size_t> coords) const;

  /// Spaces compare equal when their atom lists (and hence indexing) coincide.
  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b);

 private:
  struct Impl {
    std::string name;
    std::vector<std::string> atoms;
    std::map<std::string, std::size_t, std::less<>> index;
    std::vector<FiniteSpace> factors;
  };
  explicit FiniteSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// Exact probability vector over a space's atoms; weights are nonnegative and sum to 1.
class Dist {
 public:
  /// Throws Error(InvalidDistribution) on a wrong length, a negative weight or a bad sum.
  Dist(FiniteSpace space, std::vector<Rational> weights);

  const FiniteSpace& space() const { return space_; }
  std::span<const Rational> weights() const { return weights_; }
  const Rational& operator[](std::size_t i) const { return weights_.at(i); }
  const Rational& weight(std::string_view atom) const { return weights_[space_.index_of(atom)]; }

  friend bool operator==(const Dist& a, const Dist& b) {
    return a.space_ == b.space_ && a.weights_ == b.weights_;
  }

 private:
  FiniteSpace space_;
  std::vector<Rational> weights_;
};

/// Row-stochastic exact kernel T(y|x) from domain to codomain.
class Kernel {
 public:
  using Matrix = std::vector<std::vector<Rational>>;

  /// Throws Error(InvalidDistribution) when a row is not a distribution over the codomain.
  Kernel(FiniteSpace domain, FiniteSpace codomain, Matrix rows);

  const FiniteSpace& domain() const { return domain_; }
  const FiniteSpace& codomain() const { return codomain_; }
  const Matrix& matrix() const { return rows_; }

  /// T(y|x) by index.
  const Rational& at(std::size_t x, std::size_t y) const { return rows_.at(x).at(y); }
  const Rational& at(std::string_view x, std::string_view y) const {
    return rows_[domain_.index_of(x)][codomain_.index_of(y)];
  }
  Dist row(std::size_t x) const { return Dist(codomain_, rows_.at(x)); }
  Dist row(std::string_view x) const { return row(domain_.index_of(x)); }

  friend bool operator==(const Kernel& a, const Kernel& b) {
    return a.domain_ == b.domain_ && a.codomain_ == b.codomain_ && a.rows_ == b.rows_;
  }

 private:
  FiniteSpace domain_;
  FiniteSpace codomain_;
  Matrix rows_;
};

/// One conjunct of an event on a product space: factor coordinate lies in `atoms`.
struct FactorEvent {
  std::size_t factor = 0;
  std::vector<std::string> atoms;
};

/// Conjunction of per-factor constraints; an empty event is the whole space.
using Event = std::vector<FactorEvent>;

FiniteSpace make_space(std::string name, std::vector<std::string> atoms);

Dist dirac(const FiniteSpace& space, std::string_view atom);
Dist uniform(const FiniteSpace& space);

/// delta_f for the function given as a label table; throws IncompleteMap if partial.
Kernel deterministic_kernel(const FiniteSpace& domain, const FiniteSpace& codomain,
                            const std::map<std::string, std::string, std::less<>>& map);
Kernel identity_kernel(const FiniteSpace& space);
/// delta of the projection of a product space onto one factor.
Kernel projection_kernel(const FiniteSpace& product, std::size_t factor);
/// delta of the projection onto several factors, in the listed order.
Kernel projection_kernel(const FiniteSpace& product, const std::vector<std::size_t>& factors);
/// Kernel constant in x: every row equals q. Factors through the terminal space.
Kernel constant_kernel(const FiniteSpace& domain, const Dist& q);

/// (second o first)(z|x) = sum_y second(z|y) first(y|x).
Kernel compose(const Kernel& second, const Kernel& first);
Dist pushforward(const Dist& dist, const Kernel& kernel);

/// J(x,y) = prior(x) h(y|x) on prior.space x h.codomain.
Dist joint_from_prior_and_kernel(const Dist& prior, const Kernel& h);
Dist tensor_independent(const Dist& p, const Dist& q);
/// Kernel tensor x -> (x, y) ~ q(.|x): the graph kernel Gamma_q.
Kernel graph_kernel(const Kernel& q);

Dist marginal(const Dist& joint, std::size_t factor);
Dist marginal(const Dist& joint, const std::vector<std::size_t>& factors);

/// Mass of an event; atom labels in the event must belong to their factor.
Rational mass(const Dist& joint, const Event& event);

}  // namespace kernelcat
