#include "kernelcat/function_space.hpp"

#include "kernelcat/error.hpp"

namespace kernelcat {

FunctionSpace function_space(const FiniteSpace& x, const FiniteSpace& y, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (count > cap / y.size()) {
      throw Error(ErrorCode::SpaceTooLarge, "function space " + y.name() + "^" + x.name() +
                                                " exceeds the cap of " + std::to_string(cap) +
                                                " atoms");
    }
    count *= y.size();
  }

  std::vector<std::vector<std::size_t>> tables;
  std::vector<std::string> labels;
  tables.reserve(count);
  labels.reserve(count);
  std::vector<std::size_t> table(x.size(), 0);
  for (std::size_t f = 0; f < count; ++f) {
    std::string label = "(";
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (i > 0) label += ',';
      label += y.atom(table[i]);
    }
    label += ')';
    labels.push_back(std::move(label));
    tables.push_back(table);
    // Odometer increment, last base atom fastest.
    for (std::size_t i = table.size(); i-- > 0;) {
      if (++table[i] < y.size()) break;
      table[i] = 0;
    }
  }
  auto space = FiniteSpace(y.name() + "^" + x.name(), std::move(labels));
  return FunctionSpace(x, y, std::move(space), std::move(tables));
}

std::size_t FunctionSpace::index_of_table(const std::vector<std::size_t>& table) const {
  if (table.size() != base_.size()) {
    throw Error(ErrorCode::IncompleteMap, "function table must cover every base atom");
  }
  std::size_t index = 0;
  for (auto v : table) index = index * target_.size() + v;
  return index;
}

Kernel eval_kernel(const FunctionSpace& fs, std::string_view x) {
  const auto xi = fs.base().index_of(x);
  Kernel::Matrix rows(fs.space().size(), std::vector<Rational>(fs.target().size(), Rational(0)));
  for (std::size_t f = 0; f < rows.size(); ++f) rows[f][fs.table(f)[xi]] = 1;
  return Kernel(fs.space(), fs.target(), std::move(rows));
}

Kernel process_to_conditional(const FunctionSpace& fs, const Dist& process) {
  if (!(process.space() == fs.space())) {
    throw Error(ErrorCode::DomainMismatch,
                "process must live on the function space '" + fs.space().name() + "'");
  }
  Kernel::Matrix rows;
  for (const auto& x : fs.base().atoms()) {
    const auto row = pushforward(process, eval_kernel(fs, x));
    rows.emplace_back(row.weights().begin(), row.weights().end());
  }
  return Kernel(fs.base(), fs.target(), std::move(rows));
}

Dist independent_process_from_conditional(const FunctionSpace& fs, const Kernel& conditional) {
  if (!(conditional.domain() == fs.base()) || !(conditional.codomain() == fs.target())) {
    throw Error(ErrorCode::DomainMismatch, "conditional must map '" + fs.base().name() +
                                               "' to '" + fs.target().name() + "'");
  }
  std::vector<Rational> w(fs.space().size());
  for (std::size_t f = 0; f < w.size(); ++f) {
    Rational p = 1;
    const auto& table = fs.table(f);
    for (std::size_t x = 0; x < table.size() && p != 0; ++x) p *= conditional.at(x, table[x]);
    w[f] = p;
  }
  return Dist(fs.space(), std::move(w));
}

}  // namespace kernelcat
