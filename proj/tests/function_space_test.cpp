#include <gtest/gtest.h>

#include "kernelcat/error.hpp"
#include "kernelcat/function_space.hpp"
#include "support.hpp"

namespace kernelcat {
namespace {

Rational r(long p, long q = 1) { return Rational(p) / q; }

FiniteSpace two() { return make_space("X", {"0", "1"}); }
FiniteSpace abc() { return make_space("Y", {"a", "b", "c"}); }

Dist fn_dist(const FunctionSpace& fs, std::vector<std::pair<std::string, Rational>> entries) {
  std::vector<Rational> w(fs.space().size(), Rational(0));
  for (const auto& [label, p] : entries) w[fs.space().index_of(label)] = p;
  return Dist(fs.space(), w);
}

TEST(FunctionSpace, Enumeration) {
  const auto fs = function_space(two(), abc());
  EXPECT_EQ(fs.space().size(), 9u);
  EXPECT_EQ(fs.space().atom(0), "(a,a)");
  EXPECT_EQ(fs.space().atom(5), "(b,c)");
  EXPECT_EQ(fs.table(5), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(fs.index_of_table({1, 2}), 5u);

  EXPECT_EQ(function_space(make_space("X", {"only"}), abc()).space().size(), 3u);
  EXPECT_EQ(function_space(two(), make_space("Y", {"y"})).space().size(), 1u);
}

TEST(FunctionSpace, CapIsEnforced) {
  const auto ten = make_space("T", {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"});
  try {
    function_space(ten, ten, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpaceTooLarge);
  }
}

TEST(EvalKernel, ReadsTheTable) {
  const auto fs = function_space(two(), abc());
  const auto ev1 = eval_kernel(fs, "1");
  EXPECT_EQ(ev1.row("(b,c)"), dirac(abc(), "c"));
  const auto ev0 = eval_kernel(fs, "0");
  EXPECT_EQ(ev0.row("(b,c)"), dirac(abc(), "b"));
  for (std::size_t f = 0; f < fs.space().size(); ++f) {
    EXPECT_EQ(ev0.row(f), dirac(abc(), abc().atom(fs.table(f)[0])));
    EXPECT_EQ(ev1.row(f), dirac(abc(), abc().atom(fs.table(f)[1])));
  }
  EXPECT_EQ(ev1.row("(a,a)"), ev0.row("(a,a)"));
}

TEST(WeakClosedness, DistinctProcessesShareAConditional) {
  const auto fs = function_space(two(), abc());
  const auto p = fn_dist(fs, {{"(b,c)", r(1, 2)}, {"(c,b)", r(1, 2)}});
  const auto q = fn_dist(fs, {{"(b,b)", r(1, 2)}, {"(c,c)", r(1, 2)}});
  ASSERT_FALSE(p == q);
  const auto pbar = process_to_conditional(fs, p);
  const auto qbar = process_to_conditional(fs, q);
  EXPECT_EQ(pbar, qbar);
  const std::vector<Rational> row{r(0), r(1, 2), r(1, 2)};
  EXPECT_EQ(pbar.matrix(), (Kernel::Matrix{row, row}));

  const auto indep = independent_process_from_conditional(fs, pbar);
  EXPECT_EQ(indep, fn_dist(fs, {{"(b,b)", r(1, 4)}, {"(b,c)", r(1, 4)}, {"(c,b)", r(1, 4)}, {"(c,c)", r(1, 4)}}));
  EXPECT_FALSE(indep == p);
  EXPECT_EQ(process_to_conditional(fs, indep), pbar);
}

TEST(ProcessConditional, DiracAndDeterministicRoundTrip) {
  const auto fs = function_space(two(), abc());
  const auto f = dirac(fs.space(), "(c,a)");
  const auto det = deterministic_kernel(two(), abc(), {{"0", "c"}, {"1", "a"}});
  EXPECT_EQ(process_to_conditional(fs, f), det);
  EXPECT_EQ(independent_process_from_conditional(fs, det), f);
  const Kernel flat(two(), abc(), {{r(1, 3), r(1, 3), r(1, 3)}, {r(1, 3), r(1, 3), r(1, 3)}});
  EXPECT_EQ(independent_process_from_conditional(fs, flat), uniform(fs.space()));
}

TEST(ProcessConditional, RandomConditionalsRoundTrip) {
  testing::Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = testing::random_space(rng, "x", 3);
    const auto y = testing::random_space(rng, "y", 3);
    const auto fs = function_space(x, y);
    const auto c = testing::random_kernel(rng, x, y);
    EXPECT_EQ(process_to_conditional(fs, independent_process_from_conditional(fs, c)), c);
  }
}

}  // namespace
}  // namespace kernelcat
