#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace mcsubmod;
namespace ts = testing_support;

namespace {

Chain const &cw10()
{
  static Chain const chain = [] {
    auto [p, pi] = curie_weiss_chain({});
    return Chain(std::move(p), std::move(pi));
  }();
  return chain;
}

SetFunction<SubsetMask> modular(std::vector<double> w)
{
  return [w](SubsetMask const &s) {
    double sum = 0.0;
    for (auto e : s.elements())
    {
      sum += w[e];
    }
    return sum;
  };
}

}  // namespace

TEST(Greedy, ZeroBudgetIsEmpty)
{
  auto r = greedy(modular({1, 2, 3}), SubsetMask::full(3), 0, Constraint::AtMost);
  EXPECT_TRUE(r.chosen.empty());
  EXPECT_EQ(r.value, 0.0);
}

TEST(Greedy, ModularPicksLargest)
{
  auto f = modular({0.5, 3.0, -1.0, 2.0});
  auto r = greedy(f, SubsetMask::full(4), 3, Constraint::AtMost);
  EXPECT_EQ(r.chosen, SubsetMask::of(4, {1, 3, 0}));
  auto forced = greedy(f, SubsetMask::full(4), 4, Constraint::Exactly);
  EXPECT_EQ(forced.chosen, SubsetMask::full(4));
  auto bf = brute_force_opt(f, SubsetMask::full(4), 3, Constraint::AtMost);
  EXPECT_DOUBLE_EQ(bf.value, r.value);
}

TEST(Greedy, AtMostStopsWhenNothingImproves)
{
  auto r = greedy(modular({1.0, -1.0, -2.0}), SubsetMask::full(3), 3, Constraint::AtMost);
  EXPECT_EQ(r.chosen, SubsetMask::of(3, {0}));
}

TEST(Greedy, TiesResolveToSmallestIndex)
{
  auto r = greedy(modular({1.0, 1.0, 1.0}), SubsetMask::full(3), 1, Constraint::AtMost);
  EXPECT_EQ(r.chosen, SubsetMask::of(3, {0}));
}

TEST(Greedy, CurieWeissEntropyTable)
{
  auto obj = build_subset_objective("entropy", cw10());
  auto r1 = greedy(obj, 1);
  EXPECT_EQ(r1.chosen, SubsetMask::of(10, {0}));
  EXPECT_NEAR(r1.value, 0.29085, 1e-4);
  auto r2 = greedy(obj, 2);
  EXPECT_EQ(r2.chosen, SubsetMask::of(10, {0, 9}));
  EXPECT_NEAR(r2.value, 0.57371, 1e-4);
  EXPECT_NEAR(greedy(obj, 10).value, 2.29109, 1e-4);
}

TEST(DistortedGreedy, ZeroBudget)
{
  auto obj = build_subset_objective("entropy", cw10());
  auto r = distorted_greedy(obj, 0);
  EXPECT_TRUE(r.chosen.empty());
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.trajectory.empty());
}

TEST(DistortedGreedy, CurieWeissEntropyValue)
{
  auto obj = build_subset_objective("entropy", cw10());
  auto r = distorted_greedy(obj, 8);
  EXPECT_EQ(r.chosen.size(), 8u);
  EXPECT_NEAR(r.value, 1.98458, 1e-4);
}

TEST(DistortedGreedy, RequiresDecomposition)
{
  auto obj = build_subset_objective("dist2stat-monotone", cw10());
  EXPECT_THROW(distorted_greedy(obj, 2), InvalidArgument);
}

TEST(GeneralizedDistortedGreedy, CurieWeissKEntropy)
{
  Partition v(std::vector<SubsetMask>{SubsetMask::of(10, {0, 1, 2, 3}), SubsetMask::of(10, {4, 5, 6}),
                                      SubsetMask::of(10, {7, 8, 9})});
  auto obj = build_partition_objective("k-entropy", cw10(), v);
  auto r3 = generalized_distorted_greedy(obj, 3);
  EXPECT_EQ(r3.chosen.label(), "1|7|10");
  EXPECT_NEAR(r3.value, 0.86152, 1e-4);
  EXPECT_NEAR(generalized_distorted_greedy(obj, 10).value, 2.72011, 1e-4);
  auto r0 = generalized_distorted_greedy(obj, 0);
  EXPECT_TRUE(r0.chosen.empty());
  EXPECT_EQ(r0.chosen.k(), 3u);
}

TEST(GeneralizedDistortedGreedy, ExhaustedCeilingIsNoOp)
{
  std::mt19937_64 rng(31);
  auto [p, pi] = ts::random_dense_chain(rng, {2, 2, 2});
  Chain chain(std::move(p), std::move(pi));
  Partition v(std::vector<SubsetMask>{SubsetMask::of(3, {0}), SubsetMask::of(3, {2})});
  auto obj = build_partition_objective("k-entropy", chain, v);
  auto r = generalized_distorted_greedy(obj, 3);
  EXPECT_LE(r.chosen.size(), 2u);
  EXPECT_TRUE(r.chosen.preceq(v));
}

TEST(LocalSearch, ModularReturnsFullSet)
{
  auto r = local_search(modular({1.0, 2.0, 0.5, 3.0}), SubsetMask::full(4), 0.1);
  EXPECT_EQ(r.chosen, SubsetMask::full(4));
  EXPECT_DOUBLE_EQ(r.value, 6.5);
}

TEST(LocalSearch, SingletonMaximizer)
{
  SetFunction<SubsetMask> f = [](SubsetMask const &s) {
    if (s == SubsetMask::of(4, {2}))
    {
      return 5.0;
    }
    return s.empty() ? 0.0 : 1.0 / static_cast<double>(s.size());
  };
  auto r = local_search(f, SubsetMask::full(4), 0.1);
  EXPECT_EQ(r.chosen, SubsetMask::of(4, {2}));
  EXPECT_DOUBLE_EQ(r.value, 5.0);
}

TEST(LocalSearch, RejectsNonPositiveEpsilon)
{
  EXPECT_THROW(local_search(modular({1.0}), SubsetMask::full(1), 0.0), InvalidArgument);
}

TEST(LocalSearch, FactorizabilityBound)
{
  auto [p, pi] = curie_weiss_chain({6, 10.0, 1.0});
  Chain chain(std::move(p), std::move(pi));
  auto obj = build_subset_objective("dist2fact", chain);
  double const eps = 0.1;
  auto r = local_search(obj.f, obj.ground, eps);
  auto opt = brute_force_opt(obj.f, obj.ground, 6, Constraint::AtMost);
  EXPECT_GE(r.value, (0.5 - eps / 6.0) * opt.value - 1e-12);
  EXPECT_NEAR(r.value, obj.f(r.chosen), 1e-15);
}

TEST(BatchGreedy, CurieWeissStationarity)
{
  auto obj = build_subset_objective("dist2stat-monotone", cw10());
  std::vector<std::size_t> q1{1};
  auto r1 = batch_greedy(obj.f, obj.ground, 1, q1);
  EXPECT_NEAR(r1.value, 0.40245, 1e-4);
  // coordinates 5 and 6 tie exactly by reflection symmetry
  EXPECT_TRUE(r1.chosen == SubsetMask::of(10, {4}) || r1.chosen == SubsetMask::of(10, {5}));
  auto q2 = pairs_batches(2);
  auto r2 = batch_greedy(obj.f, obj.ground, 2, q2);
  EXPECT_EQ(r2.chosen, SubsetMask::of(10, {4, 5}));
  EXPECT_NEAR(r2.value, 0.80739, 1e-4);
  EXPECT_NEAR(obj.f(obj.ground), 4.46975, 1e-4);
}

TEST(BatchGreedy, BatchSizesMustSumToM)
{
  std::vector<std::size_t> q{1, 1};
  EXPECT_THROW(batch_greedy(modular({1, 2, 3}), SubsetMask::full(3), 3, q), InvalidArgument);
  std::vector<std::size_t> z{0, 2};
  EXPECT_THROW(batch_greedy(modular({1, 2, 3}), SubsetMask::full(3), 2, z), InvalidArgument);
}

TEST(BatchGreedy, PairsBatches)
{
  EXPECT_EQ(pairs_batches(5), (std::vector<std::size_t>{2, 2, 1}));
  EXPECT_EQ(pairs_batches(4), (std::vector<std::size_t>{2, 2}));
}

TEST(BruteForce, TwoCoordinateEntropy)
{
  std::mt19937_64 rng(32);
  auto [p, pi] = ts::random_dense_chain(rng, {2, 2});
  Chain chain(std::move(p), std::move(pi));
  auto obj = build_subset_objective("entropy", chain);
  for (std::size_t m : {0u, 1u, 2u})
  {
    auto opt = brute_force_opt(obj, m);
    double best = 0.0;
    SubsetMask arg = SubsetMask::empty(2);
    for (auto s : ts::all_subsets(2))
    {
      if (s.size() <= m && obj.f(s) > best)
      {
        best = obj.f(s);
        arg = s;
      }
    }
    EXPECT_DOUBLE_EQ(opt.value, best);
    EXPECT_EQ(opt.argmax, arg);
  }
}

TEST(BruteForce, PartitionEnumerationAgreesWithReverseOrder)
{
  std::mt19937_64 rng(33);
  auto [p, pi] = ts::random_dense_chain(rng, {2, 2, 2, 2});
  Chain chain(std::move(p), std::move(pi));
  Partition v(std::vector<SubsetMask>{SubsetMask::of(4, {0, 3}), SubsetMask::of(4, {1, 2})});
  auto obj = build_partition_objective("k-entropy", chain, v);
  auto opt = brute_force_opt(obj, 2);
  double best = -1.0;
  for (int a = 2; a >= 0; --a)
  {
    for (int b = 2; b >= 0; --b)
    {
      for (int c = 2; c >= 0; --c)
      {
        for (int d = 2; d >= 0; --d)
        {
          Partition s(2, 4);
          int const picks[4] = {a, b, c, d};
          std::size_t count = 0;
          bool ok = true;
          for (std::size_t e = 0; e < 4; ++e)
          {
            if (picks[e] == 0)
            {
              continue;
            }
            auto const slot = static_cast<std::size_t>(picks[e] - 1);
            if (!v.part(slot).contains(e))
            {
              ok = false;
              break;
            }
            s = s.with(slot, e);
            ++count;
          }
          if (ok && count <= 2)
          {
            best = std::max(best, obj.f(s));
          }
        }
      }
    }
  }
  EXPECT_DOUBLE_EQ(opt.value, best);
}

TEST(BruteForce, Guard)
{
  auto f = modular(std::vector<double>(30, 1.0));
  EXPECT_THROW(brute_force_opt(f, SubsetMask::full(30), 3, Constraint::AtMost), GuardError);
}

TEST(Certificate, HoldsOnCurieWeissSmall)
{
  auto [p, pi] = curie_weiss_chain({4, 10.0, 1.0});
  Chain chain(std::move(p), std::move(pi));
  auto obj = build_subset_objective("entropy", chain);
  for (std::size_t m = 1; m <= 4; ++m)
  {
    auto r = distorted_greedy(obj, m);
    attach_certificate(obj, r, m);
    ASSERT_TRUE(r.certificate.has_value());
    EXPECT_TRUE(r.certificate->holds) << m;
  }
}
