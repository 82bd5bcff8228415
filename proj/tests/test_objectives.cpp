#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace mcsubmod;
namespace ts = testing_support;

namespace {

Chain cw(std::size_t d = 10)
{
  auto [p, pi] = curie_weiss_chain({d, 10.0, 1.0});
  return Chain(std::move(p), std::move(pi));
}

Partition cw_ceiling()
{
  return Partition(std::vector<SubsetMask>{SubsetMask::of(10, {0, 1, 2, 3}), SubsetMask::of(10, {4, 5, 6}),
                                           SubsetMask::of(10, {7, 8, 9})});
}

std::vector<Partition> states_below(Partition const &v)
{
  auto const supp = v.support().elements();
  std::vector<Partition> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << supp.size()); ++code)
  {
    Partition s(v.k(), v.universe());
    for (std::size_t k = 0; k < supp.size(); ++k)
    {
      if ((code >> k) & 1U)
      {
        s = s.with(v.slot_of(supp[k]), supp[k]);
      }
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Catalog, Ids)
{
  EXPECT_EQ(subset_problem_ids().size(), 9u);
  EXPECT_EQ(partition_problem_ids().size(), 7u);
  for (auto const &id : partition_problem_ids())
  {
    EXPECT_TRUE(is_partition_problem(id));
  }
  for (auto const &id : subset_problem_ids())
  {
    EXPECT_FALSE(is_partition_problem(id));
  }
}

TEST(Catalog, UnknownIdThrows)
{
  auto chain = cw(3);
  EXPECT_THROW(build_subset_objective("nope", chain), InvalidArgument);
  EXPECT_THROW(build_partition_objective("k-nope", chain, Partition(std::vector<SubsetMask>{chain.all()})),
               InvalidArgument);
}

TEST(Catalog, EntropyValuesOnCurieWeiss)
{
  auto chain = cw();
  auto obj = build_subset_objective("entropy", chain);
  EXPECT_NEAR(obj.f(chain.all()), 2.29109, 1e-4);
  EXPECT_NEAR(obj.f(SubsetMask::of(10, {0})), 0.29085, 1e-4);
  EXPECT_NEAR(obj.f(SubsetMask::of(10, {0, 9})), 0.57371, 1e-4);
  EXPECT_NEAR(obj.beta, -10.0 * std::log(2.0), 1e-12);
}

TEST(Catalog, KEntropyValueOnCurieWeiss)
{
  auto chain = cw();
  auto obj = build_partition_objective("k-entropy", chain, cw_ceiling());
  Partition s(3, 10);
  EXPECT_NEAR(obj.f(s.with(0, 0)), 0.29085, 1e-4);
}

TEST(Catalog, BetaAboveBoundRejected)
{
  auto chain = cw(3);
  ObjectiveParams params;
  params.beta = 0.5;
  EXPECT_THROW(build_subset_objective("entropy", chain, params), InvalidArgument);
  EXPECT_THROW(build_subset_objective("dist2fact", chain, params), InvalidArgument);
  params.beta = -5.0;
  EXPECT_NO_THROW(build_subset_objective("entropy", chain, params));
}

TEST(Catalog, FixedSetRequired)
{
  auto chain = cw(4);
  EXPECT_THROW(build_subset_objective("dist2fact-fixed", chain), InvalidArgument);
  ObjectiveParams params;
  params.fixed_set = SubsetMask::of(4, {0});
  auto obj = build_subset_objective("dist2fact-fixed", chain, params);
  EXPECT_EQ(obj.ground, SubsetMask::of(4, {1, 2, 3}));
  EXPECT_FALSE(obj.decomposed());
}

TEST(Catalog, ProductFormGate)
{
  auto chain = cw(3);
  EXPECT_FALSE(chain.product_form);
  EXPECT_THROW(build_subset_objective("entropy-product-form", chain), InvalidArgument);
  EXPECT_THROW(build_subset_objective("dist2stat-product-form", chain), InvalidArgument);
  ObjectiveParams params;
  params.heuristic = true;
  auto obj = build_subset_objective("dist2stat-product-form", chain, params);
  EXPECT_TRUE(obj.heuristic);
  EXPECT_FALSE(obj.guaranteed);

  std::mt19937_64 rng(21);
  auto [p, pi] = ts::random_product_chain(rng, {2, 2, 2});
  Chain prod(std::move(p), std::move(pi));
  EXPECT_TRUE(prod.product_form);
  auto ok = build_subset_objective("dist2stat-product-form", prod);
  EXPECT_TRUE(ok.guaranteed);
}

TEST(Catalog, Admissibility)
{
  auto chain = cw(4);
  auto indp = build_subset_objective("dist2indp", chain);
  EXPECT_FALSE(indp.admissible(1));
  EXPECT_TRUE(indp.admissible(2));
  EXPECT_THROW(indp.require_admissible(1), InvalidArgument);
  auto comp = build_subset_objective("dist2indp-complement", chain);
  EXPECT_TRUE(comp.admissible(2));
  EXPECT_FALSE(comp.admissible(3));
  Partition v(std::vector<SubsetMask>{SubsetMask::of(4, {0, 1}), SubsetMask::of(4, {2, 3})});
  auto kindp = build_partition_objective("k-dist2indp", chain, v);
  EXPECT_EQ(kindp.min_m, 3u);
}

TEST(Catalog, SplitReproducesTargetOnSubsets)
{
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 3; ++rep)
  {
    auto [p, pi] = ts::random_product_chain(rng, {2, 3, 2, 2});
    Chain chain(std::move(p), std::move(pi));
    for (auto const &id : subset_problem_ids())
    {
      ObjectiveParams params;
      params.fixed_set = SubsetMask::of(4, {0});
      auto obj = build_subset_objective(id, chain, params);
      if (!obj.decomposed())
      {
        continue;
      }
      for (auto s : ts::all_subsets(4))
      {
        if (!s.is_subset_of(obj.ground))
        {
          continue;
        }
        if (id != "entropy-product-form")
        {
          EXPECT_NEAR(obj.g(s) - obj.c(s), obj.f(s) + obj.shift, 1e-10) << id << " " << s.label();
        }
        EXPECT_GE(obj.c(s), -1e-10) << id << " " << s.label();
      }
    }
  }
}

TEST(Catalog, EntropyProductFormSplit)
{
  std::mt19937_64 rng(23);
  auto [p, pi] = ts::random_product_chain(rng, {2, 2, 3});
  Chain chain(std::move(p), std::move(pi));
  auto obj = build_subset_objective("entropy-product-form", chain);
  for (auto s : ts::all_subsets(3))
  {
    double const marg = shannon_entropy(marginalize(chain.pi, s));
    EXPECT_NEAR(obj.g(s), obj.f(s) + marg, 1e-10);
    EXPECT_NEAR(obj.c(s), marg, 1e-10);
  }
}

TEST(Catalog, SplitReproducesTargetOnPartitions)
{
  std::mt19937_64 rng(24);
  for (int rep = 0; rep < 3; ++rep)
  {
    auto [p, pi] = ts::random_product_chain(rng, {2, 2, 2, 3, 2});
    Chain chain(std::move(p), std::move(pi));
    Partition v(std::vector<SubsetMask>{SubsetMask::of(5, {0, 2}), SubsetMask::of(5, {1, 3})});
    for (auto const &id : partition_problem_ids())
    {
      auto obj = build_partition_objective(id, chain, v);
      for (auto const &s : states_below(v))
      {
        if (id != "k-entropy-product-form")
        {
          EXPECT_NEAR(obj.g(s) - obj.c(s), obj.f(s) + obj.shift, 1e-10) << id << " " << s.label();
        }
        EXPECT_GE(obj.c(s), -1e-10) << id << " " << s.label();
      }
    }
  }
}

TEST(Catalog, ReportedValueSign)
{
  auto chain = cw(4);
  auto obj = build_subset_objective("dist2indp", chain);
  auto const s = SubsetMask::of(4, {0, 1});
  EXPECT_NEAR(obj.reported(s), chain.H->independence(s), 1e-14);
  EXPECT_GE(obj.reported(s), 0.0);
}

TEST(Catalog, KDist2FactMatchesDirectKL)
{
  std::mt19937_64 rng(25);
  auto [p, pi] = ts::random_dense_chain(rng, {2, 2, 2, 2});
  Chain chain(p, pi);
  Partition v(std::vector<SubsetMask>{SubsetMask::of(4, {0, 1}), SubsetMask::of(4, {2})});
  auto obj = build_partition_objective("k-dist2fact", chain, v);
  Partition s(2, 4);
  s = s.with(0, 0).with(1, 2);
  std::vector<Block> blocks;
  for (auto b : {SubsetMask::of(4, {0}), SubsetMask::of(4, {2}), SubsetMask::of(4, {1, 3})})
  {
    blocks.push_back({b, project_keep_in(p, pi, b)});
  }
  auto l = tensor_blocks(p.space(), blocks);
  EXPECT_NEAR(obj.f(s), kl_rate(p, l, pi).value, 1e-10);
}
