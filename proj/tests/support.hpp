#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "mcsubmod/mcsubmod.hpp"

namespace testing_support {

using namespace mcsubmod;

inline std::vector<double> random_simplex(std::mt19937_64 &rng, std::size_t n, double floor = 0.05)
{
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto &x : v)
  {
    x = u(rng);
    s += x;
  }
  for (auto &x : v)
  {
    x /= s;
  }
  return v;
}

/// Fully dense random kernel with its stationary distribution.
inline std::pair<TransitionMatrix, Distribution> random_dense_chain(std::mt19937_64 &rng, std::vector<std::size_t> dims)
{
  ProductStateSpace space(std::move(dims));
  std::vector<double> rows;
  for (std::size_t x = 0; x < space.total(); ++x)
  {
    auto r = random_simplex(rng, space.total());
    rows.insert(rows.end(), r.begin(), r.end());
  }
  TransitionMatrix p(space, std::move(rows));
  auto pi = stationary_distribution(p);
  return {std::move(p), std::move(pi)};
}

/// Metropolis chain on random proposal weights targeting a random product distribution.
inline std::pair<TransitionMatrix, Distribution> random_product_chain(std::mt19937_64 &rng,
                                                                      std::vector<std::size_t> dims)
{
  ProductStateSpace space(dims);
  std::vector<Distribution> marginals;
  for (auto n : dims)
  {
    marginals.emplace_back(ProductStateSpace({n}), random_simplex(rng, n, 0.2));
  }
  auto pi = tensor_dist(marginals);
  auto const n = space.total();
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> q(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
  {
    for (std::size_t y = x + 1; y < n; ++y)
    {
      q[x * n + y] = q[y * n + x] = u(rng);
    }
  }
  std::vector<double> rows(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
  {
    double off = 0.0;
    for (std::size_t y = 0; y < n; ++y)
    {
      if (y == x)
      {
        continue;
      }
      double const v = q[x * n + y] / static_cast<double>(n) * std::min(1.0, pi[y] / pi[x]);
      rows[x * n + y] = v;
      off += v;
    }
    rows[x * n + x] = 1.0 - off;
  }
  return {TransitionMatrix(space, std::move(rows)), std::move(pi)};
}

/// Tensor product of independent random per-coordinate kernels.
inline std::pair<TransitionMatrix, Distribution> random_tensor_chain(std::mt19937_64 &rng,
                                                                     std::vector<std::size_t> dims)
{
  std::vector<TransitionMatrix> factors;
  std::vector<Distribution> pis;
  for (auto n : dims)
  {
    auto [p, pi] = random_dense_chain(rng, {n});
    factors.push_back(std::move(p));
    pis.push_back(std::move(pi));
  }
  return {tensor(factors), tensor_dist(pis)};
}

/// Keep-S-in matrix by a literal double sum over hidden coordinates.
inline std::vector<double> naive_keep_in(TransitionMatrix const &p, Distribution const &pi, SubsetMask s)
{
  auto const &space = p.space();
  auto const sub = space.subspace(s);
  auto const elems = s.elements();
  auto const m = sub.total();
  std::vector<double> num(m * m, 0.0);
  std::vector<double> den(m, 0.0);
  for (std::size_t x = 0; x < space.total(); ++x)
  {
    std::vector<std::size_t> xs;
    for (auto e : elems)
    {
      xs.push_back(space.digit(x, e));
    }
    auto const a = sub.index_of(xs);
    den[a] += pi[x];
    for (std::size_t y = 0; y < space.total(); ++y)
    {
      std::vector<std::size_t> ys;
      for (auto e : elems)
      {
        ys.push_back(space.digit(y, e));
      }
      num[a * m + sub.index_of(ys)] += pi[x] * p(x, y);
    }
  }
  for (std::size_t a = 0; a < m; ++a)
  {
    for (std::size_t b = 0; b < m; ++b)
    {
      num[a * m + b] /= den[a];
    }
  }
  return num;
}

/// sum_x pi(x) sum_y M ln(M / L) with plain loops.
inline double naive_kl(std::vector<double> const &m, std::vector<double> const &l, std::vector<double> const &pi)
{
  auto const n = pi.size();
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x)
  {
    for (std::size_t y = 0; y < n; ++y)
    {
      double const a = m[x * n + y];
      if (a > 0.0)
      {
        total += pi[x] * a * std::log(a / l[x * n + y]);
      }
    }
  }
  return total;
}

/// Every subset of [[d]].
inline std::vector<SubsetMask> all_subsets(std::size_t d)
{
  std::vector<SubsetMask> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << d); ++b)
  {
    out.emplace_back(b, d);
  }
  return out;
}

inline SubsetMask mask(std::size_t d, std::initializer_list<std::size_t> one_based)
{
  SubsetMask s = SubsetMask::empty(d);
  for (auto e : one_based)
  {
    s = s.with(e - 1);
  }
  return s;
}

}  // namespace testing_support
