#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "mcsubmod/chain.hpp"

namespace mcsubmod {

/// Dense kernels beyond 2^26 entries are refused.
inline constexpr std::size_t kDenseEntryCap = std::size_t{1} << 26;

struct CurieWeissParams
{
  std::size_t d{10};
  double T{10.0};
  double h{1.0};
};

/// H(x) = -sum_i sum_j 2^{-|i-j|} x_i x_j - h sum_i x_i, self-interaction included.
inline double hamiltonian(std::span<const int> spins, CurieWeissParams const &params)
{
  auto const d = spins.size();
  double pair = 0.0;
  double field = 0.0;
  for (std::size_t i = 0; i < d; ++i)
  {
    if (spins[i] != 1 && spins[i] != -1)
    {
      throw InvalidArgument("spin " + std::to_string(i + 1) + " is not +1 or -1");
    }
    field += spins[i];
    for (std::size_t j = 0; j < d; ++j)
    {
      auto const gap = static_cast<int>(i > j ? i - j : j - i);
      pair += std::ldexp(1.0, -gap) * spins[i] * spins[j];
    }
  }
  return -pair - params.h * field;
}

/// Digit 0 is spin -1, digit 1 is spin +1.
inline std::vector<int> spins_of(ProductStateSpace const &space, std::size_t index)
{
  std::vector<int> out(space.dimension());
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] = space.digit(index, i) == 0 ? -1 : 1;
  }
  return out;
}

namespace detail {

inline double pairwise_sum(std::span<const double> v)
{
  if (v.size() <= 8)
  {
    double s = 0.0;
    for (double x : v)
    {
      s += x;
    }
    return s;
  }
  auto const half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace detail

/// Gibbs distribution exp(-H(x)/T) / Z, with Z summed pairwise.
inline Distribution gibbs_distribution(CurieWeissParams const &params)
{
  auto const space = ProductStateSpace::binary(params.d);
  std::vector<double> energy(space.total());
  double emin = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < space.total(); ++x)
  {
    energy[x] = hamiltonian(spins_of(space, x), params);
    emin = std::min(emin, energy[x]);
  }
  std::vector<double> w(space.total());
  for (std::size_t x = 0; x < w.size(); ++x)
  {
    w[x] = std::exp(-(energy[x] - emin) / params.T);
  }
  double const z = detail::pairwise_sum(w);
  for (auto &v : w)
  {
    v /= z;
  }
  return {space, std::move(w)};
}

/// Glauber (Metropolis single-flip) chain with uniform coordinate proposal, and its Gibbs distribution.
inline std::pair<TransitionMatrix, Distribution> curie_weiss_chain(CurieWeissParams const &params)
{
  if (params.d == 0)
  {
    throw InvalidArgument("Curie-Weiss model needs d >= 1");
  }
  if (!(params.T > 0.0))
  {
    throw InvalidArgument("temperature must be positive");
  }
  if (params.d >= 32 || (std::size_t{1} << (2 * params.d)) > kDenseEntryCap)
  {
    throw GuardError("Curie-Weiss chain with d = " + std::to_string(params.d) + " exceeds the dense size cap");
  }
  auto const space = ProductStateSpace::binary(params.d);
  auto const n = space.total();
  std::vector<double> energy(n);
  for (std::size_t x = 0; x < n; ++x)
  {
    energy[x] = hamiltonian(spins_of(space, x), params);
  }
  std::vector<double> rows(n * n, 0.0);
  double const inv_d = 1.0 / static_cast<double>(params.d);
  for (std::size_t x = 0; x < n; ++x)
  {
    double off = 0.0;
    for (std::size_t i = 0; i < params.d; ++i)
    {
      auto const y = x ^ space.stride(i);
      double const v = inv_d * std::exp(-std::max(energy[y] - energy[x], 0.0) / params.T);
      rows[x * n + y] = v;
      off += v;
    }
    double diag = 1.0 - off;
    if (diag < 0.0)
    {
      if (diag < -1e-15)
      {
        throw ValidationError("negative diagonal in Curie-Weiss kernel");
      }
      diag = 0.0;
    }
    rows[x * n + x] = diag;
  }
  return {TransitionMatrix(space, std::move(rows)), gibbs_distribution(params)};
}

}  // namespace mcsubmod
