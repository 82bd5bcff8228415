#pragma once

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcsubmod/info.hpp"

namespace mcsubmod {

/// Memoized entropies of projections of one stationary chain.
///
/// Uses H(P^(S)) = H(pi^(S) [x] P^(S)) - H(pi^(S)) and aggregates the sparse
/// edge measure directly, so no projected matrix is ever materialized.
/// Every distance functional of a stationary chain reduces to these entropies.
class ChainEntropies
{
public:
  ChainEntropies(TransitionMatrix const &p, Distribution const &pi,
                 double tolerance = kStationarityAssertTolerance)
    : space_(p.space())
  {
    require_valid(p);
    require_stationary(p, pi, tolerance);
    auto const n = p.size();
    for (std::size_t x = 0; x < n; ++x)
    {
      for (std::size_t y = 0; y < n; ++y)
      {
        double const w = pi[x] * p(x, y);
        if (w >= kNegligibleMass)
        {
          edges_.push_back({x, y, w});
        }
      }
    }
    pi_ = pi.probs;
  }

  ProductStateSpace const &space() const noexcept { return space_; }
  std::size_t dimension() const noexcept { return space_.dimension(); }
  SubsetMask all() const { return space_.all(); }

  /// H(P^(S)); 0 for S empty.
  double rate(SubsetMask s) const
  {
    space_.check_mask(s);
    if (s.empty())
    {
      return 0.0;
    }
    return lookup(rate_, s, [&] { return edge_entropy(s) - marginal(s); });
  }

  /// H(pi^(S))
  double marginal(SubsetMask s) const
  {
    space_.check_mask(s);
    return lookup(marginal_, s, [&] {
      auto const map = space_.projection_map(s);
      std::vector<double> mu(space_.count(s), 0.0);
      for (std::size_t x = 0; x < pi_.size(); ++x)
      {
        mu[map[x]] += pi_[x];
      }
      return shannon_entropy(mu);
    });
  }

  /// I(P^(S)) = sum_{i in S} H(P^(i)) - H(P^(S))
  double independence(SubsetMask s) const
  {
    if (s.size() <= 1)
    {
      return 0.0;
    }
    double sum = 0.0;
    for (auto e : s.elements())
    {
      sum += rate(SubsetMask::empty(s.universe()).with(e));
    }
    return sum - rate(s);
  }

  /// D(P || tensor of P^(B) over blocks covering [[d]]) = sum H(P^(B)) - H(P)
  double factorizability(std::span<const SubsetMask> blocks) const
  {
    double sum = -rate(all());
    for (auto b : blocks)
    {
      sum += rate(b);
    }
    return sum;
  }

  /// D(P || P^(S) (x) P^(-S))
  double factorizability(SubsetMask s) const
  {
    return rate(s) + rate(s.complement()) - rate(all());
  }

  /// D(P^(S) || Pi^(S)) = H(pi^(S)) - H(P^(S))
  double stationarity(SubsetMask s) const { return marginal(s) - rate(s); }

  /// D(P^(W u S) || P^(W) (x) P^(S))
  double factorizability_fixed(SubsetMask w, SubsetMask s) const
  {
    if (!w.disjoint(s))
    {
      throw InvalidArgument("fixed set W and S overlap");
    }
    return rate(w) + rate(s) - rate(w | s);
  }

  std::size_t cached_entries() const
  {
    std::lock_guard lock(mutex_);
    return rate_.size() + marginal_.size();
  }

private:
  struct Edge
  {
    std::size_t x;
    std::size_t y;
    double w;
  };

  template <class Compute>
  double lookup(std::unordered_map<std::uint64_t, double> &memo, SubsetMask s, Compute &&compute) const
  {
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo.find(s.bits()); it != memo.end())
      {
        return it->second;
      }
    }
    double const v = compute();
    std::lock_guard lock(mutex_);
    memo.emplace(s.bits(), v);
    return v;
  }

  double edge_entropy(SubsetMask s) const
  {
    auto const map = space_.projection_map(s);
    auto const m = static_cast<std::uint64_t>(space_.count(s));
    std::vector<std::pair<std::uint64_t, double>> cells;
    cells.reserve(edges_.size());
    for (auto const &e : edges_)
    {
      cells.emplace_back(map[e.x] * m + map[e.y], e.w);
    }
    std::sort(cells.begin(), cells.end(), [](auto const &a, auto const &b) { return a.first < b.first; });
    double h = 0.0;
    for (std::size_t i = 0; i < cells.size();)
    {
      double mass = 0.0;
      std::size_t j = i;
      for (; j < cells.size() && cells[j].first == cells[i].first; ++j)
      {
        mass += cells[j].second;
      }
      if (mass >= kNegligibleMass)
      {
        h -= mass * std::log(mass);
      }
      i = j;
    }
    return h;
  }

  ProductStateSpace space_;
  std::vector<Edge> edges_;
  std::vector<double> pi_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> rate_;
  mutable std::unordered_map<std::uint64_t, double> marginal_;
};

}  // namespace mcsubmod
