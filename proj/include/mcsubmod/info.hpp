#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "mcsubmod/chain.hpp"

namespace mcsubmod {

inline constexpr double kNegligibleMass = 1e-300;
inline constexpr double kStationarityAssertTolerance = 1e-8;

/// -sum mu ln mu, with 0 ln 0 = 0.
inline double shannon_entropy(std::span<const double> mu)
{
  double h = 0.0;
  for (double p : mu)
  {
    if (p >= kNegligibleMass)
    {
      h -= p * std::log(p);
    }
  }
  return h;
}

inline double shannon_entropy(Distribution const &mu) { return shannon_entropy(mu.probs); }

inline void require_stationary(TransitionMatrix const &p, Distribution const &pi,
                               double tolerance = kStationarityAssertTolerance)
{
  double const r = stationarity_residual(p, pi);
  if (r > tolerance)
  {
    std::ostringstream msg;
    msg << "distribution is not stationary for the matrix (residual " << r << ")";
    throw ValidationError(msg.str());
  }
}

/// H(P) = -sum_x sum_y pi(x) P(x, y) ln P(x, y)
inline double entropy_rate(TransitionMatrix const &p, Distribution const &pi,
                           double tolerance = kStationarityAssertTolerance)
{
  require_stationary(p, pi, tolerance);
  double h = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x)
  {
    double row = 0.0;
    for (double v : p.row(x))
    {
      if (v >= kNegligibleMass)
      {
        row -= v * std::log(v);
      }
    }
    h += pi[x] * row;
  }
  return h;
}

struct KLResult
{
  double value{0.0};
  bool infinite{false};
  std::optional<std::pair<std::size_t, std::size_t>> witness;

  static KLResult infinity(std::size_t x, std::size_t y)
  {
    return {std::numeric_limits<double>::infinity(), true, std::make_pair(x, y)};
  }
};

/// D^pi(M || L) = sum_x pi(x) sum_y M(x, y) ln(M(x, y) / L(x, y))
inline KLResult kl_rate(TransitionMatrix const &m, TransitionMatrix const &l, Distribution const &pi)
{
  if (!(m.space() == l.space()))
  {
    throw InvalidArgument("KL rate between matrices over different spaces");
  }
  require_same_space(m, pi);
  double total = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x)
  {
    if (pi[x] < kNegligibleMass)
    {
      continue;
    }
    double row = 0.0;
    for (std::size_t y = 0; y < m.size(); ++y)
    {
      double const a = m(x, y);
      if (a < kNegligibleMass)
      {
        continue;
      }
      double const b = l(x, y);
      if (b <= 0.0)
      {
        return KLResult::infinity(x, y);
      }
      row += a * std::log(a / b);
    }
    total += pi[x] * row;
  }
  return {std::max(total, 0.0), false, std::nullopt};
}

/// Re-express `s` (a subset of `within`) in the compact coordinates of subspace(within).
inline SubsetMask relabel(SubsetMask s, SubsetMask within)
{
  if (!s.is_subset_of(within))
  {
    throw InvalidArgument("subset is not contained in the reference set");
  }
  auto const elems = within.elements();
  SubsetMask out = SubsetMask::empty(elems.size());
  for (std::size_t k = 0; k < elems.size(); ++k)
  {
    if (s.contains(elems[k]))
    {
      out = out.with(k);
    }
  }
  return out;
}

namespace detail {

inline double finite_or_throw(KLResult const &r)
{
  if (r.infinite)
  {
    throw ValidationError("KL divergence is infinite (absolute continuity fails)");
  }
  return r.value;
}

/// D(P^(A) || tensor of P^(B) over the blocks of A), blocks in original coordinate order.
inline double block_divergence(TransitionMatrix const &p, Distribution const &pi, SubsetMask a,
                               std::vector<SubsetMask> const &blocks)
{
  auto const pa = project_keep_in(p, pi, a);
  auto const pia = marginalize(pi, a);
  std::vector<Block> factors;
  for (auto b : blocks)
  {
    if (b.empty())
    {
      continue;
    }
    auto const local = relabel(b, a);
    factors.push_back({local, project_keep_in(pa, pia, local)});
  }
  auto const l = tensor_blocks(pa.space(), factors);
  return finite_or_throw(kl_rate(pa, l, pia));
}

}  // namespace detail

/// I(P^(S)) = D(P^(S) || tensor_{i in S} P^(i))
inline double distance_to_independence(TransitionMatrix const &p, Distribution const &pi, SubsetMask s)
{
  if (s.size() <= 1)
  {
    return 0.0;
  }
  std::vector<SubsetMask> singles;
  for (auto e : s.elements())
  {
    singles.push_back(SubsetMask::empty(s.universe()).with(e));
  }
  return detail::block_divergence(p, pi, s, singles);
}

/// D(P || P^(S) (x) P^(-S))
inline double distance_to_factorizability(TransitionMatrix const &p, Distribution const &pi, SubsetMask s)
{
  if (s.empty() || s == p.space().all())
  {
    return 0.0;
  }
  return detail::block_divergence(p, pi, p.space().all(), {s, s.complement()});
}

/// D(P^(S) || Pi^(S)), every row of Pi^(S) equal to pi^(S).
inline double distance_to_stationarity(TransitionMatrix const &p, Distribution const &pi, SubsetMask s)
{
  if (s.empty())
  {
    return 0.0;
  }
  auto const ps = project_keep_in(p, pi, s);
  auto const pis = marginalize(pi, s);
  return detail::finite_or_throw(kl_rate(ps, TransitionMatrix::rank_one(pis), pis));
}

/// D(P^(W u S) || P^(W) (x) P^(S))
inline double distance_to_factorizability_fixed(TransitionMatrix const &p, Distribution const &pi, SubsetMask w,
                                                SubsetMask s)
{
  if (!w.disjoint(s))
  {
    throw InvalidArgument("fixed set W and S overlap");
  }
  if (s.empty() || w.empty())
  {
    return 0.0;
  }
  return detail::block_divergence(p, pi, w | s, {w, s});
}

}  // namespace mcsubmod
