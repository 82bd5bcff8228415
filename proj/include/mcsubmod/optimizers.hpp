#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "mcsubmod/objectives.hpp"

namespace mcsubmod {

/// Scores within this absolute distance of the incumbent count as ties.
inline constexpr double kTieTolerance = 1e-12;
inline constexpr std::uint64_t kBruteForceGuard = std::uint64_t{1} << 24;
inline constexpr std::size_t kLocalSearchCap = 10'000'000;

template <class State>
using SetFunction = std::function<double(State const &)>;

struct Step
{
  std::size_t iteration{0};
  std::size_t slot{0};
  std::size_t element{0};
  double marginal{0.0};
  double score{0.0};
  bool accepted{false};
};

/// (1 - 1/e) g(OPT) - c(OPT) against the achieved g(S) - c(S).
struct Certificate
{
  double g_opt{0.0};
  double c_opt{0.0};
  double bound{0.0};
  double achieved{0.0};
  bool holds{false};
};

template <class State>
struct RunResult
{
  State chosen;
  double value{0.0};
  std::vector<Step> trajectory;
  std::optional<Certificate> certificate;
};

using SubsetResult = RunResult<SubsetMask>;
using PartitionResult = RunResult<Partition>;

namespace detail {

struct Move
{
  std::size_t slot;
  std::size_t element;
};

inline std::vector<Move> moves(SubsetMask const &s, SubsetMask const &ground)
{
  std::vector<Move> out;
  for (auto e : (ground - s).elements())
  {
    out.push_back({0, e});
  }
  return out;
}

inline std::vector<Move> moves(Partition const &s, Partition const &ceiling)
{
  std::vector<Move> out;
  for (std::size_t j = 0; j < ceiling.k(); ++j)
  {
    for (auto e : (ceiling.part(j) - s.part(j)).elements())
    {
      out.push_back({j, e});
    }
  }
  return out;
}

inline SubsetMask apply(SubsetMask const &s, Move mv) { return s.with(mv.element); }
inline Partition apply(Partition const &s, Move mv) { return s.with(mv.slot, mv.element); }

inline SubsetMask empty_like(SubsetMask const &ground) { return SubsetMask::empty(ground.universe()); }
inline Partition empty_like(Partition const &ceiling) { return Partition(ceiling.k(), ceiling.universe()); }

/// Index of the best score; ties within kTieTolerance keep the earliest.
/// Scores within kTieTolerance of zero count as zero when deciding acceptance.
inline std::size_t argmax(std::span<const double> scores)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
  {
    if (scores[i] > scores[best] + kTieTolerance)
    {
      best = i;
    }
  }
  return best;
}

inline double distortion(std::size_t m, std::size_t i)
{
  return std::pow(1.0 - 1.0 / static_cast<double>(m), static_cast<double>(m - (i + 1)));
}

template <class State>
RunResult<State> distorted(Objective<State> const &obj, std::size_t m)
{
  if (!obj.decomposed())
  {
    throw InvalidArgument(obj.id + " has no (g, c) decomposition for the distorted greedy algorithm");
  }
  bool const forced = obj.constraint == Constraint::Exactly;
  RunResult<State> out;
  State s = empty_like(obj.ground);
  for (std::size_t i = 0; i < m; ++i)
  {
    auto const cands = moves(s, obj.ground);
    if (cands.empty())
    {
      continue;
    }
    double const fac = distortion(m, i);
    double const base = obj.g(s);
    std::vector<double> gains(cands.size());
    std::vector<double> scores(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k)
    {
      gains[k] = obj.g(apply(s, cands[k])) - base;
      scores[k] = fac * gains[k] - obj.weight(cands[k].slot, cands[k].element);
    }
    auto const b = argmax(scores);
    bool const accept = forced || scores[b] > kTieTolerance;
    out.trajectory.push_back({i, cands[b].slot, cands[b].element, gains[b], scores[b], accept});
    if (accept)
    {
      s = apply(s, cands[b]);
    }
  }
  out.value = obj.f(s);
  out.chosen = std::move(s);
  return out;
}

}  // namespace detail

/// Classical greedy: "<=" adds only strictly improving elements, "=" always adds the best.
inline SubsetResult greedy(SetFunction<SubsetMask> const &f, SubsetMask ground, std::size_t m, Constraint constraint)
{
  if (m > ground.size())
  {
    throw InvalidArgument("m exceeds the ground set size");
  }
  SubsetResult out;
  SubsetMask s = SubsetMask::empty(ground.universe());
  double current = f(s);
  for (std::size_t i = 0; i < m; ++i)
  {
    auto const cands = detail::moves(s, ground);
    std::vector<double> gains(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k)
    {
      gains[k] = f(s.with(cands[k].element)) - current;
    }
    auto const b = detail::argmax(gains);
    bool const accept = constraint == Constraint::Exactly || gains[b] > kTieTolerance;
    out.trajectory.push_back({i, 0, cands[b].element, gains[b], gains[b], accept});
    if (!accept)
    {
      break;
    }
    s = s.with(cands[b].element);
    current = f(s);
  }
  out.value = f(s);
  out.chosen = s;
  return out;
}

inline SubsetResult greedy(SubsetObjective const &obj, std::size_t m)
{
  return greedy(obj.f, obj.ground, m, obj.constraint);
}

/// Distorted greedy over the objective's (g, c) split. With an "=" constraint every step adds its argmax.
inline SubsetResult distorted_greedy(SubsetObjective const &obj, std::size_t m)
{
  if (m > obj.ground.size())
  {
    throw InvalidArgument("m exceeds the ground set size");
  }
  return detail::distorted(obj, m);
}

/// Generalized distorted greedy over (slot, element) moves below the ceiling V.
inline PartitionResult generalized_distorted_greedy(PartitionObjective const &obj, std::size_t m)
{
  return detail::distorted(obj, m);
}

struct LocalSearchResult
{
  SubsetMask chosen;
  double value{0.0};
  bool complement{false};
  std::size_t moves{0};
};

/// Local search with multiplicative improvement threshold (1 + eps / d^2).
///
/// When f(S) <= 0 the threshold no longer forces progress, so moves must also strictly increase f.
inline LocalSearchResult local_search(SetFunction<SubsetMask> const &f, SubsetMask ground, double epsilon)
{
  if (!(epsilon > 0.0))
  {
    throw InvalidArgument("epsilon must be positive");
  }
  if (ground.empty())
  {
    return {ground, f(ground), false, 0};
  }
  double const d = static_cast<double>(ground.size());
  double const factor = 1.0 + epsilon / (d * d);
  auto improves = [&](double next, double cur) { return next >= factor * cur && (cur > 0.0 || next > cur); };

  auto const elems = ground.elements();
  SubsetMask s = SubsetMask::empty(ground.universe());
  {
    std::vector<double> vals;
    for (auto e : elems)
    {
      vals.push_back(f(s.with(e)));
    }
    s = s.with(elems[detail::argmax(vals)]);
  }
  double cur = f(s);
  std::size_t count = 0;
  for (;;)
  {
    bool added = true;
    while (added)
    {
      added = false;
      for (auto a : elems)
      {
        if (s.contains(a))
        {
          continue;
        }
        double const next = f(s.with(a));
        if (improves(next, cur))
        {
          s = s.with(a);
          cur = next;
          added = true;
          if (++count > kLocalSearchCap)
          {
            throw ConvergenceError("local search exceeded its iteration cap");
          }
          break;
        }
      }
    }
    bool removed = false;
    for (auto a : elems)
    {
      if (!s.contains(a))
      {
        continue;
      }
      double const next = f(s.without(a));
      if (improves(next, cur))
      {
        s = s.without(a);
        cur = next;
        removed = true;
        if (++count > kLocalSearchCap)
        {
          throw ConvergenceError("local search exceeded its iteration cap");
        }
        break;
      }
    }
    if (!removed)
    {
      break;
    }
  }
  auto const rest = ground - s;
  double const other = f(rest);
  if (other > cur)
  {
    return {rest, other, true, count};
  }
  return {s, cur, false, count};
}

/// Batch greedy: step i adds the q_i elements with the largest singleton gains against the current set.
inline SubsetResult batch_greedy(SetFunction<SubsetMask> const &f, SubsetMask ground, std::size_t m,
                                 std::span<const std::size_t> batches)
{
  if (std::accumulate(batches.begin(), batches.end(), std::size_t{0}) != m)
  {
    throw InvalidArgument("batch sizes must sum to m");
  }
  if (m > ground.size())
  {
    throw InvalidArgument("m exceeds the ground set size");
  }
  SubsetResult out;
  SubsetMask s = SubsetMask::empty(ground.universe());
  for (std::size_t i = 0; i < batches.size(); ++i)
  {
    if (batches[i] == 0)
    {
      throw InvalidArgument("batch sizes must be positive");
    }
    double const base = f(s);
    auto cands = detail::moves(s, ground);
    std::vector<double> gains(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k)
    {
      gains[k] = f(s.with(cands[k].element)) - base;
    }
    SubsetMask next = s;
    for (std::size_t q = 0; q < batches[i]; ++q)
    {
      auto const b = detail::argmax(gains);
      out.trajectory.push_back({i, 0, cands[b].element, gains[b], gains[b], true});
      next = next.with(cands[b].element);
      cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(b));
      gains.erase(gains.begin() + static_cast<std::ptrdiff_t>(b));
    }
    s = next;
  }
  out.value = f(s);
  out.chosen = s;
  return out;
}

/// q = (2, ..., 2) or (2, ..., 2, 1) summing to m.
inline std::vector<std::size_t> pairs_batches(std::size_t m)
{
  std::vector<std::size_t> q(m / 2, 2);
  if (m % 2 == 1)
  {
    q.push_back(1);
  }
  return q;
}

template <class State>
struct Optimum
{
  State argmax;
  double value{0.0};
};

/// Exhaustive maximum over S subset of U with |S| <= m or |S| = m, first found wins.
inline Optimum<SubsetMask> brute_force_opt(SetFunction<SubsetMask> const &f, SubsetMask ground, std::size_t m,
                                           Constraint constraint)
{
  if (ground.size() >= 64 || (std::uint64_t{1} << ground.size()) > kBruteForceGuard)
  {
    throw GuardError("exhaustive search over 2^" + std::to_string(ground.size()) + " subsets exceeds the guard");
  }
  auto const elems = ground.elements();
  std::optional<Optimum<SubsetMask>> best;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << elems.size()); ++code)
  {
    auto const size = static_cast<std::size_t>(std::popcount(code));
    if (constraint == Constraint::AtMost ? size > m : size != m)
    {
      continue;
    }
    SubsetMask s = SubsetMask::empty(ground.universe());
    for (std::size_t k = 0; k < elems.size(); ++k)
    {
      if ((code >> k) & 1U)
      {
        s = s.with(elems[k]);
      }
    }
    double const v = f(s);
    if (!best || v > best->value)
    {
      best = Optimum<SubsetMask>{s, v};
    }
  }
  if (!best)
  {
    throw InvalidArgument("no feasible subset of size " + std::to_string(m));
  }
  return *best;
}

/// Exhaustive maximum over S below the ceiling V (each element of supp(V) in its slot or unassigned).
inline Optimum<Partition> brute_force_opt(SetFunction<Partition> const &f, Partition const &ceiling, std::size_t m,
                                          Constraint constraint)
{
  auto const supp = ceiling.support().elements();
  if (supp.size() >= 64 || (std::uint64_t{1} << supp.size()) > kBruteForceGuard)
  {
    throw GuardError("exhaustive partition search over 2^" + std::to_string(supp.size()) +
                     " candidates exceeds the guard");
  }
  std::vector<std::size_t> slot(supp.size());
  for (std::size_t k = 0; k < supp.size(); ++k)
  {
    slot[k] = ceiling.slot_of(supp[k]);
  }
  std::optional<Optimum<Partition>> best;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << supp.size()); ++code)
  {
    auto const size = static_cast<std::size_t>(std::popcount(code));
    if (constraint == Constraint::AtMost ? size > m : size != m)
    {
      continue;
    }
    Partition s(ceiling.k(), ceiling.universe());
    for (std::size_t k = 0; k < supp.size(); ++k)
    {
      if ((code >> k) & 1U)
      {
        s = s.with(slot[k], supp[k]);
      }
    }
    double const v = f(s);
    if (!best || v > best->value)
    {
      best = Optimum<Partition>{s, v};
    }
  }
  if (!best)
  {
    throw InvalidArgument("no feasible partition of size " + std::to_string(m));
  }
  return *best;
}

template <class State>
Optimum<State> brute_force_opt(Objective<State> const &obj, std::size_t m)
{
  return brute_force_opt(obj.f, obj.ground, m, obj.constraint);
}

/// Checks g(S) - c(S) >= (1 - 1/e) g(OPT) - c(OPT) for the objective's split.
template <class State>
Certificate certify(Objective<State> const &obj, State const &chosen, State const &opt, double tolerance = 1e-9)
{
  Certificate cert;
  cert.g_opt = obj.g(opt);
  cert.c_opt = obj.c(opt);
  cert.bound = (1.0 - std::exp(-1.0)) * cert.g_opt - cert.c_opt;
  cert.achieved = obj.g(chosen) - obj.c(chosen);
  cert.holds = cert.achieved >= cert.bound - tolerance;
  return cert;
}

/// Runs brute force for OPT and attaches the certificate to `run`.
template <class State>
void attach_certificate(Objective<State> const &obj, RunResult<State> &run, std::size_t m)
{
  auto const opt = brute_force_opt(obj, m);
  run.certificate = certify(obj, run.chosen, opt.argmax);
}

}  // namespace mcsubmod
