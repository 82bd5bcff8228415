#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcsubmod/optimizers.hpp"

namespace mcsubmod {

inline constexpr double kOracleTolerance = 1e-9;
inline constexpr std::size_t kSubmodularGuard = 12;
inline constexpr std::uint64_t kKSubmodularGuard = 2'000'000;
inline constexpr std::size_t kRatioGuard = 8;
inline constexpr double kRatioZero = 1e-12;

struct SetWitness
{
  SubsetMask s;
  SubsetMask t;
  double violation{0.0};
};

struct LatticeReport
{
  bool pass{true};
  std::optional<SetWitness> witness;
};

namespace detail {

inline std::vector<SubsetMask> subsets_of(SubsetMask ground, std::size_t guard)
{
  if (ground.size() > guard)
  {
    throw GuardError("exhaustive check over " + std::to_string(ground.size()) + " elements exceeds the guard of " +
                     std::to_string(guard));
  }
  auto const elems = ground.elements();
  std::vector<SubsetMask> out;
  out.reserve(std::size_t{1} << elems.size());
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << elems.size()); ++code)
  {
    SubsetMask s = SubsetMask::empty(ground.universe());
    for (std::size_t k = 0; k < elems.size(); ++k)
    {
      if ((code >> k) & 1U)
      {
        s = s.with(elems[k]);
      }
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// f(S) + f(T) >= f(S n T) + f(S u T) for all S, T subsets of U.
inline LatticeReport check_submodular(SetFunction<SubsetMask> const &f, SubsetMask ground,
                                      double tolerance = kOracleTolerance)
{
  auto const all = detail::subsets_of(ground, kSubmodularGuard);
  std::unordered_map<std::uint64_t, double> value;
  for (auto const &s : all)
  {
    value[s.bits()] = f(s);
  }
  LatticeReport report;
  for (auto const &s : all)
  {
    for (auto const &t : all)
    {
      if (t.bits() < s.bits())
      {
        continue;
      }
      double const gap = value[s.bits()] + value[t.bits()] - value[(s & t).bits()] - value[(s | t).bits()];
      if (gap < -tolerance && (!report.witness || gap < report.witness->violation))
      {
        report.pass = false;
        report.witness = SetWitness{s, t, gap};
      }
    }
  }
  return report;
}

inline LatticeReport check_supermodular(SetFunction<SubsetMask> const &f, SubsetMask ground,
                                        double tolerance = kOracleTolerance)
{
  return check_submodular([&](SubsetMask s) { return -f(s); }, ground, tolerance);
}

/// f(S u {e}) - f(S) >= -tolerance (or <= tolerance when `increasing` is false) for all S, e.
inline LatticeReport check_monotone(SetFunction<SubsetMask> const &f, SubsetMask ground, bool increasing = true,
                                    double tolerance = kOracleTolerance)
{
  LatticeReport report;
  double const sign = increasing ? 1.0 : -1.0;
  for (auto const &s : detail::subsets_of(ground, kSubmodularGuard))
  {
    double const base = f(s);
    for (auto e : (ground - s).elements())
    {
      double const gap = sign * (f(s.with(e)) - base);
      if (gap < -tolerance && (!report.witness || gap < report.witness->violation))
      {
        report.pass = false;
        report.witness = SetWitness{s, s.with(e), gap};
      }
    }
  }
  return report;
}

/// S -> f(U \ S)
inline SetFunction<SubsetMask> complement_of(SetFunction<SubsetMask> f, SubsetMask ground)
{
  return [f = std::move(f), ground](SubsetMask s) { return f(ground - s); };
}

/// Meet: (S_i n T_i)_i
inline Partition meet(Partition const &s, Partition const &t)
{
  std::vector<SubsetMask> parts;
  for (std::size_t i = 0; i < s.k(); ++i)
  {
    parts.push_back(s.part(i) & t.part(i));
  }
  return Partition(std::move(parts));
}

/// Join: ((S_i u T_i) \ union_{j != i} (S_j u T_j))_i
inline Partition join(Partition const &s, Partition const &t)
{
  std::vector<SubsetMask> parts;
  for (std::size_t i = 0; i < s.k(); ++i)
  {
    SubsetMask others = SubsetMask::empty(s.universe());
    for (std::size_t j = 0; j < s.k(); ++j)
    {
      if (j != i)
      {
        others = others | s.part(j) | t.part(j);
      }
    }
    parts.push_back((s.part(i) | t.part(i)) - others);
  }
  return Partition(std::move(parts));
}

struct PartitionWitness
{
  Partition s;
  Partition t;
  std::size_t element{0};
  std::size_t slot_a{0};
  std::size_t slot_b{0};
  double violation{0.0};
};

struct KSubmodularReport
{
  bool k_submodular{true};
  bool orthant_submodular{true};
  bool pairwise_monotone{true};
  std::optional<PartitionWitness> lattice_witness;
  std::optional<PartitionWitness> orthant_witness;
  std::optional<PartitionWitness> pairwise_witness;
};

namespace detail {

/// Every labeling of U with slots 0..k (0 = unassigned), optionally restricted below a ceiling.
inline std::vector<Partition> labelings(SubsetMask ground, std::size_t k, std::optional<Partition> const &ceiling)
{
  auto const elems = ground.elements();
  double const count = std::pow(static_cast<double>(k + 1), static_cast<double>(elems.size()));
  if (count > static_cast<double>(kKSubmodularGuard))
  {
    throw GuardError("k-submodularity check over (k+1)^|U| = " + std::to_string(count) + " states exceeds the guard");
  }
  std::vector<Partition> out;
  std::vector<std::size_t> label(elems.size(), 0);
  for (;;)
  {
    Partition p(k, ground.universe());
    bool ok = true;
    for (std::size_t n = 0; n < elems.size(); ++n)
    {
      if (label[n] == 0)
      {
        continue;
      }
      if (ceiling && !ceiling->part(label[n] - 1).contains(elems[n]))
      {
        ok = false;
        break;
      }
      p = p.with(label[n] - 1, elems[n]);
    }
    if (ok)
    {
      out.push_back(p);
    }
    std::size_t n = 0;
    while (n < elems.size() && ++label[n] > k)
    {
      label[n++] = 0;
    }
    if (n == elems.size())
    {
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Exhaustive k-submodularity via the meet/join lattice, plus orthant submodularity and
/// pairwise monotonicity reported separately.
inline KSubmodularReport check_k_submodular(SetFunction<Partition> const &f, SubsetMask ground, std::size_t k,
                                           std::optional<Partition> const &ceiling = std::nullopt,
                                           double tolerance = kOracleTolerance)
{
  auto const states = detail::labelings(ground, k, ceiling);
  std::map<std::vector<std::uint64_t>, double> value;
  auto key = [](Partition const &p) {
    std::vector<std::uint64_t> out;
    for (auto const &s : p.parts())
    {
      out.push_back(s.bits());
    }
    return out;
  };
  auto eval = [&](Partition const &p) {
    auto const kk = key(p);
    if (auto it = value.find(kk); it != value.end())
    {
      return it->second;
    }
    double const v = f(p);
    value.emplace(kk, v);
    return v;
  };
  auto allowed = [&](std::size_t slot, std::size_t e) { return !ceiling || ceiling->part(slot).contains(e); };

  KSubmodularReport report;
  for (auto const &s : states)
  {
    double const fs = eval(s);
    for (auto const &t : states)
    {
      double const gap = fs + eval(t) - eval(meet(s, t)) - eval(join(s, t));
      if (gap < -tolerance && (!report.lattice_witness || gap < report.lattice_witness->violation))
      {
        report.k_submodular = false;
        report.lattice_witness = PartitionWitness{s, t, 0, 0, 0, gap};
      }
      if (!s.preceq(t))
      {
        continue;
      }
      auto const supp_t = t.support();
      for (auto e : (ground - supp_t).elements())
      {
        for (std::size_t i = 0; i < k; ++i)
        {
          if (!allowed(i, e))
          {
            continue;
          }
          double const ds = eval(s.with(i, e)) - fs;
          double const dt = eval(t.with(i, e)) - eval(t);
          double const og = ds - dt;
          if (og < -tolerance && (!report.orthant_witness || og < report.orthant_witness->violation))
          {
            report.orthant_submodular = false;
            report.orthant_witness = PartitionWitness{s, t, e, i, i, og};
          }
        }
      }
    }
    for (auto e : (ground - s.support()).elements())
    {
      for (std::size_t i = 0; i < k; ++i)
      {
        for (std::size_t j = i + 1; j < k; ++j)
        {
          if (!allowed(i, e) || !allowed(j, e))
          {
            continue;
          }
          double const pm = eval(s.with(i, e)) + eval(s.with(j, e)) - 2.0 * fs;
          if (pm < -tolerance && (!report.pairwise_witness || pm < report.pairwise_witness->violation))
          {
            report.pairwise_monotone = false;
            report.pairwise_witness = PartitionWitness{s, s, e, i, j, pm};
          }
        }
      }
    }
  }
  return report;
}

/// Delta_{e,i} f(S) >= -tolerance for every S (below the ceiling when given) and allowed (i, e).
inline KSubmodularReport check_k_monotone(SetFunction<Partition> const &f, SubsetMask ground, std::size_t k,
                                          std::optional<Partition> const &ceiling = std::nullopt,
                                          double tolerance = kOracleTolerance)
{
  KSubmodularReport report;
  for (auto const &s : detail::labelings(ground, k, ceiling))
  {
    double const fs = f(s);
    for (auto e : (ground - s.support()).elements())
    {
      for (std::size_t i = 0; i < k; ++i)
      {
        if (ceiling && !ceiling->part(i).contains(e))
        {
          continue;
        }
        double const gap = f(s.with(i, e)) - fs;
        if (gap < -tolerance && (!report.orthant_witness || gap < report.orthant_witness->violation))
        {
          report.k_submodular = false;
          report.orthant_witness = PartitionWitness{s, s.with(i, e), e, i, i, gap};
        }
      }
    }
  }
  return report;
}

struct RatioReport
{
  double eta{std::numeric_limits<double>::infinity()};
  double gamma{std::numeric_limits<double>::infinity()};
  std::optional<SetWitness> eta_witness;
  std::optional<SetWitness> gamma_witness;
};

/// Supermodularity ratio eta_{U,m} and submodularity ratio gamma_{U,m} by enumeration.
///
/// Pairs where both numerator and denominator vanish (below 1e-12) are skipped.
inline RatioReport ratios(SetFunction<SubsetMask> const &f, SubsetMask ground, std::size_t m)
{
  if (ground.size() > kRatioGuard)
  {
    throw GuardError("ratio computation over " + std::to_string(ground.size()) + " elements exceeds the guard of " +
                     std::to_string(kRatioGuard));
  }
  if (m == 0)
  {
    throw InvalidArgument("ratios need m >= 1");
  }
  auto const all = detail::subsets_of(ground, kRatioGuard);
  std::unordered_map<std::uint64_t, double> value;
  for (auto const &s : all)
  {
    value[s.bits()] = f(s);
  }
  auto ratio = [](double num, double den) {
    if (std::abs(den) < kRatioZero)
    {
      return num > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return num / den;
  };
  RatioReport report;
  for (auto const &s : all)
  {
    double const fs = value[s.bits()];
    for (auto const &t : all)
    {
      if (t.empty() || t.size() > m || !t.disjoint(s))
      {
        continue;
      }
      double const joint = value[(s | t).bits()] - fs;
      double singles = 0.0;
      for (auto e : t.elements())
      {
        singles += value[s.with(e).bits()] - fs;
      }
      if (std::abs(joint) < kRatioZero && std::abs(singles) < kRatioZero)
      {
        continue;
      }
      double const eta = ratio(joint, singles);
      double const gamma = ratio(singles, joint);
      if (eta < report.eta)
      {
        report.eta = eta;
        report.eta_witness = SetWitness{s, t, eta};
      }
      if (gamma < report.gamma)
      {
        report.gamma = gamma;
        report.gamma_witness = SetWitness{s, t, gamma};
      }
    }
  }
  return report;
}

/// 1 - prod_i (1 - q_i eta_{U,q_i} gamma_{U,m} / m)
inline double batch_bound_factor(SetFunction<SubsetMask> const &f, SubsetMask ground, std::size_t m,
                                 std::span<const std::size_t> batches)
{
  double const gamma = ratios(f, ground, m).gamma;
  double prod = 1.0;
  for (auto q : batches)
  {
    double const eta = ratios(f, ground, q).eta;
    prod *= 1.0 - static_cast<double>(q) * eta * gamma / static_cast<double>(m);
  }
  return 1.0 - prod;
}

}  // namespace mcsubmod
