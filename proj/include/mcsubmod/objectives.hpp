#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcsubmod/entropy_cache.hpp"
#include "mcsubmod/partition.hpp"

namespace mcsubmod {

enum class Constraint
{
  AtMost,
  Exactly,
};

inline std::string_view to_string(Constraint c) { return c == Constraint::AtMost ? "<=" : "="; }

/// A stationary chain with its memoized projection entropies.
struct Chain
{
  TransitionMatrix P;
  Distribution pi;
  std::shared_ptr<const ChainEntropies> H;
  bool product_form{false};

  Chain(TransitionMatrix p, Distribution stationary)
    : P(std::move(p))
    , pi(std::move(stationary))
    , H(std::make_shared<ChainEntropies>(P, pi))
    , product_form(is_product_form(pi))
  {
  }

  std::size_t dimension() const { return P.space().dimension(); }
  SubsetMask all() const { return P.space().all(); }
  SubsetMask single(std::size_t e) const { return SubsetMask::empty(dimension()).with(e); }
};

namespace detail {

inline double modular_cost(std::vector<std::vector<double>> const &w, double beta, SubsetMask const &s)
{
  double sum = -beta;
  for (auto e : s.elements())
  {
    sum += w[0][e];
  }
  return sum;
}

inline double modular_cost(std::vector<std::vector<double>> const &w, double beta, Partition const &s)
{
  double sum = -beta;
  for (std::size_t i = 0; i < s.k(); ++i)
  {
    for (auto e : s.part(i).elements())
    {
      sum += w[i][e];
    }
  }
  return sum;
}

}  // namespace detail

/// Maximization target f with an optional split f + shift = g - c.
///
/// c(S) = -beta + sum of per-(slot, element) weights, g is monotone and
/// (k-)submodular when `guaranteed` holds. Without g (raw entries) only f is
/// available. The user-facing number is reported(S) = report_sign * f(S).
template <class State>
struct Objective
{
  std::string id;
  State ground;
  std::function<double(State const &)> f;
  std::function<double(State const &)> g;
  std::vector<std::vector<double>> weights;
  double beta{0.0};
  double beta_bound{0.0};
  double shift{0.0};
  double report_sign{1.0};
  Constraint constraint{Constraint::AtMost};
  bool guaranteed{true};
  bool heuristic{false};
  std::size_t min_m{0};
  std::size_t max_m{std::numeric_limits<std::size_t>::max()};

  bool decomposed() const { return static_cast<bool>(g); }

  double weight(std::size_t slot, std::size_t e) const { return weights.at(slot).at(e); }

  double c(State const &s) const { return detail::modular_cost(weights, beta, s); }

  double reported(State const &s) const { return report_sign * f(s); }

  bool admissible(std::size_t m) const { return m >= min_m && m <= max_m; }

  void require_admissible(std::size_t m) const
  {
    if (!admissible(m))
    {
      throw InvalidArgument("m = " + std::to_string(m) + " outside the admissible range [" +
                            std::to_string(min_m) + ", " + std::to_string(max_m) + "] for " + id);
    }
  }
};

using SubsetObjective = Objective<SubsetMask>;
using PartitionObjective = Objective<Partition>;

struct ObjectiveParams
{
  std::optional<double> beta;
  bool heuristic{false};
  std::optional<SubsetMask> fixed_set;
};

inline std::vector<std::string> const &subset_problem_ids()
{
  static std::vector<std::string> const ids{
    "entropy",        "entropy-product-form",   "dist2fact",           "dist2indp",       "dist2indp-complement",
    "dist2stat-product-form", "dist2stat-complement", "dist2stat-monotone", "dist2fact-fixed",
  };
  return ids;
}

inline std::vector<std::string> const &partition_problem_ids()
{
  static std::vector<std::string> const ids{
    "k-entropy",      "k-entropy-product-form", "k-dist2fact",           "k-dist2indp",
    "k-dist2indp-complement", "k-dist2stat",    "k-dist2stat-complement",
  };
  return ids;
}

inline bool is_partition_problem(std::string_view id) { return id.starts_with("k-"); }

namespace detail {

inline double resolve_beta(std::string const &id, std::optional<double> requested, double bound)
{
  if (!requested)
  {
    return bound;
  }
  if (*requested > bound + 1e-12)
  {
    throw InvalidArgument("beta = " + std::to_string(*requested) + " exceeds the admissible bound " +
                          std::to_string(bound) + " for " + id);
  }
  return *requested;
}

inline bool check_product_form(Chain const &chain, std::string const &id, bool allow_heuristic)
{
  if (chain.product_form)
  {
    return true;
  }
  if (!allow_heuristic)
  {
    throw InvalidArgument(id + " requires a product-form stationary distribution (pass the heuristic flag to run "
                               "without the guarantee)");
  }
  return false;
}

template <class State>
void finish_split(Objective<State> &obj)
{
  obj.g = [f = obj.f, shift = obj.shift, w = obj.weights, beta = obj.beta](State const &s) {
    return f(s) + shift + modular_cost(w, beta, s);
  };
}

}  // namespace detail

/// Subset-form catalog entry.
inline SubsetObjective build_subset_objective(std::string const &id, Chain const &chain,
                                              ObjectiveParams const &params = {})
{
  auto const H = chain.H;
  auto const d = chain.dimension();
  auto const all = chain.all();
  SubsetObjective obj;
  obj.id = id;
  obj.ground = all;
  obj.weights.assign(1, std::vector<double>(d, 0.0));
  auto &w = obj.weights[0];

  if (id == "entropy")
  {
    double bound = 0.0;
    for (std::size_t i = 0; i < d; ++i)
    {
      bound -= std::log(static_cast<double>(chain.P.space().dim(i)));
      w[i] = H->rate(all.without(i)) - H->rate(all);
    }
    obj.beta_bound = bound;
    obj.beta = detail::resolve_beta(id, params.beta, bound);
    obj.f = [H](SubsetMask s) { return H->rate(s); };
    detail::finish_split(obj);
  }
  else if (id == "entropy-product-form")
  {
    detail::check_product_form(chain, id, false);
    for (std::size_t i = 0; i < d; ++i)
    {
      w[i] = H->marginal(chain.single(i));
    }
    obj.beta = detail::resolve_beta(id, params.beta, 0.0);
    obj.f = [H](SubsetMask s) { return H->rate(s); };
    auto const beta = obj.beta;
    obj.g = [H, beta](SubsetMask s) { return H->rate(s) + H->marginal(s) - beta; };
  }
  else if (id == "dist2fact")
  {
    for (std::size_t i = 0; i < d; ++i)
    {
      w[i] = H->factorizability(chain.single(i));
    }
    obj.beta = detail::resolve_beta(id, params.beta, 0.0);
    obj.f = [H](SubsetMask s) { return H->factorizability(s); };
    detail::finish_split(obj);
  }
  else if (id == "dist2indp")
  {
    for (std::size_t i = 0; i < d; ++i)
    {
      w[i] = H->factorizability(chain.single(i));
    }
    obj.beta = detail::resolve_beta(id, params.beta, 0.0);
    obj.f = [H](SubsetMask s) { return -H->independence(s); };
    obj.report_sign = -1.0;
    obj.constraint = Constraint::Exactly;
    obj.min_m = 2;
    obj.max_m = d;
    detail::finish_split(obj);
  }
  else if (id == "dist2indp-complement")
  {
    obj.shift = H->independence(all);
    obj.f = [H](SubsetMask s) { return -H->independence(s.complement()); };
    obj.report_sign = -1.0;
    obj.max_m = d >= 2 ? d - 2 : 0;
    detail::finish_split(obj);
  }
  else if (id == "dist2stat-product-form")
  {
    obj.guaranteed = detail::check_product_form(chain, id, params.heuristic);
    obj.heuristic = !obj.guaranteed;
    for (std::size_t i = 0; i < d; ++i)
    {
      w[i] = H->factorizability(chain.single(i)) + H->stationarity(chain.single(i));
    }
    obj.beta = detail::resolve_beta(id, params.beta, 0.0);
    obj.f = [H](SubsetMask s) { return -H->stationarity(s); };
    obj.report_sign = -1.0;
    detail::finish_split(obj);
  }
  else if (id == "dist2stat-complement")
  {
    obj.guaranteed = detail::check_product_form(chain, id, params.heuristic);
    obj.heuristic = !obj.guaranteed;
    obj.shift = H->stationarity(all);
    obj.f = [H](SubsetMask s) { return -H->stationarity(s.complement()); };
    obj.report_sign = -1.0;
    detail::finish_split(obj);
  }
  else if (id == "dist2stat-monotone")
  {
    obj.f = [H](SubsetMask s) { return H->stationarity(s); };
    obj.constraint = Constraint::Exactly;
  }
  else if (id == "dist2fact-fixed")
  {
    if (!params.fixed_set || params.fixed_set->empty())
    {
      throw InvalidArgument(id + " needs a non-empty fixed set W");
    }
    auto const W = *params.fixed_set;
    chain.P.space().check_mask(W);
    obj.ground = W.complement();
    obj.f = [H, W](SubsetMask s) { return H->factorizability_fixed(W, s); };
    obj.constraint = Constraint::Exactly;
    obj.max_m = obj.ground.size();
  }
  else
  {
    throw InvalidArgument("unknown subset problem id '" + id + "'");
  }
  return obj;
}

/// Partition-form catalog entry over the ceiling V.
inline PartitionObjective build_partition_objective(std::string const &id, Chain const &chain, Partition const &V,
                                                    ObjectiveParams const &params = {})
{
  auto const H = chain.H;
  auto const d = chain.dimension();
  if (V.universe() != d)
  {
    throw InvalidArgument("ceiling partition universe does not match the chain dimension");
  }
  auto const k = V.k();
  auto const supp = V.support();
  PartitionObjective obj;
  obj.id = id;
  obj.ground = V;
  obj.weights.assign(k, std::vector<double>(d, 0.0));
  obj.max_m = supp.size();

  auto for_each_ceiling = [&](auto &&fn) {
    for (std::size_t i = 0; i < k; ++i)
    {
      for (auto e : V.part(i).elements())
      {
        fn(i, e);
      }
    }
  };
  auto single = [&](std::size_t e) { return chain.single(e); };

  if (id == "k-entropy")
  {
    double bound = 0.0;
    for_each_ceiling([&](std::size_t i, std::size_t e) {
      bound -= std::log(static_cast<double>(chain.P.space().dim(e)));
      obj.weights[i][e] = H->rate(V.part(i).without(e)) - H->rate(V.part(i));
    });
    obj.beta_bound = bound;
    obj.beta = detail::resolve_beta(id, params.beta, bound);
    obj.f = [H](Partition const &s) {
      double sum = 0.0;
      for (auto const &p : s.parts())
      {
        sum += H->rate(p);
      }
      return sum;
    };
    detail::finish_split(obj);
  }
  else if (id == "k-entropy-product-form")
  {
    detail::check_product_form(chain, id, false);
    for_each_ceiling([&](std::size_t i, std::size_t e) { obj.weights[i][e] = H->marginal(single(e)); });
    obj.beta = detail::resolve_beta(id, params.beta, 0.0);
    obj.f = [H](Partition const &s) {
      double sum = 0.0;
      for (auto const &p : s.parts())
      {
        sum += H->rate(p);
      }
      return sum;
    };
    auto const beta = obj.beta;
    obj.g = [H, beta](Partition const &s) {
      double sum = -beta;
      for (auto const &p : s.parts())
      {
        sum += H->rate(p) + H->marginal(p);
      }
      return sum;
    };
  }
  else if (id == "k-dist2fact")
  {
    auto const rest = supp.complement();
    double bound = 0.0;
    for_each_ceiling([&](std::size_t i, std::size_t e) {
      bound -= H->rate(rest) + H->rate(single(e));
      obj.weights[i][e] = H->rate(V.part(i).without(e)) + H->rate(rest.with(e)) - H->rate(V.part(i)) - H->rate(rest);
    });
    obj.beta_bound = bound;
    obj.beta = detail::resolve_beta(id, params.beta, bound);
    obj.f = [H](Partition const &s) {
      auto blocks = s.parts();
      blocks.push_back(s.support().complement());
      return H->factorizability(blocks);
    };
    detail::finish_split(obj);
  }
  else if (id == "k-dist2indp")
  {
    for_each_ceiling([&](std::size_t i, std::size_t e) {
      obj.weights[i][e] = H->rate(V.part(i).without(e)) + H->rate(single(e)) - H->rate(V.part(i));
    });
    obj.beta = detail::resolve_beta(id, params.beta, 0.0);
    obj.f = [H](Partition const &s) {
      double sum = 0.0;
      for (auto const &p : s.parts())
      {
        sum -= H->independence(p);
      }
      return sum;
    };
    obj.report_sign = -1.0;
    obj.constraint = Constraint::Exactly;
    obj.min_m = k + 1;
    detail::finish_split(obj);
  }
  else if (id == "k-dist2indp-complement")
  {
    double shift = 0.0;
    for (auto const &p : V.parts())
    {
      shift += H->independence(p);
    }
    obj.shift = shift;
    obj.f = [H, V](Partition const &s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < s.k(); ++i)
      {
        sum -= H->independence(V.part(i) - s.part(i));
      }
      return sum;
    };
    obj.report_sign = -1.0;
    obj.max_m = std::min(supp.size(), d >= k + 1 ? d - k - 1 : 0);
    detail::finish_split(obj);
  }
  else if (id == "k-dist2stat")
  {
    obj.guaranteed = detail::check_product_form(chain, id, params.heuristic);
    obj.heuristic = !obj.guaranteed;
    for_each_ceiling([&](std::size_t i, std::size_t e) {
      auto const vi = V.part(i);
      obj.weights[i][e] = H->rate(single(e)) + H->rate(vi.without(e)) - H->rate(vi) + H->stationarity(single(e));
    });
    obj.beta = detail::resolve_beta(id, params.beta, 0.0);
    obj.f = [H](Partition const &s) {
      double sum = 0.0;
      for (auto const &p : s.parts())
      {
        sum -= H->stationarity(p);
      }
      return sum;
    };
    obj.report_sign = -1.0;
    detail::finish_split(obj);
  }
  else if (id == "k-dist2stat-complement")
  {
    obj.guaranteed = detail::check_product_form(chain, id, params.heuristic);
    obj.heuristic = !obj.guaranteed;
    double shift = 0.0;
    for (auto const &p : V.parts())
    {
      shift += H->stationarity(p);
    }
    obj.shift = shift;
    obj.f = [H, V](Partition const &s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < s.k(); ++i)
      {
        sum -= H->stationarity(V.part(i) - s.part(i));
      }
      return sum;
    };
    obj.report_sign = -1.0;
    detail::finish_split(obj);
  }
  else
  {
    throw InvalidArgument("unknown partition problem id '" + id + "'");
  }
  return obj;
}

}  // namespace mcsubmod
