#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcsubmod/error.hpp"
#include "mcsubmod/state_space.hpp"

namespace mcsubmod {

inline constexpr double kStochasticTolerance = 1e-10;
inline constexpr double kPowerDriftTolerance = 1e-9;
inline constexpr double kDistributionTolerance = 1e-12;

/// Probability vector over a (possibly projected) state space.
struct Distribution
{
  ProductStateSpace space;
  std::vector<double> probs;

  Distribution() = default;

  Distribution(ProductStateSpace s, std::vector<double> p)
    : space(std::move(s))
    , probs(std::move(p))
  {
    if (probs.size() != space.total())
    {
      throw InvalidArgument("distribution has " + std::to_string(probs.size()) + " entries, space has " +
                            std::to_string(space.total()));
    }
  }

  static Distribution uniform(ProductStateSpace s)
  {
    auto const n = s.total();
    return {std::move(s), std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }

  double min() const { return *std::min_element(probs.begin(), probs.end()); }
};

/// Dense row-major transition matrix over a product state space.
class TransitionMatrix
{
public:
  TransitionMatrix() = default;

  TransitionMatrix(ProductStateSpace space, std::vector<double> rows)
    : space_(std::move(space))
    , data_(std::move(rows))
  {
    auto const n = space_.total();
    if (data_.size() != n * n)
    {
      throw InvalidArgument("transition matrix has " + std::to_string(data_.size()) + " entries, expected " +
                            std::to_string(n * n));
    }
  }

  static TransitionMatrix identity(ProductStateSpace space)
  {
    auto const n = space.total();
    std::vector<double> rows(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
      rows[i * n + i] = 1.0;
    }
    return {std::move(space), std::move(rows)};
  }

  /// Every row equal to pi.
  static TransitionMatrix rank_one(Distribution const &pi)
  {
    auto const n = pi.size();
    std::vector<double> rows(n * n);
    for (std::size_t i = 0; i < n; ++i)
    {
      std::copy(pi.probs.begin(), pi.probs.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    return {pi.space, std::move(rows)};
  }

  ProductStateSpace const &space() const noexcept { return space_; }
  std::size_t size() const noexcept { return space_.total(); }

  double operator()(std::size_t x, std::size_t y) const { return data_[x * size() + y]; }
  double &operator()(std::size_t x, std::size_t y) { return data_[x * size() + y]; }

  std::span<const double> row(std::size_t x) const { return {data_.data() + x * size(), size()}; }
  std::span<const double> data() const noexcept { return data_; }

private:
  ProductStateSpace space_;
  std::vector<double> data_;
};

/// First offending entry or row of a transition matrix.
struct Violation
{
  std::size_t row{0};
  std::optional<std::size_t> column;
  double value{0.0};
  std::string message;
};

inline std::optional<Violation> validate(TransitionMatrix const &p, double tolerance = kStochasticTolerance)
{
  auto const n = p.size();
  for (std::size_t x = 0; x < n; ++x)
  {
    double sum = 0.0;
    for (std::size_t y = 0; y < n; ++y)
    {
      double const v = p(x, y);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      {
        std::ostringstream msg;
        msg << "entry (" << x << ", " << y << ") = " << v << " outside [0, 1]";
        return Violation{x, y, v, msg.str()};
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance)
    {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << x << " sums to " << sum;
      return Violation{x, std::nullopt, sum, msg.str()};
    }
  }
  return std::nullopt;
}

inline void require_valid(TransitionMatrix const &p, double tolerance = kStochasticTolerance)
{
  if (auto v = validate(p, tolerance))
  {
    throw ValidationError("transition matrix is not stochastic: " + v->message);
  }
}

inline void require_distribution(Distribution const &mu, double tolerance = kDistributionTolerance)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
  {
    if (!std::isfinite(mu[i]) || mu[i] < 0.0)
    {
      throw ValidationError("distribution entry " + std::to_string(i) + " is negative or not finite");
    }
    sum += mu[i];
  }
  if (std::abs(sum - 1.0) > tolerance)
  {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution sums to " << sum;
    throw ValidationError(msg.str());
  }
}

inline void require_same_space(TransitionMatrix const &p, Distribution const &pi)
{
  if (!(p.space() == pi.space))
  {
    throw InvalidArgument("matrix and distribution live on different state spaces");
  }
}

/// mu P
inline std::vector<double> left_multiply(std::span<const double> mu, TransitionMatrix const &p)
{
  auto const n = p.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
  {
    double const w = mu[x];
    if (w == 0.0)
    {
      continue;
    }
    auto const r = p.row(x);
    for (std::size_t y = 0; y < n; ++y)
    {
      out[y] += w * r[y];
    }
  }
  return out;
}

/// ||pi P - pi||_1
inline double stationarity_residual(TransitionMatrix const &p, Distribution const &pi)
{
  require_same_space(p, pi);
  auto const next = left_multiply(pi.probs, p);
  double r = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i)
  {
    r += std::abs(next[i] - pi[i]);
  }
  return r;
}

struct StationaryOptions
{
  double tolerance = 1e-12;
  std::size_t max_iterations = 200'000;
};

namespace detail {

/// First state outside every closed communicating class of the sparsity pattern, if any.
/// Such states carry zero stationary mass.
inline std::optional<std::size_t> first_transient_state(std::vector<std::size_t> const &row_start,
                                                        std::vector<std::size_t> const &cols)
{
  auto const n = row_start.size() - 1;
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::size_t counter = 0;
  std::size_t ncomp = 0;
  for (std::size_t root = 0; root < n; ++root)
  {
    if (index[root] != unset)
    {
      continue;
    }
    frames.push_back({root, row_start[root]});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty())
    {
      auto &[v, k] = frames.back();
      if (k < row_start[v + 1])
      {
        auto const w = cols[k++];
        if (index[w] == unset)
        {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, row_start[w]});
        }
        else if (on_stack[w])
        {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      auto const done = v;
      frames.pop_back();
      if (!frames.empty())
      {
        auto const parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done])
      {
        std::size_t w = unset;
        do
        {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
        } while (w != done);
        ++ncomp;
      }
    }
  }
  std::vector<bool> leaks(ncomp, false);
  for (std::size_t x = 0; x < n; ++x)
  {
    for (std::size_t k = row_start[x]; k < row_start[x + 1]; ++k)
    {
      if (comp[cols[k]] != comp[x])
      {
        leaks[comp[x]] = true;
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x)
  {
    if (leaks[comp[x]])
    {
      return x;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Stationary distribution by power iteration on the lazy chain (P + I) / 2.
///
/// Iterates over the nonzero pattern of P, so sparse kernels such as
/// single-site Glauber dynamics cost O(nnz) per sweep.
inline Distribution stationary_distribution(TransitionMatrix const &p, StationaryOptions const &opts = {})
{
  require_valid(p);
  auto const n = p.size();

  std::vector<std::size_t> row_start(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t x = 0; x < n; ++x)
  {
    for (std::size_t y = 0; y < n; ++y)
    {
      if (p(x, y) != 0.0)
      {
        cols.push_back(y);
        vals.push_back(p(x, y));
      }
    }
    row_start[x + 1] = cols.size();
  }
  if (auto t = detail::first_transient_state(row_start, cols))
  {
    throw ValidationError("stationary distribution has zero mass at state " + std::to_string(*t) +
                          " (full support required)");
  }

  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  double residual = 0.0;
  for (std::size_t it = 0; it < opts.max_iterations; ++it)
  {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x)
    {
      for (std::size_t k = row_start[x]; k < row_start[x + 1]; ++k)
      {
        next[cols[k]] += pi[x] * vals[k];
      }
    }
    residual = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      residual += std::abs(next[i] - pi[i]);
      next[i] = 0.5 * (pi[i] + next[i]);
      total += next[i];
    }
    for (auto &v : next)
    {
      v /= total;
    }
    std::swap(pi, next);
    if (residual <= opts.tolerance)
    {
      break;
    }
  }
  if (residual > opts.tolerance)
  {
    std::ostringstream msg;
    msg << "stationary distribution did not converge after " << opts.max_iterations
        << " iterations (residual " << residual << ")";
    throw ConvergenceError(msg.str());
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    if (!(pi[i] > 0.0))
    {
      throw ValidationError("stationary distribution has zero mass at state " + std::to_string(i) +
                            " (full support required)");
    }
  }
  return {p.space(), std::move(pi)};
}

/// pi^(S): sum over the coordinates outside S. S empty gives the point mass on the singleton space.
inline Distribution marginalize(Distribution const &pi, SubsetMask s)
{
  auto const sub = pi.space.subspace(s);
  auto const map = pi.space.projection_map(s);
  std::vector<double> out(sub.total(), 0.0);
  for (std::size_t x = 0; x < pi.size(); ++x)
  {
    out[map[x]] += pi[x];
  }
  return {sub, std::move(out)};
}

/// Keep-S-in matrix P_pi^(S) on X^(S); coordinates of S keep their ascending order.
inline TransitionMatrix project_keep_in(TransitionMatrix const &p, Distribution const &pi, SubsetMask s)
{
  require_same_space(p, pi);
  auto const &space = p.space();
  if (s == space.all())
  {
    return p;
  }
  auto const sub = space.subspace(s);
  auto const map = space.projection_map(s);
  auto const m = sub.total();
  auto const n = p.size();
  std::vector<double> edge(m * m, 0.0);
  std::vector<double> mass(m, 0.0);
  for (std::size_t x = 0; x < n; ++x)
  {
    double const w = pi[x];
    if (w <= 0.0)
    {
      throw ValidationError("reference distribution lacks full support at state " + std::to_string(x));
    }
    auto const sx = map[x];
    mass[sx] += w;
    auto const r = p.row(x);
    double *dst = edge.data() + sx * m;
    for (std::size_t y = 0; y < n; ++y)
    {
      if (r[y] != 0.0)
      {
        dst[map[y]] += w * r[y];
      }
    }
  }
  for (std::size_t a = 0; a < m; ++a)
  {
    for (std::size_t b = 0; b < m; ++b)
    {
      edge[a * m + b] /= mass[a];
    }
  }
  return {sub, std::move(edge)};
}

/// Leave-S-out matrix: keep-in of the complement. S = all coordinates gives [1].
inline TransitionMatrix project_leave_out(TransitionMatrix const &p, Distribution const &pi, SubsetMask s)
{
  return project_keep_in(p, pi, s.complement());
}

/// Kronecker product; factor dims are concatenated in order. Empty list gives [1].
inline TransitionMatrix tensor(std::span<const TransitionMatrix> factors)
{
  std::vector<std::size_t> dims;
  std::vector<double> acc{1.0};
  std::size_t n = 1;
  for (auto const &f : factors)
  {
    for (auto d : f.space().dims())
    {
      dims.push_back(d);
    }
    auto const m = f.size();
    std::vector<double> next(n * m * n * m);
    auto const nm = n * m;
    for (std::size_t a = 0; a < n; ++a)
    {
      for (std::size_t b = 0; b < n; ++b)
      {
        double const v = acc[a * n + b];
        for (std::size_t c = 0; c < m; ++c)
        {
          for (std::size_t e = 0; e < m; ++e)
          {
            next[(a * m + c) * nm + (b * m + e)] = v * f(c, e);
          }
        }
      }
    }
    acc = std::move(next);
    n = nm;
  }
  return {ProductStateSpace(std::move(dims)), std::move(acc)};
}

inline TransitionMatrix tensor(std::initializer_list<TransitionMatrix> factors)
{
  return tensor(std::span<const TransitionMatrix>(factors.begin(), factors.size()));
}

inline Distribution tensor_dist(std::span<const Distribution> factors)
{
  std::vector<std::size_t> dims;
  std::vector<double> acc{1.0};
  for (auto const &f : factors)
  {
    for (auto d : f.space.dims())
    {
      dims.push_back(d);
    }
    std::vector<double> next;
    next.reserve(acc.size() * f.size());
    for (double a : acc)
    {
      for (double b : f.probs)
      {
        next.push_back(a * b);
      }
    }
    acc = std::move(next);
  }
  return {ProductStateSpace(std::move(dims)), std::move(acc)};
}

inline Distribution tensor_dist(std::initializer_list<Distribution> factors)
{
  return tensor_dist(std::span<const Distribution>(factors.begin(), factors.size()));
}

/// A factor of a block-product kernel: `kernel` lives on the coordinates of `block`.
struct Block
{
  SubsetMask block;
  TransitionMatrix kernel;
};

/// Tensor product of kernels on disjoint coordinate blocks, laid out in the
/// original coordinate order of `space` (not the concatenation order).
/// The blocks must cover every coordinate exactly once.
inline TransitionMatrix tensor_blocks(ProductStateSpace const &space, std::span<const Block> blocks)
{
  SubsetMask covered = SubsetMask::empty(space.dimension());
  std::vector<std::vector<std::size_t>> maps;
  for (auto const &b : blocks)
  {
    if (!b.block.disjoint(covered))
    {
      throw InvalidArgument("tensor blocks overlap");
    }
    if (!(b.kernel.space() == space.subspace(b.block)))
    {
      throw InvalidArgument("block kernel does not match its coordinates");
    }
    covered = covered | b.block;
    maps.push_back(space.projection_map(b.block));
  }
  if (!(covered == space.all()))
  {
    throw InvalidArgument("tensor blocks do not cover the state space");
  }
  auto const n = space.total();
  std::vector<double> rows(n * n);
  for (std::size_t x = 0; x < n; ++x)
  {
    for (std::size_t y = 0; y < n; ++y)
    {
      double v = 1.0;
      for (std::size_t k = 0; k < blocks.size() && v != 0.0; ++k)
      {
        v *= blocks[k].kernel(maps[k][x], maps[k][y]);
      }
      rows[x * n + y] = v;
    }
  }
  return {space, std::move(rows)};
}

/// Edge measure (pi [x] P)(x, y) = pi(x) P(x, y) as a distribution on X x X.
inline Distribution edge_measure(Distribution const &pi, TransitionMatrix const &p)
{
  require_same_space(p, pi);
  std::vector<std::size_t> dims(pi.space.dims().begin(), pi.space.dims().end());
  dims.insert(dims.end(), pi.space.dims().begin(), pi.space.dims().end());
  auto const n = p.size();
  std::vector<double> e(n * n);
  for (std::size_t x = 0; x < n; ++x)
  {
    for (std::size_t y = 0; y < n; ++y)
    {
      e[x * n + y] = pi[x] * p(x, y);
    }
  }
  return {ProductStateSpace(std::move(dims)), std::move(e)};
}

inline TransitionMatrix multiply(TransitionMatrix const &a, TransitionMatrix const &b)
{
  if (!(a.space() == b.space()))
  {
    throw InvalidArgument("cannot multiply matrices over different spaces");
  }
  auto const n = a.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    double *dst = out.data() + i * n;
    for (std::size_t k = 0; k < n; ++k)
    {
      double const v = a(i, k);
      if (v == 0.0)
      {
        continue;
      }
      auto const r = b.row(k);
      for (std::size_t j = 0; j < n; ++j)
      {
        dst[j] += v * r[j];
      }
    }
  }
  return {a.space(), std::move(out)};
}

/// P^n by repeated squaring. Rows are never renormalized; drift beyond 1e-9 is an error.
inline TransitionMatrix matrix_power(TransitionMatrix const &p, std::size_t n)
{
  auto result = TransitionMatrix::identity(p.space());
  auto base = p;
  bool first = true;
  while (n > 0)
  {
    if (n & 1U)
    {
      result = first ? base : multiply(result, base);
      first = false;
    }
    n >>= 1U;
    if (n > 0)
    {
      base = multiply(base, base);
    }
  }
  if (auto v = validate(result, kPowerDriftTolerance))
  {
    throw ValidationError("matrix power drifted from stochastic: " + v->message);
  }
  return result;
}

/// max_x (1/2) sum_y |M(x, y) - ref(y)|
inline double worst_case_tv(TransitionMatrix const &m, Distribution const &ref)
{
  require_same_space(m, ref);
  double worst = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x)
  {
    auto const r = m.row(x);
    double tv = 0.0;
    for (std::size_t y = 0; y < m.size(); ++y)
    {
      tv += std::abs(r[y] - ref[y]);
    }
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

/// Row-wise reference version: max_x (1/2) sum_y |M(x, y) - R(x, y)|.
inline double worst_case_tv(TransitionMatrix const &m, TransitionMatrix const &ref)
{
  if (!(m.space() == ref.space()))
  {
    throw InvalidArgument("total variation between matrices over different spaces");
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x)
  {
    double tv = 0.0;
    for (std::size_t y = 0; y < m.size(); ++y)
    {
      tv += std::abs(m(x, y) - ref(x, y));
    }
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

/// max_x || P^n(x, .) - ref ||_TV
inline double worst_case_tv(TransitionMatrix const &p, Distribution const &ref, std::size_t n)
{
  return worst_case_tv(matrix_power(p, n), ref);
}

/// True if pi equals the product of its single-coordinate marginals within `tolerance` (max abs).
inline bool is_product_form(Distribution const &pi, double tolerance = 1e-10)
{
  auto const d = pi.space.dimension();
  std::vector<Distribution> marginals;
  for (std::size_t i = 0; i < d; ++i)
  {
    marginals.push_back(marginalize(pi, SubsetMask::empty(d).with(i)));
  }
  auto const prod = tensor_dist(marginals);
  for (std::size_t x = 0; x < pi.size(); ++x)
  {
    if (std::abs(prod[x] - pi[x]) > tolerance)
    {
      return false;
    }
  }
  return true;
}

}  // namespace mcsubmod
