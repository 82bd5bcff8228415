#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mcsubmod/error.hpp"

namespace mcsubmod {

/// A subset of the coordinate universe {0, ..., d-1}, stored as a bitmask.
///
/// Coordinates are 0-based here; the CLI and CSV output use 1-based labels.
class SubsetMask
{
public:
  static constexpr std::size_t kMaxUniverse = 63;

  SubsetMask() = default;

  SubsetMask(std::uint64_t bits, std::size_t universe)
    : bits_(bits)
    , universe_(universe)
  {
    if (universe > kMaxUniverse)
    {
      throw InvalidArgument("subset universe too large: " + std::to_string(universe));
    }
    if (universe < 64 && (bits >> universe) != 0)
    {
      throw InvalidArgument("subset mask has bits outside the universe");
    }
  }

  static SubsetMask empty(std::size_t universe) { return {0, universe}; }

  static SubsetMask full(std::size_t universe)
  {
    return {universe == 0 ? 0 : (~std::uint64_t{0} >> (64 - universe)), universe};
  }

  static SubsetMask of(std::size_t universe, std::initializer_list<std::size_t> elements)
  {
    return of(universe, std::span<const std::size_t>(elements.begin(), elements.size()));
  }

  static SubsetMask of(std::size_t universe, std::span<const std::size_t> elements)
  {
    SubsetMask s = empty(universe);
    for (auto e : elements)
    {
      s = s.with(e);
    }
    return s;
  }

  std::uint64_t bits() const noexcept { return bits_; }
  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
  bool empty() const noexcept { return bits_ == 0; }

  bool contains(std::size_t e) const noexcept { return e < universe_ && ((bits_ >> e) & 1U) != 0; }

  SubsetMask with(std::size_t e) const
  {
    check_element(e);
    return {bits_ | (std::uint64_t{1} << e), universe_};
  }

  SubsetMask without(std::size_t e) const
  {
    check_element(e);
    return {bits_ & ~(std::uint64_t{1} << e), universe_};
  }

  SubsetMask complement() const { return {full(universe_).bits_ & ~bits_, universe_}; }

  bool is_subset_of(SubsetMask other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  bool disjoint(SubsetMask other) const noexcept { return (bits_ & other.bits_) == 0; }

  /// Elements in ascending order.
  std::vector<std::size_t> elements() const
  {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1)
    {
      out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    }
    return out;
  }

  /// 1-based labels joined by ';' ("" for the empty set).
  std::string label() const
  {
    std::string out;
    for (auto e : elements())
    {
      if (!out.empty())
      {
        out += ';';
      }
      out += std::to_string(e + 1);
    }
    return out;
  }

  friend SubsetMask operator|(SubsetMask a, SubsetMask b) { return {a.bits_ | b.bits_, same(a, b)}; }
  friend SubsetMask operator&(SubsetMask a, SubsetMask b) { return {a.bits_ & b.bits_, same(a, b)}; }
  friend SubsetMask operator-(SubsetMask a, SubsetMask b) { return {a.bits_ & ~b.bits_, same(a, b)}; }
  friend bool operator==(SubsetMask a, SubsetMask b) = default;

private:
  void check_element(std::size_t e) const
  {
    if (e >= universe_)
    {
      throw InvalidArgument("element " + std::to_string(e) + " outside universe of size " +
                            std::to_string(universe_));
    }
  }

  static std::size_t same(SubsetMask a, SubsetMask b)
  {
    if (a.universe_ != b.universe_)
    {
      throw InvalidArgument("subset masks over different universes");
    }
    return a.universe_;
  }

  std::uint64_t bits_{0};
  std::size_t universe_{0};
};

/// Product state space X = X^(1) x ... x X^(d) with mixed-radix indexing.
///
/// Coordinate 0 is the most significant digit and coordinate d-1 varies
/// fastest. A space with no coordinates is the singleton space (total 1),
/// used for the P^(empty) = [1] convention.
class ProductStateSpace
{
public:
  ProductStateSpace() = default;

  explicit ProductStateSpace(std::vector<std::size_t> dims)
    : dims_(std::move(dims))
    , strides_(dims_.size())
  {
    if (dims_.size() > SubsetMask::kMaxUniverse)
    {
      throw InvalidArgument("too many coordinates");
    }
    std::size_t stride = 1;
    for (std::size_t i = dims_.size(); i-- > 0;)
    {
      if (dims_[i] < 2)
      {
        throw InvalidArgument("coordinate " + std::to_string(i + 1) + " has fewer than 2 states");
      }
      strides_[i] = stride;
      if (stride > std::numeric_limits<std::size_t>::max() / dims_[i])
      {
        throw InvalidArgument("state space size overflows the index type");
      }
      stride *= dims_[i];
    }
    total_ = stride;
  }

  static ProductStateSpace binary(std::size_t d) { return ProductStateSpace(std::vector<std::size_t>(d, 2)); }

  std::size_t dimension() const noexcept { return dims_.size(); }
  std::size_t total() const noexcept { return total_; }
  std::span<const std::size_t> dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t stride(std::size_t i) const { return strides_.at(i); }

  std::size_t index_of(std::span<const std::size_t> digits) const
  {
    if (digits.size() != dims_.size())
    {
      throw InvalidArgument("state has " + std::to_string(digits.size()) + " digits, expected " +
                            std::to_string(dims_.size()));
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i)
    {
      if (digits[i] >= dims_[i])
      {
        throw InvalidArgument("digit " + std::to_string(digits[i]) + " out of range at coordinate " +
                              std::to_string(i + 1));
      }
      index += digits[i] * strides_[i];
    }
    return index;
  }

  std::size_t index_of(std::initializer_list<std::size_t> digits) const
  {
    return index_of(std::span<const std::size_t>(digits.begin(), digits.size()));
  }

  std::vector<std::size_t> state_of(std::size_t index) const
  {
    if (index >= total_)
    {
      throw InvalidArgument("state index out of range");
    }
    std::vector<std::size_t> digits(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i)
    {
      digits[i] = (index / strides_[i]) % dims_[i];
    }
    return digits;
  }

  std::size_t digit(std::size_t index, std::size_t coordinate) const
  {
    return (index / strides_[coordinate]) % dims_[coordinate];
  }

  /// Space of the coordinates in S, re-indexed compactly in ascending order.
  ProductStateSpace subspace(SubsetMask s) const
  {
    check_mask(s);
    std::vector<std::size_t> sub;
    for (auto e : s.elements())
    {
      sub.push_back(dims_[e]);
    }
    return ProductStateSpace(std::move(sub));
  }

  /// For every global index, its index in subspace(S).
  std::vector<std::size_t> projection_map(SubsetMask s) const
  {
    check_mask(s);
    auto const elems = s.elements();
    std::vector<std::size_t> sub_strides(elems.size());
    std::size_t stride = 1;
    for (std::size_t k = elems.size(); k-- > 0;)
    {
      sub_strides[k] = stride;
      stride *= dims_[elems[k]];
    }
    std::vector<std::size_t> map(total_, 0);
    for (std::size_t x = 0; x < total_; ++x)
    {
      std::size_t sub = 0;
      for (std::size_t k = 0; k < elems.size(); ++k)
      {
        sub += digit(x, elems[k]) * sub_strides[k];
      }
      map[x] = sub;
    }
    return map;
  }

  /// Product of |X^(i)| over i in S.
  std::size_t count(SubsetMask s) const
  {
    check_mask(s);
    std::size_t n = 1;
    for (auto e : s.elements())
    {
      n *= dims_[e];
    }
    return n;
  }

  SubsetMask all() const { return SubsetMask::full(dims_.size()); }

  void check_mask(SubsetMask s) const
  {
    if (s.universe() != dims_.size())
    {
      throw InvalidArgument("subset universe " + std::to_string(s.universe()) +
                            " does not match dimension " + std::to_string(dims_.size()));
    }
  }

  friend bool operator==(ProductStateSpace const &a, ProductStateSpace const &b) { return a.dims_ == b.dims_; }

private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_{1};
};

}  // namespace mcsubmod
