#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mcsubmod/state_space.hpp"

namespace mcsubmod {

/// k labeled, pairwise-disjoint groups (S_1, ..., S_k) of coordinates.
class Partition
{
public:
  Partition() = default;

  Partition(std::size_t k, std::size_t universe)
    : parts_(k, SubsetMask::empty(universe))
  {
    if (k == 0)
    {
      throw InvalidArgument("partition needs at least one group");
    }
  }

  explicit Partition(std::vector<SubsetMask> parts)
    : parts_(std::move(parts))
  {
    if (parts_.empty())
    {
      throw InvalidArgument("partition needs at least one group");
    }
    SubsetMask seen = SubsetMask::empty(parts_.front().universe());
    for (auto const &p : parts_)
    {
      if (!p.disjoint(seen))
      {
        throw InvalidArgument("partition groups overlap");
      }
      seen = seen | p;
    }
  }

  std::size_t k() const noexcept { return parts_.size(); }
  std::size_t universe() const { return parts_.empty() ? 0 : parts_.front().universe(); }
  SubsetMask const &part(std::size_t i) const { return parts_.at(i); }
  std::vector<SubsetMask> const &parts() const noexcept { return parts_; }

  SubsetMask support() const
  {
    SubsetMask s = SubsetMask::empty(universe());
    for (auto const &p : parts_)
    {
      s = s | p;
    }
    return s;
  }

  std::size_t size() const { return support().size(); }
  bool empty() const { return support().empty(); }

  /// Slot holding e, or k() if e is unassigned.
  std::size_t slot_of(std::size_t e) const
  {
    for (std::size_t i = 0; i < parts_.size(); ++i)
    {
      if (parts_[i].contains(e))
      {
        return i;
      }
    }
    return parts_.size();
  }

  Partition with(std::size_t slot, std::size_t e) const
  {
    if (support().contains(e))
    {
      throw InvalidArgument("element " + std::to_string(e + 1) + " already assigned");
    }
    auto out = *this;
    out.parts_.at(slot) = out.parts_[slot].with(e);
    return out;
  }

  Partition without(std::size_t e) const
  {
    auto out = *this;
    for (auto &p : out.parts_)
    {
      p = p.without(e);
    }
    return out;
  }

  /// S_i subset of V_i for every i.
  bool preceq(Partition const &v) const
  {
    if (v.k() != k())
    {
      return false;
    }
    for (std::size_t i = 0; i < k(); ++i)
    {
      if (!parts_[i].is_subset_of(v.parts_[i]))
      {
        return false;
      }
    }
    return true;
  }

  /// Groups as 1-based labels, groups separated by '|'.
  std::string label() const
  {
    std::string out;
    for (std::size_t i = 0; i < parts_.size(); ++i)
    {
      if (i > 0)
      {
        out += '|';
      }
      out += parts_[i].label();
    }
    return out;
  }

  friend bool operator==(Partition const &a, Partition const &b) = default;

private:
  std::vector<SubsetMask> parts_;
};

}  // namespace mcsubmod
