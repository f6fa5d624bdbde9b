#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trapwalk/errors.hpp"

namespace trapwalk {

using Coord = std::int64_t;

// Finite set of lattice points, stored flat (n * dim coords) and sorted
// lexicographically so membership is a binary search.
class SiteSet {
 public:
  SiteSet() : dim_(1) {}
  SiteSet(int dim, std::vector<Coord> flat_coords);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ ? flat_.size() / dim_ : 0; }
  bool empty() const noexcept { return flat_.empty(); }

  std::span<const Coord> site(std::size_t i) const {
    return {flat_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

  // Index of a site, or npos when absent.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(std::span<const Coord> pt) const;
  bool contains(std::span<const Coord> pt) const { return find(pt) != npos; }

  const std::vector<Coord>& flat() const noexcept { return flat_; }

 private:
  int dim_;
  std::vector<Coord> flat_;
};

}  // namespace trapwalk
