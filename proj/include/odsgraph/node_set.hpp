#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iterator>

namespace odsg {

/// Maximum number of variables in one graph. Node sets are 64-bit masks.
inline constexpr std::size_t kMaxNodes = 64;

/// Opaque node handle: the declaration index in the graph's variable table.
/// Handles survive induced-subgraph and moralization operations unchanged.
struct NodeId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

class NodeSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = NodeId;
    using difference_type = std::ptrdiff_t;
    using pointer = const NodeId*;
    using reference = NodeId;

    constexpr iterator() = default;
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}

    constexpr NodeId operator*() const {
      return NodeId{static_cast<std::uint32_t>(std::countr_zero(rest_))};
    }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      iterator copy = *this;
      ++*this;
      return copy;
    }
    friend constexpr bool operator==(iterator, iterator) = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr NodeSet() = default;
  constexpr NodeSet(std::initializer_list<NodeId> ids) {
    for (NodeId id : ids) insert(id);
  }

  static constexpr NodeSet from_bits(std::uint64_t bits) {
    NodeSet s;
    s.bits_ = bits;
    return s;
  }
  static constexpr NodeSet single(NodeId id) { return NodeSet{id}; }
  /// The first `n` node ids.
  static constexpr NodeSet first(std::size_t n) {
    return from_bits(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(NodeId id) const { return (bits_ >> id.index) & 1U; }
  constexpr bool contains(NodeSet other) const { return (other.bits_ & ~bits_) == 0; }
  constexpr bool intersects(NodeSet other) const { return (bits_ & other.bits_) != 0; }

  constexpr void insert(NodeId id) { bits_ |= std::uint64_t{1} << id.index; }
  constexpr void erase(NodeId id) { bits_ &= ~(std::uint64_t{1} << id.index); }

  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  constexpr NodeSet operator|(NodeSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr NodeSet operator&(NodeSet o) const { return from_bits(bits_ & o.bits_); }
  constexpr NodeSet operator-(NodeSet o) const { return from_bits(bits_ & ~o.bits_); }
  constexpr NodeSet& operator|=(NodeSet o) { bits_ |= o.bits_; return *this; }
  constexpr NodeSet& operator&=(NodeSet o) { bits_ &= o.bits_; return *this; }
  constexpr NodeSet& operator-=(NodeSet o) { bits_ &= ~o.bits_; return *this; }

  friend constexpr bool operator==(NodeSet, NodeSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

}  // namespace odsg
