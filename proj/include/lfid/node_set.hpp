#pragma once

#include <bit>
#include <cstdint>
#include <iterator>
#include <vector>

namespace lfid {

inline constexpr int kMaxNodes = 64;

// Set of node indices backed by a 64-bit mask. Iteration is in ascending index order.
class NodeSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = int;
    using difference_type = std::ptrdiff_t;
    using pointer = const int*;
    using reference = int;

    constexpr iterator() = default;
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr int operator*() const { return std::countr_zero(rest_); }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    constexpr bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr NodeSet() = default;
  constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr NodeSet single(int i) { return NodeSet(std::uint64_t{1} << i); }
  static constexpr NodeSet first(int n) {
    return NodeSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static NodeSet of(const std::vector<int>& members) {
    NodeSet s;
    for (int m : members) s.insert(m);
    return s;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1U; }
  constexpr void insert(int i) { bits_ |= std::uint64_t{1} << i; }
  constexpr void erase(int i) { bits_ &= ~(std::uint64_t{1} << i); }
  constexpr int front() const { return std::countr_zero(bits_); }
  constexpr bool subset_of(NodeSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(NodeSet o) const { return (bits_ & o.bits_) != 0; }

  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  std::vector<int> to_vector() const { return {begin(), end()}; }

  constexpr NodeSet operator|(NodeSet o) const { return NodeSet(bits_ | o.bits_); }
  constexpr NodeSet operator&(NodeSet o) const { return NodeSet(bits_ & o.bits_); }
  constexpr NodeSet operator-(NodeSet o) const { return NodeSet(bits_ & ~o.bits_); }
  constexpr NodeSet& operator|=(NodeSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr NodeSet& operator&=(NodeSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  constexpr NodeSet& operator-=(NodeSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }
  constexpr bool operator==(const NodeSet&) const = default;
  // Size first, then lexicographic on the sorted member list.
  bool search_order_less(NodeSet o) const;

 private:
  std::uint64_t bits_ = 0;
};

inline bool NodeSet::search_order_less(NodeSet o) const {
  if (size() != o.size()) return size() < o.size();
  auto a = begin();
  auto b = o.begin();
  for (; a != end(); ++a, ++b) {
    if (*a != *b) return *a < *b;
  }
  return false;
}

// All subsets of `universe` with exactly k members, in lexicographic order.
std::vector<NodeSet> subsets_of_size(NodeSet universe, int k);

// All subsets of `universe`, ascending size then lexicographic.
std::vector<NodeSet> subsets_in_search_order(NodeSet universe, int max_size = kMaxNodes);

}  // namespace lfid
