#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lfp/net.hpp"

namespace lfp {

// Binary trie keyed on prefix bits, longest-prefix match on lookup.
// Desk-scale tables (up to a few hundred thousand prefixes) only; no
// path compression.
template <typename T>
class PrefixTrie {
 public:
  PrefixTrie() : nodes_(1) {}

  void insert(Ipv4Prefix prefix, T value) {
    std::size_t node = 0;
    for (int bit = 0; bit < prefix.length; ++bit) {
      int b = (prefix.network.value >> (31 - bit)) & 1;
      std::size_t child = nodes_[node].child[b];
      if (child == 0) {
        child = nodes_.size();
        nodes_[node].child[b] = child;
        nodes_.emplace_back();  // may reallocate; no references held across it
      }
      node = child;
    }
    nodes_[node].value = std::move(value);
    ++size_;
  }

  // Longest matching prefix, or nullopt.
  std::optional<T> lookup(Ipv4 addr) const {
    std::optional<T> best;
    std::size_t node = 0;
    if (nodes_[0].value) best = nodes_[0].value;
    for (int bit = 0; bit < 32; ++bit) {
      int b = (addr.value >> (31 - bit)) & 1;
      std::size_t child = nodes_[node].child[b];
      if (child == 0) break;
      node = child;
      if (nodes_[node].value) best = nodes_[node].value;
    }
    return best;
  }

  bool contains(Ipv4 addr) const { return lookup(addr).has_value(); }

  std::size_t size() const { return size_; }

 private:
  struct Node {
    std::size_t child[2] = {0, 0};
    std::optional<T> value;
  };
  std::vector<Node> nodes_;
  std::size_t size_ = 0;
};

}  // namespace lfp
