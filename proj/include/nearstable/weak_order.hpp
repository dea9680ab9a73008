#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace nearstable {

/// A weak order over a finite set of integer alternatives, stored as tie
/// groups from most to least preferred.
class WeakOrder {
 public:
  using Group = std::vector<int>;

  WeakOrder() = default;
  explicit WeakOrder(std::vector<Group> groups) : groups_(std::move(groups)) { index(); }

  static WeakOrder strict(const std::vector<int>& ranking) {
    std::vector<Group> groups;
    groups.reserve(ranking.size());
    for (int a : ranking) groups.push_back({a});
    return WeakOrder(std::move(groups));
  }

  const std::vector<Group>& groups() const { return groups_; }
  bool empty() const { return groups_.empty(); }
  std::size_t size() const { return ranks_.size(); }

  bool is_strict() const {
    return std::all_of(groups_.begin(), groups_.end(), [](const Group& g) { return g.size() == 1; });
  }

  /// Group index of `a` (0 = best), or nullopt when `a` is not ranked.
  std::optional<int> rank(int a) const {
    auto it = std::lower_bound(ranks_.begin(), ranks_.end(), std::pair{a, 0},
                               [](const auto& x, const auto& y) { return x.first < y.first; });
    if (it == ranks_.end() || it->first != a) return std::nullopt;
    return it->second;
  }

  bool contains(int a) const { return rank(a).has_value(); }

  /// a is strictly preferred to b. Unranked alternatives compare false.
  bool prefers(int a, int b) const {
    auto ra = rank(a), rb = rank(b);
    return ra && rb && *ra < *rb;
  }

  bool tied(int a, int b) const {
    auto ra = rank(a), rb = rank(b);
    return ra && rb && *ra == *rb;
  }

  /// Sorted list of all ranked alternatives.
  std::vector<int> universe() const {
    std::vector<int> u;
    u.reserve(ranks_.size());
    for (const auto& [a, r] : ranks_) u.push_back(a);
    return u;
  }

  /// Alternatives from best to worst, ties kept in stored order.
  std::vector<int> flatten() const {
    std::vector<int> out;
    for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
    return out;
  }

  /// True when some alternative appears twice or a group is empty.
  bool has_duplicates_or_empty_groups() const { return malformed_; }

  friend bool operator==(const WeakOrder& a, const WeakOrder& b) { return a.groups_ == b.groups_; }

 private:
  void index() {
    ranks_.clear();
    for (int r = 0; r < static_cast<int>(groups_.size()); ++r) {
      if (groups_[r].empty()) malformed_ = true;
      for (int a : groups_[r]) ranks_.emplace_back(a, r);
    }
    std::sort(ranks_.begin(), ranks_.end());
    for (std::size_t i = 1; i < ranks_.size(); ++i)
      if (ranks_[i].first == ranks_[i - 1].first) malformed_ = true;
  }

  std::vector<Group> groups_;
  std::vector<std::pair<int, int>> ranks_;
  bool malformed_ = false;
};

/// Strict refinement of `order`: each tie group is sorted by `fallback_key`
/// (ascending). Strict comparisons of the input are preserved.
template <typename Key>
WeakOrder break_ties(const WeakOrder& order, Key&& fallback_key) {
  std::vector<WeakOrder::Group> groups;
  for (auto g : order.groups()) {
    std::stable_sort(g.begin(), g.end(), [&](int a, int b) { return fallback_key(a) < fallback_key(b); });
    for (int a : g) groups.push_back({a});
  }
  return WeakOrder(std::move(groups));
}

/// Tie-breaking by alternative id, which is the declared-order index.
inline WeakOrder break_ties(const WeakOrder& order) {
  return break_ties(order, [](int a) { return a; });
}

}  // namespace nearstable
