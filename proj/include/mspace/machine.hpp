#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

#include "mspace/generator.hpp"

namespace mspace {

namespace detail {

// Sorted, duplicate-free vector; the set representation used throughout.
template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <typename T>
bool is_subset(const std::vector<T>& a, const std::vector<T>& b) {
  // both sorted-unique
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace detail

// A finite formal meet of generators. The empty meet is the top element.
class FormalMeet {
 public:
  FormalMeet() = default;
  explicit FormalMeet(std::vector<GeneratorId> gens)
      : gens_(detail::sorted_unique(std::move(gens))) {
    check_tags();
  }
  FormalMeet(std::initializer_list<GeneratorId> gens)
      : FormalMeet(std::vector<GeneratorId>(gens)) {}

  const std::vector<GeneratorId>& generators() const { return gens_; }
  bool is_top() const { return gens_.empty(); }
  std::size_t size() const { return gens_.size(); }

  bool contains(const GeneratorId& g) const {
    return std::binary_search(gens_.begin(), gens_.end(), g);
  }
  bool subset_of(const FormalMeet& other) const {
    return detail::is_subset(gens_, other.gens_);
  }

  // Meet of meets: union of the generator sets.
  friend FormalMeet operator&(const FormalMeet& a, const FormalMeet& b) {
    std::vector<GeneratorId> out = a.gens_;
    out.insert(out.end(), b.gens_.begin(), b.gens_.end());
    return FormalMeet(std::move(out));
  }

  friend bool operator==(const FormalMeet&, const FormalMeet&) = default;
  friend auto operator<=>(const FormalMeet& a, const FormalMeet& b) {
    return std::lexicographical_compare_three_way(a.gens_.begin(), a.gens_.end(),
                                                  b.gens_.begin(), b.gens_.end());
  }

 private:
  void check_tags() const {
    for (std::size_t i = 1; i < gens_.size(); ++i)
      if (gens_[i].space_tag() != gens_[0].space_tag())
        throw IncompatibleSpaceError("formal meet mixes presentations: " +
                                     gens_[0].to_string() + " vs " + gens_[i].to_string());
  }
  std::vector<GeneratorId> gens_;
};

// A formal machine: a finite join of finite meets of generators. The empty
// join is the bottom element. Branches are kept duplicate-free but not
// otherwise reduced; absorption is applied by normalize().
class FormalMachine {
 public:
  FormalMachine() = default;
  explicit FormalMachine(std::vector<FormalMeet> branches)
      : branches_(detail::sorted_unique(std::move(branches))) {
    check_tags();
  }
  FormalMachine(std::initializer_list<FormalMeet> branches)
      : FormalMachine(std::vector<FormalMeet>(branches)) {}

  static FormalMachine bottom() { return FormalMachine(); }
  static FormalMachine top() { return FormalMachine({FormalMeet()}); }
  static FormalMachine of(GeneratorId g) { return FormalMachine({FormalMeet({g})}); }

  const std::vector<FormalMeet>& branches() const { return branches_; }
  bool is_bottom() const { return branches_.empty(); }

  // Tag of the owning presentation; empty for bottom and for the pure top
  // machine (they are compatible with every presentation).
  std::string space_tag() const {
    for (const auto& b : branches_)
      if (!b.generators().empty()) return b.generators()[0].space_tag();
    return {};
  }

  friend bool operator==(const FormalMachine&, const FormalMachine&) = default;

 private:
  void check_tags() const {
    std::string tag;
    for (const auto& b : branches_) {
      if (b.generators().empty()) continue;
      const std::string t = b.generators()[0].space_tag();
      if (tag.empty()) tag = t;
      else if (t != tag)
        throw IncompatibleSpaceError("machine mixes presentations: " + tag + " vs " + t);
    }
  }
  std::vector<FormalMeet> branches_;
};

// Absorption normal form: branches that contain another branch are dropped
// (g | (g & h) = g). Duplicates inside branches are already gone by the set
// representation. Idempotent, and denotes the same frame element.
inline FormalMachine normalize(const FormalMachine& m) {
  const auto& bs = m.branches();
  std::vector<FormalMeet> kept;
  kept.reserve(bs.size());
  for (std::size_t i = 0; i < bs.size(); ++i) {
    bool absorbed = false;
    // branches are duplicate-free, so subset here means strict subset
    for (std::size_t j = 0; j < bs.size() && !absorbed; ++j)
      if (j != i && bs[j].subset_of(bs[i])) absorbed = true;
    if (!absorbed) kept.push_back(bs[i]);
  }
  return FormalMachine(std::move(kept));
}

namespace detail {
inline void check_same_space(const FormalMachine& a, const FormalMachine& b) {
  const std::string ta = a.space_tag(), tb = b.space_tag();
  if (!ta.empty() && !tb.empty() && ta != tb)
    throw IncompatibleSpaceError("incompatible presentations: " + ta + " vs " + tb);
}
}  // namespace detail

// Join: union of the branch sets, then absorption.
inline FormalMachine join(const FormalMachine& a, const FormalMachine& b) {
  detail::check_same_space(a, b);
  std::vector<FormalMeet> out = a.branches();
  out.insert(out.end(), b.branches().begin(), b.branches().end());
  return normalize(FormalMachine(std::move(out)));
}

// Meet: distribute into pairwise branch unions, then absorption.
inline FormalMachine meet(const FormalMachine& a, const FormalMachine& b) {
  detail::check_same_space(a, b);
  std::vector<FormalMeet> out;
  out.reserve(a.branches().size() * b.branches().size());
  for (const auto& x : a.branches())
    for (const auto& y : b.branches()) out.push_back(x & y);
  return normalize(FormalMachine(std::move(out)));
}

// The syntactic box test: m lies in the subbasic open determined by the
// generator set F iff some branch of m is contained in F.
inline bool box_contains(const FormalMachine& m, const FormalMeet& box) {
  for (const auto& b : m.branches())
    if (b.subset_of(box)) return true;
  return false;
}

inline bool box_contains(const FormalMachine& m, std::vector<GeneratorId> box) {
  return box_contains(m, FormalMeet(std::move(box)));
}

}  // namespace mspace
