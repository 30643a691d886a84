#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mspace/machine.hpp"
#include "mspace/spaces.hpp"

namespace mspace {

// An explicit finite lattice with full order and operation tables. The
// constructor checks every lattice law including finite distributivity, so
// anything that gets built here really is a (finite) frame.
class FiniteFrame {
 public:
  static FiniteFrame from_tables(std::vector<std::vector<bool>> leq,
                                 std::vector<std::vector<std::uint16_t>> meet,
                                 std::vector<std::vector<std::uint16_t>> join) {
    FiniteFrame fr;
    fr.leq_ = std::move(leq);
    fr.meet_ = std::move(meet);
    fr.join_ = std::move(join);
    fr.validate();
    return fr;
  }

  // The lattice of downsets of a finite poset (given as a reflexive partial
  // order matrix), ordered by inclusion. Every finite distributive lattice
  // arises this way.
  static FiniteFrame downset_frame(const std::vector<std::vector<bool>>& poset_leq) {
    const std::size_t k = poset_leq.size();
    if (k > 20) throw SizeBoundError("downset_frame: poset too large");
    std::vector<std::uint32_t> downsets;
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << k); ++s) {
      bool down = true;
      for (std::size_t a = 0; a < k && down; ++a)
        for (std::size_t b = 0; b < k && down; ++b)
          if ((s >> b & 1) && poset_leq[a][b] && !(s >> a & 1)) down = false;
      if (down) downsets.push_back(s);
    }
    return from_mask_family(downsets);
  }

  // The powerset of a k-element set: the frame of opens of the discrete
  // k-point space.
  static FiniteFrame powerset_frame(std::size_t k) {
    if (k > 8) throw SizeBoundError("powerset_frame: too many points");
    std::vector<std::uint32_t> all(std::size_t{1} << k);
    std::iota(all.begin(), all.end(), 0u);
    return from_mask_family(all);
  }

  std::size_t size() const { return leq_.size(); }
  bool leq(std::size_t a, std::size_t b) const { return leq_[a][b]; }
  std::size_t meet(std::size_t a, std::size_t b) const { return meet_[a][b]; }
  std::size_t join(std::size_t a, std::size_t b) const { return join_[a][b]; }
  std::size_t bottom() const { return bottom_; }
  std::size_t top() const { return top_; }

  // Is the subset upward closed? On a finite poset every directed set has a
  // greatest element, so this is exactly Scott-openness at finite scale.
  bool is_up_set(const std::vector<bool>& members) const {
    for (std::size_t a = 0; a < size(); ++a)
      if (members[a])
        for (std::size_t b = 0; b < size(); ++b)
          if (leq_[a][b] && !members[b]) return false;
    return true;
  }

  // Hasse diagram in DOT format, a debugging aid.
  std::string to_dot(const std::string& name = "frame") const {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=BT;\n";
    for (std::size_t a = 0; a < size(); ++a) {
      std::string label = std::to_string(a);
      if (a == bottom_) label += " (bot)";
      if (a == top_) label += " (top)";
      os << "  n" << a << " [label=\"" << label << "\"];\n";
    }
    for (std::size_t a = 0; a < size(); ++a)
      for (std::size_t b = 0; b < size(); ++b) {
        if (a == b || !leq_[a][b]) continue;
        bool covered = false;
        for (std::size_t c = 0; c < size() && !covered; ++c)
          if (c != a && c != b && leq_[a][c] && leq_[c][b]) covered = true;
        if (!covered) os << "  n" << a << " -> n" << b << ";\n";
      }
    os << "}\n";
    return os.str();
  }

 private:
  // Build the frame whose elements are the given bitmask-coded sets, ordered
  // by inclusion; the family must be closed under union and intersection.
  static FiniteFrame from_mask_family(std::vector<std::uint32_t> masks) {
    std::sort(masks.begin(), masks.end());
    std::unordered_map<std::uint32_t, std::uint16_t> index;
    for (std::size_t i = 0; i < masks.size(); ++i)
      index.emplace(masks[i], static_cast<std::uint16_t>(i));
    const std::size_t n = masks.size();
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
    std::vector<std::vector<std::uint16_t>> mt(n, std::vector<std::uint16_t>(n));
    std::vector<std::vector<std::uint16_t>> jt(n, std::vector<std::uint16_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        leq[a][b] = (masks[a] & ~masks[b]) == 0;
        mt[a][b] = index.at(masks[a] & masks[b]);
        jt[a][b] = index.at(masks[a] | masks[b]);
      }
    return from_tables(std::move(leq), std::move(mt), std::move(jt));
  }

  void validate() {
    const std::size_t n = leq_.size();
    if (n == 0) throw std::invalid_argument("frame: empty carrier");
    auto fail = [](const std::string& what) {
      throw std::invalid_argument("frame law violated: " + what);
    };
    for (std::size_t a = 0; a < n; ++a) {
      if (!leq_[a][a]) fail("reflexivity");
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && leq_[a][b] && leq_[b][a]) fail("antisymmetry");
        for (std::size_t c = 0; c < n; ++c)
          if (leq_[a][b] && leq_[b][c] && !leq_[a][c]) fail("transitivity");
      }
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t m = meet_[a][b], j = join_[a][b];
        if (m >= n || j >= n) fail("table range");
        if (!leq_[m][a] || !leq_[m][b]) fail("meet is a lower bound");
        if (!leq_[a][j] || !leq_[b][j]) fail("join is an upper bound");
        for (std::size_t c = 0; c < n; ++c) {
          if (leq_[c][a] && leq_[c][b] && !leq_[c][m]) fail("meet greatest");
          if (leq_[a][c] && leq_[b][c] && !leq_[j][c]) fail("join least");
        }
      }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (meet_[a][join_[b][c]] != join_[meet_[a][b]][meet_[a][c]])
            fail("distributivity");
    bottom_ = top_ = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (leq_[a][bottom_]) bottom_ = a;
      if (leq_[top_][a]) top_ = a;
    }
    for (std::size_t a = 0; a < n; ++a)
      if (!leq_[bottom_][a] || !leq_[a][top_]) fail("bounds");
  }

  std::vector<std::vector<bool>> leq_;
  std::vector<std::vector<std::uint16_t>> meet_;
  std::vector<std::vector<std::uint16_t>> join_;
  std::size_t bottom_ = 0, top_ = 0;
};

// The free frame on a small generator list, together with the interpretation
// of generators and of whole machines. Elements are the downsets of the
// meet-semilattice of finite generator subsets under reverse inclusion,
// i.e. the superset-closed families of subsets.
class FreeFiniteFrame {
 public:
  static constexpr std::size_t kMaxGenerators = 4;

  explicit FreeFiniteFrame(std::vector<GeneratorId> generators)
      : gens_(std::move(generators)) {
    const std::size_t g = gens_.size();
    if (g > kMaxGenerators)
      throw SizeBoundError("free frame bounded at " + std::to_string(kMaxGenerators) +
                           " generators");
    const std::uint32_t subsets = std::uint32_t{1} << g;
    for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << subsets); ++fam) {
      bool closed = true;
      for (std::uint32_t s = 0; s < subsets && closed; ++s) {
        if (!(fam >> s & 1)) continue;
        for (std::uint32_t t = 0; t < subsets && closed; ++t)
          if ((t & s) == s && !(fam >> t & 1)) closed = false;  // t is a superset of s
      }
      if (closed) families_.push_back(static_cast<std::uint32_t>(fam));
    }
    std::sort(families_.begin(), families_.end());
    for (std::size_t i = 0; i < families_.size(); ++i) index_.emplace(families_[i], i);

    const std::size_t n = families_.size();
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
    std::vector<std::vector<std::uint16_t>> mt(n, std::vector<std::uint16_t>(n));
    std::vector<std::vector<std::uint16_t>> jt(n, std::vector<std::uint16_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        leq[a][b] = (families_[a] & ~families_[b]) == 0;
        mt[a][b] = static_cast<std::uint16_t>(index_.at(families_[a] & families_[b]));
        jt[a][b] = static_cast<std::uint16_t>(index_.at(families_[a] | families_[b]));
      }
    frame_ = FiniteFrame::from_tables(std::move(leq), std::move(mt), std::move(jt));
  }

  const FiniteFrame& frame() const { return frame_; }
  const std::vector<GeneratorId>& generators() const { return gens_; }

  // The raw downset families, one mask over generator subsets per element, in
  // element order. Exposed for cross-checks against hand enumerations.
  const std::vector<std::uint32_t>& families() const { return families_; }

  std::size_t generator_element(std::size_t i) const {
    return denote_mask(std::uint32_t{1} << i);
  }

  std::size_t denote(const FormalMeet& b) const {
    std::uint32_t mask = 0;
    for (const auto& g : b.generators()) mask |= std::uint32_t{1} << gen_position(g);
    return denote_mask(mask);
  }

  std::size_t denote(const FormalMachine& m) const {
    std::size_t e = frame_.bottom();
    for (const auto& b : m.branches()) e = frame_.join(e, denote(b));
    return e;
  }

 private:
  std::size_t gen_position(const GeneratorId& g) const {
    for (std::size_t i = 0; i < gens_.size(); ++i)
      if (gens_[i] == g) return i;
    throw std::invalid_argument("generator not in this free frame: " + g.to_string());
  }

  // The principal element for a generator subset: all of its supersets.
  std::size_t denote_mask(std::uint32_t base) const {
    const std::uint32_t subsets = std::uint32_t{1} << gens_.size();
    std::uint32_t fam = 0;
    for (std::uint32_t s = 0; s < subsets; ++s)
      if ((s & base) == base) fam |= std::uint32_t{1} << s;
    return index_.at(fam);
  }

  std::vector<GeneratorId> gens_;
  std::vector<std::uint32_t> families_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
  FiniteFrame frame_;
};

inline FreeFiniteFrame free_frame(std::vector<GeneratorId> generators) {
  return FreeFiniteFrame(std::move(generators));
}

// A partition of frame elements compatible with meet and join.
class Congruence {
 public:
  explicit Congruence(std::vector<std::size_t> class_of) : class_of_(std::move(class_of)) {
    normalize();
  }

  static Congruence discrete(std::size_t n) {
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), std::size_t{0});
    return Congruence(std::move(id));
  }

  std::size_t size() const { return class_of_.size(); }
  std::size_t class_count() const { return classes_; }
  std::size_t class_of(std::size_t e) const { return class_of_[e]; }
  bool same(std::size_t a, std::size_t b) const { return class_of_[a] == class_of_[b]; }

  // Representative (smallest member) of each class.
  const std::vector<std::size_t>& representatives() const { return reps_; }

 private:
  void normalize() {
    std::unordered_map<std::size_t, std::size_t> remap;
    reps_.clear();
    for (std::size_t e = 0; e < class_of_.size(); ++e) {
      auto [it, fresh] = remap.emplace(class_of_[e], remap.size());
      if (fresh) reps_.push_back(e);
      class_of_[e] = it->second;
    }
    classes_ = remap.size();
  }

  std::vector<std::size_t> class_of_;
  std::vector<std::size_t> reps_;
  std::size_t classes_ = 0;
};

// Does the partition satisfy the congruence property on this frame?
inline bool is_congruence(const FiniteFrame& fr, const Congruence& c) {
  const std::size_t n = fr.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!c.same(a, b)) continue;
      for (std::size_t x = 0; x < n; ++x) {
        if (!c.same(fr.meet(a, x), fr.meet(b, x))) return false;
        if (!c.same(fr.join(a, x), fr.join(b, x))) return false;
      }
    }
  return true;
}

// Least congruence containing the given element pairs: merge, then close
// under compatibility with meet and join until stable. Terminates because
// the lattice is finite and classes only ever merge.
inline Congruence congruence_closure(const FiniteFrame& fr,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& rels) {
  const std::size_t n = fr.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::deque<std::pair<std::size_t, std::size_t>> queue(rels.begin(), rels.end());
  while (!queue.empty()) {
    auto [a, b] = queue.front();
    queue.pop_front();
    const std::size_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    parent[std::max(ra, rb)] = std::min(ra, rb);
    // closing the merged pair under every context suffices: chains of merges
    // compose by transitivity
    for (std::size_t x = 0; x < n; ++x) {
      queue.emplace_back(fr.meet(a, x), fr.meet(b, x));
      queue.emplace_back(fr.join(a, x), fr.join(b, x));
    }
  }

  std::vector<std::size_t> class_of(n);
  for (std::size_t e = 0; e < n; ++e) class_of[e] = find(e);
  return Congruence(std::move(class_of));
}

// Lattice of congruence classes with the induced operations. The class map
// preserves meet, join, bottom and top; the constructor's law checks reject
// partitions that are not congruences.
inline FiniteFrame quotient_frame(const FiniteFrame& fr, const Congruence& c) {
  if (!is_congruence(fr, c)) throw std::invalid_argument("quotient of a non-congruence");
  const auto& reps = c.representatives();
  const std::size_t q = reps.size();
  std::vector<std::vector<std::uint16_t>> mt(q, std::vector<std::uint16_t>(q));
  std::vector<std::vector<std::uint16_t>> jt(q, std::vector<std::uint16_t>(q));
  std::vector<std::vector<bool>> leq(q, std::vector<bool>(q));
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) {
      mt[a][b] = static_cast<std::uint16_t>(c.class_of(fr.meet(reps[a], reps[b])));
      jt[a][b] = static_cast<std::uint16_t>(c.class_of(fr.join(reps[a], reps[b])));
      leq[a][b] = mt[a][b] == a;
    }
  return FiniteFrame::from_tables(std::move(leq), std::move(mt), std::move(jt));
}

// Finite specialization of Scott-openness: on a finite poset the Scott opens
// are exactly the up-sets.
inline bool is_scott_open(const FiniteFrame& fr, const std::vector<bool>& subset) {
  return fr.is_up_set(subset);
}

// Check, by exhausting subsets of the quotient, that a subset is Scott-open
// in the quotient exactly when its preimage under the class map is Scott-open
// in the source frame. This instantiates, at finite scale, the fact that the
// quotient topology induced by the class map is the Scott topology.
inline bool check_scott_quotient(const FiniteFrame& fr, const Congruence& c) {
  const FiniteFrame qf = quotient_frame(fr, c);
  const std::size_t q = qf.size();
  if (q > 20) throw SizeBoundError("check_scott_quotient: quotient too large");
  std::vector<bool> sub(q), pre(fr.size());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << q); ++mask) {
    for (std::size_t i = 0; i < q; ++i) sub[i] = (mask >> i) & 1;
    for (std::size_t e = 0; e < fr.size(); ++e) pre[e] = sub[c.class_of(e)];
    if (qf.is_up_set(sub) != fr.is_up_set(pre)) return false;
  }
  return true;
}

}  // namespace mspace
