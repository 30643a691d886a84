#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mspace/presentation.hpp"
#include "mspace/semidecider.hpp"

namespace mspace {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeBoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SpaceKind { CantorDigits, CantorPrefix, UnitInterval };

inline std::string space_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::CantorDigits: return "cantor-digits";
    case SpaceKind::CantorPrefix: return "cantor-prefix";
    case SpaceKind::UnitInterval: return "interval";
  }
  return {};
}

inline std::optional<SpaceKind> space_from_name(const std::string& s) {
  if (s == "cantor-digits") return SpaceKind::CantorDigits;
  if (s == "cantor-prefix") return SpaceKind::CantorPrefix;
  if (s == "interval") return SpaceKind::UnitInterval;
  return std::nullopt;
}

// A concrete point: a binary stream (for the Cantor presentations) or an
// exact rational in [0,1]. Stream reads are memoized, so repeated queries are
// deterministic and cheap; the budget bounds the number of distinct indices
// ever read and overrunning it throws BudgetError rather than answering
// wrongly.
class ConcretePoint {
 public:
  static constexpr std::uint64_t kDefaultBudget = 1u << 20;

  static ConcretePoint stream(std::function<bool(std::uint64_t)> fn,
                              std::uint64_t budget = kDefaultBudget) {
    ConcretePoint p;
    p.stream_ = std::make_shared<StreamState>();
    p.stream_->fn = std::move(fn);
    p.stream_->budget = budget;
    return p;
  }

  // The stream that plays `word` and then repeats `tail` forever.
  static ConcretePoint word_then(std::string word, bool tail,
                                 std::uint64_t budget = kDefaultBudget) {
    return stream(
        [word = std::move(word), tail](std::uint64_t i) {
          return i < word.size() ? word[i] == '1' : tail;
        },
        budget);
  }

  static ConcretePoint rational(Rational r) {
    if (r < Rational(0) || r > Rational(1))
      throw std::invalid_argument("rational point outside [0,1]");
    ConcretePoint p;
    p.value_ = std::make_shared<Rational>(std::move(r));
    return p;
  }

  bool is_stream() const { return stream_ != nullptr; }
  bool is_rational() const { return value_ != nullptr; }

  bool digit(std::uint64_t i) const {
    if (!stream_) throw IncompatibleSpaceError("digit query on a rational point");
    std::lock_guard<std::mutex> lock(stream_->mu);
    auto it = stream_->memo.find(i);
    if (it != stream_->memo.end()) return it->second;
    if (stream_->memo.size() >= stream_->budget)
      throw BudgetError("stream point: query budget exhausted");
    const bool b = stream_->fn(i);
    stream_->memo.emplace(i, b);
    return b;
  }

  const Rational& value() const {
    if (!value_) throw IncompatibleSpaceError("rational value of a stream point");
    return *value_;
  }

 private:
  struct StreamState {
    std::function<bool(std::uint64_t)> fn;
    std::uint64_t budget = 0;
    std::mutex mu;
    std::unordered_map<std::uint64_t, bool> memo;
  };
  std::shared_ptr<StreamState> stream_;
  std::shared_ptr<const Rational> value_;
};

namespace detail {

// --- cantor-digits -----------------------------------------------------

// Exact cover decision by distributing the join of meets into clauses: the
// machine covers iff every clause of the conjunctive normal form contains
// both polarities of some digit. The recursion prunes a subtree as soon as
// the partial clause picks up a complementary pair, fails fast on the first
// completed clause without one, and memoizes on (branch, chosen picks) so
// repeated partial clauses are not re-expanded.
class DigitClauseCheck {
 public:
  explicit DigitClauseCheck(const FormalMachine& m) {
    std::map<std::uint64_t, std::uint32_t> local;
    for (const auto& b : m.branches())
      for (const auto& g : b.generators()) local.emplace(g.as_digit().index, 0);
    if (local.size() > 64)
      throw SizeBoundError("digit cover check bounded at 64 distinct digits");
    std::uint32_t next = 0;
    for (auto& [digit, id] : local) id = next++;
    for (const auto& b : m.branches()) {
      if (b.generators().empty()) { has_top_ = true; continue; }
      std::vector<std::pair<std::uint32_t, bool>> br;
      br.reserve(b.size());
      for (const auto& g : b.generators()) {
        const auto& d = g.as_digit();
        br.emplace_back(local.at(d.index), d.one);
      }
      branches_.push_back(std::move(br));
    }
  }

  bool covers() {
    if (has_top_) return true;
    if (branches_.empty()) return false;
    return all_clauses_close(0, 0, 0);
  }

 private:
  bool all_clauses_close(std::size_t i, std::uint64_t zeros, std::uint64_t ones) {
    if (i == branches_.size()) return false;  // clause complete, no pair found
    const auto key = std::tuple(i, zeros, ones);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool all = true;
    for (const auto& [id, one] : branches_[i]) {
      const std::uint64_t bit = std::uint64_t{1} << id;
      const std::uint64_t other = one ? zeros : ones;
      if (other & bit) continue;  // complementary pair: every extension covers
      const std::uint64_t z2 = one ? zeros : zeros | bit;
      const std::uint64_t o2 = one ? ones | bit : ones;
      if (!all_clauses_close(i + 1, z2, o2)) { all = false; break; }
    }
    memo_.emplace(key, all);
    return all;
  }

  bool has_top_ = false;
  std::vector<std::vector<std::pair<std::uint32_t, bool>>> branches_;
  std::map<std::tuple<std::size_t, std::uint64_t, std::uint64_t>, bool> memo_;
};

inline bool digits_positive(const FormalMeet& b) {
  std::set<std::pair<std::uint64_t, bool>> seen;
  for (const auto& g : b.generators()) {
    const auto& d = g.as_digit();
    if (seen.count({d.index, !d.one})) return false;
    seen.insert({d.index, d.one});
  }
  return true;
}

// --- cantor-prefix ------------------------------------------------------

inline bool is_prefix_of(const std::string& p, const std::string& q) {
  return p.size() <= q.size() && std::equal(p.begin(), p.end(), q.begin());
}

// Reduce a branch of prefix generators: a chain of prefixes meets to its
// longest member; incomparable prefixes meet to bottom (nullopt).
inline std::optional<std::string> prefix_branch_reduce(const FormalMeet& b) {
  std::string longest;
  for (const auto& g : b.generators()) {
    const auto& w = g.as_prefix().word;
    if (is_prefix_of(longest, w)) longest = w;
    else if (!is_prefix_of(w, longest)) return std::nullopt;
  }
  return longest;
}

// Does the word set W (prefix-free not required) cover every binary word of
// length n extending `cell`?
inline bool prefix_covers_cell(const std::set<std::string>& words, std::string& cell,
                               std::size_t n) {
  {
    std::string p;
    p.reserve(cell.size());
    if (words.count(p)) return true;
    for (char c : cell) {
      p.push_back(c);
      if (words.count(p)) return true;
    }
  }
  if (cell.size() >= n) return false;
  cell.push_back('0');
  const bool left = prefix_covers_cell(words, cell, n);
  cell.back() = '1';
  const bool right = left && prefix_covers_cell(words, cell, n);
  cell.pop_back();
  return left && right;
}

inline bool prefix_covers(const FormalMachine& m) {
  std::set<std::string> words;
  std::size_t n = 0;
  for (const auto& b : m.branches()) {
    if (auto w = prefix_branch_reduce(b)) {
      n = std::max(n, w->size());
      words.insert(std::move(*w));
    }
  }
  if (words.empty()) return false;
  std::string cell;
  return prefix_covers_cell(words, cell, n);
}

// --- unit interval ------------------------------------------------------

// One rational interval under the trace convention: lo == 0 means the point
// 0 is included, hi == 1 means the point 1 is included; interior endpoints
// are open.
struct TraceInterval {
  Rational lo, hi;
};

inline std::optional<TraceInterval> interval_branch_reduce(const FormalMeet& b) {
  TraceInterval r{Rational(0), Rational(1)};
  for (const auto& g : b.generators()) {
    const auto& iv = g.as_interval();
    r.lo = std::max(r.lo, iv.lo);
    r.hi = std::min(r.hi, iv.hi);
  }
  if (r.lo < r.hi) return r;
  return std::nullopt;
}

// Chaining decision for covering [0,1]: start from the intervals closed at 0,
// extend the reach while some interval starts strictly below it, succeed when
// the reach hits 1 (the final interval is closed at 1 by the convention).
inline bool interval_covers(const FormalMachine& m) {
  std::vector<TraceInterval> ivs;
  for (const auto& b : m.branches())
    if (auto r = interval_branch_reduce(b)) ivs.push_back(std::move(*r));
  if (ivs.empty()) return false;

  Rational reach(0);
  bool started = false;
  for (const auto& iv : ivs)
    if (iv.lo == Rational(0) && (!started || iv.hi > reach)) {
      reach = iv.hi;
      started = true;
    }
  if (!started) return false;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& iv : ivs)
      if (iv.lo < reach && iv.hi > reach) {
        reach = iv.hi;
        grew = true;
      }
  }
  return reach == Rational(1);
}

inline bool interval_positive(const FormalMeet& b) {
  return interval_branch_reduce(b).has_value();
}

inline bool rational_in(const Rational& x, const IntervalGen& iv) {
  if (iv.lo < x && x < iv.hi) return true;
  if (x == Rational(0) && iv.lo == Rational(0)) return true;
  if (x == Rational(1) && iv.hi == Rational(1)) return true;
  return false;
}

}  // namespace detail

// One of the three built-in presented spaces, with its generator enumeration,
// exact cover/positivity deciders, point embedding and the structured family
// streams the quantifiers draw from. Copies share the internal caches; all
// cached data is answer-stable and guarded by a mutex.
class Space {
 public:
  explicit Space(SpaceKind kind) : kind_(kind), cache_(std::make_shared<Cache>()) {}

  SpaceKind kind() const { return kind_; }
  std::string name() const { return space_name(kind_); }

  // -- generator enumeration --------------------------------------------

  // Total injective enumeration of the generator universe. Digits go
  // z0,u0,z1,u1,...; prefixes in length-lexicographic order starting from the
  // empty word; intervals by Farey level, lexicographically within a level.
  GeneratorId generator(std::uint64_t i) const {
    switch (kind_) {
      case SpaceKind::CantorDigits:
        return GeneratorId::digit(i / 2, i % 2 == 1);
      case SpaceKind::CantorPrefix:
        return GeneratorId::prefix(word_at(i));
      case SpaceKind::UnitInterval: {
        std::lock_guard<std::mutex> lock(cache_->mu);
        ensure_intervals(i + 1);
        return GeneratorId::interval(cache_->intervals[i].first, cache_->intervals[i].second);
      }
    }
    throw std::logic_error("unreachable");
  }

  // Denominator bound for the materialized interval enumeration. Interval
  // generators beyond it still work with every exact decider; only the
  // enumeration-indexed machinery (quantifier witness coding) treats them as
  // out of range.
  static constexpr std::uint64_t kFareyCap = 32;

  // Index of a generator in the enumeration. Exact for digits and prefixes;
  // for intervals it is computed from the Farey level of the endpoints, and
  // absent when an endpoint denominator exceeds kFareyCap.
  std::optional<std::uint64_t> generator_index(const GeneratorId& g) const {
    switch (kind_) {
      case SpaceKind::CantorDigits: {
        const auto& d = g.as_digit();
        return 2 * d.index + (d.one ? 1 : 0);
      }
      case SpaceKind::CantorPrefix: {
        const auto& w = g.as_prefix().word;
        std::uint64_t v = 0;
        for (char c : w) v = 2 * v + (c == '1');
        return ((std::uint64_t{1} << w.size()) - 1) + v;
      }
      case SpaceKind::UnitInterval: {
        const auto& iv = g.as_interval();
        const std::uint64_t level =
            std::max<std::uint64_t>(farey_level(iv.lo), farey_level(iv.hi));
        if (level > kFareyCap) return std::nullopt;
        std::lock_guard<std::mutex> lock(cache_->mu);
        ensure_interval_level(level);
        const auto key = std::make_pair(iv.lo, iv.hi);
        auto it = cache_->interval_index.find(key);
        if (it == cache_->interval_index.end())
          throw std::logic_error("interval generator missing from enumeration");
        return it->second;
      }
    }
    throw std::logic_error("unreachable");
  }

  // -- exact deciders -----------------------------------------------------

  // Exact decision of whether the machine denotes the top element of the
  // presented frame.
  bool covers(const FormalMachine& m) const {
    check_machine(m);
    switch (kind_) {
      case SpaceKind::CantorDigits: return detail::DigitClauseCheck(m).covers();
      case SpaceKind::CantorPrefix: return detail::prefix_covers(m);
      case SpaceKind::UnitInterval: return detail::interval_covers(m);
    }
    return false;
  }

  // Exact decision of whether the finite meet is non-bottom.
  bool positive(const FormalMeet& b) const {
    check_meet(b);
    switch (kind_) {
      case SpaceKind::CantorDigits: return detail::digits_positive(b);
      case SpaceKind::CantorPrefix: return detail::prefix_branch_reduce(b).has_value();
      case SpaceKind::UnitInterval: return detail::interval_positive(b);
    }
    return false;
  }

  // -- points ---------------------------------------------------------------

  // The embedding of a concrete point: the generalized point that halts on a
  // generator exactly when the point satisfies it. Digit queries read one
  // stream digit, prefix queries |word| digits, interval queries compare
  // rationals once.
  GeneralizedPoint point_embed(const ConcretePoint& x) const {
    const SpaceKind kind = kind_;
    return GeneralizedPoint([kind, x](const GeneratorId& g) -> SemiDecider {
      switch (kind) {
        case SpaceKind::CantorDigits: {
          const auto& d = g.as_digit();
          return x.digit(d.index) == d.one ? SemiDecider::halts_at(1) : SemiDecider::never();
        }
        case SpaceKind::CantorPrefix: {
          const auto& w = g.as_prefix().word;
          for (std::size_t i = 0; i < w.size(); ++i)
            if (x.digit(i) != (w[i] == '1')) return SemiDecider::never();
          return SemiDecider::halts_at(w.size());
        }
        case SpaceKind::UnitInterval:
          return detail::rational_in(x.value(), g.as_interval()) ? SemiDecider::halts_at(1)
                                                                 : SemiDecider::never();
      }
      throw std::logic_error("unreachable");
    });
  }

  // Direct (decidable) acceptance of a concrete point by a formal machine;
  // the denotational answer the runtime is checked against.
  bool accepts(const ConcretePoint& x, const FormalMachine& m) const {
    check_machine(m);
    for (const auto& b : m.branches()) {
      bool all = true;
      for (const auto& g : b.generators()) {
        if (!satisfies(x, g)) { all = false; break; }
      }
      if (all) return true;
    }
    return false;
  }

  bool satisfies(const ConcretePoint& x, const GeneratorId& g) const {
    switch (kind_) {
      case SpaceKind::CantorDigits: {
        const auto& d = g.as_digit();
        return x.digit(d.index) == d.one;
      }
      case SpaceKind::CantorPrefix: {
        const auto& w = g.as_prefix().word;
        for (std::size_t i = 0; i < w.size(); ++i)
          if (x.digit(i) != (w[i] == '1')) return false;
        return true;
      }
      case SpaceKind::UnitInterval:
        return detail::rational_in(x.value(), g.as_interval());
    }
    return false;
  }

  // -- presentation record --------------------------------------------------

  Presentation presentation() const {
    Presentation p;
    p.name = name();
    Space self = *this;
    p.generator = [self](std::uint64_t i) { return self.generator(i); };
    p.covers = [self](const FormalMachine& m) { return self.covers(m); };
    p.positive = [self](const FormalMeet& b) { return self.positive(b); };
    if (kind_ == SpaceKind::CantorPrefix)
      p.order = [](const GeneratorId& a, const GeneratorId& b) {
        // reverse prefix order: longer words lie below their prefixes
        return detail::is_prefix_of(b.as_prefix().word, a.as_prefix().word);
      };
    const SpaceKind kind = kind_;
    p.relations_up_to = [self, kind](std::uint64_t n) {
      return self.relations_up_to(n);
    };
    return p;
  }

  // All schema relations whose generators lie among the first n enumerated.
  std::vector<Relation> relations_up_to(std::uint64_t n) const {
    std::vector<Relation> out;
    if (kind_ == SpaceKind::CantorDigits) {
      for (std::uint64_t i = 0; 2 * i + 1 < n; ++i) {
        const auto z = GeneratorId::digit(i, false), u = GeneratorId::digit(i, true);
        out.push_back({meet(FormalMachine::of(z), FormalMachine::of(u)),
                       FormalMachine::bottom(), Relation::Equality});
        out.push_back({join(FormalMachine::of(z), FormalMachine::of(u)),
                       FormalMachine::top(), Relation::Equality});
      }
    } else if (kind_ == SpaceKind::CantorPrefix) {
      for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const std::string p = word_at(i), q = word_at(j);
          const auto lp = GeneratorId::prefix(p), lq = GeneratorId::prefix(q);
          if (detail::is_prefix_of(p, q) && p != q) {
            out.push_back({meet(FormalMachine::of(lp), FormalMachine::of(lq)),
                           FormalMachine::of(lq), Relation::Equality});
          } else if (!detail::is_prefix_of(p, q) && !detail::is_prefix_of(q, p) && i < j) {
            out.push_back({meet(FormalMachine::of(lp), FormalMachine::of(lq)),
                           FormalMachine::bottom(), Relation::Equality});
          }
        }
      for (std::uint64_t i = 0; i < n; ++i) {
        const std::string p = word_at(i);
        const std::uint64_t c0 = *generator_index(GeneratorId::prefix(p + "0"));
        if (c0 + 1 < n) {
          out.push_back({join(FormalMachine::of(GeneratorId::prefix(p + "0")),
                              FormalMachine::of(GeneratorId::prefix(p + "1"))),
                         FormalMachine::of(GeneratorId::prefix(p)), Relation::Equality});
        }
      }
    }
    return out;
  }

  // -- structured streams for the quantifier dovetails ----------------------

  // Largest grid depth produced per presentation. The prefix grids are the
  // workhorse of the stream-search reduction and stay cheap to certify; the
  // digit grids get expensive to certify through the clause check, so they
  // stop earlier.
  std::uint64_t grid_cap() const {
    switch (kind_) {
      case SpaceKind::CantorDigits: return 8;
      case SpaceKind::CantorPrefix: return 13;
      case SpaceKind::UnitInterval: return 4;
    }
    return 0;
  }

  // t-th canonical covering family, as sets of generator indices, or nullopt
  // when the stream is exhausted at t. For the digit and prefix presentations
  // these are the full grids at depth t, which witness every covering machine
  // of that depth; for the interval presentation, the dyadic mesh.
  std::optional<std::vector<std::vector<std::uint32_t>>> structured_cover_family(
      std::uint64_t t) const {
    switch (kind_) {
      case SpaceKind::CantorDigits: {
        if (t > grid_cap()) return std::nullopt;
        std::vector<std::vector<std::uint32_t>> fam;
        fam.reserve(std::size_t{1} << t);
        for (std::uint64_t w = 0; w < (std::uint64_t{1} << t); ++w) {
          std::vector<std::uint32_t> f(t);
          for (std::uint64_t i = 0; i < t; ++i)
            f[i] = static_cast<std::uint32_t>(2 * i + ((w >> i) & 1));
          fam.push_back(std::move(f));
        }
        return fam;
      }
      case SpaceKind::CantorPrefix: {
        if (t > grid_cap()) return std::nullopt;
        std::vector<std::vector<std::uint32_t>> fam;
        fam.reserve(std::size_t{1} << t);
        for (std::uint64_t w = 0; w < (std::uint64_t{1} << t); ++w)
          fam.push_back(prefix_chain_indices(w, t));
        return fam;
      }
      case SpaceKind::UnitInterval: {
        if (t > grid_cap()) return std::nullopt;
        std::vector<std::vector<std::uint32_t>> fam;
        const std::uint64_t den = std::uint64_t{1} << t;
        for (std::uint64_t j = 0; j <= den; ++j) {
          const Rational lo = j == 0 ? Rational(0) : Rational(BigInt(j - 1), BigInt(den));
          const Rational hi = j == den ? Rational(1) : Rational(BigInt(j + 1), BigInt(den));
          if (!(lo < hi)) continue;
          const auto idx = generator_index(GeneratorId::interval(lo, hi));
          std::vector<std::uint32_t> f{static_cast<std::uint32_t>(*idx)};
          if (std::find(fam.begin(), fam.end(), f) == fam.end()) fam.push_back(std::move(f));
        }
        return fam;
      }
    }
    return std::nullopt;
  }

  // t-th canonical positive meet (generator index set); nullopt marks an
  // empty slot. Digit and prefix presentations walk all finite binary words
  // in length-lexicographic order and emit the consistent branch describing
  // that word; the interval presentation emits singletons in enumeration
  // order while the enumeration cap allows.
  std::optional<std::vector<std::uint32_t>> structured_positive(std::uint64_t t) const {
    switch (kind_) {
      case SpaceKind::CantorDigits: {
        const std::string w = word_at(t);
        std::vector<std::uint32_t> f(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
          f[i] = static_cast<std::uint32_t>(2 * i + (w[i] == '1'));
        return f;
      }
      case SpaceKind::CantorPrefix: {
        const std::string w = word_at(t);
        std::uint64_t v = 0;
        for (char c : w) v = 2 * v + (c == '1');
        return prefix_chain_indices(v, w.size());
      }
      case SpaceKind::UnitInterval: {
        if (t >= 16384) return std::nullopt;
        return std::vector<std::uint32_t>{static_cast<std::uint32_t>(t)};
      }
    }
    return std::nullopt;
  }

  // -- validation -------------------------------------------------------------

  bool generator_matches(const GeneratorId& g) const {
    switch (kind_) {
      case SpaceKind::CantorDigits: return g.is_digit();
      case SpaceKind::CantorPrefix: return g.is_prefix();
      case SpaceKind::UnitInterval: return g.is_interval();
    }
    return false;
  }

  void check_meet(const FormalMeet& b) const {
    for (const auto& g : b.generators())
      if (!generator_matches(g))
        throw IncompatibleSpaceError("generator " + g.to_string() + " does not belong to " +
                                     name());
  }
  void check_machine(const FormalMachine& m) const {
    for (const auto& b : m.branches()) check_meet(b);
  }

 private:
  struct Cache {
    std::mutex mu;
    std::vector<std::pair<Rational, Rational>> intervals;
    std::map<std::pair<Rational, Rational>, std::uint64_t> interval_index;
    std::uint64_t interval_level_done = 0;
  };

  // t-th binary word in length-lexicographic order (t = 0 is the empty word).
  static std::string word_at(std::uint64_t t) {
    std::uint64_t len = 0, count = 1, base = 0;
    while (t >= base + count) {
      base += count;
      count <<= 1;
      ++len;
    }
    const std::uint64_t v = t - base;
    std::string w(len, '0');
    for (std::uint64_t i = 0; i < len; ++i)
      if ((v >> (len - 1 - i)) & 1) w[i] = '1';
    return w;
  }

  // Indices of all prefixes (including the empty word) of the length-`len`
  // word with value v: a chain whose meet is that word's generator.
  std::vector<std::uint32_t> prefix_chain_indices(std::uint64_t v, std::uint64_t len) const {
    std::vector<std::uint32_t> f;
    f.reserve(len + 1);
    for (std::uint64_t k = 0; k <= len; ++k) {
      const std::uint64_t pv = v >> (len - k);
      f.push_back(static_cast<std::uint32_t>(((std::uint64_t{1} << k) - 1) + pv));
    }
    return f;
  }

  static std::uint64_t farey_level(const Rational& r) {
    if (r.denominator() > BigInt(kFareyCap)) return kFareyCap + 1;
    return r.denominator().convert_to<std::uint64_t>();
  }

  // Extend the interval enumeration through the given Farey level. Pairs are
  // emitted at the level where max(den lo, den hi) first admits them, in
  // (lo, hi)-lexicographic order within a level.
  void ensure_interval_level(std::uint64_t level) const {
    if (level > kFareyCap)
      throw SizeBoundError("interval enumeration capped at denominator " +
                           std::to_string(kFareyCap));
    Cache& c = *cache_;
    while (c.interval_level_done < level) {
      const std::uint64_t d = ++c.interval_level_done;
      std::vector<Rational> farey;
      for (std::uint64_t den = 1; den <= d; ++den)
        for (std::uint64_t num = 0; num <= den; ++num) {
          Rational r{BigInt(num), BigInt(den)};
          if (farey_level(r) <= d) farey.push_back(std::move(r));
        }
      std::sort(farey.begin(), farey.end());
      farey.erase(std::unique(farey.begin(), farey.end()), farey.end());
      for (std::size_t i = 0; i < farey.size(); ++i)
        for (std::size_t j = i + 1; j < farey.size(); ++j) {
          const auto& lo = farey[i];
          const auto& hi = farey[j];
          if (std::max(farey_level(lo), farey_level(hi)) != d) continue;
          c.interval_index.emplace(std::make_pair(lo, hi), c.intervals.size());
          c.intervals.emplace_back(lo, hi);
        }
    }
  }

  void ensure_intervals(std::uint64_t n) const {
    while (cache_->intervals.size() < n)
      ensure_interval_level(cache_->interval_level_done + 1);
  }

  SpaceKind kind_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace mspace
