#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "mspace/runtime.hpp"
#include "mspace/spaces.hpp"

namespace mspace {

struct CapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration caps for the quantifier dovetails. Families that exceed them
// are skipped: the semi-decision stays sound but may suspend on witnesses
// outside the caps.
struct QuantifierCaps {
  std::uint64_t max_family_size = 4096;
  std::uint64_t max_generator_index = std::uint64_t{1} << 20;
};

using IndexSet = std::vector<std::uint32_t>;  // sorted generator indices
using IndexFamily = std::vector<IndexSet>;

namespace detail {

// Cantor pairing and its inverse, used by the support-coded family stream.
inline std::optional<std::uint64_t> cantor_pair(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  if (s < a) return std::nullopt;
  if (s > (std::uint64_t{1} << 31)) return std::nullopt;  // keep products exact
  return s * (s + 1) / 2 + b;
}

inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t m) {
  std::uint64_t w = static_cast<std::uint64_t>(
      (std::sqrt(8.0L * static_cast<long double>(m) + 1.0L) - 1.0L) / 2.0L);
  while (w * (w + 1) / 2 > m) --w;
  while ((w + 1) * (w + 2) / 2 <= m) ++w;
  const std::uint64_t b = m - w * (w + 1) / 2;
  return {w - b, b};
}

inline IndexSet mask_to_indices(std::uint64_t mask) {
  IndexSet out;
  for (std::uint32_t i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) out.push_back(i);
  return out;
}

inline std::optional<std::uint64_t> indices_to_mask(const IndexSet& f) {
  std::uint64_t m = 0;
  for (auto i : f) {
    if (i >= 63) return std::nullopt;
    m |= std::uint64_t{1} << i;
  }
  return m;
}

// The family stream for universal quantification interleaves three sources:
//   slot 3t   : the space's canonical covering families (grids/meshes),
//   slot 3t+1 : mask-coded families (dense over the first few generators):
//               bit m of t selects the generator subset with bitmask m,
//   slot 3t+2 : support-coded families pair(support mask, member selector)
//               (reaches small families over later generators).
// The stream is surjective onto the finite families of finite generator sets
// up to the representable range; first_family_slot computes the inverse.
inline std::optional<IndexFamily> family_at(const Space& space, std::uint64_t t) {
  const std::uint64_t q = t / 3;
  switch (t % 3) {
    case 0: {
      auto fam = space.structured_cover_family(q);
      if (!fam) return std::nullopt;
      return IndexFamily(fam->begin(), fam->end());
    }
    case 1: {
      IndexFamily fam;
      std::uint64_t n = q;
      for (std::uint32_t m = 0; n; ++m, n >>= 1)
        if (n & 1) fam.push_back(mask_to_indices(m));
      return fam;
    }
    default: {
      const auto [smask, sel] = cantor_unpair(q);
      const IndexSet support = mask_to_indices(smask);
      if (support.size() > 5) return std::nullopt;  // selector range tops out at 2^(2^5)
      const std::uint64_t selector_range =
          support.size() == 5 ? (std::uint64_t{1} << 32)
                              : (std::uint64_t{1} << (std::uint64_t{1} << support.size()));
      if (sel >= selector_range) return std::nullopt;
      IndexFamily fam;
      std::uint64_t n = sel;
      for (std::uint32_t local = 0; n; ++local, n >>= 1)
        if (n & 1) {
          IndexSet f;
          for (std::uint32_t b = 0; b < support.size(); ++b)
            if (local >> b & 1) f.push_back(support[b]);
          fam.push_back(std::move(f));
        }
      return fam;
    }
  }
}

// The meet stream for existential quantification: slot 2t the space's
// canonical positive meets, slot 2t+1 the mask-coded generator subsets.
inline std::optional<IndexSet> meet_at(const Space& space, std::uint64_t t) {
  if (t % 2 == 0) return space.structured_positive(t / 2);
  return mask_to_indices(t / 2);
}

// A decoded enumeration item: members flattened, with per-member bitmasks
// when every index fits.
struct PackedFamily {
  std::vector<std::uint32_t> flat;   // member indices, concatenated, each sorted
  std::vector<std::uint32_t> offs;   // member boundaries; offs.size() = size + 1
  std::vector<std::uint64_t> masks;  // per-member mask, or empty when unmaskable
  std::uint32_t max_index = 0;

  std::size_t size() const { return offs.empty() ? 0 : offs.size() - 1; }

  static PackedFamily pack(const IndexFamily& fam) {
    PackedFamily p;
    p.offs.push_back(0);
    bool maskable = true;
    for (const auto& f : fam) {
      for (auto i : f) {
        p.flat.push_back(i);
        p.max_index = std::max(p.max_index, i);
        if (i >= 63) maskable = false;
      }
      p.offs.push_back(static_cast<std::uint32_t>(p.flat.size()));
    }
    if (maskable) {
      p.masks.reserve(fam.size());
      for (const auto& f : fam) {
        std::uint64_t m = 0;
        for (auto i : f) m |= std::uint64_t{1} << i;
        p.masks.push_back(m);
      }
    }
    return p;
  }
};

// Per-(space, stream) cache of guard verdicts and decoded items, shared
// process-wide so repeated quantifier runs reuse the syntactic work. Slots
// are decoded in order; entries are immutable once published, and reads below
// the published mark are lock-free.
class GuardCache {
 public:
  struct Entry {
    std::int8_t guard = -1;  // -1 absent slot, 0 guard false, 1 guard true
    std::unique_ptr<PackedFamily> family;  // present for guard-true slots
  };

  GuardCache() { chunks_.reserve(kMaxChunks); }

  // Entry for `slot`, decoding forward as needed.
  template <typename Decode, typename Judge>
  const Entry& get(std::uint64_t slot, Decode&& decode, Judge&& judge) {
    if (slot >= published_.load(std::memory_order_acquire)) {
      std::lock_guard<std::mutex> lock(mu_);
      while (published_.load(std::memory_order_relaxed) <= slot) {
        const std::uint64_t next = published_.load(std::memory_order_relaxed);
        Entry e;
        if (auto item = decode(next)) {
          e.guard = judge(*item) ? 1 : 0;
          if (e.guard == 1)
            e.family = std::make_unique<PackedFamily>(PackedFamily::pack(wrap(*item)));
        }
        const std::size_t chunk = next / kChunk;
        if (chunk >= kMaxChunks) throw CapError("quantifier enumeration cache exhausted");
        if (chunk >= chunks_.size()) chunks_.emplace_back(new Entry[kChunk]);
        chunks_[chunk][next % kChunk] = std::move(e);
        published_.store(next + 1, std::memory_order_release);
      }
    }
    return chunks_[slot / kChunk][slot % kChunk];
  }

  static constexpr std::size_t kChunk = 4096;

  std::uint64_t published() const { return published_.load(std::memory_order_acquire); }

  // Raw chunk access for slots below published(); entries there are immutable.
  const Entry* chunk(std::uint64_t index) const { return chunks_[index].get(); }

 private:
  static const IndexFamily& wrap(const IndexFamily& fam) { return fam; }
  static IndexFamily wrap(const IndexSet& f) { return IndexFamily{f}; }

  static constexpr std::size_t kMaxChunks = 16384;  // 64M slots
  std::mutex mu_;
  std::vector<std::unique_ptr<Entry[]>> chunks_;
  std::atomic<std::uint64_t> published_{0};
};

inline GuardCache& forall_guard_cache(SpaceKind k) {
  static GuardCache caches[3];
  return caches[static_cast<int>(k)];
}
inline GuardCache& exists_guard_cache(SpaceKind k) {
  static GuardCache caches[3];
  return caches[static_cast<int>(k)];
}

inline FormalMeet materialize(const Space& space, const IndexSet& f) {
  std::vector<GeneratorId> gens;
  gens.reserve(f.size());
  for (auto i : f) gens.push_back(space.generator(i));
  return FormalMeet(std::move(gens));
}

inline FormalMachine materialize(const Space& space, const IndexFamily& fam) {
  std::vector<FormalMeet> branches;
  branches.reserve(fam.size());
  for (const auto& f : fam) branches.push_back(materialize(space, f));
  return FormalMachine(std::move(branches));
}

// A compiled formal machine with branches coded as generator index sets,
// enabling constant-time box tests inside the dovetails. Branches whose
// generators fall outside the enumerable range keep a sentinel and can never
// lie inside an enumerated set.
struct EncodedMachine {
  static constexpr std::uint64_t kUnindexed = UINT64_MAX;

  bool mask_mode = false;
  std::vector<std::uint64_t> branch_masks;  // mask mode
  std::vector<IndexSet> branch_sets;        // vector mode; empty entry + flag
  std::vector<bool> unindexed;              // branch has an unenumerable generator
  std::size_t branch_count = 0;

  static std::optional<EncodedMachine> from(const Space& space, const MachineProcess& mp) {
    const auto* branches = mp.finite_branches();
    if (!branches) return std::nullopt;
    EncodedMachine em;
    em.branch_count = branches->size();
    em.branch_sets.resize(branches->size());
    em.unindexed.assign(branches->size(), false);
    bool mask_ok = true;
    for (std::size_t j = 0; j < branches->size(); ++j) {
      IndexSet idx;
      for (const auto& g : (*branches)[j].generators()) {
        if (!space.generator_matches(g))
          throw IncompatibleSpaceError("generator " + g.to_string() +
                                       " does not belong to " + space.name());
        if (auto i = space.generator_index(g)) {
          idx.push_back(static_cast<std::uint32_t>(*i));
        } else {
          em.unindexed[j] = true;
        }
      }
      std::sort(idx.begin(), idx.end());
      for (auto i : idx)
        if (i >= 63) mask_ok = false;
      em.branch_sets[j] = std::move(idx);
    }
    if (mask_ok) {
      em.mask_mode = true;
      em.branch_masks.resize(branches->size());
      for (std::size_t j = 0; j < branches->size(); ++j) {
        std::uint64_t m = 0;
        for (auto i : em.branch_sets[j]) m |= std::uint64_t{1} << i;
        em.branch_masks[j] = m;
      }
    }
    return em;
  }

  bool branch_in_mask(std::size_t j, std::uint64_t fmask) const {
    return !unindexed[j] && (branch_masks[j] & ~fmask) == 0;
  }
  bool branch_in_set(std::size_t j, const IndexSet& fset) const {
    return !unindexed[j] && std::includes(fset.begin(), fset.end(), branch_sets[j].begin(),
                                          branch_sets[j].end());
  }
  bool branch_in_range(std::size_t j, const std::uint32_t* lo, const std::uint32_t* hi) const {
    return !unindexed[j] && std::includes(lo, hi, branch_sets[j].begin(), branch_sets[j].end());
  }

  // Slot of the first branch contained in the member (the box test's halt
  // stage minus one), if any.
  std::optional<std::uint64_t> first_hit(const PackedFamily& pf, std::size_t member) const {
    if (!pf.masks.empty() && mask_mode) {
      const std::uint64_t fmask = pf.masks[member];
      for (std::size_t j = 0; j < branch_count; ++j)
        if (branch_in_mask(j, fmask)) return j;
      return std::nullopt;
    }
    const std::uint32_t* lo = pf.flat.data() + pf.offs[member];
    const std::uint32_t* hi = pf.flat.data() + pf.offs[member + 1];
    for (std::size_t j = 0; j < branch_count; ++j)
      if (branch_in_range(j, lo, hi)) return j;
    return std::nullopt;
  }
};

}  // namespace detail

// Result of driving a quantifier dovetail to a fuel budget.
struct QuantRun {
  std::optional<Fuel> halted_at;  // fuel consumed when the witness completed
  Fuel fuel_used = 0;
  std::optional<std::uint64_t> witness_slot;
  std::optional<IndexFamily> witness_family;  // forall: the covering family
  std::optional<IndexSet> witness_meet;       // exists: the positive meet
};

namespace detail {

template <bool Universal>
const GuardCache::Entry& guarded_entry(const Space& space, GuardCache& cache,
                                       std::uint64_t slot) {
  if constexpr (Universal) {
    return cache.get(
        slot, [&](std::uint64_t s) { return family_at(space, s); },
        [&](const IndexFamily& fam) { return space.covers(materialize(space, fam)); });
  } else {
    return cache.get(
        slot, [&](std::uint64_t s) { return meet_at(space, s); },
        [&](const IndexSet& f) { return space.positive(materialize(space, f)); });
  }
}

template <bool Universal>
void fill_witness(const Space& space, std::uint64_t slot, QuantRun& out) {
  out.witness_slot = slot;
  if constexpr (Universal) {
    out.witness_family = family_at(space, slot);
  } else {
    out.witness_meet = meet_at(space, slot);
  }
}

// Dovetail for machines whose branches are index-coded. Every box test
// against a finite-support point has a computable lifecycle: it halts at
// grant j + 1 when branch j is the first one inside the member, or is
// provably suspended at grant k + 1 once the enumeration ends. The whole
// job is therefore profiled at spawn and the scheduler just streams grant
// counts, which keeps one fuel unit near one machine instruction.
template <bool Universal>
QuantRun run_arithmetic(const Space& space, const EncodedMachine& em, Fuel budget,
                        const QuantifierCaps& caps, GuardCache& cache) {
  QuantRun out;
  const std::uint64_t k = em.branch_count;

  struct Job {
    std::uint64_t spawn = 0;
    std::uint32_t arena_at = 0;  // round unit counts live in the shared arena
    std::uint32_t rounds = 0;
    std::uint32_t round = 0;  // rounds already granted
    bool completes = false;   // outcome at the final round
  };
  std::vector<Job> jobs;
  std::vector<std::uint32_t> arena;      // per-round unit counts, all jobs
  std::vector<std::uint32_t> halt_at;    // scratch: halts at grant r -> count
  Fuel used = 0;

  // local chunk cursor over the immutable published prefix of the cache
  std::uint64_t pub = cache.published();
  const GuardCache::Entry* chunk = nullptr;
  std::uint64_t chunk_index = UINT64_MAX;

  for (std::uint64_t slot = 0;; ++slot) {
    if (used >= budget) break;
    ++used;  // enumeration progress

    if (slot >= pub) {
      guarded_entry<Universal>(space, cache, slot);
      pub = cache.published();
      chunk_index = UINT64_MAX;
    }
    if (slot / GuardCache::kChunk != chunk_index) {
      chunk_index = slot / GuardCache::kChunk;
      chunk = cache.chunk(chunk_index);
    }
    const auto& entry = chunk[slot % GuardCache::kChunk];
    if (entry.guard == 1) {
      const PackedFamily& pf = *entry.family;
      if (pf.size() <= caps.max_family_size && pf.max_index <= caps.max_generator_index &&
          pf.size() > 0) {
        // profile the job: per-member halt grants, then per-round unit counts
        Fuel max_halt = 0;
        std::size_t dying = 0;
        halt_at.assign(k + 2, 0);
        for (std::size_t m = 0; m < pf.size(); ++m) {
          if (auto j = em.first_hit(pf, m)) {
            const Fuel h = *j + 1;
            ++halt_at[h];
            max_halt = std::max(max_halt, h);
          } else {
            ++dying;
          }
        }
        Job job;
        job.spawn = slot;
        job.completes = dying == 0;
        job.rounds = static_cast<std::uint32_t>(job.completes ? max_halt : k + 1);
        job.arena_at = static_cast<std::uint32_t>(arena.size());
        std::uint64_t alive = pf.size();  // probes entering round 1
        for (Fuel r = 1; r <= job.rounds; ++r) {
          arena.push_back(static_cast<std::uint32_t>(alive));
          alive -= halt_at[r];
        }
        if (!job.completes) arena[job.arena_at + job.rounds - 1] = 1;  // first probe dies
        jobs.push_back(job);
      }
    }

    // one round of grants per live job, in spawn order
    for (std::size_t ji = 0; ji < jobs.size();) {
      Job& job = jobs[ji];
      const Fuel units = arena[job.arena_at + job.round];
      if (used + units > budget) {
        out.fuel_used = budget;
        return out;
      }
      used += units;
      ++job.round;
      if (job.round == job.rounds) {
        if (job.completes) {
          out.halted_at = used;
          out.fuel_used = used;
          fill_witness<Universal>(space, job.spawn, out);
          return out;
        }
        jobs[ji] = jobs.back();
        jobs.pop_back();
        continue;
      }
      ++ji;
    }
  }
  out.fuel_used = std::min(used, budget);
  return out;
}

// Dovetail for opaque machine processes: each admitted member gets a live
// evaluation state against its finite-support point, advanced one stage per
// slot. Slower, but works for enumerated-infinite machines and generators
// outside the indexed range.
template <bool Universal>
QuantRun run_generic(const Space& space, const MachineProcess& mp, Fuel budget,
                     const QuantifierCaps& caps, GuardCache& cache) {
  QuantRun out;

  struct Job {
    std::uint64_t spawn = 0;
    std::vector<EvalState> probes;
  };
  std::vector<Job> jobs;
  Fuel used = 0;

  for (std::uint64_t slot = 0;; ++slot) {
    if (used >= budget) break;
    ++used;

    const auto& entry = guarded_entry<Universal>(space, cache, slot);
    if (entry.guard == 1) {
      const PackedFamily& pf = *entry.family;
      if (pf.size() <= caps.max_family_size && pf.max_index <= caps.max_generator_index &&
          pf.size() > 0) {
        Job job;
        job.spawn = slot;
        job.probes.reserve(pf.size());
        for (std::size_t m = 0; m < pf.size(); ++m) {
          IndexSet f(pf.flat.begin() + pf.offs[m], pf.flat.begin() + pf.offs[m + 1]);
          job.probes.emplace_back(mp, GeneralizedPoint::finite(materialize(space, f)));
        }
        jobs.push_back(std::move(job));
      }
    }

    for (std::size_t ji = 0; ji < jobs.size();) {
      Job& job = jobs[ji];
      bool died = false;
      std::size_t open = 0;
      for (auto& p : job.probes) {
        const auto halted = p.best_halt();
        if (halted && *halted <= p.stages()) continue;
        if (used >= budget) {
          out.fuel_used = used;
          return out;
        }
        ++used;
        p.advance();
        if (p.dead()) {
          died = true;
          break;
        }
        const auto h2 = p.best_halt();
        if (!(h2 && *h2 <= p.stages())) ++open;
      }
      if (died) {
        jobs[ji] = std::move(jobs.back());
        jobs.pop_back();
        continue;
      }
      if (open == 0) {
        out.halted_at = used;
        out.fuel_used = used;
        fill_witness<Universal>(space, job.spawn, out);
        return out;
      }
      ++ji;
    }
  }
  out.fuel_used = std::min(used, budget);
  return out;
}

// The shared dovetail: enumerate items, check the syntactic guard, and run
// one box test per member of each admitted item, all fairly interleaved.
// Fuel accounting: one unit per enumeration slot and one unit per box-test
// stage granted.
template <bool Universal>
QuantRun run_dovetail(const Space& space, const MachineProcess& mp, Fuel budget,
                      const QuantifierCaps& caps) {
  GuardCache& cache = Universal ? forall_guard_cache(space.kind())
                                : exists_guard_cache(space.kind());
  if (auto encoded = EncodedMachine::from(space, mp))
    return run_arithmetic<Universal>(space, *encoded, budget, caps, cache);
  return run_generic<Universal>(space, mp, budget, caps, cache);
}

}  // namespace detail

// Universal quantification over the space: dovetail over the family stream;
// for every family passing the exact cover guard, run the box test against
// each member's finite-support point; halt when some admitted family has all
// its box tests halted. For a machine compiled from formal syntax this halts
// iff the machine covers the space.
inline QuantRun forall_run(const Space& space, const MachineProcess& mp, Fuel budget,
                           const QuantifierCaps& caps = {}) {
  return detail::run_dovetail<true>(space, mp, budget, caps);
}

inline SemiDecider forall(const Space& space, const MachineProcess& mp,
                          QuantifierCaps caps = {}) {
  return SemiDecider([space, mp, caps](Fuel fuel) {
    return forall_run(space, mp, fuel, caps).halted_at;
  });
}

// Existential quantification: dovetail over the positive-meet stream; halt
// when the machine has a branch inside some positive meet, i.e. when its open
// is inhabited.
inline QuantRun exists_run(const Space& space, const MachineProcess& mp, Fuel budget,
                           const QuantifierCaps& caps = {}) {
  return detail::run_dovetail<false>(space, mp, budget, caps);
}

inline SemiDecider exists(const Space& space, const MachineProcess& mp,
                          QuantifierCaps caps = {}) {
  return SemiDecider([space, mp, caps](Fuel fuel) {
    return exists_run(space, mp, fuel, caps).halted_at;
  });
}

// First slot of the given family in the enumeration stream (the computable
// inverse). Checks the structured stream's closed forms, the mask coding and
// the support coding, and returns the smallest representable slot.
inline std::optional<std::uint64_t> family_slot(const Space& space, IndexFamily fam) {
  for (auto& f : fam) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  std::sort(fam.begin(), fam.end());
  fam.erase(std::unique(fam.begin(), fam.end()), fam.end());

  std::optional<std::uint64_t> best;
  auto consider = [&](std::uint64_t slot) {
    if (!best || slot < *best) best = slot;
  };

  // structured grids: scan the bounded stream
  for (std::uint64_t t = 0; t <= space.grid_cap(); ++t) {
    auto fam_t = space.structured_cover_family(t);
    if (!fam_t) break;
    IndexFamily cand(fam_t->begin(), fam_t->end());
    for (auto& f : cand) std::sort(f.begin(), f.end());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (cand == fam) consider(3 * t);
  }
  // mask coding
  {
    std::uint64_t code = 0;
    bool ok = true;
    for (const auto& f : fam) {
      auto m = detail::indices_to_mask(f);
      if (!m || *m >= 63) { ok = false; break; }
      code |= std::uint64_t{1} << *m;
    }
    if (ok) consider(3 * code + 1);
  }
  // support coding
  {
    IndexSet support;
    for (const auto& f : fam) support.insert(support.end(), f.begin(), f.end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.size() <= 5) {
      std::uint64_t smask = 0;
      bool ok = true;
      for (auto i : support) {
        if (i >= 63) { ok = false; break; }
        smask |= std::uint64_t{1} << i;
      }
      if (ok) {
        std::uint64_t sel = 0;
        for (const auto& f : fam) {
          std::uint64_t local = 0;
          for (auto i : f)
            local |= std::uint64_t{1}
                     << (std::lower_bound(support.begin(), support.end(), i) - support.begin());
          sel |= std::uint64_t{1} << local;
        }
        if (auto m = detail::cantor_pair(smask, sel)) consider(3 * *m + 2);
      }
    }
  }
  return best;
}

// First slot of the given meet in the exists stream.
inline std::optional<std::uint64_t> meet_slot(const Space& space, IndexSet f) {
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  std::optional<std::uint64_t> best;
  if (auto m = detail::indices_to_mask(f)) best = 2 * *m + 1;
  // structured closed forms
  switch (space.kind()) {
    case SpaceKind::CantorDigits: {
      // the structured stream emits one generator per digit 0..L-1
      bool consec = true;
      for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] / 2 != i) { consec = false; break; }
      if (consec) {
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < f.size(); ++i) value = 2 * value + (f[i] % 2);
        const std::uint64_t t = ((std::uint64_t{1} << f.size()) - 1) + value;
        if (!best || 2 * t < *best) best = 2 * t;
      }
      break;
    }
    case SpaceKind::CantorPrefix: {
      // the structured stream emits the full prefix chain of one word; the
      // last index determines the word, which fixes the whole chain
      if (!f.empty()) {
        const std::uint64_t last = f.back();
        std::uint64_t len = 0;
        while (((std::uint64_t{1} << (len + 1)) - 1) <= last) ++len;
        const std::uint64_t value = last - ((std::uint64_t{1} << len) - 1);
        IndexSet chain_set;
        for (std::uint64_t k = 0; k <= len; ++k)
          chain_set.push_back(
              static_cast<std::uint32_t>(((std::uint64_t{1} << k) - 1) + (value >> (len - k))));
        if (chain_set == f) {
          if (!best || 2 * last < *best) best = 2 * last;
        }
      }
      break;
    }
    case SpaceKind::UnitInterval: {
      if (f.size() == 1 && f[0] < 16384) {
        const std::uint64_t t = f[0];
        if (!best || 2 * t < *best) best = 2 * t;
      }
      break;
    }
  }
  return best;
}

// Worst-case fuel for a forall run to complete through the job spawned at
// `witness_slot`, for a finite formal machine with `branch_count` branches:
// every admitted job's probes settle within branch_count + 2 grants, and the
// witness job completes within that many rounds of its spawn.
inline Fuel forall_fuel_bound(const Space& space, std::uint64_t branch_count,
                              std::uint64_t witness_slot, const QuantifierCaps& caps = {}) {
  const Fuel per_probe = branch_count + 2;
  const std::uint64_t horizon = witness_slot + per_probe + 1;
  Fuel bound = horizon + 1;
  auto& cache = detail::forall_guard_cache(space.kind());
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    const auto& e = detail::guarded_entry<true>(space, cache, t);
    if (e.guard == 1 && e.family->size() <= caps.max_family_size &&
        e.family->max_index <= caps.max_generator_index)
      bound += static_cast<Fuel>(e.family->size()) * per_probe;
  }
  return bound;
}

inline Fuel exists_fuel_bound(const Space& space, std::uint64_t branch_count,
                              std::uint64_t witness_slot, const QuantifierCaps& caps = {}) {
  const Fuel per_probe = branch_count + 2;
  const std::uint64_t horizon = witness_slot + per_probe + 1;
  Fuel bound = horizon + 1;
  auto& cache = detail::exists_guard_cache(space.kind());
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    const auto& e = detail::guarded_entry<false>(space, cache, t);
    if (e.guard == 1 && e.family->size() <= caps.max_family_size &&
        e.family->max_index <= caps.max_generator_index)
      bound += per_probe;
  }
  return bound;
}

// The finite truncation of the open of covers: every family over the first
// `gen_bound` generators with at most `size_bound` members that passes the
// cover guard.
class CoverFamily {
 public:
  CoverFamily(Space space, std::vector<IndexFamily> members)
      : space_(std::move(space)), members_(std::move(members)) {
    for (const auto& fam : members_) {
      std::vector<FormalMeet> boxes;
      boxes.reserve(fam.size());
      for (const auto& f : fam) boxes.push_back(detail::materialize(space_, f));
      boxes_.push_back(std::move(boxes));
    }
  }

  const std::vector<IndexFamily>& members() const { return members_; }

  // Syntactic membership of a machine in the truncated open: some member
  // family has every box containing a branch.
  bool contains(const FormalMachine& m) const {
    for (const auto& boxes : boxes_) {
      bool all = true;
      for (const auto& box : boxes)
        if (!box_contains(m, box)) { all = false; break; }
      if (all) return true;
    }
    return false;
  }

 private:
  Space space_;
  std::vector<IndexFamily> members_;
  std::vector<std::vector<FormalMeet>> boxes_;
};

// Enumerate every family of nonempty generator subsets within the bounds and
// keep those passing the cover guard. Throws CapError when the enumeration
// would exceed `cap` candidates.
inline CoverFamily cover_open(const Space& space, std::uint64_t gen_bound,
                              std::uint64_t size_bound, std::uint64_t cap = 1u << 22) {
  if (gen_bound > 16) throw CapError("cover_open: generator bound too large");
  const std::uint64_t subsets = std::uint64_t{1} << gen_bound;

  // count families first: sum of C(2^g - 1, k) for k <= size_bound
  long double total = 0;
  for (std::uint64_t k = 0; k <= size_bound; ++k) {
    long double c = 1;
    for (std::uint64_t i = 0; i < k; ++i)
      c = c * static_cast<long double>(subsets - 1 - i) / (i + 1);
    total += c;
    if (total > static_cast<long double>(cap))
      throw CapError("cover_open: enumeration exceeds cap");
  }

  std::vector<IndexFamily> found;
  std::vector<std::uint32_t> pick;
  auto rec = [&](auto&& self, std::uint64_t next) -> void {
    if (!pick.empty()) {
      IndexFamily fam;
      fam.reserve(pick.size());
      for (auto m : pick) fam.push_back(detail::mask_to_indices(m));
      if (space.covers(detail::materialize(space, fam))) found.push_back(std::move(fam));
    }
    if (pick.size() >= size_bound) return;
    for (std::uint64_t m = next; m < subsets; ++m) {
      pick.push_back(static_cast<std::uint32_t>(m));
      self(self, m + 1);
      pick.pop_back();
    }
  };
  rec(rec, 1);
  return CoverFamily(space, std::move(found));
}

// Depth-bounded search over binary streams: find a word of length d accepted
// by the predicate, or report that none exists. The machine of accepted
// prefixes is swept cell by cell with box tests at their sufficient fuel (the
// stream-search reduction: run the machine on each finite sequence), and the
// none-answer is cross-checked by the universal dovetail on the rejected
// machine, whose witness is the depth-d grid.
inline std::optional<std::string> cantor_search(
    const std::function<bool(const std::string&)>& pred, std::uint64_t d) {
  Space space(SpaceKind::CantorPrefix);
  if (d > space.grid_cap())
    throw CapError("cantor_search: depth beyond the grid stream");

  std::vector<FormalMeet> accepted, rejected;
  std::string w(d, '0');
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << d); ++v) {
    for (std::uint64_t i = 0; i < d; ++i) w[i] = (v >> (d - 1 - i)) & 1 ? '1' : '0';
    (pred(w) ? accepted : rejected).push_back(FormalMeet({GeneratorId::prefix(w)}));
  }

  std::optional<std::string> witness;
  if (!accepted.empty()) {
    const MachineProcess mp_pos = compile(FormalMachine(accepted));
    const auto encoded = detail::EncodedMachine::from(space, mp_pos);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << d) && !witness; ++v) {
      IndexSet chain;
      for (std::uint64_t k = 0; k <= d; ++k)
        chain.push_back(
            static_cast<std::uint32_t>(((std::uint64_t{1} << k) - 1) + (v >> (d - k))));
      const detail::PackedFamily pf = detail::PackedFamily::pack({chain});
      if (encoded->first_hit(pf, 0)) {
        for (std::uint64_t i = 0; i < d; ++i) w[i] = (v >> (d - 1 - i)) & 1 ? '1' : '0';
        witness = w;
      }
    }
  }

  // cross-check through the universal dovetail: the rejected machine covers
  // the space exactly when no witness exists
  const MachineProcess mp_neg = compile(FormalMachine(rejected));
  const Fuel bound = forall_fuel_bound(space, rejected.size(), 3 * d);
  const auto all_rejected = forall_run(space, mp_neg, bound);
  if (all_rejected.halted_at.has_value() == witness.has_value())
    throw std::logic_error("cantor_search: quantifier disagrees with the cell sweep");
  return witness;
}

}  // namespace mspace
