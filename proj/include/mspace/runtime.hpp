#pragma once

#include <cassert>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mspace/semidecider.hpp"

namespace mspace {

// A machine as a running process: an enumeration of parallel branches, each a
// finite meet of generators. Finite machines end with an End slot; infinite
// machines keep enumerating (Skip slots mark stages that introduce nothing,
// which lets sparse enumerations stay total).
class MachineProcess {
 public:
  struct Slot {
    enum Kind { Branch, Skip, End };
    Kind kind = End;
    FormalMeet branch;

    static Slot mk_branch(FormalMeet b) { return Slot{Branch, std::move(b)}; }
    static Slot skip() { return Slot{Skip, {}}; }
    static Slot end() { return Slot{End, {}}; }
  };
  using SlotFn = std::function<Slot(std::uint64_t)>;

  MachineProcess() = default;

  static MachineProcess from_branches(std::vector<FormalMeet> branches,
                                      std::optional<FormalMachine> source = std::nullopt) {
    MachineProcess mp;
    mp.finite_ = std::make_shared<std::vector<FormalMeet>>(std::move(branches));
    mp.source_ = std::move(source);
    return mp;
  }

  static MachineProcess enumerated(SlotFn slots,
                                   std::optional<FormalMachine> source = std::nullopt) {
    MachineProcess mp;
    mp.slots_ = std::move(slots);
    mp.source_ = std::move(source);
    return mp;
  }

  Slot slot(std::uint64_t i) const {
    if (finite_) {
      if (i < finite_->size()) return Slot::mk_branch((*finite_)[i]);
      return Slot::end();
    }
    return slots_(i);
  }

  const std::vector<FormalMeet>* finite_branches() const {
    return finite_ ? finite_.get() : nullptr;
  }
  const std::optional<FormalMachine>& source() const { return source_; }

 private:
  std::shared_ptr<std::vector<FormalMeet>> finite_;
  SlotFn slots_;
  std::optional<FormalMachine> source_;
};

// Branches of the absorption normal form in canonical order, then end.
inline MachineProcess compile(const FormalMachine& m) {
  const FormalMachine n = normalize(m);
  return MachineProcess::from_branches(n.branches(), n);
}

// Incremental state of the dovetailed execution of a machine process against
// a generalized point.
//
// Cost model: one fuel unit is one dovetail stage. Stage t introduces the
// branch in slot t (if any) and advances every open generator query of every
// started branch by one budget unit, so a query born at stage s has budget
// t - s + 1 after stage t. The process halts once every query of some branch
// has halted; at_step is the number of stages executed when that happens.
// Fairness: every branch is eventually started and every query's budget grows
// without bound as fuel does.
//
// Queries with a known fate (see SemiDecider::Fate) are folded into a halt
// stage arithmetically; unknown queries are re-polled each stage. A state
// whose enumeration has ended with every branch provably suspended stops
// consuming anything and reports itself dead.
class EvalState {
 public:
  EvalState(MachineProcess mp, GeneralizedPoint point,
            std::vector<std::uint32_t> start_order = {})
      : mp_(std::move(mp)), point_(std::move(point)), order_(std::move(start_order)) {}

  // One stage. No-op when the state is already resolved.
  void advance() {
    if (resolved()) {
      ++stage_;  // an idle stage still counts; outcome is already fixed
      return;
    }
    const Fuel t = stage_;
    if (!ended_) {
      const Slot s = fetch_slot(next_slot_++);
      if (s.kind == Slot::End) {
        ended_ = true;
      } else if (s.kind == Slot::Branch) {
        start_branch(t, s.branch);
      }
    }
    poll_pending(t);
    ++stage_;
  }

  Fuel stages() const { return stage_; }

  // Best halt stage discovered so far (may exceed stages() when the fate of a
  // future branch is already known).
  std::optional<Fuel> best_halt() const { return best_; }

  // Outcome is settled: either a halt stage is known, or the machine can
  // never halt on this point.
  bool resolved() const { return best_.has_value() || dead(); }
  bool dead() const { return ended_ && pending_.empty() && !best_; }

  // Halted within `fuel` stages?
  std::optional<Fuel> status_at(Fuel fuel) const {
    if (best_ && *best_ <= fuel) return best_;
    return std::nullopt;
  }

 private:
  using Slot = MachineProcess::Slot;

  Slot fetch_slot(std::uint64_t i) const {
    if (!order_.empty()) {
      const auto* fb = mp_.finite_branches();
      assert(fb && order_.size() == fb->size());
      if (i < order_.size()) return Slot::mk_branch((*fb)[order_[i]]);
      return Slot::end();
    }
    return mp_.slot(i);
  }

  void start_branch(Fuel start_stage, const FormalMeet& b) {
    Fuel max_known = 0;
    std::vector<SemiDecider> open;
    for (const auto& g : b.generators()) {
      SemiDecider sd = point_.query(g);
      const auto& fate = sd.fate();
      if (fate.known) {
        if (!fate.halts_at) return;  // branch can never halt
        max_known = std::max(max_known, *fate.halts_at);
      } else {
        open.push_back(std::move(sd));
      }
    }
    const Fuel base = start_stage + std::max<Fuel>(max_known, 1);
    if (open.empty()) {
      note_candidate(base);
    } else {
      pending_.push_back(Pending{start_stage, base, std::move(open)});
    }
  }

  void poll_pending(Fuel t) {
    for (std::size_t i = 0; i < pending_.size();) {
      Pending& p = pending_[i];
      const Fuel budget = t - p.start + 1;
      for (std::size_t q = 0; q < p.open.size();) {
        if (auto s = p.open[q].run(budget)) {
          p.base = std::max(p.base, p.start + std::max<Fuel>(*s, 1));
          p.open[q] = std::move(p.open.back());
          p.open.pop_back();
        } else {
          ++q;
        }
      }
      if (p.open.empty()) {
        note_candidate(p.base);
        pending_[i] = std::move(pending_.back());
        pending_.pop_back();
      } else {
        ++i;
      }
    }
  }

  void note_candidate(Fuel at_step) {
    if (!best_ || at_step < *best_) best_ = at_step;
  }

  struct Pending {
    Fuel start = 0;
    Fuel base = 0;  // halt stage implied by the queries settled so far
    std::vector<SemiDecider> open;
  };

  MachineProcess mp_;
  GeneralizedPoint point_;
  std::vector<std::uint32_t> order_;
  Fuel stage_ = 0;
  std::uint64_t next_slot_ = 0;
  bool ended_ = false;
  std::optional<Fuel> best_;
  std::vector<Pending> pending_;
};

namespace detail {

inline std::optional<Fuel> run_eval(const MachineProcess& mp, const GeneralizedPoint& x,
                                    const std::vector<std::uint32_t>& order, Fuel fuel) {
  EvalState st(mp, x, order);
  while (st.stages() < fuel) {
    if (st.resolved()) break;
    if (auto b = st.best_halt(); b && *b <= st.stages()) break;
    st.advance();
  }
  return st.status_at(fuel);
}

}  // namespace detail

// Dovetailed evaluation of a machine process on a generalized point.
inline SemiDecider evaluate(const MachineProcess& mp, const GeneralizedPoint& x) {
  return SemiDecider([mp, x](Fuel fuel) { return detail::run_eval(mp, x, {}, fuel); });
}

// Evaluation with a permuted branch start order (finite processes only).
// Any permutation is a fair schedule; the halting answer at sufficient fuel
// does not depend on it.
inline SemiDecider evaluate_with_order(const MachineProcess& mp, const GeneralizedPoint& x,
                                       std::vector<std::uint32_t> order) {
  return SemiDecider([mp, x, order = std::move(order)](Fuel fuel) {
    return detail::run_eval(mp, x, order, fuel);
  });
}

// The runtime box test: feed the finite-support point and watch for a halt.
// Against p_F, a process compiled from a formal machine halts iff some branch
// of the source is contained in F.
inline SemiDecider test_box(const MachineProcess& mp, const GeneralizedPoint& f) {
  return evaluate(mp, f);
}

// Fuel sufficient for a box test: a process with k branches, evaluated on a
// point whose positive query answers all halt within `member_halt` budget
// (p_F answers within 1), halts within k + member_halt + 1 stages whenever it
// halts at all. Derivation: a witness branch at slot j <= k-1 starts at stage
// j and its queries all halt by stage j + member_halt, so at_step is at most
// (k - 1) + member_halt + 1.
constexpr Fuel sufficient_box_fuel(std::uint64_t branch_count, Fuel member_halt = 1) {
  return branch_count + member_halt + 1;
}

}  // namespace mspace
