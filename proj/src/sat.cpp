#include "seqdiag/sat.hpp"

#include <algorithm>

namespace seqdiag::sat {

namespace {

// Luby sequence (1,1,2,1,1,2,4,...) scaled for restarts.
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

Solver::Solver() = default;
Solver::~Solver() = default;

Var Solver::new_var() {
  const Var v = num_vars();
  values_.push_back(kUndef);
  levels_.push_back(0);
  reasons_.push_back(nullptr);
  polarity_.push_back(true);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_index_.push_back(-1);
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::vector<Lit> lits) {
  if (!ok_) return false;
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> kept;
  kept.reserve(lits.size());
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const Lit p = lits[i];
    if (i + 1 < lits.size() && lits[i + 1] == ~p) return true;  // tautology
    if (!kept.empty() && kept.back() == p) continue;
    const auto v = value(p);
    if (v == kTrue && levels_[p.var()] == 0) return true;
    if (v == kFalse && levels_[p.var()] == 0) continue;
    kept.push_back(p);
  }
  if (kept.empty()) return ok_ = false;
  if (kept.size() == 1) {
    enqueue(kept[0], nullptr);
    return ok_ = (propagate() == nullptr);
  }
  clauses_.push_back(std::make_unique<Clause>(Clause{std::move(kept), false, false}));
  attach(clauses_.back().get());
  return true;
}

void Solver::attach(Clause* c) {
  watches_[c->lits[0].code].push_back(c);
  watches_[c->lits[1].code].push_back(c);
}

void Solver::enqueue(Lit p, Clause* reason) {
  values_[p.var()] = p.negative() ? kFalse : kTrue;
  levels_[p.var()] = decision_level();
  reasons_[p.var()] = reason;
  trail_.push_back(p);
}

Solver::Clause* Solver::propagate() {
  Clause* conflict = nullptr;
  while (qhead_ < trail_.size()) {
    const Lit false_lit = ~trail_[qhead_++];
    auto& ws = watches_[false_lit.code];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      Clause* c = ws[i++];
      if (c->deleted) continue;
      auto& lits = c->lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      if (value(lits[0]) == kTrue) {
        ws[j++] = c;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != kFalse) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1].code].push_back(c);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = c;
      if (value(lits[0]) == kFalse) {
        conflict = c;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(lits[0], c);
      }
    }
    ws.resize(j);
    if (conflict) break;
  }
  return conflict;
}

void Solver::analyze(Clause* conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.push_back(Lit{});
  int path = 0;
  Lit p{};
  bool first = true;
  std::size_t index = trail_.size();
  std::vector<Var> touched;
  do {
    const auto& lits = conflict->lits;
    for (std::size_t k = first ? 0 : 1; k < lits.size(); ++k) {
      const Lit q = lits[k];
      const Var v = q.var();
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = 1;
      touched.push_back(v);
      bump(v);
      if (levels_[v] >= decision_level())
        ++path;
      else
        learnt.push_back(q);
    }
    first = false;
    while (!seen_[trail_[--index].var()]) {
    }
    p = trail_[index];
    conflict = reasons_[p.var()];
    seen_[p.var()] = 0;
    --path;
  } while (path > 0);
  learnt[0] = ~p;

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (levels_[learnt[k].var()] > levels_[learnt[max_i].var()]) max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = levels_[learnt[1].var()];
  }
  for (Var v : touched) seen_[v] = 0;
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  for (std::size_t c = trail_.size(); c-- > static_cast<std::size_t>(trail_lim_[level]);) {
    const Var x = trail_[c].var();
    polarity_[x] = trail_[c].negative();
    values_[x] = kUndef;
    reasons_[x] = nullptr;
    if (!heap_contains(x)) heap_insert(x);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    const Var v = heap_pop();
    if (values_[v] == kUndef) return Lit::make(v, polarity_[v]);
  }
  return Lit{};
}

void Solver::bump(Var v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v)) heap_up(heap_index_[v]);
}

void Solver::reduce_learnts() {
  // Drop the older half of long learnt clauses that are not currently reasons.
  std::size_t to_remove = num_learnts_ / 2;
  for (auto& c : clauses_) {
    if (to_remove == 0) break;
    if (!c->learnt || c->deleted || c->lits.size() <= 2) continue;
    const Lit first = c->lits[0];
    if (reasons_[first.var()] == c.get() && value(first) == kTrue) continue;
    c->deleted = true;
    --to_remove;
    --num_learnts_;
  }
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(), [](Clause* c) { return c->deleted; }), ws.end());
  clauses_.erase(std::remove_if(clauses_.begin(), clauses_.end(),
                                [](const std::unique_ptr<Clause>& c) { return c->deleted; }),
                 clauses_.end());
}

Result Solver::solve(std::span<const Lit> assumptions, std::int64_t conflict_budget) {
  if (!ok_) return Result::Unsat;
  std::int64_t conflicts = 0;
  int restarts = 0;
  double restart_limit = luby(2, restarts) * 100;
  std::int64_t since_restart = 0;
  std::vector<Lit> learnt;
  while (true) {
    Clause* conflict = propagate();
    if (conflict) {
      ++conflicts;
      ++since_restart;
      ++total_conflicts_;
      if (decision_level() == 0) {
        ok_ = false;
        return Result::Unsat;
      }
      int bt = 0;
      analyze(conflict, learnt, bt);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], nullptr);
      } else {
        clauses_.push_back(std::make_unique<Clause>(Clause{learnt, true, false}));
        Clause* c = clauses_.back().get();
        attach(c);
        enqueue(learnt[0], c);
        ++num_learnts_;
      }
      decay();
      if (conflict_budget >= 0 && conflicts >= conflict_budget) {
        cancel_until(0);
        return Result::Unknown;
      }
      continue;
    }
    if (since_restart >= restart_limit) {
      since_restart = 0;
      restart_limit = luby(2, ++restarts) * 100;
      cancel_until(0);
      continue;
    }
    if (num_learnts_ > max_learnts_) {
      reduce_learnts();
      max_learnts_ += max_learnts_ / 10;
    }
    Lit next{};
    while (decision_level() < static_cast<int>(assumptions.size())) {
      const Lit p = assumptions[decision_level()];
      const auto v = value(p);
      if (v == kTrue) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (v == kFalse) {
        cancel_until(0);
        return Result::Unsat;
      } else {
        next = p;
        break;
      }
    }
    if (next.code < 0) {
      next = pick_branch();
      if (next.code < 0) {
        model_.assign(values_.size(), false);
        for (std::size_t v = 0; v < values_.size(); ++v) model_[v] = values_[v] == kTrue;
        cancel_until(0);
        return Result::Sat;
      }
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, nullptr);
  }
}

std::optional<std::vector<Lit>> Solver::propagate_assumptions(std::span<const Lit> assumptions) {
  if (!ok_ || propagate() != nullptr) {
    ok_ = false;
    return std::nullopt;
  }
  for (const Lit p : assumptions) {
    const auto v = value(p);
    if (v == kTrue) continue;
    if (v == kFalse) {
      cancel_until(0);
      return std::nullopt;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(p, nullptr);
    if (propagate() != nullptr) {
      cancel_until(0);
      return std::nullopt;
    }
  }
  std::vector<Lit> out = trail_;
  cancel_until(0);
  return out;
}

void Solver::heap_insert(Var v) {
  heap_index_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_index_[v]);
}

void Solver::heap_up(int i) {
  const Var v = heap_[i];
  while (i > 0) {
    const int parent = (i - 1) >> 1;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

void Solver::heap_down(int i) {
  const Var v = heap_[i];
  const int n = static_cast<int>(heap_.size());
  while (true) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_index_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

Var Solver::heap_pop() {
  const Var top = heap_.front();
  heap_index_[top] = -1;
  const Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[last] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace seqdiag::sat
