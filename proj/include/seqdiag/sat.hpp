#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace seqdiag::sat {

using Var = int;

struct Lit {
  int code = -2;

  static Lit make(Var v, bool negative = false) { return Lit{2 * v + (negative ? 1 : 0)}; }
  Var var() const { return code >> 1; }
  bool negative() const { return code & 1; }
  Lit operator~() const { return Lit{code ^ 1}; }
  friend bool operator==(Lit, Lit) = default;
  friend auto operator<=>(Lit, Lit) = default;
};

enum class Result { Sat, Unsat, Unknown };

/// Conflict-driven DPLL with two watched literals, first-UIP learning, activity-based
/// branching and phase saving. Incremental: clauses persist across solve() calls and
/// per-call assumptions select which guarded parts of the database are active.
class Solver {
 public:
  Solver();
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  Var new_var();
  int num_vars() const { return static_cast<int>(values_.size()); }

  /// Returns false once the database is unsatisfiable without assumptions.
  bool add_clause(std::vector<Lit> lits);
  bool okay() const { return ok_; }

  /// conflict_budget < 0 means unlimited; Unknown is returned when it runs out.
  Result solve(std::span<const Lit> assumptions, std::int64_t conflict_budget = -1);

  /// Value of v in the last model found by solve().
  bool model_value(Var v) const { return model_[v]; }

  /// Literals fixed by unit propagation under the assumptions, or nullopt if propagation
  /// alone refutes them. Sound but incomplete entailment.
  std::optional<std::vector<Lit>> propagate_assumptions(std::span<const Lit> assumptions);

  std::uint64_t total_conflicts() const { return total_conflicts_; }

 private:
  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
  };

  static constexpr std::uint8_t kFalse = 0, kTrue = 1, kUndef = 2;

  std::uint8_t value(Lit p) const {
    const std::uint8_t v = values_[p.var()];
    return v == kUndef ? kUndef : static_cast<std::uint8_t>(v ^ static_cast<std::uint8_t>(p.negative()));
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit p, Clause* reason);
  Clause* propagate();
  void analyze(Clause* conflict, std::vector<Lit>& learnt, int& backtrack_level);
  void cancel_until(int level);
  Lit pick_branch();
  void attach(Clause* c);
  void bump(Var v);
  void decay() { var_inc_ /= 0.95; }
  void reduce_learnts();

  // Binary max-heap over activity.
  void heap_insert(Var v);
  void heap_up(int i);
  void heap_down(int i);
  Var heap_pop();
  bool heap_contains(Var v) const { return v < static_cast<int>(heap_index_.size()) && heap_index_[v] >= 0; }

  bool ok_ = true;
  std::vector<std::unique_ptr<Clause>> clauses_;
  std::vector<std::vector<Clause*>> watches_;
  std::vector<std::uint8_t> values_;
  std::vector<int> levels_;
  std::vector<Clause*> reasons_;
  std::vector<bool> polarity_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<bool> model_;
  std::vector<Var> heap_;
  std::vector<int> heap_index_;
  double var_inc_ = 1.0;
  std::size_t num_learnts_ = 0;
  std::size_t max_learnts_ = 20000;
  std::uint64_t total_conflicts_ = 0;
};

}  // namespace seqdiag::sat
