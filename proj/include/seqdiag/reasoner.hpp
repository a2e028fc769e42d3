#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seqdiag/formula.hpp"
#include "seqdiag/kb.hpp"
#include "seqdiag/sat.hpp"

namespace seqdiag {

struct SentenceSet {
  std::vector<Formula> formulas;
  /// Axiom ids the formulas came from, when known.
  std::vector<std::string> provenance;
};

/// The solver ran out of its conflict budget before deciding.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by enumerate_entailments on an inconsistent input.
class InconsistentInputError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Per-call conflict budget shared by all reasoning entry points. Negative = unlimited.
void set_conflict_budget(std::int64_t budget);
std::int64_t conflict_budget();

bool is_consistent(const SentenceSet& s);
bool entails(const SentenceSet& s, const Formula& f);

/// Atoms of vocab entailed by s, plus implications a -> b between atoms where a is undecided
/// by s. With a background, sentences the background alone entails are dropped.
/// Output is sorted by rendering.
std::vector<Formula> enumerate_entailments(const SentenceSet& s, const std::set<std::string>& vocab,
                                           const SentenceSet* background = nullptr);

/// Tseitin translation into a solver. Each formula gets a literal equivalent to it.
class TseitinEncoder {
 public:
  explicit TseitinEncoder(sat::Solver& solver) : solver_(solver) {}

  sat::Lit literal(const Formula& f);
  /// Variable for an atom, created on first use.
  sat::Var atom(const std::string& name);
  std::optional<sat::Var> find_atom(const std::string& name) const;

 private:
  sat::Lit encode(const Formula& f);

  sat::Solver& solver_;
  std::unordered_map<std::string, sat::Var> atoms_;
  std::unordered_map<std::string, sat::Lit> roots_;
};

/// What a consistent sentence set entails over a vocabulary.
struct EntailmentProfile {
  bool consistent = true;
  std::set<std::string> positive;
  std::set<std::string> negative;
  /// (a, b) with a undecided and a -> b entailed.
  std::set<std::pair<std::string, std::string>> implications;

  bool entails_implication(const std::string& a, const std::string& b) const {
    return negative.count(a) || positive.count(b) || implications.count({a, b});
  }
  /// Sentences in canonical form, sorted by rendering.
  std::vector<Formula> sentences() const;
};

/// Axiom membership flags indexed like KnowledgeBase::axioms.
using AxiomMask = std::vector<bool>;

/// Incremental reasoner over one KB. Background formulas are permanent; every axiom is
/// guarded by a selector so any subset can be activated per call. Extra sentences (tests,
/// queries) are passed as assumptions on their definition literals. All calls serialize on
/// an internal mutex.
class KbReasoner {
 public:
  explicit KbReasoner(const KnowledgeBase& kb);

  std::size_t axiom_count() const { return selectors_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  bool consistent(const AxiomMask& active, std::span<const Formula> extra);
  bool entails(const AxiomMask& active, std::span<const Formula> extra, const Formula& goal);
  /// Entails every goal.
  bool entails_all(const AxiomMask& active, std::span<const Formula> extra,
                   std::span<const Formula> goals);
  /// Inconsistent, or entails some element of forbidden.
  bool violates(const AxiomMask& active, std::span<const Formula> extra,
                std::span<const Formula> forbidden);
  /// Memoized per (active axioms, extra sentences).
  EntailmentProfile profile(const AxiomMask& active, std::span<const Formula> extra);

  std::uint64_t solver_calls() const { return calls_; }

 private:
  std::vector<sat::Lit> assumptions(const AxiomMask& active, std::span<const Formula> extra);
  sat::Result solve(const std::vector<sat::Lit>& assumptions);
  EntailmentProfile compute_profile(const AxiomMask& active, std::span<const Formula> extra);
  bool model_atom(const std::string& name) const;

  std::mutex mutex_;
  sat::Solver solver_;
  TseitinEncoder encoder_;
  std::vector<sat::Lit> selectors_;
  std::vector<std::string> vocabulary_;
  std::vector<std::pair<std::string, sat::Var>> atom_vars_;
  std::map<std::string, EntailmentProfile> profiles_;
  std::uint64_t calls_ = 0;
};

}  // namespace seqdiag
