#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdiag/kb.hpp"
#include "seqdiag/reasoner.hpp"

namespace seqdiag {

/// Sorted, duplicate-free axiom indices.
using AxiomSet = std::vector<std::size_t>;

class UnknownAxiomError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A conflict remembered together with the tests it was derived under.
struct CachedConflict {
  AxiomSet axioms;
  std::vector<std::string> p_keys;
  std::vector<std::string> n_keys;
};

/// Minimal conflicts shared by every problem over the same KB. A conflict found under
/// tests (P, N) is still a conflict under any P' >= P, N' >= N.
class ConflictCache {
 public:
  void add(CachedConflict c);
  std::vector<CachedConflict> snapshot() const;

 private:
  mutable std::mutex mutex_;
  std::vector<CachedConflict> entries_;
};

/// <O, B, P, N>. The KB and its reasoner are shared between copies; P and N are values.
class DiagnosisProblem {
 public:
  explicit DiagnosisProblem(KnowledgeBase kb);

  const KnowledgeBase& kb() const { return *kb_; }
  KbReasoner& reasoner() const { return *reasoner_; }
  ConflictCache& conflict_cache() const { return *cache_; }
  std::size_t size() const { return kb_->axioms.size(); }

  std::vector<Formula> p_tests;
  std::vector<Formula> n_tests;

  /// Mask with exactly the given axioms active.
  AxiomMask mask_of(const AxiomSet& s) const;
  /// Mask of O minus the given axioms.
  AxiomMask mask_without(const AxiomSet& removed) const;

  AxiomSet resolve(const std::vector<std::string>& ids) const;
  std::vector<std::string> ids(const AxiomSet& s) const;
  std::string label(const AxiomSet& s) const;

  /// Copy sharing the KB, reasoner and cache but with other tests.
  DiagnosisProblem with_tests(std::vector<Formula> p, std::vector<Formula> n) const;

 private:
  std::shared_ptr<const KnowledgeBase> kb_;
  std::shared_ptr<KbReasoner> reasoner_;
  std::shared_ptr<ConflictCache> cache_;
};

AxiomSet normalized(AxiomSet s);
bool is_subset(const AxiomSet& a, const AxiomSet& b);
bool disjoint(const AxiomSet& a, const AxiomSet& b);

}  // namespace seqdiag
