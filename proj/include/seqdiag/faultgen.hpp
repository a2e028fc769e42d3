#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdiag/kb.hpp"
#include "seqdiag/probability.hpp"
#include "seqdiag/problem.hpp"

namespace seqdiag {

enum class PatternKind { QuantifierSwap, NegatedExists, AndOrSwap, Disjointness, MisplacedNegation };

struct FaultPattern {
  std::string name;
  PatternKind kind;
  double probability;
};

/// The five default patterns, weighted 0.025 / 0.025 / 0.01 / 0.01 / 0.001.
std::vector<FaultPattern> default_patterns();
PatternKind parse_pattern_kind(const std::string& s);
const char* to_string(PatternKind k);

struct GeneratorSpec {
  std::size_t m = 1;
  std::size_t target_cardinality = 1;
  std::vector<FaultPattern> patterns = default_patterns();
  std::uint64_t seed = 1;
  /// Restarts allowed before giving up.
  std::size_t max_attempts = 200;

  void validate() const;
};

/// Shape of a synthetic taxonomy KB: per module a root fact and a tree of implications.
struct TaxonomySpec {
  std::size_t modules = 3;
  std::size_t axioms_per_module = 10;
  std::size_t max_children = 2;
  /// Share of axioms carrying an exists/forall tag.
  double tagged_share = 0.4;
  std::uint64_t seed = 1;
};

KnowledgeBase generate_taxonomy(const TaxonomySpec& spec);

struct InjectionResult {
  KnowledgeBase faulty;
  AxiomSet target;
  /// Original versions of the target's axioms that were altered (others are deleted).
  std::vector<Axiom> repair;
  /// Minimum-cardinality diagnoses found for the injected KB.
  std::vector<AxiomSet> min_cardinality_diagnoses;
  std::size_t injections = 0;
  std::size_t attempts = 0;
};

class GeneratorBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

InjectionResult inject_faults(const KnowledgeBase& kb, const GeneratorSpec& spec);

/// (O \ target) plus B, then originals of altered target axioms added back while the KB
/// stays consistent. The answer source for a simulated user.
KnowledgeBase target_kb(const KnowledgeBase& faulty, const AxiomSet& target, const std::vector<Axiom>& repair);

enum class PriorKind { Extreme, Moderate, Uniform };
PriorKind parse_prior_kind(const std::string& s);
const char* to_string(PriorKind k);

struct PriorDistribution {
  PriorKind kind = PriorKind::Uniform;
  double lambda = 0.0;
  static PriorDistribution extreme() { return {PriorKind::Extreme, 1.75}; }
  static PriorDistribution moderate() { return {PriorKind::Moderate, 0.5}; }
  static PriorDistribution uniform() { return {PriorKind::Uniform, 0.0}; }
  static PriorDistribution of(PriorKind k);
};

FaultProfile sample_profile(const PriorDistribution& dist, const std::set<std::string>& elements,
                            std::uint64_t seed, double uniform_p = 0.01);

/// Element names occurring in the KB's axioms.
std::set<std::string> element_names(const KnowledgeBase& kb);

struct CaseSplit {
  std::vector<std::size_t> good, average, bad;
};

/// Input probabilities sorted non-increasing; output holds positions into that list.
CaseSplit classify_cases(const std::vector<double>& probs);

}  // namespace seqdiag
