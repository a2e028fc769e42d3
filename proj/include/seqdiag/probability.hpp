#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqdiag/kb.hpp"
#include "seqdiag/partition.hpp"
#include "seqdiag/problem.hpp"

namespace seqdiag {

/// Per-element error probabilities plus optional per-axiom overrides.
struct FaultProfile {
  std::map<std::string, double> element_probs;
  std::map<std::string, double> axiom_overrides;

  /// Throws std::invalid_argument unless every value is in (0,1).
  void validate() const;
  friend bool operator==(const FaultProfile&, const FaultProfile&) = default;
};

class MissingElementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Belief over a list of diagnoses; index-aligned with that list.
using Belief = std::vector<double>;

class ZeroBeliefError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An answer whose probability under the current belief is zero.
class ContradictoryAnswerError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double axiom_fault_probability(const Axiom& ax, const FaultProfile& profile);
std::vector<double> axiom_probabilities(const KnowledgeBase& kb, const FaultProfile& profile);
/// Axioms with p >= 0.5, which weaken the leading-diagnosis ordering guarantee.
std::vector<std::string> high_probability_axioms(const KnowledgeBase& kb, const std::vector<double>& probs);

/// prod_{d} p(ax) * prod_{O \ d} (1 - p(ax)).
double diagnosis_prior(const AxiomSet& d, const std::vector<double>& axiom_probs);

Belief normalize(Belief b);

std::pair<double, double> answer_probabilities(const Partition& part, const Belief& belief);
Belief bayes_update(const Belief& belief, const Partition& part, Answer answer);

struct Strategy {
  enum class Kind { Entropy, Split, Random };
  Kind kind = Kind::Entropy;
  std::uint64_t seed = 0;

  static Strategy parse(const std::string& name, std::uint64_t seed = 0);
  std::string name() const;
};

double entropy_score(const Partition& part, const Belief& belief);
double split_score(const Partition& part);
double random_score(const Partition& part, std::uint64_t seed);
/// In [0,1]; the empty partition scores 1 under every strategy.
double score(const Partition& part, const Belief& belief, const Strategy& strategy);

/// Stable 64-bit mixing, used wherever a reproducible hash is needed.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(const std::string& s, std::uint64_t seed = 0);

}  // namespace seqdiag
