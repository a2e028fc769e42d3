#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdiag/problem.hpp"

namespace seqdiag {

struct Diagnosis {
  AxiomSet axioms;
  /// Unnormalized prior from the axiom fault probabilities.
  double prior = 0.0;
  /// Normalized over the list it was returned in.
  double probability = 0.0;
};

/// B together with P already violates the tests; nothing can be repaired.
class NoDiagnosisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_diagnosis(const AxiomSet& candidate, const DiagnosisProblem& problem);
bool is_diagnosis(const std::vector<std::string>& ids, const DiagnosisProblem& problem);

struct HsTreeStats {
  std::size_t nodes_expanded = 0;
  std::size_t conflicts_computed = 0;
  std::size_t conflicts_reused = 0;
  /// Conflicts used as node labels during this search.
  std::vector<AxiomSet> conflicts;
  std::vector<std::string> warnings;
};

/// Up to n most probable minimal diagnoses, most probable first. Uniform-cost HS-Tree over
/// -log(p/(1-p)) path costs with lazily computed, cached conflicts.
std::vector<Diagnosis> leading_diagnoses(const DiagnosisProblem& problem,
                                         const std::vector<double>& axiom_probs, std::size_t n,
                                         HsTreeStats* stats = nullptr);
std::vector<Diagnosis> leading_diagnoses(const DiagnosisProblem& problem,
                                         const std::map<std::string, double>& axiom_probs,
                                         std::size_t n, HsTreeStats* stats = nullptr);

/// Every subset-minimal diagnosis by enumeration; |O| <= 20.
std::vector<AxiomSet> brute_force_minimal_diagnoses(const DiagnosisProblem& problem);

}  // namespace seqdiag
