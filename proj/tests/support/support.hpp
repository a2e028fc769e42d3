#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "seqdiag/fixture.hpp"
#include "seqdiag/kb.hpp"
#include "seqdiag/problem.hpp"

namespace testsupport {

using namespace seqdiag;

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string data_path(const std::string& name);
KnowledgeBase load_data_kb(const std::string& name);

/// Truth-table semantics, independent of the SAT path.
bool tt_consistent(const std::vector<Formula>& fs);
bool tt_entails(const std::vector<Formula>& fs, const Formula& goal);

/// O \ D, B and P consistent and no element of N entailed, decided by truth tables.
bool tt_is_diagnosis(const KnowledgeBase& kb, const AxiomSet& d, const std::vector<Formula>& p,
                     const std::vector<Formula>& n);
/// Every subset-minimal diagnosis, by subset enumeration over truth tables.
std::vector<AxiomSet> tt_minimal_diagnoses(const KnowledgeBase& kb, const std::vector<Formula>& p,
                                           const std::vector<Formula>& n);
/// Every subset-minimal conflict, by subset enumeration over truth tables.
std::vector<AxiomSet> tt_minimal_conflicts(const KnowledgeBase& kb);

struct RandomKbSpec {
  std::size_t atoms = 5;
  std::size_t min_axioms = 4;
  std::size_t max_axioms = 12;
  std::size_t background_literals = 2;
};

/// Random implications and clauses over few atoms with a consistent literal background.
KnowledgeBase random_kb(std::mt19937_64& rng, const RandomKbSpec& spec = {});
Formula random_formula(std::mt19937_64& rng, const std::vector<std::string>& atoms, int depth);

/// ex2 with the seven hand-transcribed queries and their sides for D1..D4.
struct Ex2Fixture {
  std::vector<std::string> ids;
  std::vector<AxiomSet> diagnoses;  // D1..D4
  std::vector<double> priors;       // from the KB's element annotations and profile
  std::vector<FixtureRow> rows;     // Q1..Q7
};
Ex2Fixture ex2_fixture();
std::unique_ptr<FixtureDiagnosisSource> ex2_source(const Ex2Fixture& f);

}  // namespace testsupport
