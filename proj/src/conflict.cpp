#include "seqdiag/conflict.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace seqdiag {

bool check_conflict(const AxiomSet& axioms, const DiagnosisProblem& problem) {
  for (auto i : axioms)
    if (i >= problem.size()) throw UnknownAxiomError("axiom index out of range");
  return problem.reasoner().violates(problem.mask_of(axioms), problem.p_tests, problem.n_tests);
}

bool check_conflict(const std::vector<std::string>& ids, const DiagnosisProblem& problem) {
  return check_conflict(problem.resolve(ids), problem);
}

std::optional<AxiomSet> find_conflict(const AxiomSet& candidates, const DiagnosisProblem& problem) {
  auto holds = [&](const std::vector<std::size_t>& s) {
    return problem.reasoner().violates(problem.mask_of(s), problem.p_tests, problem.n_tests);
  };
  auto found = quickxplain(candidates, holds);
  if (!found) return std::nullopt;
  return normalized(std::move(*found));
}

std::vector<AxiomSet> brute_force_minimal_conflicts(const DiagnosisProblem& problem) {
  const std::size_t n = problem.size();
  if (n > 20) throw std::length_error("brute force limited to 20 axioms");
  std::vector<AxiomSet> found;
  // Increasing cardinality, so any superset of a found conflict is skipped.
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  std::vector<std::uint32_t> found_masks;
  for (auto m : masks) {
    bool covered = false;
    for (auto f : found_masks)
      if ((f & m) == f) {
        covered = true;
        break;
      }
    if (covered) continue;
    AxiomSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (m & (1u << i)) s.push_back(i);
    if (check_conflict(s, problem)) {
      found.push_back(s);
      found_masks.push_back(m);
    }
  }
  return found;
}

}  // namespace seqdiag
