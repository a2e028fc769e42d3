#include "seqdiag/diagnosis.hpp"

#include <algorithm>
#include <climits>
#include <bit>
#include <cmath>
#include <cstdint>
#include <queue>
#include <set>

#include "seqdiag/conflict.hpp"
#include "seqdiag/probability.hpp"

namespace seqdiag {

bool is_diagnosis(const AxiomSet& candidate, const DiagnosisProblem& problem) {
  for (auto i : candidate)
    if (i >= problem.size()) throw UnknownAxiomError("axiom index out of range");
  return !problem.reasoner().violates(problem.mask_without(candidate), problem.p_tests,
                                      problem.n_tests);
}

bool is_diagnosis(const std::vector<std::string>& ids, const DiagnosisProblem& problem) {
  return is_diagnosis(problem.resolve(ids), problem);
}

namespace {

struct Node {
  double cost;
  AxiomSet path;
};

struct Later {
  bool operator()(const Node& a, const Node& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.path.size() != b.path.size()) return a.path.size() > b.path.size();
    return a.path > b.path;
  }
};

std::vector<std::string> sentence_keys(const std::vector<Formula>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(to_string(f));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool includes_keys(const std::vector<std::string>& big, const std::vector<std::string>& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

std::vector<Diagnosis> leading_diagnoses(const DiagnosisProblem& problem,
                                         const std::vector<double>& axiom_probs, std::size_t n,
                                         HsTreeStats* stats) {
  if (n == 0) throw std::invalid_argument("n must be at least 1");
  if (axiom_probs.size() != problem.size())
    throw std::invalid_argument("one probability per axiom expected");
  HsTreeStats local;
  HsTreeStats& st = stats ? *stats : local;
  st = HsTreeStats{};

  for (const auto& id : high_probability_axioms(problem.kb(), axiom_probs))
    st.warnings.push_back("axiom " + id + " has fault probability >= 0.5; ordering may not be exact");

  auto& reasoner = problem.reasoner();
  if (reasoner.violates(problem.mask_of({}), problem.p_tests, problem.n_tests))
    throw NoDiagnosisError("background and P are inconsistent or entail an element of N");

  std::vector<double> edge(problem.size());
  for (std::size_t i = 0; i < edge.size(); ++i) {
    const double p = std::clamp(axiom_probs[i], 1e-12, 1.0 - 1e-12);
    edge[i] = -std::log(p / (1.0 - p));
  }

  const auto p_keys = sentence_keys(problem.p_tests);
  const auto n_keys = sentence_keys(problem.n_tests);
  std::vector<AxiomSet> known;
  for (const auto& c : problem.conflict_cache().snapshot())
    if (includes_keys(p_keys, c.p_keys) && includes_keys(n_keys, c.n_keys) &&
        std::find(known.begin(), known.end(), c.axioms) == known.end())
      known.push_back(c.axioms);

  auto is_diag = [&](const AxiomSet& h) {
    return !reasoner.violates(problem.mask_without(h), problem.p_tests, problem.n_tests);
  };

  std::priority_queue<Node, std::vector<Node>, Later> open;
  std::set<AxiomSet> seen;
  open.push({0.0, {}});
  seen.insert({});
  std::vector<AxiomSet> found;

  while (!open.empty() && found.size() < n) {
    Node node = open.top();
    open.pop();
    if (std::any_of(found.begin(), found.end(),
                    [&](const AxiomSet& d) { return is_subset(d, node.path); }))
      continue;
    ++st.nodes_expanded;

    const AxiomSet* label = nullptr;
    for (const auto& c : known)
      if (disjoint(c, node.path)) {
        label = &c;
        ++st.conflicts_reused;
        break;
      }
    if (!label) {
      if (is_diag(node.path)) {
        bool minimal = true;
        for (std::size_t k = 0; k < node.path.size() && minimal; ++k) {
          AxiomSet smaller = node.path;
          smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(k));
          if (is_diag(smaller)) minimal = false;
        }
        if (minimal) found.push_back(node.path);
        continue;
      }
      AxiomSet rest;
      for (std::size_t i = 0; i < problem.size(); ++i)
        if (!std::binary_search(node.path.begin(), node.path.end(), i)) rest.push_back(i);
      auto cs = find_conflict(rest, problem);
      if (!cs) throw std::logic_error("violation without a conflict");
      ++st.conflicts_computed;
      problem.conflict_cache().add({*cs, p_keys, n_keys});
      known.push_back(*cs);
      label = &known.back();
    }
    if (std::find(st.conflicts.begin(), st.conflicts.end(), *label) == st.conflicts.end())
      st.conflicts.push_back(*label);
    const AxiomSet lab = *label;
    for (auto i : lab) {
      AxiomSet child = node.path;
      child.insert(std::upper_bound(child.begin(), child.end(), i), i);
      if (!seen.insert(child).second) continue;
      double cost = 0.0;
      for (auto j : child) cost += edge[j];
      open.push({cost, std::move(child)});
    }
  }

  std::vector<Diagnosis> out;
  double total = 0.0;
  for (auto& d : found) {
    Diagnosis dg;
    dg.prior = diagnosis_prior(d, axiom_probs);
    dg.axioms = std::move(d);
    total += dg.prior;
    out.push_back(std::move(dg));
  }
  // Priors equal up to rounding keep the search order (size, then lexicographic).
  auto key = [](double prior) { return prior > 0 ? std::llround(std::log(prior) * 1e9) : LLONG_MIN; };
  std::stable_sort(out.begin(), out.end(),
                   [&](const Diagnosis& a, const Diagnosis& b) { return key(a.prior) > key(b.prior); });
  for (auto& d : out) d.probability = total > 0 ? d.prior / total : 1.0 / static_cast<double>(out.size());
  return out;
}

std::vector<Diagnosis> leading_diagnoses(const DiagnosisProblem& problem,
                                         const std::map<std::string, double>& axiom_probs,
                                         std::size_t n, HsTreeStats* stats) {
  std::vector<double> probs;
  for (const auto& ax : problem.kb().axioms) {
    auto it = axiom_probs.find(ax.id);
    if (it == axiom_probs.end()) throw UnknownAxiomError("no probability for axiom " + ax.id);
    probs.push_back(it->second);
  }
  return leading_diagnoses(problem, probs, n, stats);
}

std::vector<AxiomSet> brute_force_minimal_diagnoses(const DiagnosisProblem& problem) {
  const std::size_t n = problem.size();
  if (n > 20) throw std::length_error("brute force limited to 20 axioms");
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  std::vector<std::uint32_t> found_masks;
  std::vector<AxiomSet> found;
  for (auto m : masks) {
    if (std::any_of(found_masks.begin(), found_masks.end(), [&](std::uint32_t f) { return (f & m) == f; }))
      continue;
    AxiomSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (m & (1u << i)) s.push_back(i);
    if (is_diagnosis(s, problem)) {
      found.push_back(s);
      found_masks.push_back(m);
    }
  }
  return found;
}

}  // namespace seqdiag
