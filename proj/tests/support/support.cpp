#include "support.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "seqdiag/json_io.hpp"
#include "seqdiag/probability.hpp"

namespace testsupport {

std::string data_path(const std::string& name) { return std::string(SEQDIAG_DATA_DIR) + "/" + name; }

KnowledgeBase load_data_kb(const std::string& name) { return load_kb_file(data_path(name)); }

namespace {

template <class F>
bool any_model(const std::vector<Formula>& fs, F&& extra) {
  std::set<std::string> atoms = atoms_of(fs);
  std::vector<std::string> names(atoms.begin(), atoms.end());
  if (names.size() > 22) throw std::length_error("truth table too large");
  const std::uint64_t total = std::uint64_t{1} << names.size();
  std::map<std::string, bool> v;
  for (std::uint64_t m = 0; m < total; ++m) {
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = (m >> i) & 1;
    auto val = [&](const std::string& a) { return v.count(a) ? v.at(a) : false; };
    if (std::all_of(fs.begin(), fs.end(), [&](const Formula& f) { return evaluate(f, val); }) && extra(val))
      return true;
  }
  return false;
}

std::vector<Formula> kept(const KnowledgeBase& kb, const AxiomSet& removed) {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < kb.axioms.size(); ++i)
    if (!std::binary_search(removed.begin(), removed.end(), i))
      out.insert(out.end(), kb.axioms[i].formulas.begin(), kb.axioms[i].formulas.end());
  return out;
}

AxiomSet from_mask(std::uint32_t m, std::size_t n) {
  AxiomSet s;
  for (std::size_t i = 0; i < n; ++i)
    if (m & (1u << i)) s.push_back(i);
  return s;
}

}  // namespace

bool tt_consistent(const std::vector<Formula>& fs) {
  return any_model(fs, [](auto&&) { return true; });
}

bool tt_entails(const std::vector<Formula>& fs, const Formula& goal) {
  std::vector<Formula> all = fs;
  all.push_back(goal);  // brings the goal's atoms into the table
  std::vector<Formula> base = fs;
  std::set<std::string> atoms = atoms_of(all);
  // Enumerate over the union vocabulary by adding tautologies for the goal's atoms.
  for (const auto& a : atoms) base.push_back(Formula::disjunction({Formula::atom(a), Formula::negation(Formula::atom(a))}));
  return !any_model(base, [&](auto&& val) { return !evaluate(goal, val); });
}

bool tt_is_diagnosis(const KnowledgeBase& kb, const AxiomSet& d, const std::vector<Formula>& p,
                     const std::vector<Formula>& n) {
  std::vector<Formula> fs = kept(kb, d);
  fs.insert(fs.end(), kb.background.begin(), kb.background.end());
  fs.insert(fs.end(), p.begin(), p.end());
  if (!tt_consistent(fs)) return false;
  return std::none_of(n.begin(), n.end(), [&](const Formula& f) { return tt_entails(fs, f); });
}

std::vector<AxiomSet> tt_minimal_diagnoses(const KnowledgeBase& kb, const std::vector<Formula>& p,
                                           const std::vector<Formula>& n) {
  const std::size_t k = kb.axioms.size();
  std::vector<std::uint32_t> masks(std::size_t{1} << k);
  for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(), [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
  std::vector<std::uint32_t> found;
  std::vector<AxiomSet> out;
  for (auto m : masks) {
    if (std::any_of(found.begin(), found.end(), [&](auto f) { return (f & m) == f; })) continue;
    if (tt_is_diagnosis(kb, from_mask(m, k), p, n)) {
      found.push_back(m);
      out.push_back(from_mask(m, k));
    }
  }
  return out;
}

std::vector<AxiomSet> tt_minimal_conflicts(const KnowledgeBase& kb) {
  const std::size_t k = kb.axioms.size();
  std::vector<std::uint32_t> masks(std::size_t{1} << k);
  for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(), [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
  std::vector<std::uint32_t> found;
  std::vector<AxiomSet> out;
  const std::uint32_t full = static_cast<std::uint32_t>((std::size_t{1} << k) - 1);
  for (auto m : masks) {
    if (std::any_of(found.begin(), found.end(), [&](auto f) { return (f & m) == f; })) continue;
    // m is a conflict iff removing everything else leaves a non-diagnosis.
    if (!tt_is_diagnosis(kb, from_mask(full & ~m, k), kb.p_tests, kb.n_tests)) {
      found.push_back(m);
      out.push_back(from_mask(m, k));
    }
  }
  return out;
}

Formula random_formula(std::mt19937_64& rng, const std::vector<std::string>& atoms, int depth) {
  auto lit = [&] {
    Formula a = Formula::atom(atoms[rng() % atoms.size()]);
    return rng() % 3 == 0 ? Formula::negation(a) : a;
  };
  if (depth <= 0) return lit();
  switch (rng() % 5) {
    case 0: return Formula::conjunction({random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1)});
    case 1: return Formula::disjunction({random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1)});
    case 2: return Formula::negation(random_formula(rng, atoms, depth - 1));
    default: return Formula::implication(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1));
  }
}

KnowledgeBase random_kb(std::mt19937_64& rng, const RandomKbSpec& spec) {
  std::vector<std::string> atoms;
  for (std::size_t i = 0; i < spec.atoms; ++i) atoms.push_back("p" + std::to_string(i));
  KnowledgeBase kb;
  std::vector<std::size_t> order(atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  for (std::size_t i = 0; i < std::min(spec.background_literals, atoms.size()); ++i) {
    Formula a = Formula::atom(atoms[order[i]]);
    kb.background.push_back(rng() % 2 ? a : Formula::negation(a));
  }
  const std::size_t n = spec.min_axioms + rng() % (spec.max_axioms - spec.min_axioms + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Axiom ax;
    ax.id = "ax" + std::to_string(i + 1);
    // Mostly short implications between literals, as in the examples.
    Formula f = rng() % 4 == 0 ? random_formula(rng, atoms, 2)
                               : Formula::implication(random_formula(rng, atoms, 0), random_formula(rng, atoms, rng() % 2));
    ax.formulas.push_back(f);
    ax.elements = extract_elements(ax.formulas);
    kb.axioms.push_back(std::move(ax));
  }
  return kb;
}

Ex2Fixture ex2_fixture() {
  Ex2Fixture f;
  const KnowledgeBase kb = load_data_kb("ex2.kb");
  for (const auto& ax : kb.axioms) f.ids.push_back(ax.id);
  f.diagnoses = {{0}, {2}, {3, 4}, {1, 3}};
  const auto probs = axiom_probabilities(kb, load_profile_file(data_path("ex2.json")));
  for (const auto& d : f.diagnoses) f.priors.push_back(diagnosis_prior(d, probs));
  auto q = [](std::initializer_list<const char*> texts) {
    std::vector<Formula> out;
    for (auto t : texts) out.push_back(parse_formula(t));
    return out;
  };
  auto sides = [](const std::string& s) {
    std::vector<Side> out;
    for (char c : s) out.push_back(c == '+' ? Side::Plus : c == '-' ? Side::Minus : Side::Zero);
    return out;
  };
  f.rows = {{"Q1", q({"B_w -> M3_w"}), sides("++-+")},    {"Q2", q({"B_w"}), sides("0-++")},
            {"Q3", q({"M1_w -> B_w"}), sides("+-++")},    {"Q4", q({"M1_w", "M2_u"}), sides("-+++")},
            {"Q5", q({"A_w"}), sides("0+--")},            {"Q6", q({"M2_w -> D_w"}), sides("++00")},
            {"Q7", q({"M3_u"}), sides("000+")}};
  return f;
}

std::unique_ptr<FixtureDiagnosisSource> ex2_source(const Ex2Fixture& f) {
  return std::make_unique<FixtureDiagnosisSource>(f.ids, f.diagnoses, f.priors, f.rows);
}

}  // namespace testsupport
