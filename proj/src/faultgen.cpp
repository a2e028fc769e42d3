#include "seqdiag/faultgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "seqdiag/diagnosis.hpp"
#include "seqdiag/reasoner.hpp"

namespace seqdiag {

namespace {

// Portable draws; the std distributions differ between standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

std::vector<std::pair<std::string, int>> ordered(const ElementCounts& c) { return {c.begin(), c.end()}; }

/// Annotation entries beyond what the formulas themselves contribute.
ElementCounts extra_tags(const Axiom& ax) {
  ElementCounts tags;
  const ElementCounts derived = extract_elements(ax.formulas);
  for (const auto& [name, n] : ax.annotation) {
    auto it = derived.find(name);
    const int base = it == derived.end() ? 0 : it->second;
    if (n > base) tags[name] = n - base;
  }
  return tags;
}

void set_formulas(Axiom& ax, std::vector<Formula> formulas, const ElementCounts& tags) {
  ax.formulas = std::move(formulas);
  ElementCounts counts = extract_elements(ax.formulas);
  if (tags.empty()) {
    ax.annotation.clear();
    ax.elements = counts;
    return;
  }
  for (const auto& [name, n] : tags) counts[name] += n;
  ax.elements = counts;
  ax.annotation = ordered(counts);
}

/// Implication axioms p -> c1 & ... have a premise atom and consequent literals.
bool is_rule(const Axiom& ax) {
  return ax.formulas.size() == 1 && ax.formulas[0].kind() == Connective::Implies;
}

std::vector<Formula> consequent_parts(const Formula& rule) {
  const Formula& rhs = rule.children()[1];
  if (rhs.kind() == Connective::And) return rhs.children();
  return {rhs};
}

Formula with_conjunct(const Formula& rule, const Formula& extra) {
  auto parts = consequent_parts(rule);
  parts.push_back(extra);
  return Formula::implication(rule.children()[0], Formula::conjunction(std::move(parts)));
}

bool eligible(const Axiom& ax, PatternKind kind) {
  if (!is_rule(ax)) return false;
  const ElementCounts tags = extra_tags(ax);
  switch (kind) {
    case PatternKind::QuantifierSwap: return tags.count("exists") || tags.count("forall");
    case PatternKind::NegatedExists: return tags.count("exists") > 0;
    case PatternKind::AndOrSwap: {
      auto parts = consequent_parts(ax.formulas[0]);
      return parts.size() >= 2 && std::all_of(parts.begin(), parts.end(), [](const Formula& f) { return f.is_atom(); });
    }
    case PatternKind::Disjointness: return true;
    case PatternKind::MisplacedNegation: return consequent_parts(ax.formulas[0])[0].is_atom();
  }
  return false;
}

void apply_pattern(Axiom& ax, PatternKind kind) {
  ElementCounts tags = extra_tags(ax);
  Formula rule = ax.formulas[0];
  switch (kind) {
    case PatternKind::QuantifierSwap: {
      const int e = tags.count("exists") ? tags["exists"] : 0;
      const int a = tags.count("forall") ? tags["forall"] : 0;
      tags.erase("exists");
      tags.erase("forall");
      if (a) tags["exists"] = a;
      if (e) tags["forall"] = e;
      break;
    }
    case PatternKind::NegatedExists: tags["not"] += 1; break;
    case PatternKind::AndOrSwap:
      rule = Formula::implication(rule.children()[0], Formula::disjunction(consequent_parts(rule)));
      break;
    case PatternKind::Disjointness: break;
    case PatternKind::MisplacedNegation: {
      auto parts = consequent_parts(rule);
      parts[0] = Formula::negation(parts[0]);
      rule = Formula::implication(rule.children()[0], Formula::conjunction(std::move(parts)));
      break;
    }
  }
  set_formulas(ax, {rule}, tags);
}

std::string module_of(const std::string& id) {
  auto pos = id.find('_');
  return pos == std::string::npos ? id : id.substr(0, pos);
}

std::vector<double> uniform_probs(std::size_t n) { return std::vector<double>(n, 0.01); }

bool kb_consistent(const KnowledgeBase& kb) {
  SentenceSet s;
  for (const auto& ax : kb.axioms) s.formulas.insert(s.formulas.end(), ax.formulas.begin(), ax.formulas.end());
  s.formulas.insert(s.formulas.end(), kb.background.begin(), kb.background.end());
  s.formulas.insert(s.formulas.end(), kb.p_tests.begin(), kb.p_tests.end());
  return is_consistent(s);
}

}  // namespace

std::vector<FaultPattern> default_patterns() {
  return {{"quantifier_swap", PatternKind::QuantifierSwap, 0.025},
          {"negated_exists", PatternKind::NegatedExists, 0.025},
          {"and_or_swap", PatternKind::AndOrSwap, 0.01},
          {"disjointness", PatternKind::Disjointness, 0.01},
          {"misplaced_negation", PatternKind::MisplacedNegation, 0.001}};
}

PatternKind parse_pattern_kind(const std::string& s) {
  for (const auto& p : default_patterns())
    if (p.name == s) return p.kind;
  throw std::invalid_argument("unknown fault pattern '" + s + "'");
}

const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::QuantifierSwap: return "quantifier_swap";
    case PatternKind::NegatedExists: return "negated_exists";
    case PatternKind::AndOrSwap: return "and_or_swap";
    case PatternKind::Disjointness: return "disjointness";
    case PatternKind::MisplacedNegation: return "misplaced_negation";
  }
  return "?";
}

void GeneratorSpec::validate() const {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (target_cardinality < 1) throw std::invalid_argument("target cardinality must be at least 1");
  if (patterns.empty()) throw std::invalid_argument("at least one fault pattern is required");
  for (const auto& p : patterns)
    if (!(p.probability > 0.0)) throw std::invalid_argument("pattern weights must be positive");
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
}

KnowledgeBase generate_taxonomy(const TaxonomySpec& spec) {
  if (spec.modules < 1 || spec.axioms_per_module < 1 || spec.max_children < 1)
    throw std::invalid_argument("taxonomy needs at least one module, axiom and child");
  std::mt19937_64 rng(spec.seed);
  KnowledgeBase kb;
  for (std::size_t m = 0; m < spec.modules; ++m) {
    const std::string root = "S" + std::to_string(m);
    kb.background.push_back(Formula::atom(root));
    std::vector<std::string> frontier{root};
    std::size_t next_atom = 0;
    for (std::size_t j = 0; j < spec.axioms_per_module; ++j) {
      const std::size_t at = pick(rng, frontier.size());
      const std::string parent = frontier[at];
      frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(at));
      const std::size_t kids = 1 + pick(rng, spec.max_children);
      std::vector<Formula> parts;
      for (std::size_t c = 0; c < kids; ++c) {
        std::string name = "C" + std::to_string(m) + "x" + std::to_string(next_atom++);
        parts.push_back(Formula::atom(name));
        frontier.push_back(std::move(name));
      }
      Axiom ax;
      ax.id = "m" + std::to_string(m) + "_a" + std::to_string(j);
      ElementCounts tags;
      if (uniform01(rng) < spec.tagged_share) tags[uniform01(rng) < 0.5 ? "exists" : "forall"] = 1;
      set_formulas(ax, {Formula::implication(Formula::atom(parent), Formula::conjunction(std::move(parts)))}, tags);
      kb.axioms.push_back(std::move(ax));
    }
  }
  return kb;
}

InjectionResult inject_faults(const KnowledgeBase& kb, const GeneratorSpec& spec) {
  spec.validate();
  if (kb.axioms.size() < 2 * spec.target_cardinality)
    throw std::invalid_argument("knowledge base needs at least " + std::to_string(2 * spec.target_cardinality) +
                                " axioms for the requested target cardinality");
  if (!kb_consistent(kb)) throw std::invalid_argument("input must be consistent");

  const std::size_t t = spec.target_cardinality;
  std::size_t fresh = 0;
  for (std::size_t attempt = 1; attempt <= spec.max_attempts; ++attempt) {
    std::mt19937_64 rng(mix64(spec.seed ^ mix64(attempt)));
    KnowledgeBase faulty = kb;
    std::map<std::size_t, Axiom> originals;
    std::set<std::string> used_modules;
    std::size_t injections = 0;

    for (std::size_t step = 0; step < 4 * t; ++step) {
      // Patterns with at least one unaltered axiom they apply to.
      std::vector<std::pair<const FaultPattern*, std::vector<std::size_t>>> options;
      double total = 0;
      for (const auto& p : spec.patterns) {
        std::vector<std::size_t> cands;
        for (std::size_t i = 0; i < faulty.axioms.size(); ++i)
          if (!originals.count(i) && eligible(faulty.axioms[i], p.kind)) cands.push_back(i);
        if (cands.empty()) continue;
        total += p.probability;
        options.emplace_back(&p, std::move(cands));
      }
      if (options.empty()) break;
      double r = uniform01(rng) * total;
      std::size_t chosen = options.size() - 1;
      for (std::size_t k = 0; k < options.size(); ++k) {
        if (r < options[k].first->probability) {
          chosen = k;
          break;
        }
        r -= options[k].first->probability;
      }
      const FaultPattern& pattern = *options[chosen].first;
      std::vector<std::size_t> cands = options[chosen].second;
      std::vector<std::size_t> fresh_modules;
      for (auto i : cands)
        if (!used_modules.count(module_of(faulty.axioms[i].id))) fresh_modules.push_back(i);
      if (!fresh_modules.empty()) cands = fresh_modules;
      const std::size_t a = cands[pick(rng, cands.size())];

      // A related axiom shares an atom with A; parents come first since they always fire.
      const Formula premise = faulty.axioms[a].formulas[0].children()[0];
      const std::set<std::string> a_atoms = atoms_of(faulty.axioms[a].formulas);
      std::vector<std::size_t> parents, related;
      for (std::size_t j = 0; j < faulty.axioms.size(); ++j) {
        if (j == a || !is_rule(faulty.axioms[j])) continue;
        const auto parts = consequent_parts(faulty.axioms[j].formulas[0]);
        if (std::find(parts.begin(), parts.end(), premise) != parts.end()) parents.push_back(j);
        const auto b_atoms = atoms_of(faulty.axioms[j].formulas);
        if (std::any_of(b_atoms.begin(), b_atoms.end(), [&](const std::string& x) { return a_atoms.count(x) > 0; }))
          related.push_back(j);
      }
      const std::vector<std::size_t>& pool = parents.empty() ? related : parents;
      if (pool.empty()) continue;
      const std::size_t b = pool[pick(rng, pool.size())];

      originals.emplace(a, faulty.axioms[a]);
      originals.emplace(b, faulty.axioms[b]);
      Axiom& ax_a = faulty.axioms[a];
      apply_pattern(ax_a, pattern.kind);
      const Formula x = Formula::atom("X" + std::to_string(fresh++));
      set_formulas(ax_a, {with_conjunct(ax_a.formulas[0], Formula::negation(x))}, extra_tags(ax_a));
      Axiom& ax_b = faulty.axioms[b];
      set_formulas(ax_b, {with_conjunct(ax_b.formulas[0], x)}, extra_tags(ax_b));
      used_modules.insert(module_of(ax_a.id));
      ++injections;

      DiagnosisProblem problem(faulty);
      std::vector<Diagnosis> found;
      try {
        found = leading_diagnoses(problem, uniform_probs(faulty.axioms.size()), spec.m);
      } catch (const NoDiagnosisError&) {
        break;
      }
      if (found.empty()) break;
      const std::size_t min_card = found.front().axioms.size();
      if (min_card < t) continue;
      std::vector<AxiomSet> minimal;
      for (const auto& d : found)
        if (d.axioms.size() == min_card) minimal.push_back(d.axioms);
      if (min_card > t || minimal.size() < spec.m) break;

      InjectionResult out;
      out.target = minimal[pick(rng, minimal.size())];
      for (auto i : out.target)
        if (auto it = originals.find(i); it != originals.end()) out.repair.push_back(it->second);
      out.min_cardinality_diagnoses = std::move(minimal);
      out.faulty = std::move(faulty);
      out.injections = injections;
      out.attempts = attempt;
      return out;
    }
  }
  throw GeneratorBudgetError("no fault injection met m=" + std::to_string(spec.m) + ", t=" + std::to_string(t) +
                             " within " + std::to_string(spec.max_attempts) + " attempts");
}

KnowledgeBase target_kb(const KnowledgeBase& faulty, const AxiomSet& target, const std::vector<Axiom>& repair) {
  KnowledgeBase out;
  out.background = faulty.background;
  out.p_tests = faulty.p_tests;
  out.n_tests = faulty.n_tests;
  for (std::size_t i = 0; i < faulty.axioms.size(); ++i)
    if (!std::binary_search(target.begin(), target.end(), i)) out.axioms.push_back(faulty.axioms[i]);
  for (const auto& ax : repair) {
    out.axioms.push_back(ax);
    if (!kb_consistent(out)) out.axioms.pop_back();
  }
  return out;
}

PriorKind parse_prior_kind(const std::string& s) {
  if (s == "extreme" || s == "EXTREME") return PriorKind::Extreme;
  if (s == "moderate" || s == "MODERATE") return PriorKind::Moderate;
  if (s == "uniform" || s == "UNIFORM") return PriorKind::Uniform;
  throw std::invalid_argument("unknown prior distribution '" + s + "'");
}

const char* to_string(PriorKind k) {
  switch (k) {
    case PriorKind::Extreme: return "extreme";
    case PriorKind::Moderate: return "moderate";
    case PriorKind::Uniform: return "uniform";
  }
  return "?";
}

PriorDistribution PriorDistribution::of(PriorKind k) {
  switch (k) {
    case PriorKind::Extreme: return extreme();
    case PriorKind::Moderate: return moderate();
    case PriorKind::Uniform: break;
  }
  return uniform();
}

FaultProfile sample_profile(const PriorDistribution& dist, const std::set<std::string>& elements,
                            std::uint64_t seed, double uniform_p) {
  FaultProfile out;
  if (dist.kind == PriorKind::Uniform) {
    for (const auto& e : elements) out.element_probs[e] = uniform_p;
    return out;
  }
  constexpr double lo = 0.001 + 1e-4;
  constexpr double hi = 0.5 - 1e-4;
  std::mt19937_64 rng(seed);
  std::vector<std::string> names(elements.begin(), elements.end());
  shuffle(names, rng);
  std::vector<double> w;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double rank = static_cast<double>(i) + uniform01(rng);
    w.push_back(dist.lambda * std::exp(-dist.lambda * rank));
  }
  if (w.empty()) return out;
  const auto [mn, mx] = std::minmax_element(w.begin(), w.end());
  const double wmin = *mn, wmax = *mx;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double p = wmax > wmin ? lo + (w[i] - wmin) / (wmax - wmin) * (hi - lo) : (lo + hi) / 2;
    out.element_probs[names[i]] = p;
  }
  return out;
}

std::set<std::string> element_names(const KnowledgeBase& kb) {
  std::set<std::string> out;
  for (const auto& ax : kb.axioms)
    for (const auto& [name, n] : ax.elements)
      if (n > 0) out.insert(name);
  return out;
}

CaseSplit classify_cases(const std::vector<double>& probs) {
  CaseSplit out;
  if (probs.empty()) return out;
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  std::vector<std::size_t> upto_two_thirds;
  double cum = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i] / total;
    if (cum <= 1.0 / 3.0 + 1e-12) out.good.push_back(i);
    if (cum <= 2.0 / 3.0 + 1e-12) upto_two_thirds.push_back(i);
  }
  if (out.good.empty()) out.good.push_back(0);
  for (auto i : upto_two_thirds)
    if (std::find(out.good.begin(), out.good.end(), i) == out.good.end()) out.average.push_back(i);
  if (out.average.empty() && probs.size() > out.good.size()) out.average.push_back(out.good.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (std::find(out.good.begin(), out.good.end(), i) == out.good.end() &&
        std::find(out.average.begin(), out.average.end(), i) == out.average.end())
      out.bad.push_back(i);
  return out;
}

}  // namespace seqdiag
