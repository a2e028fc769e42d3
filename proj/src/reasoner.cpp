#include "seqdiag/reasoner.hpp"

#include <algorithm>
#include <atomic>

namespace seqdiag {

namespace {
std::atomic<std::int64_t> g_budget{2'000'000};
}

void set_conflict_budget(std::int64_t budget) { g_budget = budget; }
std::int64_t conflict_budget() { return g_budget; }

sat::Var TseitinEncoder::atom(const std::string& name) {
  auto it = atoms_.find(name);
  if (it != atoms_.end()) return it->second;
  const sat::Var v = solver_.new_var();
  atoms_.emplace(name, v);
  return v;
}

std::optional<sat::Var> TseitinEncoder::find_atom(const std::string& name) const {
  auto it = atoms_.find(name);
  if (it == atoms_.end()) return std::nullopt;
  return it->second;
}

sat::Lit TseitinEncoder::literal(const Formula& f) {
  if (f.is_atom()) return sat::Lit::make(atom(f.name()));
  std::string key = to_string(f);
  auto it = roots_.find(key);
  if (it != roots_.end()) return it->second;
  const sat::Lit l = encode(f);
  roots_.emplace(std::move(key), l);
  return l;
}

sat::Lit TseitinEncoder::encode(const Formula& f) {
  using sat::Lit;
  switch (f.kind()) {
    case Connective::Atom:
      return Lit::make(atom(f.name()));
    case Connective::Not:
      return ~encode(f.children()[0]);
    case Connective::And:
    case Connective::Or:
    case Connective::Implies: {
      std::vector<Lit> parts;
      if (f.kind() == Connective::Implies) {
        parts = {~encode(f.children()[0]), encode(f.children()[1])};
      } else {
        for (const auto& c : f.children()) parts.push_back(encode(c));
      }
      const Lit v = Lit::make(solver_.new_var());
      if (f.kind() == Connective::And) {
        std::vector<Lit> big{v};
        for (Lit p : parts) {
          solver_.add_clause({~v, p});
          big.push_back(~p);
        }
        solver_.add_clause(std::move(big));
      } else {
        std::vector<Lit> big{~v};
        for (Lit p : parts) {
          solver_.add_clause({v, ~p});
          big.push_back(p);
        }
        solver_.add_clause(std::move(big));
      }
      return v;
    }
  }
  throw std::logic_error("unreachable connective");
}

std::vector<Formula> EntailmentProfile::sentences() const {
  std::vector<std::pair<std::string, Formula>> keyed;
  for (const auto& a : positive) keyed.emplace_back(a, Formula::atom(a));
  for (const auto& [a, b] : implications) {
    Formula f = Formula::implication(Formula::atom(a), Formula::atom(b));
    keyed.emplace_back(to_string(f), std::move(f));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Formula> out;
  out.reserve(keyed.size());
  for (auto& [k, f] : keyed) out.push_back(std::move(f));
  return out;
}

KbReasoner::KbReasoner(const KnowledgeBase& kb) : encoder_(solver_) {
  const auto vocab = kb.vocabulary();
  vocabulary_.assign(vocab.begin(), vocab.end());
  for (const auto& a : vocabulary_) atom_vars_.emplace_back(a, encoder_.atom(a));
  for (const auto& f : kb.background) solver_.add_clause({encoder_.literal(f)});
  for (const auto& ax : kb.axioms) {
    const sat::Lit sel = sat::Lit::make(solver_.new_var());
    selectors_.push_back(sel);
    for (const auto& f : ax.formulas) solver_.add_clause({~sel, encoder_.literal(f)});
  }
}

std::vector<sat::Lit> KbReasoner::assumptions(const AxiomMask& active, std::span<const Formula> extra) {
  std::vector<sat::Lit> out;
  for (std::size_t i = 0; i < selectors_.size(); ++i)
    if (i < active.size() && active[i]) out.push_back(selectors_[i]);
  for (const auto& f : extra) out.push_back(encoder_.literal(f));
  return out;
}

sat::Result KbReasoner::solve(const std::vector<sat::Lit>& assumptions) {
  ++calls_;
  const auto r = solver_.solve(assumptions, conflict_budget());
  if (r == sat::Result::Unknown)
    throw ResourceLimitError("conflict budget of " + std::to_string(conflict_budget()) +
                             " exhausted");
  return r;
}

bool KbReasoner::consistent(const AxiomMask& active, std::span<const Formula> extra) {
  std::lock_guard lock(mutex_);
  return solve(assumptions(active, extra)) == sat::Result::Sat;
}

bool KbReasoner::entails(const AxiomMask& active, std::span<const Formula> extra, const Formula& goal) {
  std::lock_guard lock(mutex_);
  auto as = assumptions(active, extra);
  as.push_back(~encoder_.literal(goal));
  return solve(as) == sat::Result::Unsat;
}

bool KbReasoner::entails_all(const AxiomMask& active, std::span<const Formula> extra,
                             std::span<const Formula> goals) {
  std::lock_guard lock(mutex_);
  auto as = assumptions(active, extra);
  for (const auto& g : goals) {
    as.push_back(~encoder_.literal(g));
    const bool holds = solve(as) == sat::Result::Unsat;
    as.pop_back();
    if (!holds) return false;
  }
  return true;
}

bool KbReasoner::violates(const AxiomMask& active, std::span<const Formula> extra,
                          std::span<const Formula> forbidden) {
  std::lock_guard lock(mutex_);
  auto as = assumptions(active, extra);
  if (solve(as) == sat::Result::Unsat) return true;
  for (const auto& n : forbidden) {
    as.push_back(~encoder_.literal(n));
    const bool entailed = solve(as) == sat::Result::Unsat;
    as.pop_back();
    if (entailed) return true;
  }
  return false;
}

EntailmentProfile KbReasoner::profile(const AxiomMask& active, std::span<const Formula> extra) {
  std::lock_guard lock(mutex_);
  std::string key(active.size(), '0');
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i]) key[i] = '1';
  key += '|' + fingerprint(std::vector<Formula>(extra.begin(), extra.end()));
  if (auto it = profiles_.find(key); it != profiles_.end()) return it->second;
  if (profiles_.size() >= 4096) profiles_.clear();
  EntailmentProfile out = compute_profile(active, extra);
  profiles_.emplace(std::move(key), out);
  return out;
}

EntailmentProfile KbReasoner::compute_profile(const AxiomMask& active, std::span<const Formula> extra) {
  EntailmentProfile out;
  auto base = assumptions(active, extra);
  if (solve(base) == sat::Result::Unsat) {
    out.consistent = false;
    return out;
  }
  const std::size_t n = atom_vars_.size();
  std::vector<char> first_model(n);
  for (std::size_t i = 0; i < n; ++i) first_model[i] = solver_.model_value(atom_vars_[i].second);

  std::unordered_map<sat::Var, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(atom_vars_[i].second, i);

  // 1 entailed, -1 negation entailed, 0 undecided.
  std::vector<int> state(n, 0);
  if (auto fixed = solver_.propagate_assumptions(base))
    for (const sat::Lit l : *fixed)
      if (auto it = index.find(l.var()); it != index.end()) state[it->second] = l.negative() ? -1 : 1;

  std::vector<char> alive(n, 0);
  for (std::size_t i = 0; i < n; ++i) alive[i] = state[i] == 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    alive[i] = 0;
    auto as = base;
    as.push_back(sat::Lit::make(atom_vars_[i].second, first_model[i]));
    if (solve(as) == sat::Result::Unsat) {
      state[i] = first_model[i] ? 1 : -1;
      continue;
    }
    for (std::size_t j = i + 1; j < n; ++j)
      if (alive[j] && solver_.model_value(atom_vars_[j].second) != static_cast<bool>(first_model[j]))
        alive[j] = 0;
  }

  std::vector<std::size_t> undecided;
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] == 1) out.positive.insert(atom_vars_[i].first);
    else if (state[i] == -1) out.negative.insert(atom_vars_[i].first);
    else undecided.push_back(i);
  }

  for (const std::size_t a : undecided) {
    auto as = base;
    as.push_back(sat::Lit::make(atom_vars_[a].second));
    std::vector<char> implied(n, 0);
    if (auto fixed = solver_.propagate_assumptions(as))
      for (const sat::Lit l : *fixed)
        if (auto it = index.find(l.var()); it != index.end() && !l.negative()) implied[it->second] = 1;
    for (std::size_t b = 0; b < n; ++b)
      if (b != a && state[b] == 1) implied[b] = 1;

    std::vector<char> open(n, 0);
    for (const std::size_t b : undecided) open[b] = b != a && !implied[b];
    auto refute_with_model = [&] {
      for (const std::size_t c : undecided)
        if (open[c] && !solver_.model_value(atom_vars_[c].second)) open[c] = 0;
    };
    if (solve(as) == sat::Result::Sat) refute_with_model();
    for (const std::size_t b : undecided) {
      if (!open[b]) continue;
      open[b] = 0;
      as.push_back(sat::Lit::make(atom_vars_[b].second, true));
      if (solve(as) == sat::Result::Unsat)
        implied[b] = 1;
      else
        refute_with_model();
      as.pop_back();
    }
    for (std::size_t b = 0; b < n; ++b)
      if (implied[b] && b != a) out.implications.emplace(atom_vars_[a].first, atom_vars_[b].first);
  }
  return out;
}

namespace {

KnowledgeBase as_background(const SentenceSet& s) {
  KnowledgeBase kb;
  kb.background = s.formulas;
  return kb;
}

}  // namespace

bool is_consistent(const SentenceSet& s) {
  KbReasoner r(as_background(s));
  return r.consistent({}, {});
}

bool entails(const SentenceSet& s, const Formula& f) {
  KbReasoner r(as_background(s));
  return r.entails({}, {}, f);
}

std::vector<Formula> enumerate_entailments(const SentenceSet& s, const std::set<std::string>& vocab,
                                           const SentenceSet* background) {
  KnowledgeBase kb = as_background(s);
  // Vocabulary atoms the sentences never mention still need variables.
  for (const auto& a : vocab) kb.n_tests.push_back(Formula::atom(a));
  KbReasoner r(kb);
  EntailmentProfile p = r.profile({}, {});
  if (!p.consistent) throw InconsistentInputError("enumerate_entailments on an inconsistent set");

  auto keep = [&](const std::string& a) { return vocab.count(a) > 0; };
  EntailmentProfile filtered;
  for (const auto& a : p.positive)
    if (keep(a)) filtered.positive.insert(a);
  for (const auto& [a, b] : p.implications)
    if (keep(a) && keep(b)) filtered.implications.emplace(a, b);

  if (background) {
    KnowledgeBase bkb = as_background(*background);
    for (const auto& a : vocab) bkb.n_tests.push_back(Formula::atom(a));
    KbReasoner br(bkb);
    const EntailmentProfile bp = br.profile({}, {});
    if (bp.consistent) {
      std::erase_if(filtered.positive, [&](const std::string& a) { return bp.positive.count(a) > 0; });
      std::erase_if(filtered.implications,
                    [&](const auto& ab) { return bp.entails_implication(ab.first, ab.second); });
    }
  }
  return filtered.sentences();
}

}  // namespace seqdiag
