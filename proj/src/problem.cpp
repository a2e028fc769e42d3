#include "seqdiag/problem.hpp"

#include <algorithm>

namespace seqdiag {

void ConflictCache::add(CachedConflict c) {
  std::lock_guard lock(mutex_);
  for (const auto& e : entries_)
    if (e.axioms == c.axioms && e.p_keys == c.p_keys && e.n_keys == c.n_keys) return;
  entries_.push_back(std::move(c));
}

std::vector<CachedConflict> ConflictCache::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

DiagnosisProblem::DiagnosisProblem(KnowledgeBase kb)
    : p_tests(kb.p_tests),
      n_tests(kb.n_tests),
      kb_(std::make_shared<const KnowledgeBase>(std::move(kb))),
      reasoner_(std::make_shared<KbReasoner>(*kb_)),
      cache_(std::make_shared<ConflictCache>()) {}

AxiomMask DiagnosisProblem::mask_of(const AxiomSet& s) const {
  AxiomMask m(size(), false);
  for (auto i : s) m.at(i) = true;
  return m;
}

AxiomMask DiagnosisProblem::mask_without(const AxiomSet& removed) const {
  AxiomMask m(size(), true);
  for (auto i : removed) m.at(i) = false;
  return m;
}

AxiomSet DiagnosisProblem::resolve(const std::vector<std::string>& ids) const {
  AxiomSet out;
  for (const auto& id : ids) {
    auto i = kb_->index_of(id);
    if (!i) throw UnknownAxiomError("unknown axiom id '" + id + "'");
    out.push_back(*i);
  }
  return normalized(std::move(out));
}

std::vector<std::string> DiagnosisProblem::ids(const AxiomSet& s) const {
  std::vector<std::string> out;
  for (auto i : s) out.push_back(kb_->axioms.at(i).id);
  return out;
}

std::string DiagnosisProblem::label(const AxiomSet& s) const {
  std::string out = "[";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ',';
    out += kb_->axioms.at(s[k]).id;
  }
  return out + "]";
}

DiagnosisProblem DiagnosisProblem::with_tests(std::vector<Formula> p, std::vector<Formula> n) const {
  DiagnosisProblem copy = *this;
  copy.p_tests = std::move(p);
  copy.n_tests = std::move(n);
  return copy;
}

AxiomSet normalized(AxiomSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

bool is_subset(const AxiomSet& a, const AxiomSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool disjoint(const AxiomSet& a, const AxiomSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i;
    else ++j;
  }
  return true;
}

}  // namespace seqdiag
