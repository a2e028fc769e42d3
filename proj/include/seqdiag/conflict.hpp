#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqdiag/problem.hpp"

namespace seqdiag {

namespace detail {

template <class T, class Pred>
std::vector<T> qx(const std::vector<T>& base, bool has_delta, const std::vector<T>& cands,
                  Pred& holds) {
  if (has_delta && holds(base)) return {};
  if (cands.size() == 1) return cands;
  const std::size_t k = cands.size() / 2;
  std::vector<T> c1(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<T> c2(cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end());
  std::vector<T> b1 = base;
  b1.insert(b1.end(), c1.begin(), c1.end());
  std::vector<T> d2 = qx(b1, !c1.empty(), c2, holds);
  std::vector<T> b2 = base;
  b2.insert(b2.end(), d2.begin(), d2.end());
  std::vector<T> d1 = qx(b2, !d2.empty(), c1, holds);
  d1.insert(d1.end(), d2.begin(), d2.end());
  return d1;
}

}  // namespace detail

/// Junker's QuickXplain over any upward-closed predicate. Returns a subset-minimal X of
/// candidates with holds(X), or nullopt when holds(candidates) is false. Elements keep
/// their relative candidate order.
template <class T, class Pred>
std::optional<std::vector<T>> quickxplain(const std::vector<T>& candidates, Pred holds) {
  if (!holds(candidates)) return std::nullopt;
  if (holds(std::vector<T>{})) return std::vector<T>{};
  auto out = detail::qx(std::vector<T>{}, false, candidates, holds);
  // Restore candidate order.
  std::vector<T> ordered;
  for (const auto& c : candidates)
    for (const auto& o : out)
      if (c == o) {
        ordered.push_back(c);
        break;
      }
  return ordered;
}

/// The axioms together with B and P are inconsistent, or entail some element of N.
bool check_conflict(const AxiomSet& axioms, const DiagnosisProblem& problem);
bool check_conflict(const std::vector<std::string>& ids, const DiagnosisProblem& problem);

/// A minimal conflict inside candidates (file order preferred), or nullopt if none.
std::optional<AxiomSet> find_conflict(const AxiomSet& candidates, const DiagnosisProblem& problem);

/// Every minimal conflict by subset enumeration; |O| <= 20.
std::vector<AxiomSet> brute_force_minimal_conflicts(const DiagnosisProblem& problem);

}  // namespace seqdiag
