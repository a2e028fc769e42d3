#include "seqdiag/probability.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

namespace seqdiag {

void FaultProfile::validate() const {
  auto check = [](const std::string& what, double p) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("probability for '" + what + "' must lie in (0,1)");
  };
  for (const auto& [k, v] : element_probs) check(k, v);
  for (const auto& [k, v] : axiom_overrides) check(k, v);
}

double axiom_fault_probability(const Axiom& ax, const FaultProfile& profile) {
  if (auto it = profile.axiom_overrides.find(ax.id); it != profile.axiom_overrides.end())
    return it->second;
  double keep = 1.0;
  for (const auto& [name, count] : ax.elements) {
    auto it = profile.element_probs.find(name);
    if (it == profile.element_probs.end())
      throw MissingElementError("no probability for element '" + name + "' of axiom " + ax.id);
    keep *= std::pow(1.0 - it->second, count);
  }
  return 1.0 - keep;
}

std::vector<double> axiom_probabilities(const KnowledgeBase& kb, const FaultProfile& profile) {
  std::vector<double> out;
  out.reserve(kb.axioms.size());
  for (const auto& ax : kb.axioms) out.push_back(axiom_fault_probability(ax, profile));
  return out;
}

std::vector<std::string> high_probability_axioms(const KnowledgeBase& kb, const std::vector<double>& probs) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < probs.size() && i < kb.axioms.size(); ++i)
    if (probs[i] >= 0.5) out.push_back(kb.axioms[i].id);
  return out;
}

double diagnosis_prior(const AxiomSet& d, const std::vector<double>& axiom_probs) {
  double p = 1.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < axiom_probs.size(); ++i) {
    const bool in = k < d.size() && d[k] == i;
    if (in) ++k;
    p *= in ? axiom_probs[i] : 1.0 - axiom_probs[i];
  }
  return p;
}

Belief normalize(Belief b) {
  double total = 0.0;
  for (double v : b) {
    if (v < 0.0) throw std::invalid_argument("negative belief value");
    total += v;
  }
  if (!(total > 0.0)) throw ZeroBeliefError("belief has no positive value");
  for (double& v : b) v /= total;
  return b;
}

std::pair<double, double> answer_probabilities(const Partition& part, const Belief& belief) {
  double px = 0, pnx = 0, pz = 0;
  for (auto i : part.dx) px += belief.at(i);
  for (auto i : part.dnx) pnx += belief.at(i);
  for (auto i : part.dz) pz += belief.at(i);
  const double total = px + pnx + pz;
  if (total > 0) {
    px /= total;
    pnx /= total;
    pz /= total;
  }
  return {px + pz / 2, pnx + pz / 2};
}

Belief bayes_update(const Belief& belief, const Partition& part, Answer answer) {
  if (answer == Answer::Unknown) return belief;
  const auto [p_yes, p_no] = answer_probabilities(part, belief);
  const double p_ans = answer == Answer::Yes ? p_yes : p_no;
  if (!(p_ans > 0.0))
    throw ContradictoryAnswerError(std::string("answer '") + to_string(answer) +
                                   "' has probability zero under the current belief");
  Belief out = belief;
  const auto sides = part.sides();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Side s = i < sides.size() ? sides[i] : Side::Zero;
    double like = 0.5;
    if (s == Side::Plus) like = answer == Answer::Yes ? 1.0 : 0.0;
    if (s == Side::Minus) like = answer == Answer::No ? 1.0 : 0.0;
    out[i] *= like;
  }
  return normalize(std::move(out));
}

Strategy Strategy::parse(const std::string& name, std::uint64_t seed) {
  if (name == "entropy") return {Kind::Entropy, seed};
  if (name == "split" || name == "split_in_half") return {Kind::Split, seed};
  if (name == "random") return {Kind::Random, seed};
  throw std::invalid_argument("unknown strategy '" + name + "' (expected entropy|split|random)");
}

std::string Strategy::name() const {
  switch (kind) {
    case Kind::Entropy: return "entropy";
    case Kind::Split: return "split";
    case Kind::Random: return "random";
  }
  return "?";
}

double entropy_score(const Partition& part, const Belief& belief) {
  if (part.empty()) return 1.0;
  const auto [p_yes, p_no] = answer_probabilities(part, belief);
  double pz = 0, total = 0;
  for (auto i : part.dz) pz += belief.at(i);
  for (double v : belief) total += v;
  if (total > 0) pz /= total;
  auto plogp = [](double p) { return p > 0 ? p * std::log2(p) : 0.0; };
  return plogp(p_yes) + plogp(p_no) + pz + 1.0;
}

double split_score(const Partition& part) {
  if (part.empty() || part.size() == 0) return 1.0;
  const double diff = std::abs(static_cast<double>(part.dx.size()) - static_cast<double>(part.dnx.size()));
  return (diff + static_cast<double>(part.dz.size())) / static_cast<double>(part.size());
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ mix64(seed);
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return mix64(h);
}

double random_score(const Partition& part, std::uint64_t seed) {
  if (part.empty()) return 1.0;
  // 53 random bits mapped into [0,1).
  return static_cast<double>(hash_string(part.key(), seed) >> 11) * 0x1.0p-53;
}

double score(const Partition& part, const Belief& belief, const Strategy& strategy) {
  switch (strategy.kind) {
    case Strategy::Kind::Entropy: return entropy_score(part, belief);
    case Strategy::Kind::Split: return split_score(part);
    case Strategy::Kind::Random: return random_score(part, strategy.seed);
  }
  return 1.0;
}

}  // namespace seqdiag
