#include "seqdiag/query.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <numeric>
#include <stdexcept>

#include "seqdiag/conflict.hpp"

namespace seqdiag {

namespace {
constexpr double kTie = 1e-12;
}

QueryEngine::QueryEngine(DiagnosisProblem problem, std::vector<AxiomSet> leading)
    : problem_(std::move(problem)),
      leading_(std::move(leading)),
      profiles_(leading_.size()),
      filtered_(leading_.size()) {}

const EntailmentProfile& QueryEngine::profile(std::size_t diagnosis) {
  auto& slot = profiles_.at(diagnosis);
  if (!slot)
    slot = problem_.reasoner().profile(problem_.mask_without(leading_[diagnosis]), problem_.p_tests);
  return *slot;
}

const EntailmentProfile& QueryEngine::background_profile() {
  if (!background_) background_ = problem_.reasoner().profile(problem_.mask_of({}), problem_.p_tests);
  return *background_;
}

Side QueryEngine::classify_one(std::size_t diagnosis, const std::vector<Formula>& query) {
  return classify_one(diagnosis, query, fingerprint(query));
}

Side QueryEngine::classify_one(std::size_t diagnosis, const std::vector<Formula>& query, const std::string& fp) {
  const auto key = std::make_pair(diagnosis, fp);
  if (auto it = side_cache_.find(key); it != side_cache_.end()) return it->second;
  ++stats.classifications;
  const EntailmentProfile& prof = profile(diagnosis);
  const auto& vocab = problem_.reasoner().vocabulary();
  auto known = [&](const Formula& f) { return std::binary_search(vocab.begin(), vocab.end(), f.name()); };

  bool simple = true, all_plus = true, minus = false;
  for (const auto& q : query) {
    if (q.is_atom() && known(q)) {
      if (!prof.positive.count(q.name())) all_plus = false;
      if (prof.negative.count(q.name())) minus = true;
    } else if (q.kind() == Connective::Implies && q.children()[0].is_atom() &&
               q.children()[1].is_atom() && known(q.children()[0]) && known(q.children()[1])) {
      const auto& a = q.children()[0].name();
      const auto& b = q.children()[1].name();
      if (!prof.entails_implication(a, b)) all_plus = false;
      if (prof.positive.count(a) && prof.negative.count(b)) minus = true;
    } else {
      simple = false;
    }
  }

  Side side;
  const AxiomMask mask = problem_.mask_without(leading_[diagnosis]);
  if (simple && all_plus) {
    side = Side::Plus;
  } else if (minus) {
    side = Side::Minus;
  } else if (!simple && problem_.reasoner().entails_all(mask, problem_.p_tests, query)) {
    side = Side::Plus;
  } else {
    std::vector<Formula> extra = problem_.p_tests;
    extra.insert(extra.end(), query.begin(), query.end());
    side = problem_.reasoner().consistent(mask, extra) ? Side::Zero : Side::Minus;
  }
  side_cache_.emplace(key, side);
  return side;
}

Partition QueryEngine::classify(const std::vector<Formula>& query) {
  std::vector<Side> sides(leading_.size());
  const std::string fp = fingerprint(query);
  for (std::size_t i = 0; i < leading_.size(); ++i) sides[i] = classify_one(i, query, fp);
  return Partition::from_sides(query, sides);
}

const EntailmentProfile& QueryEngine::filtered_profile(std::size_t d) {
  // Background entailments never discriminate, so they are dropped once per diagnosis.
  auto& slot = filtered_.at(d);
  if (!slot) {
    EntailmentProfile f = profile(d);
    const auto& bg = background_profile();
    std::erase_if(f.positive, [&](const std::string& a) { return bg.positive.count(a) > 0; });
    std::erase_if(f.implications, [&](const auto& ab) { return bg.entails_implication(ab.first, ab.second); });
    slot = std::move(f);
  }
  return *slot;
}

namespace {

EntailmentProfile intersect(const EntailmentProfile& x, const EntailmentProfile& y) {
  EntailmentProfile out;
  std::set_intersection(x.positive.begin(), x.positive.end(), y.positive.begin(), y.positive.end(),
                        std::inserter(out.positive, out.positive.end()));
  std::set_intersection(x.implications.begin(), x.implications.end(), y.implications.begin(),
                        y.implications.end(), std::inserter(out.implications, out.implications.end()));
  return out;
}

}  // namespace

Partition QueryEngine::partition_for(const EntailmentProfile& common) {
  // Different seeds often share the same common entailments; classify each set once.
  std::string key;
  for (const auto& a : common.positive) key += a + ',';
  key += '|';
  for (const auto& [a, b] : common.implications) key += a + '>' + b + ',';
  if (auto it = by_common_.find(key); it != by_common_.end()) return it->second;
  Partition part;
  if (!common.positive.empty() || !common.implications.empty()) {
    part = classify(common.sentences());
    if (part.dx.size() == leading_.size()) part = {};
  }
  by_common_.emplace(std::move(key), part);
  return part;
}

Partition QueryEngine::create_query(const std::vector<std::size_t>& seed_in) {
  ++stats.create_query_calls;
  std::vector<std::size_t> seed = seed_in;
  std::sort(seed.begin(), seed.end());
  seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
  if (seed.empty()) return {};
  if (auto it = created_.find(seed); it != created_.end()) return it->second;
  std::vector<std::size_t> by_size = seed;
  std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    return filtered_profile(a).positive.size() + filtered_profile(a).implications.size() <
           filtered_profile(b).positive.size() + filtered_profile(b).implications.size();
  });
  EntailmentProfile common = filtered_profile(by_size[0]);
  for (std::size_t k = 1; k < by_size.size(); ++k) common = intersect(common, filtered_profile(by_size[k]));
  Partition part = partition_for(common);
  created_.emplace(seed, part);
  return part;
}

Partition QueryEngine::minimize(const Partition& part) {
  if (part.empty() || part.query.size() <= 1) return part;
  const std::string key = part.key() + "#" + fingerprint(part.query);
  if (auto it = minimized_.find(key); it != minimized_.end()) return it->second;
  ++stats.minimizations;
  const auto sides = part.sides();
  auto preserves = [&](const std::vector<Formula>& sub) {
    if (sub.empty()) return false;
    const std::string fp = fingerprint(sub);
    for (std::size_t i = 0; i < sides.size(); ++i)
      if (classify_one(i, sub, fp) != sides[i]) return false;
    return true;
  };
  auto reduced = quickxplain(part.query, preserves);
  Partition out = part;
  if (reduced) out.query = std::move(*reduced);
  minimized_.emplace(key, out);
  minimized_.emplace(out.key() + "#" + fingerprint(out.query), out);
  return out;
}

std::vector<Partition> QueryEngine::generate_partitions(std::size_t bound) {
  const std::size_t n = leading_.size();
  if (n > bound)
    throw std::length_error("leading set of " + std::to_string(n) + " exceeds the bound of " +
                            std::to_string(bound));
  std::vector<Partition> out;
  std::map<std::string, std::size_t> by_key;
  for (std::uint32_t m = 1; m < (1u << n); ++m) {
    std::vector<std::size_t> seed;
    for (std::size_t i = 0; i < n; ++i)
      if (m & (1u << i)) seed.push_back(i);
    Partition p = create_query(seed);
    if (p.empty()) continue;
    p = minimize(p);
    auto it = by_key.find(p.key());
    if (it == by_key.end()) {
      by_key.emplace(p.key(), out.size());
      out.push_back(std::move(p));
    } else {
      Partition& have = out[it->second];
      if (p.query.size() < have.query.size() ||
          (p.query.size() == have.query.size() && fingerprint(p.query) < fingerprint(have.query)))
        have = std::move(p);
    }
  }
  return out;
}

bool QueryEngine::better(const Partition& cand, double cand_score, Partition& best, double& best_score) {
  if (best.empty() || cand_score < best_score - kTie) {
    best = cand;
    best_score = cand_score;
    return true;
  }
  // Another seed for the split already held keeps its query; only distinct splits compete on size.
  if (std::abs(cand_score - best_score) <= kTie && cand.key() != best.key()) {
    Partition a = minimize(cand);
    best = minimize(best);
    if (a.query.size() < best.query.size()) {
      best = std::move(a);
      best_score = cand_score;
      return true;
    }
  }
  return false;
}

Partition QueryEngine::select(const Belief& belief, const Strategy& strategy,
                              const std::set<std::string>& excluded) {
  const std::size_t n = leading_.size();
  if (belief.size() != n) throw std::invalid_argument("belief does not match the leading set");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return belief[a] > belief[b]; });

  Partition best;
  double best_score = 1.0;
  std::vector<std::size_t> included;
  // Common entailments of the included diagnoses, extended one level per inclusion.
  std::vector<EntailmentProfile> common;
  std::function<void(std::size_t)> dfs = [&](std::size_t k) {
    if (k == n) {
      if (included.empty()) return;
      ++stats.create_query_calls;
      Partition p = partition_for(common.back());
      if (p.empty() || excluded.count(p.key())) return;
      better(p, score(p, belief, strategy), best, best_score);
      return;
    }
    included.push_back(order[k]);
    common.push_back(common.empty() ? filtered_profile(order[k]) : intersect(common.back(), filtered_profile(order[k])));
    dfs(k + 1);
    common.pop_back();
    included.pop_back();
    dfs(k + 1);
  };
  dfs(0);
  return minimize(best);
}

Partition QueryEngine::select_ckk(const Belief& belief, double gamma, const std::set<std::string>& excluded) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0,1]");
  const std::size_t n = leading_.size();
  if (belief.size() != n) throw std::invalid_argument("belief does not match the leading set");

  struct Item {
    double value;
    std::vector<std::size_t> a, b;
  };
  std::vector<Item> start;
  for (std::size_t i = 0; i < n; ++i) start.push_back({belief[i], {i}, {}});

  Partition best;
  double best_score = 1.0;
  bool done = false;
  std::set<std::vector<std::size_t>> tried;

  auto visit = [&](std::vector<std::size_t> seed) {
    std::sort(seed.begin(), seed.end());
    if (seed.empty() || !tried.insert(seed).second) return;
    Partition p = create_query(seed);
    if (p.empty() || excluded.count(p.key())) return;
    const double s = entropy_score(p, belief);
    better(p, s, best, best_score);
    if (s < gamma) done = true;
  };

  std::function<void(std::vector<Item>)> ckk = [&](std::vector<Item> items) {
    if (done) return;
    if (items.size() <= 1) {
      if (!items.empty()) {
        visit(items[0].a);
        if (!done) visit(items[0].b);
      }
      return;
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.value > y.value; });
    const Item x = items[0];
    const Item y = items[1];
    std::vector<Item> rest(items.begin() + 2, items.end());

    auto merged = [](std::vector<std::size_t> u, const std::vector<std::size_t>& v) {
      u.insert(u.end(), v.begin(), v.end());
      return u;
    };
    // Opposite sides first (the differencing move), then the same side.
    std::vector<Item> diff = rest;
    diff.push_back({x.value - y.value, merged(x.a, y.b), merged(x.b, y.a)});
    ckk(std::move(diff));
    if (done) return;
    std::vector<Item> sum = std::move(rest);
    sum.push_back({x.value + y.value, merged(x.a, y.a), merged(x.b, y.b)});
    ckk(std::move(sum));
  };
  ckk(std::move(start));
  return minimize(best);
}

std::vector<AxiomSet> axiom_sets(const std::vector<Diagnosis>& ds) {
  std::vector<AxiomSet> out;
  for (const auto& d : ds) out.push_back(d.axioms);
  return out;
}

Belief belief_of(const std::vector<Diagnosis>& ds) {
  Belief b;
  for (const auto& d : ds) b.push_back(d.probability);
  return b;
}

Partition create_query(const std::vector<std::size_t>& seed, const std::vector<AxiomSet>& leading,
                       const DiagnosisProblem& problem) {
  QueryEngine e(problem, leading);
  return e.create_query(seed);
}

std::vector<Partition> generate_partitions(const std::vector<AxiomSet>& leading,
                                           const DiagnosisProblem& problem, std::size_t bound) {
  QueryEngine e(problem, leading);
  return e.generate_partitions(bound);
}

Partition minimize_query(const Partition& part, const std::vector<AxiomSet>& leading,
                         const DiagnosisProblem& problem) {
  QueryEngine e(problem, leading);
  return e.minimize(part);
}

Partition select_query(const std::vector<Diagnosis>& leading, const DiagnosisProblem& problem,
                       const Strategy& strategy) {
  QueryEngine e(problem, axiom_sets(leading));
  return e.select(normalize(belief_of(leading)), strategy);
}

Partition select_query_ckk(const std::vector<Diagnosis>& leading, const DiagnosisProblem& problem,
                           double gamma) {
  QueryEngine e(problem, axiom_sets(leading));
  return e.select_ckk(normalize(belief_of(leading)), gamma);
}

}  // namespace seqdiag
