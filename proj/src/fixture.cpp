#include "seqdiag/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seqdiag {

FixtureDiagnosisSource::FixtureDiagnosisSource(std::vector<std::string> axiom_ids,
                                               std::vector<AxiomSet> diagnoses, std::vector<double> priors,
                                               std::vector<FixtureRow> rows)
    : axiom_ids_(std::move(axiom_ids)),
      diagnoses_(std::move(diagnoses)),
      priors_(std::move(priors)),
      rows_(std::move(rows)),
      alive_(diagnoses_.size(), true) {
  if (priors_.size() != diagnoses_.size()) throw std::invalid_argument("one prior per diagnosis expected");
  for (const auto& r : rows_)
    if (r.sides.size() != diagnoses_.size())
      throw std::invalid_argument("row " + r.name + " must place every diagnosis");
}

std::vector<Diagnosis> FixtureDiagnosisSource::leading(std::size_t n) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < diagnoses_.size(); ++i)
    if (alive_[i]) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return priors_[a] > priors_[b]; });
  if (idx.size() > n) idx.resize(n);
  // Table order, so positions match the fixture's D1..Dk numbering.
  std::sort(idx.begin(), idx.end());
  std::vector<Diagnosis> out;
  double total = 0;
  for (auto i : idx) total += priors_[i];
  for (auto i : idx) out.push_back({diagnoses_[i], priors_[i], priors_[i] / total});
  return out;
}

const FixtureRow& FixtureDiagnosisSource::row(const std::vector<Formula>& query) const {
  const std::string fp = fingerprint(query);
  for (const auto& r : rows_)
    if (fingerprint(r.query) == fp) return r;
  throw std::invalid_argument("query {" + fp + "} is not in the fixture table");
}

std::string FixtureDiagnosisSource::row_name(const std::vector<Formula>& query) const {
  const std::string fp = fingerprint(query);
  for (const auto& r : rows_)
    if (fingerprint(r.query) == fp) return r.name;
  return {};
}

std::size_t FixtureDiagnosisSource::index_of(const AxiomSet& d) const {
  for (std::size_t i = 0; i < diagnoses_.size(); ++i)
    if (diagnoses_[i] == d) return i;
  throw std::invalid_argument("diagnosis " + label(d) + " is not in the fixture");
}

Partition FixtureDiagnosisSource::classify(const std::vector<Diagnosis>& leading,
                                           const std::vector<Formula>& query) {
  const FixtureRow& r = row(query);
  std::vector<Side> sides;
  for (const auto& d : leading) sides.push_back(r.sides[index_of(d.axioms)]);
  return Partition::from_sides(r.query, sides);
}

Partition FixtureDiagnosisSource::select(const std::vector<Diagnosis>& leading, const Belief& belief,
                                         const SessionConfig& config, const std::set<std::string>& excluded) {
  Partition best;
  double best_score = 2.0;
  for (const auto& r : rows_) {
    Partition p = classify(leading, r.query);
    const std::size_t k = leading.size();
    if (p.dx.size() == k || p.dnx.size() == k || p.dz.size() == k) continue;
    if (excluded.count(p.key()) || answered_.count(r.name)) continue;
    const double s = config.gamma ? entropy_score(p, belief) : score(p, belief, config.strategy);
    if (s < best_score - 1e-12 ||
        (std::abs(s - best_score) <= 1e-12 && p.query.size() < best.query.size())) {
      best = std::move(p);
      best_score = s;
    }
  }
  return best;
}

void FixtureDiagnosisSource::commit(const std::vector<Formula>& query, Answer answer) {
  if (answer == Answer::Unknown) return;
  const FixtureRow& r = row(query);
  // With the answer committed every surviving diagnosis agrees on this row, so it is never posed again.
  answered_.insert(r.name);
  const Side rejected = answer == Answer::Yes ? Side::Minus : Side::Plus;
  for (std::size_t i = 0; i < diagnoses_.size(); ++i)
    if (r.sides[i] == rejected) alive_[i] = false;
}

std::string FixtureDiagnosisSource::label(const AxiomSet& d) const {
  std::string out = "[";
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (k) out += ',';
    out += axiom_ids_.at(d[k]);
  }
  return out + "]";
}

std::vector<std::string> FixtureDiagnosisSource::axiom_ids(const AxiomSet& d) const {
  std::vector<std::string> out;
  for (auto i : d) out.push_back(axiom_ids_.at(i));
  return out;
}

Oracle target_side_oracle(AxiomSet target) {
  return [target = std::move(target)](const Partition& part, const std::vector<Diagnosis>& leading) {
    for (std::size_t i = 0; i < leading.size(); ++i)
      if (leading[i].axioms == target) return part.sides().at(i) == Side::Plus ? Answer::Yes : Answer::No;
    return Answer::No;
  };
}

}  // namespace seqdiag
