#pragma once

#include <set>
#include <string>
#include <vector>

#include "seqdiag/session.hpp"

namespace seqdiag {

/// One precomputed query with the side of every fixture diagnosis.
struct FixtureRow {
  std::string name;
  std::vector<Formula> query;
  std::vector<Side> sides;
};

/// Serves a fixed diagnosis list and partition table instead of reasoning. Answers reject
/// diagnoses by table lookup; selection scores every still-discriminating row.
class FixtureDiagnosisSource : public DiagnosisSource {
 public:
  FixtureDiagnosisSource(std::vector<std::string> axiom_ids, std::vector<AxiomSet> diagnoses,
                         std::vector<double> priors, std::vector<FixtureRow> rows);

  std::vector<Diagnosis> leading(std::size_t n) override;
  Partition classify(const std::vector<Diagnosis>& leading, const std::vector<Formula>& query) override;
  Partition select(const std::vector<Diagnosis>& leading, const Belief& belief,
                   const SessionConfig& config, const std::set<std::string>& excluded) override;
  void commit(const std::vector<Formula>& query, Answer answer) override;
  std::string label(const AxiomSet& d) const override;
  std::vector<std::string> axiom_ids(const AxiomSet& d) const override;

  /// Name of the row whose query matches, or empty.
  std::string row_name(const std::vector<Formula>& query) const;

 private:
  const FixtureRow& row(const std::vector<Formula>& query) const;
  std::size_t index_of(const AxiomSet& d) const;

  std::vector<std::string> axiom_ids_;
  std::vector<AxiomSet> diagnoses_;
  std::vector<double> priors_;
  std::vector<FixtureRow> rows_;
  std::vector<bool> alive_;
  std::set<std::string> answered_;
};

/// Answers from the target's side of the partition: D+ yes, otherwise no.
Oracle target_side_oracle(AxiomSet target);

}  // namespace seqdiag
