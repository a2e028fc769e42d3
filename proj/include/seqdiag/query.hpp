#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqdiag/diagnosis.hpp"
#include "seqdiag/partition.hpp"
#include "seqdiag/probability.hpp"
#include "seqdiag/problem.hpp"
#include "seqdiag/reasoner.hpp"

namespace seqdiag {

struct QueryStats {
  std::size_t create_query_calls = 0;
  std::size_t classifications = 0;
  std::size_t minimizations = 0;
};

/// Query generation for one fixed leading set. Entailment profiles and classifications are
/// cached for the lifetime of the engine, so build one per selection round.
class QueryEngine {
 public:
  QueryEngine(DiagnosisProblem problem, std::vector<AxiomSet> leading);

  const std::vector<AxiomSet>& leading() const { return leading_; }
  const DiagnosisProblem& problem() const { return problem_; }

  /// Common entailments of the seed diagnoses' repaired KBs, classified over the whole
  /// leading set. Empty when nothing is common or every diagnosis predicts yes.
  Partition create_query(const std::vector<std::size_t>& seed);

  /// Places every leading diagnosis into D+, D- or D0 for the query.
  Partition classify(const std::vector<Formula>& query);
  Side classify_one(std::size_t diagnosis, const std::vector<Formula>& query);
  /// Same, with the query's fingerprint already computed.
  Side classify_one(std::size_t diagnosis, const std::vector<Formula>& query, const std::string& fp);

  /// Subset-minimal query with the same D+/D-/D0. Idempotent.
  Partition minimize(const Partition& part);

  /// One partition per distinct split reachable from a non-empty seed, minimized, keeping
  /// the smallest query for each split.
  std::vector<Partition> generate_partitions(std::size_t bound = 9);

  /// Depth-first include/exclude search over seeds; minimum score wins, then the smaller
  /// minimized query. Partitions whose key is excluded are skipped.
  Partition select(const Belief& belief, const Strategy& strategy,
                   const std::set<std::string>& excluded = {});

  /// Seeds in complete Karmarkar-Karp differencing order; stops at the first entropy score
  /// below gamma, otherwise returns the best seen.
  Partition select_ckk(const Belief& belief, double gamma, const std::set<std::string>& excluded = {});

  const EntailmentProfile& profile(std::size_t diagnosis);
  const EntailmentProfile& background_profile();

  QueryStats stats;

 private:
  bool better(const Partition& cand, double cand_score, Partition& best, double& best_score);
  const EntailmentProfile& filtered_profile(std::size_t diagnosis);
  Partition partition_for(const EntailmentProfile& common);

  DiagnosisProblem problem_;
  std::vector<AxiomSet> leading_;
  std::vector<std::optional<EntailmentProfile>> profiles_;
  std::vector<std::optional<EntailmentProfile>> filtered_;
  std::optional<EntailmentProfile> background_;
  std::map<std::pair<std::size_t, std::string>, Side> side_cache_;
  std::map<std::string, Partition> minimized_;
  std::map<std::vector<std::size_t>, Partition> created_;
  std::map<std::string, Partition> by_common_;
};

Partition create_query(const std::vector<std::size_t>& seed, const std::vector<AxiomSet>& leading,
                       const DiagnosisProblem& problem);
std::vector<Partition> generate_partitions(const std::vector<AxiomSet>& leading,
                                           const DiagnosisProblem& problem, std::size_t bound = 9);
Partition minimize_query(const Partition& part, const std::vector<AxiomSet>& leading,
                         const DiagnosisProblem& problem);
Partition select_query(const std::vector<Diagnosis>& leading, const DiagnosisProblem& problem,
                       const Strategy& strategy);
Partition select_query_ckk(const std::vector<Diagnosis>& leading, const DiagnosisProblem& problem,
                           double gamma);

std::vector<AxiomSet> axiom_sets(const std::vector<Diagnosis>& ds);
Belief belief_of(const std::vector<Diagnosis>& ds);

}  // namespace seqdiag
