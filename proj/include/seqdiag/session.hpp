#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqdiag/diagnosis.hpp"
#include "seqdiag/partition.hpp"
#include "seqdiag/probability.hpp"
#include "seqdiag/problem.hpp"
#include "seqdiag/query.hpp"

namespace seqdiag {

enum class StopRule { Gap, Top1 };

struct SessionConfig {
  std::size_t n = 9;
  double sigma = 0.95;
  Strategy strategy;
  /// When set, queries come from the CKK search with this threshold.
  std::optional<double> gamma;
  std::size_t max_queries = 100;
  StopRule stop_rule = StopRule::Gap;

  void validate() const;
};

enum class SessionStatus { Running, StoppedThreshold, StoppedNoQuery, StoppedBudget };
const char* to_string(SessionStatus s);
StopRule parse_stop_rule(const std::string& s);
const char* to_string(StopRule r);

/// Where the leading diagnoses and queries come from. The real backend reasons over a KB;
/// a fixture backend serves a precomputed partition table.
class DiagnosisSource {
 public:
  virtual ~DiagnosisSource() = default;

  /// Up to n leading diagnoses under everything committed so far, normalized.
  virtual std::vector<Diagnosis> leading(std::size_t n) = 0;
  /// D+/D-/D0 of the query over the given leading set.
  virtual Partition classify(const std::vector<Diagnosis>& leading, const std::vector<Formula>& query) = 0;
  virtual Partition select(const std::vector<Diagnosis>& leading, const Belief& belief,
                           const SessionConfig& config, const std::set<std::string>& excluded) = 0;
  /// yes adds the query sentences to P; no adds their conjunction to N.
  virtual void commit(const std::vector<Formula>& query, Answer answer) = 0;
  virtual std::string label(const AxiomSet& d) const = 0;
  virtual std::vector<std::string> axiom_ids(const AxiomSet& d) const = 0;
  virtual std::vector<std::string> warnings() const { return {}; }
};

/// Reasons over a KB with axiom fault probabilities.
class KbDiagnosisSource : public DiagnosisSource {
 public:
  KbDiagnosisSource(DiagnosisProblem problem, std::vector<double> axiom_probs);

  std::vector<Diagnosis> leading(std::size_t n) override;
  Partition classify(const std::vector<Diagnosis>& leading, const std::vector<Formula>& query) override;
  Partition select(const std::vector<Diagnosis>& leading, const Belief& belief,
                   const SessionConfig& config, const std::set<std::string>& excluded) override;
  void commit(const std::vector<Formula>& query, Answer answer) override;
  std::string label(const AxiomSet& d) const override { return problem_.label(d); }
  std::vector<std::string> axiom_ids(const AxiomSet& d) const override { return problem_.ids(d); }
  std::vector<std::string> warnings() const override { return warnings_; }

  const DiagnosisProblem& problem() const { return problem_; }
  const std::vector<AxiomSet>& last_conflicts() const { return conflicts_; }
  QueryStats query_stats() const { return engine_ ? engine_->stats : QueryStats{}; }

 private:
  QueryEngine& engine_for(const std::vector<Diagnosis>& leading);

  DiagnosisProblem problem_;
  std::vector<double> probs_;
  std::unique_ptr<QueryEngine> engine_;
  std::vector<AxiomSet> conflicts_;
  std::vector<std::string> warnings_;
};

/// Answers on behalf of the user. Receives the query's partition and the leading set.
using Oracle = std::function<Answer(const Partition& part, const std::vector<Diagnosis>& leading)>;

/// yes iff the target KB entails every query sentence.
Oracle simulated_oracle(const KnowledgeBase& target_kb);

struct BeliefEntry {
  AxiomSet axioms;
  std::string label;
  double probability = 0.0;
};

struct TranscriptStep {
  Partition partition;
  std::vector<Formula> query;
  std::vector<std::string> dx, dnx, dz;
  double entropy_score = 1.0;
  double split_score = 1.0;
  Answer answer = Answer::Unknown;
  std::vector<BeliefEntry> belief_before;
  std::vector<BeliefEntry> belief_after;
};

/// Algorithm-1 state machine. Construction computes the first leading set and query;
/// every answer() recomputes both. Not thread-safe; callers serialize.
class Session {
 public:
  Session(std::unique_ptr<DiagnosisSource> source, SessionConfig config);

  SessionStatus status() const { return status_; }
  bool running() const { return status_ == SessionStatus::Running; }
  const SessionConfig& config() const { return config_; }

  const std::vector<Diagnosis>& leading() const { return leading_; }
  const Belief& belief() const { return belief_; }
  std::vector<BeliefEntry> belief_entries() const;
  /// The pending query; empty once stopped.
  const Partition& current() const { return current_; }
  const std::vector<TranscriptStep>& history() const { return history_; }
  std::size_t queries_asked() const { return asked_; }
  /// All diagnoses sharing the top probability.
  std::vector<BeliefEntry> result() const;

  void answer(Answer a);

  DiagnosisSource& source() { return *source_; }
  const DiagnosisSource& source() const { return *source_; }

 private:
  void advance();
  void pick_query();
  Belief replay(const std::vector<Diagnosis>& leading);
  bool stop_check() const;

  std::unique_ptr<DiagnosisSource> source_;
  SessionConfig config_;
  SessionStatus status_ = SessionStatus::Running;
  std::vector<Diagnosis> leading_;
  Belief belief_;
  Partition current_;
  std::vector<TranscriptStep> history_;
  /// Answered (yes/no) queries in order, replayed against each new leading set.
  std::vector<std::pair<std::vector<Formula>, Answer>> answered_;
  std::set<std::string> excluded_;
  std::set<std::string> unknown_queries_;
  std::size_t asked_ = 0;
};

/// p(top1) - p(top2) > sigma (gap) or p(top1) > sigma (top1); one diagnosis always stops.
bool stop_check(const Belief& belief, double sigma, StopRule rule = StopRule::Gap);

struct SessionOutcome {
  std::vector<BeliefEntry> result;
  std::vector<TranscriptStep> transcript;
  SessionStatus status;
  std::size_t queries = 0;
};

SessionOutcome run_session(std::unique_ptr<DiagnosisSource> source, const Oracle& oracle,
                           const SessionConfig& config);

/// Queries chosen by split-in-half with the oracle's answers applied.
std::vector<Partition> greedy_split_trace(std::unique_ptr<DiagnosisSource> source, const Oracle& oracle,
                                          std::size_t n = 9, std::size_t max_queries = 100);

}  // namespace seqdiag
