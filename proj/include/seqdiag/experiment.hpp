#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqdiag/faultgen.hpp"
#include "seqdiag/session.hpp"

namespace seqdiag {

struct KbEntry {
  std::string name;
  std::string path;
};

/// A synthetic source: a taxonomy is generated, then faults are injected per trial.
struct GeneratorEntry {
  std::string name;
  TaxonomySpec taxonomy;
  GeneratorSpec spec;
};

enum class CaseKind { Good, Average, Bad };
CaseKind parse_case_kind(const std::string& s);
const char* to_string(CaseKind c);

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 30;
  /// Applies to entropy and ckk; split and random have no ordering and always run to the end.
  double sigma = 0.85;
  std::size_t n = 9;
  /// entropy, split, random, or ckk (entropy scoring through the CKK search).
  std::vector<std::string> strategies{"entropy", "split"};
  std::vector<PriorKind> distributions{PriorKind::Extreme, PriorKind::Moderate, PriorKind::Uniform};
  std::vector<CaseKind> cases{CaseKind::Good, CaseKind::Average, CaseKind::Bad};
  std::vector<KbEntry> kbs;
  std::vector<GeneratorEntry> generators;
  /// Threshold for the ckk strategy.
  double gamma = 0.1;
  /// Off keeps wall_ms at 0 so output is byte-identical across runs.
  bool timing = false;
  std::size_t max_queries = 100;
  /// Cap on the minimal diagnoses enumerated per trial.
  std::size_t diagnosis_pool = 200;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
};

struct ExperimentRow {
  std::string kb_name;
  std::string distribution;
  std::string case_name;
  std::string strategy;
  std::size_t trial = 0;
  std::size_t queries_asked = 0;
  std::string stopped_by;
  double wall_ms = 0.0;
  bool target_found = false;

  friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

/// Per-trial seed derived from the run seed and the trial coordinates. Strategy is not an
/// input, so every strategy of a trial sees the same profile and target.
std::uint64_t trial_seed(std::uint64_t seed, const std::string& kb, PriorKind dist, CaseKind c, std::size_t trial);

/// Relative kb paths resolve against base_dir.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, const std::string& base_dir = ".");

std::string experiment_csv_header();
std::string to_csv(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> parse_csv(const std::string& text);

struct SummaryCell {
  std::string kb_name, distribution, case_name, strategy;
  std::size_t count = 0;
  std::size_t min = 0, max = 0;
  double avg = 0.0;
};

/// min/avg/max of queries_asked per (kb, distribution, case, strategy); error rows skipped.
std::vector<SummaryCell> summarize(const std::vector<ExperimentRow>& rows);
std::string format_summary(const std::vector<SummaryCell>& cells);

/// One-sided sign test: probability of at least `wins` successes out of `trials` fair coin flips.
double sign_test_p(std::size_t wins, std::size_t trials);

}  // namespace seqdiag
