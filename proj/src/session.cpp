#include "seqdiag/session.hpp"

#include <algorithm>
#include <stdexcept>

namespace seqdiag {

void SessionConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma must lie in (0,1]");
  if (gamma && !(*gamma > 0.0 && *gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0,1]");
}

const char* to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running: return "running";
    case SessionStatus::StoppedThreshold: return "stopped_threshold";
    case SessionStatus::StoppedNoQuery: return "stopped_no_query";
    case SessionStatus::StoppedBudget: return "stopped_budget";
  }
  return "?";
}

StopRule parse_stop_rule(const std::string& s) {
  if (s == "gap") return StopRule::Gap;
  if (s == "top1") return StopRule::Top1;
  throw std::invalid_argument("unknown stop rule '" + s + "' (expected gap|top1)");
}

const char* to_string(StopRule r) { return r == StopRule::Gap ? "gap" : "top1"; }

// ---------------------------------------------------------------------------------------

KbDiagnosisSource::KbDiagnosisSource(DiagnosisProblem problem, std::vector<double> axiom_probs)
    : problem_(std::move(problem)), probs_(std::move(axiom_probs)) {
  if (probs_.size() != problem_.size()) throw std::invalid_argument("one probability per axiom expected");
}

std::vector<Diagnosis> KbDiagnosisSource::leading(std::size_t n) {
  HsTreeStats st;
  auto out = leading_diagnoses(problem_, probs_, n, &st);
  conflicts_ = st.conflicts;
  for (auto& w : st.warnings)
    if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(std::move(w));
  engine_.reset();
  return out;
}

QueryEngine& KbDiagnosisSource::engine_for(const std::vector<Diagnosis>& leading) {
  auto sets = axiom_sets(leading);
  if (!engine_ || engine_->leading() != sets) engine_ = std::make_unique<QueryEngine>(problem_, std::move(sets));
  return *engine_;
}

Partition KbDiagnosisSource::classify(const std::vector<Diagnosis>& leading, const std::vector<Formula>& query) {
  return engine_for(leading).classify(query);
}

Partition KbDiagnosisSource::select(const std::vector<Diagnosis>& leading, const Belief& belief,
                                    const SessionConfig& config, const std::set<std::string>& excluded) {
  QueryEngine& e = engine_for(leading);
  if (config.gamma) return e.select_ckk(belief, *config.gamma, excluded);
  return e.select(belief, config.strategy, excluded);
}

void KbDiagnosisSource::commit(const std::vector<Formula>& query, Answer answer) {
  auto add = [](std::vector<Formula>& list, const Formula& f) {
    if (std::find(list.begin(), list.end(), f) == list.end()) list.push_back(f);
  };
  if (answer == Answer::Yes)
    for (const auto& q : query) add(problem_.p_tests, q);
  else if (answer == Answer::No)
    add(problem_.n_tests, Formula::conjunction(query));
  engine_.reset();
}

Oracle simulated_oracle(const KnowledgeBase& target_kb) {
  auto reasoner = std::make_shared<KbReasoner>(target_kb);
  auto p = std::make_shared<std::vector<Formula>>(target_kb.p_tests);
  const AxiomMask all(target_kb.axioms.size(), true);
  return [reasoner, p, all](const Partition& part, const std::vector<Diagnosis>&) {
    return reasoner->entails_all(all, *p, part.query) ? Answer::Yes : Answer::No;
  };
}

// ---------------------------------------------------------------------------------------

bool stop_check(const Belief& belief, double sigma, StopRule rule) {
  if (belief.size() <= 1) return true;
  Belief sorted = belief;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (rule == StopRule::Top1) return sorted[0] > sigma;
  return sorted[0] - sorted[1] > sigma;
}

Session::Session(std::unique_ptr<DiagnosisSource> source, SessionConfig config)
    : source_(std::move(source)), config_(std::move(config)) {
  config_.validate();
  advance();
}

std::vector<BeliefEntry> Session::belief_entries() const {
  std::vector<BeliefEntry> out;
  for (std::size_t i = 0; i < leading_.size(); ++i)
    out.push_back({leading_[i].axioms, source_->label(leading_[i].axioms), belief_.at(i)});
  return out;
}

std::vector<BeliefEntry> Session::result() const {
  std::vector<BeliefEntry> out;
  if (belief_.empty()) return out;
  const double top = *std::max_element(belief_.begin(), belief_.end());
  for (const auto& e : belief_entries())
    if (e.probability >= top - 1e-12) out.push_back(e);
  return out;
}

Belief Session::replay(const std::vector<Diagnosis>& leading) {
  Belief b;
  for (const auto& d : leading) b.push_back(d.prior);
  b = normalize(std::move(b));
  for (const auto& [query, ans] : answered_) b = bayes_update(b, source_->classify(leading, query), ans);
  return b;
}

bool Session::stop_check() const { return seqdiag::stop_check(belief_, config_.sigma, config_.stop_rule); }

void Session::pick_query() {
  current_ = {};
  if (stop_check()) {
    status_ = SessionStatus::StoppedThreshold;
    return;
  }
  if (asked_ >= config_.max_queries) {
    status_ = SessionStatus::StoppedBudget;
    return;
  }
  while (true) {
    current_ = source_->select(leading_, belief_, config_, excluded_);
    if (current_.empty()) {
      status_ = SessionStatus::StoppedNoQuery;
      return;
    }
    // A query the user could not answer earlier is not posed again.
    if (!unknown_queries_.count(fingerprint(current_.query))) return;
    excluded_.insert(current_.key());
  }
}

void Session::advance() {
  leading_ = source_->leading(config_.n);
  if (leading_.empty()) throw ContradictoryAnswerError("no diagnosis is consistent with the answers given");
  belief_ = replay(leading_);
  for (std::size_t i = 0; i < leading_.size(); ++i) leading_[i].probability = belief_[i];
  excluded_.clear();
  pick_query();
}

void Session::answer(Answer a) {
  if (!running()) throw std::logic_error("session is not running");
  TranscriptStep step;
  step.partition = current_;
  step.query = current_.query;
  for (auto i : current_.dx) step.dx.push_back(source_->label(leading_[i].axioms));
  for (auto i : current_.dnx) step.dnx.push_back(source_->label(leading_[i].axioms));
  for (auto i : current_.dz) step.dz.push_back(source_->label(leading_[i].axioms));
  step.entropy_score = entropy_score(current_, belief_);
  step.split_score = split_score(current_);
  step.answer = a;
  step.belief_before = belief_entries();
  step.belief_after = step.belief_before;
  if (a != Answer::Unknown) {
    const Belief after = bayes_update(belief_, current_, a);
    for (std::size_t i = 0; i < after.size(); ++i) step.belief_after[i].probability = after[i];
  }
  ++asked_;
  history_.push_back(step);

  if (a == Answer::Unknown) {
    unknown_queries_.insert(fingerprint(current_.query));
    excluded_.insert(current_.key());
    pick_query();
    return;
  }
  source_->commit(current_.query, a);
  answered_.emplace_back(current_.query, a);
  advance();
}

SessionOutcome run_session(std::unique_ptr<DiagnosisSource> source, const Oracle& oracle,
                           const SessionConfig& config) {
  Session s(std::move(source), config);
  while (s.running()) s.answer(oracle(s.current(), s.leading()));
  return {s.result(), s.history(), s.status(), s.queries_asked()};
}

std::vector<Partition> greedy_split_trace(std::unique_ptr<DiagnosisSource> source, const Oracle& oracle,
                                          std::size_t n, std::size_t max_queries) {
  SessionConfig cfg;
  cfg.n = n;
  cfg.sigma = 1.0;
  cfg.strategy = Strategy{Strategy::Kind::Split, 0};
  cfg.max_queries = max_queries;
  auto outcome = run_session(std::move(source), oracle, cfg);
  std::vector<Partition> out;
  for (const auto& step : outcome.transcript) out.push_back(step.partition);
  return out;
}

}  // namespace seqdiag
