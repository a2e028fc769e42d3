#include "seqdiag/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "seqdiag/diagnosis.hpp"

namespace seqdiag {

CaseKind parse_case_kind(const std::string& s) {
  if (s == "good") return CaseKind::Good;
  if (s == "avg" || s == "average") return CaseKind::Average;
  if (s == "bad") return CaseKind::Bad;
  throw std::invalid_argument("unknown case '" + s + "' (expected good|avg|bad)");
}

const char* to_string(CaseKind c) {
  switch (c) {
    case CaseKind::Good: return "good";
    case CaseKind::Average: return "avg";
    case CaseKind::Bad: return "bad";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma must lie in (0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0,1]");
  for (const auto& s : strategies)
    if (s != "ckk") Strategy::parse(s);
  std::set<std::string> names;
  for (const auto& k : kbs)
    if (!names.insert(k.name).second) throw std::invalid_argument("duplicate kb name '" + k.name + "'");
  for (const auto& g : generators) {
    if (!names.insert(g.name).second) throw std::invalid_argument("duplicate kb name '" + g.name + "'");
    g.spec.validate();
  }
}

std::uint64_t trial_seed(std::uint64_t seed, const std::string& kb, PriorKind dist, CaseKind c, std::size_t trial) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ hash_string(kb));
  h = mix64(h ^ (static_cast<std::uint64_t>(dist) + 1));
  h = mix64(h ^ ((static_cast<std::uint64_t>(c) + 1) << 8));
  h = mix64(h ^ (static_cast<std::uint64_t>(trial) << 16));
  return h;
}

namespace {

struct Source {
  std::string name;
  std::shared_ptr<const KnowledgeBase> kb;  // file KBs
  const GeneratorEntry* generator = nullptr;
  std::shared_ptr<const KnowledgeBase> taxonomy;
};

struct Job {
  const Source* source;
  PriorKind dist;
  CaseKind case_kind;
  std::size_t trial;
};

double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

std::vector<ExperimentRow> run_trial(const ExperimentConfig& cfg, const Job& job) {
  const std::uint64_t seed = trial_seed(cfg.seed, job.source->name, job.dist, job.case_kind, job.trial);
  auto row_for = [&](const std::string& strategy) {
    ExperimentRow r;
    r.kb_name = job.source->name;
    r.distribution = to_string(job.dist);
    r.case_name = to_string(job.case_kind);
    r.strategy = strategy;
    r.trial = job.trial;
    return r;
  };
  auto failed = [&](const std::string& why) {
    std::vector<ExperimentRow> out;
    for (const auto& s : cfg.strategies) {
      auto r = row_for(s);
      r.stopped_by = why;
      out.push_back(std::move(r));
    }
    return out;
  };

  try {
    KnowledgeBase kb;
    const KnowledgeBase* original = nullptr;
    if (job.source->generator) {
      GeneratorSpec spec = job.source->generator->spec;
      spec.seed = mix64(seed ^ 0x51ULL);
      kb = inject_faults(*job.source->taxonomy, spec).faulty;
      original = job.source->taxonomy.get();
    } else {
      kb = *job.source->kb;
    }

    const FaultProfile profile =
        sample_profile(PriorDistribution::of(job.dist), element_names(kb), mix64(seed ^ 0x9eULL));
    const auto probs = axiom_probabilities(kb, profile);
    const DiagnosisProblem problem(kb);
    const auto all = leading_diagnoses(problem, probs, cfg.diagnosis_pool);
    if (all.empty() || (all.size() == 1 && all[0].axioms.empty())) return failed("no_conflict");

    std::vector<double> normalized_probs;
    for (const auto& d : all) normalized_probs.push_back(d.probability);
    const CaseSplit split = classify_cases(normalized_probs);
    const std::vector<std::size_t>& pool = job.case_kind == CaseKind::Good      ? split.good
                                           : job.case_kind == CaseKind::Average ? split.average
                                                                                : split.bad;
    if (pool.empty()) return failed("empty_case");
    const AxiomSet target = all[pool[mix64(seed ^ 0x7aULL) % pool.size()]].axioms;

    std::vector<Axiom> repair;
    if (original)
      for (auto i : target)
        if (!(original->axioms[i] == kb.axioms[i])) repair.push_back(original->axioms[i]);
    const Oracle oracle = simulated_oracle(target_kb(kb, target, repair));

    std::vector<ExperimentRow> out;
    for (const auto& s : cfg.strategies) {
      ExperimentRow r = row_for(s);
      try {
        SessionConfig sc;
        sc.n = cfg.n;
        sc.sigma = cfg.sigma;
        sc.max_queries = cfg.max_queries;
        if (s == "ckk")
          sc.gamma = cfg.gamma;
        else
          sc.strategy = Strategy::parse(s, mix64(seed ^ 0x3cULL));
        // Split and random give no ordering over diagnoses, so they run until one is left.
        if (sc.strategy.kind != Strategy::Kind::Entropy && !sc.gamma) sc.sigma = 1.0;
        const auto start = std::chrono::steady_clock::now();
        auto outcome = run_session(std::make_unique<KbDiagnosisSource>(problem, probs), oracle, sc);
        const auto stop = std::chrono::steady_clock::now();
        r.queries_asked = outcome.queries;
        r.stopped_by = to_string(outcome.status);
        r.target_found = std::any_of(outcome.result.begin(), outcome.result.end(),
                                     [&](const BeliefEntry& e) { return e.axioms == target; });
        if (cfg.timing) r.wall_ms = round_ms(std::chrono::duration<double, std::milli>(stop - start).count());
      } catch (const std::exception&) {
        r.stopped_by = "error";
      }
      out.push_back(std::move(r));
    }
    return out;
  } catch (const GeneratorBudgetError&) {
    return failed("generator_budget");
  } catch (const std::exception&) {
    return failed("error");
  }
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, const std::string& base_dir) {
  config.validate();
  std::vector<Source> sources;
  for (const auto& k : config.kbs) {
    std::filesystem::path p(k.path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    sources.push_back({k.name, std::make_shared<const KnowledgeBase>(load_kb_file(p.string())), nullptr, nullptr});
  }
  for (const auto& g : config.generators)
    sources.push_back({g.name, nullptr, &g, std::make_shared<const KnowledgeBase>(generate_taxonomy(g.taxonomy))});

  std::vector<Job> jobs;
  for (const auto& s : sources)
    for (auto d : config.distributions)
      for (auto c : config.cases)
        for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({&s, d, c, t});

  std::vector<std::vector<ExperimentRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = run_trial(config, jobs[i]);
  };
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(jobs.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }

  std::vector<ExperimentRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return std::tie(a.kb_name, a.distribution, a.case_name, a.strategy, a.trial) <
           std::tie(b.kb_name, b.distribution, b.case_name, b.strategy, b.trial);
  });
  return rows;
}

// ---------------------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_ms(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << ms;
  return os.str();
}

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        rec.push_back(std::move(field));
        out.push_back(std::move(rec));
      }
      rec.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  if (any || !field.empty()) {
    rec.push_back(std::move(field));
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

std::string experiment_csv_header() {
  return "kb_name,distribution,case,strategy,trial,queries_asked,stopped_by,wall_ms,target_found";
}

std::string to_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = experiment_csv_header() + "\r\n";
  for (const auto& r : rows) {
    out += csv_field(r.kb_name) + ',' + csv_field(r.distribution) + ',' + csv_field(r.case_name) + ',' +
           csv_field(r.strategy) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.queries_asked) + ',' +
           csv_field(r.stopped_by) + ',' + format_ms(r.wall_ms) + ',' + (r.target_found ? "true" : "false") +
           "\r\n";
  }
  return out;
}

std::vector<ExperimentRow> parse_csv(const std::string& text) {
  auto records = parse_records(text);
  if (records.empty()) throw std::invalid_argument("CSV header row missing");
  std::string header;
  for (std::size_t i = 0; i < records[0].size(); ++i) header += (i ? "," : "") + records[0][i];
  if (header != experiment_csv_header()) throw std::invalid_argument("unexpected CSV header: " + header);
  std::vector<ExperimentRow> rows;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& f = records[k];
    if (f.size() != 9) throw std::invalid_argument("CSV row " + std::to_string(k) + " has " + std::to_string(f.size()) + " fields");
    ExperimentRow r;
    r.kb_name = f[0];
    r.distribution = f[1];
    r.case_name = f[2];
    r.strategy = f[3];
    r.trial = std::stoull(f[4]);
    r.queries_asked = std::stoull(f[5]);
    r.stopped_by = f[6];
    r.wall_ms = std::stod(f[7]);
    if (f[8] != "true" && f[8] != "false") throw std::invalid_argument("target_found must be true or false");
    r.target_found = f[8] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryCell> summarize(const std::vector<ExperimentRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::string, std::string>, SummaryCell> cells;
  for (const auto& r : rows) {
    if (r.stopped_by.rfind("stopped_", 0) != 0) continue;
    auto& c = cells[{r.kb_name, r.distribution, r.case_name, r.strategy}];
    if (c.count == 0) {
      c = {r.kb_name, r.distribution, r.case_name, r.strategy, 0, r.queries_asked, r.queries_asked, 0.0};
    }
    c.min = std::min(c.min, r.queries_asked);
    c.max = std::max(c.max, r.queries_asked);
    c.avg += static_cast<double>(r.queries_asked);
    ++c.count;
  }
  std::vector<SummaryCell> out;
  for (auto& [k, c] : cells) {
    c.avg /= static_cast<double>(c.count);
    out.push_back(c);
  }
  return out;
}

std::string format_summary(const std::vector<SummaryCell>& cells) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "kb" << std::setw(10) << "dist" << std::setw(6) << "case" << std::setw(10)
     << "strategy" << std::right << std::setw(6) << "n" << std::setw(6) << "min" << std::setw(8) << "avg"
     << std::setw(6) << "max" << '\n';
  for (const auto& c : cells)
    os << std::left << std::setw(16) << c.kb_name << std::setw(10) << c.distribution << std::setw(6) << c.case_name
       << std::setw(10) << c.strategy << std::right << std::setw(6) << c.count << std::setw(6) << c.min
       << std::setw(8) << std::fixed << std::setprecision(2) << c.avg << std::setw(6) << c.max << '\n';
  return os.str();
}

double sign_test_p(std::size_t wins, std::size_t trials) {
  if (wins > trials) throw std::invalid_argument("wins exceed trials");
  // Binomial(trials, 1/2) upper tail in log space.
  double p = 0.0;
  for (std::size_t k = wins; k <= trials; ++k) {
    const double log_c = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
    p += std::exp(log_c - static_cast<double>(trials) * std::log(2.0));
  }
  return std::min(p, 1.0);
}

}  // namespace seqdiag
