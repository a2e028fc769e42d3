// Acceptance checks A1..A10. Prints one PASS/FAIL line per criterion and exits non-zero if
// any fails. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "seqdiag/conflict.hpp"
#include "seqdiag/diagnosis.hpp"
#include "seqdiag/experiment.hpp"
#include "seqdiag/faultgen.hpp"
#include "seqdiag/fixture.hpp"
#include "seqdiag/json_io.hpp"
#include "seqdiag/query.hpp"
#include "seqdiag/reasoner.hpp"
#include "seqdiag/session.hpp"
#include "support/support.hpp"

using namespace seqdiag;
using testsupport::near;

namespace {

constexpr double kTol = 2e-3;        // probabilities and scores
constexpr double kPriorTol = 0.01;   // ex2 priors
constexpr double kA4Tol = 1e-3;      // single axiom probability
constexpr std::size_t kA7Kbs = 200;
constexpr std::size_t kA8Trials = 30;
constexpr double kA8Alpha = 0.05;
constexpr double kA8SoftRatio = 0.7;
constexpr std::size_t kA9Sets = 100;
constexpr double kA9Gamma = 0.1;

/// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::ostringstream info;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<Formula> fs(std::initializer_list<const char*> texts) {
  std::vector<Formula> out;
  for (auto t : texts) out.push_back(parse_formula(t));
  return out;
}

bool contains(const std::vector<Formula>& v, const std::string& text) {
  const Formula f = parse_formula(text);
  return std::find(v.begin(), v.end(), f) != v.end();
}

std::vector<double> uniform_probs(const KnowledgeBase& kb) {
  return axiom_probabilities(kb, load_profile_file(testsupport::data_path("uniform.json")));
}

const std::vector<AxiomSet> kEx1Leading{{0}, {1}, {2}, {3}};

// ---------------------------------------------------------------------------------------

void a1(Check& c) {
  const KnowledgeBase kb = testsupport::load_data_kb("ex1.kb");
  DiagnosisProblem problem(kb);
  c.expect(brute_force_minimal_conflicts(problem) == std::vector<AxiomSet>{{0, 1, 2, 3}}, "conflict {ax1..ax4}");
  const std::vector<AxiomSet> singletons{{0}, {1}, {2}, {3}};
  auto brute = brute_force_minimal_diagnoses(problem);
  std::sort(brute.begin(), brute.end());
  c.expect(brute == singletons, "brute-force diagnoses");
  auto hs = axiom_sets(leading_diagnoses(problem, uniform_probs(kb), 9));
  std::sort(hs.begin(), hs.end());
  c.expect(hs == singletons, "HS-Tree diagnoses");

  const auto vocab = kb.vocabulary();
  SentenceSet bg{kb.background, {}};
  auto row = [&](std::size_t removed) {
    SentenceSet s{kb.background, {}};
    for (std::size_t i = 0; i < kb.axioms.size(); ++i)
      if (i != removed) s.formulas.insert(s.formulas.end(), kb.axioms[i].formulas.begin(), kb.axioms[i].formulas.end());
    return enumerate_entailments(s, vocab, &bg);
  };
  const auto o1 = row(0), o2 = row(1), o3 = row(2), o4 = row(3);
  c.expect(!contains(o1, "B_w") && !contains(o1, "C_w") && !contains(o1, "D_w"), "O1 entails none of B,C,D");
  c.expect(contains(o2, "B_w") && !contains(o2, "C_w"), "O2 entails B only");
  c.expect(contains(o3, "B_w") && contains(o3, "C_w") && !contains(o3, "D_w"), "O3 entails B,C");
  c.expect(contains(o4, "B_w") && contains(o4, "C_w") && contains(o4, "D_w"), "O4 entails B,C,D");
  c.info << "4 singleton diagnoses, 1 conflict";
}

void a2(Check& c) {
  DiagnosisProblem problem(testsupport::load_data_kb("ex1.kb"));
  QueryEngine engine(problem, kEx1Leading);
  auto parts = engine.generate_partitions();
  std::sort(parts.begin(), parts.end(), [](const Partition& a, const Partition& b) { return a.dx.size() > b.dx.size(); });
  c.expect(parts.size() == 3, "three partitions");
  if (parts.size() != 3) return;
  using V = std::vector<std::size_t>;
  c.expect(parts[0].query == fs({"B_w"}) && parts[0].dx == V{1, 2, 3} && parts[0].dnx == V{0}, "Q1");
  c.expect(parts[1].query == fs({"C_w"}) && parts[1].dx == V{2, 3} && parts[1].dnx == V{0, 1}, "Q2");
  c.expect(parts[2].query == fs({"D_w"}) && parts[2].dx == V{3} && parts[2].dnx == V{0, 1, 2}, "Q3");
  for (const auto& p : parts) c.expect(p.dz.empty(), "empty D0");
  const Partition reduced = minimize_query(engine.classify(fs({"B_w", "C_w"})), kEx1Leading, problem);
  c.expect(reduced.query == fs({"C_w"}), "reduced Q2 = {C_w}");
  c.info << "Q1 {B_w}, Q2 {C_w}, Q3 {D_w}";
}

void a3(Check& c) {
  const KnowledgeBase kb = testsupport::load_data_kb("ex1.kb");
  DiagnosisProblem problem(kb);
  const auto leading = leading_diagnoses(problem, uniform_probs(kb), 9);
  Belief belief(4);
  for (const auto& d : leading) belief[d.axioms[0]] = d.probability;
  QueryEngine engine(problem, kEx1Leading);
  const Partition q1 = engine.classify(fs({"B_w"}));
  const Partition q2 = engine.classify(fs({"C_w"}));
  const Partition q3 = engine.classify(fs({"D_w"}));
  const double s1 = entropy_score(q1, belief), s2 = entropy_score(q2, belief), s3 = entropy_score(q3, belief);
  c.expect(near(s1, 0.1887, kTol) && near(s2, 0.0, kTol) && near(s3, 0.1887, kTol), "initial scores");
  const Belief after = bayes_update(belief, q2, Answer::No);
  c.expect(near(after[0], 0.5, kTol) && near(after[1], 0.5, kTol) && near(after[2], 0, kTol) && near(after[3], 0, kTol),
           "belief after Q2=no");
  const double t1 = entropy_score(q1, after), t2 = entropy_score(q2, after), t3 = entropy_score(q3, after);
  c.expect(near(t1, 0.0, kTol) && near(t2, 1.0, kTol) && near(t3, 1.0, kTol), "scores after Q2=no");
  c.info << "sc = " << fmt(s1) << "/" << fmt(s2) << "/" << fmt(s3) << ", after no: " << fmt(t1) << "/" << fmt(t2)
         << "/" << fmt(t3);
}

void a4(Check& c) {
  FaultProfile fp;
  fp.element_probs = {{"subsumes", 0.001}, {"not", 0.01}, {"exists", 0.05}, {"or", 0.001}};
  Axiom ax;
  ax.id = "ax2";
  ax.formulas = {Formula::atom("X")};
  ax.elements = {{"subsumes", 1}, {"not", 1}, {"exists", 2}, {"or", 1}};
  const double p = axiom_fault_probability(ax, fp);
  c.expect(near(p, 0.108, kA4Tol), "p(ax2)");
  c.info << "p(ax2) = " << fmt(p);
}

void a5(Check& c) {
  const auto f = testsupport::ex2_fixture();
  const KnowledgeBase kb = testsupport::load_data_kb("ex2.kb");
  const auto probs = axiom_probabilities(kb, load_profile_file(testsupport::data_path("ex2.json")));
  const std::vector<double> expect_ax{0.0019, 0.1074, 0.012, 0.051, 0.001};
  for (std::size_t i = 0; i < 5; ++i) c.expect(near(probs[i], expect_ax[i], kTol), "p(" + f.ids[i] + ")");

  const Belief prior = normalize(f.priors);
  const std::vector<double> expect_prior{0.0970, 0.5874, 0.0026, 0.3130};
  for (std::size_t i = 0; i < 4; ++i) c.expect(near(prior[i], expect_prior[i], kPriorTol), "prior D" + std::to_string(i + 1));

  const std::vector<double> expect_sc{0.974, 0.151, 0.022, 0.540, 0.151, 0.686, 0.759};
  std::vector<Partition> rows;
  for (const auto& r : f.rows) rows.push_back(Partition::from_sides(r.query, r.sides));
  for (std::size_t i = 0; i < rows.size(); ++i)
    c.expect(near(entropy_score(rows[i], prior), expect_sc[i], kTol), "score " + f.rows[i].name);

  const Belief b3 = bayes_update(prior, rows[2], Answer::Yes);
  const std::vector<double> e3{0.2352, 0, 0.0063, 0.7585};
  for (std::size_t i = 0; i < 4; ++i) c.expect(near(b3[i], e3[i], kTol), "after Q3=yes D" + std::to_string(i + 1));
  const Belief b4 = bayes_update(b3, rows[3], Answer::Yes);
  const std::vector<double> e4{0, 0, 0.0082, 0.9918};
  for (std::size_t i = 0; i < 4; ++i) c.expect(near(b4[i], e4[i], kTol), "after Q4=yes D" + std::to_string(i + 1));
  c.info << "priors " << fmt(prior[0]) << "/" << fmt(prior[1]) << "/" << fmt(prior[2]) << "/" << fmt(prior[3])
         << ", p(D4) after Q3,Q4 = " << fmt(b4[3]);
}

std::vector<std::string> fixture_run(const testsupport::Ex2Fixture& f, const std::string& strategy, double sigma,
                                     SessionOutcome* out = nullptr) {
  SessionConfig cfg;
  cfg.strategy = Strategy::parse(strategy);
  cfg.sigma = sigma;
  auto names = testsupport::ex2_source(f);
  auto o = run_session(testsupport::ex2_source(f), target_side_oracle({1, 3}), cfg);
  std::vector<std::string> seq;
  for (const auto& s : o.transcript) seq.push_back(names->row_name(s.query));
  if (out) *out = std::move(o);
  return seq;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

void a6(Check& c) {
  // The propositional grounding changes the partition table, so the session runs on the
  // transcribed partitions; the grounded run is reported alongside.
  const auto f = testsupport::ex2_fixture();
  SessionOutcome o1, o2, o3;
  const auto e1 = fixture_run(f, "entropy", 1.0, &o1);
  const auto e95 = fixture_run(f, "entropy", 0.95, &o2);
  const auto sp = fixture_run(f, "split", 1.0, &o3);
  const AxiomSet d4{1, 3};
  auto found = [&](const SessionOutcome& o) { return o.result.size() == 1 && o.result[0].axioms == d4; };
  c.expect(e1.size() == 3 && found(o1), "entropy sigma=1 isolates D4 in 3 queries");
  c.expect(e95.size() == 2 && found(o2), "entropy sigma=0.95 stops after 2 answers");
  c.expect(sp == std::vector<std::string>{"Q1", "Q2", "Q4"} && found(o3), "split Q1,Q2,Q4");

  const KnowledgeBase kb = testsupport::load_data_kb("ex2.kb");
  const auto probs = axiom_probabilities(kb, load_profile_file(testsupport::data_path("ex2.json")));
  auto grounded = [&](const std::string& strategy, double sigma) {
    SessionConfig cfg;
    cfg.strategy = Strategy::parse(strategy);
    cfg.sigma = sigma;
    auto o = run_session(std::make_unique<KbDiagnosisSource>(DiagnosisProblem(kb), probs), target_side_oracle(d4), cfg);
    return std::to_string(o.queries) + (found(o) ? "" : "(miss)");
  };
  c.info << "fixture " << join(e1) << " | " << join(e95) << " | " << join(sp) << "; grounded KB queries "
         << grounded("entropy", 1.0) << "/" << grounded("entropy", 0.95) << "/" << grounded("split", 1.0);
}

void a7(Check& c) {
  std::mt19937_64 rng(7);
  testsupport::RandomKbSpec spec;
  spec.atoms = 6;
  spec.min_axioms = 4;
  spec.max_axioms = 12;
  std::size_t kbs = 0, faulty = 0, partitions = 0, sessions = 0;
  while (kbs < kA7Kbs) {
    const KnowledgeBase kb = testsupport::random_kb(rng, spec);
    ++kbs;
    DiagnosisProblem problem(kb);
    const AxiomMask all_mask(kb.axioms.size(), true);
    if (!problem.reasoner().violates(all_mask, {}, {})) continue;
    ++faulty;
    std::vector<double> probs;
    for (std::size_t i = 0; i < kb.axioms.size(); ++i) probs.push_back(0.005 + 0.01 * static_cast<double>(rng() % 20));
    const std::string tag = "kb#" + std::to_string(kbs) + " ";

    // HS-Tree top-n against truth-table enumeration.
    const std::size_t n = 1 + rng() % 9;
    const auto leading = leading_diagnoses(problem, probs, n);
    const auto brute = testsupport::tt_minimal_diagnoses(kb, {}, {});
    c.expect(leading.size() == std::min(n, brute.size()), tag + "leading size");
    double weakest = 1.0;
    for (const auto& d : leading) {
      c.expect(std::find(brute.begin(), brute.end(), d.axioms) != brute.end(), tag + "leading not minimal");
      weakest = std::min(weakest, diagnosis_prior(d.axioms, probs));
    }
    for (const auto& b : brute) {
      const bool in = std::any_of(leading.begin(), leading.end(), [&](const Diagnosis& d) { return d.axioms == b; });
      if (!in) c.expect(diagnosis_prior(b, probs) <= weakest * (1 + 1e-9), tag + "a more probable diagnosis was skipped");
    }

    // QuickXplain: remove-one minimality.
    AxiomSet all(kb.axioms.size());
    std::iota(all.begin(), all.end(), 0);
    const auto conflict = find_conflict(all, problem);
    c.expect(conflict.has_value() && check_conflict(*conflict, problem), tag + "conflict");
    if (conflict)
      for (std::size_t k = 0; k < conflict->size(); ++k) {
        AxiomSet fewer = *conflict;
        fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(k));
        c.expect(!check_conflict(fewer, problem), tag + "conflict not minimal");
      }

    // Minimized queries: irreducible and partition-preserving.
    const auto lead9 = leading_diagnoses(problem, probs, 9);
    QueryEngine engine(problem, axiom_sets(lead9));
    for (const auto& part : engine.generate_partitions()) {
      ++partitions;
      c.expect(engine.classify(part.query).key() == part.key(), tag + "minimized query changes the partition");
      for (std::size_t k = 0; part.query.size() > 1 && k < part.query.size(); ++k) {
        auto fewer = part.query;
        fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(k));
        c.expect(engine.classify(fewer).key() != part.key(), tag + "minimized query reducible");
      }
    }

    // The target's own oracle never eliminates it.
    if (lead9.size() >= 2) {
      const AxiomSet target = lead9[rng() % lead9.size()].axioms;
      const Oracle oracle = target_side_oracle(target);
      for (const char* strategy : {"entropy", "split"}) {
        SessionConfig cfg;
        cfg.strategy = Strategy::parse(strategy);
        cfg.sigma = 1.0;
        Session s(std::make_unique<KbDiagnosisSource>(problem, probs), cfg);
        bool alive = true;
        while (s.running()) {
          bool seen = false;
          for (std::size_t i = 0; i < s.leading().size(); ++i)
            seen = seen || (s.leading()[i].axioms == target && s.belief()[i] > 0);
          alive = alive && seen;
          s.answer(oracle(s.current(), s.leading()));
        }
        const auto res = s.result();
        alive = alive && std::any_of(res.begin(), res.end(), [&](const BeliefEntry& e) { return e.axioms == target; });
        c.expect(alive, tag + "target eliminated (" + strategy + ")");
        ++sessions;
      }
    }
  }
  c.info << kbs << " KBs (" << faulty << " with conflicts), " << partitions << " partitions, " << sessions << " sessions";
}

void a8(Check& c) {
  ExperimentConfig cfg;
  cfg.seed = 2012;
  cfg.trials = kA8Trials;
  cfg.sigma = 0.85;
  cfg.n = 9;
  cfg.strategies = {"entropy", "split"};
  cfg.distributions = {PriorKind::Moderate};
  cfg.cases = {CaseKind::Good};
  GeneratorEntry g;
  g.name = "taxonomy";
  g.taxonomy.modules = 3;
  g.taxonomy.axioms_per_module = 8;
  g.taxonomy.seed = 11;
  g.spec.m = 6;
  g.spec.target_cardinality = 2;
  cfg.generators = {g};

  // The generator contract for the trials the runner will draw: at least six minimal
  // diagnoses, all minimum-cardinality ones of size two.
  const KnowledgeBase base = generate_taxonomy(g.taxonomy);
  std::size_t min_diagnoses = SIZE_MAX;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    GeneratorSpec spec = g.spec;
    spec.seed = mix64(trial_seed(cfg.seed, g.name, PriorKind::Moderate, CaseKind::Good, t) ^ 0x51ULL);
    const InjectionResult r = inject_faults(base, spec);
    DiagnosisProblem p(r.faulty);
    const auto all = leading_diagnoses(p, std::vector<double>(r.faulty.axioms.size(), 0.01), 200);
    min_diagnoses = std::min(min_diagnoses, all.size());
    c.expect(r.target.size() == 2, "target cardinality");
  }
  c.expect(min_diagnoses >= 6, "at least six minimal diagnoses");

  const auto rows = run_experiment(cfg, ".");
  std::vector<std::size_t> ent(cfg.trials), spl(cfg.trials);
  std::size_t errors = 0;
  for (const auto& r : rows) {
    if (r.stopped_by.rfind("stopped_", 0) != 0) ++errors;
    (r.strategy == "entropy" ? ent : spl).at(r.trial) = r.queries_asked;
  }
  c.expect(errors == 0, "failed trials");
  std::size_t wins = 0, losses = 0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    if (ent[t] < spl[t]) ++wins;
    if (ent[t] > spl[t]) ++losses;
  }
  const double me = std::accumulate(ent.begin(), ent.end(), 0.0) / static_cast<double>(cfg.trials);
  const double ms = std::accumulate(spl.begin(), spl.end(), 0.0) / static_cast<double>(cfg.trials);
  const double p = sign_test_p(wins, wins + losses);
  c.expect(me < ms, "mean entropy < mean split");
  c.expect(p < kA8Alpha, "sign test");
  c.info << cfg.trials << " trials, >=" << min_diagnoses << " diagnoses, mean " << fmt(me, 2) << " vs " << fmt(ms, 2)
         << ", wins " << wins << "/" << wins + losses << ", p=" << fmt(p, 6) << "; ratio " << fmt(me / ms, 2)
         << (me <= kA8SoftRatio * ms ? " <= " : " > ") << kA8SoftRatio << " (reported only)";
}

void a9(Check& c) {
  std::mt19937_64 rng(9);
  testsupport::RandomKbSpec spec;
  spec.atoms = 7;
  spec.min_axioms = 8;
  spec.max_axioms = 12;
  std::size_t sets = 0, below = 0, exhaustive_calls = 0, ckk_calls = 0, size_sum = 0;
  while (sets < kA9Sets) {
    const KnowledgeBase kb = testsupport::random_kb(rng, spec);
    DiagnosisProblem problem(kb);
    if (!problem.reasoner().violates(AxiomMask(kb.axioms.size(), true), {}, {})) continue;
    std::vector<double> probs;
    for (std::size_t i = 0; i < kb.axioms.size(); ++i) probs.push_back(0.005 + 0.01 * static_cast<double>(rng() % 30));
    const auto leading = leading_diagnoses(problem, probs, 9);
    if (leading.size() < 2) continue;
    ++sets;
    size_sum += leading.size();
    const Belief belief = belief_of(leading);
    QueryEngine full(problem, axiom_sets(leading));
    const Partition opt = full.select(belief, Strategy{});
    QueryEngine greedy(problem, axiom_sets(leading));
    const Partition got = greedy.select_ckk(belief, kA9Gamma);
    const double s_opt = opt.empty() ? 1.0 : entropy_score(opt, belief);
    const double s_got = got.empty() ? 1.0 : entropy_score(got, belief);
    const std::string tag = "set#" + std::to_string(sets) + " ";
    if (s_opt < kA9Gamma) {
      ++below;
      c.expect(s_got < kA9Gamma, tag + "threshold missed");
    }
    c.expect(greedy.stats.create_query_calls <= full.stats.create_query_calls, tag + "more create_query calls");
    exhaustive_calls += full.stats.create_query_calls;
    ckk_calls += greedy.stats.create_query_calls;
  }
  c.info << sets << " sets (mean size " << fmt(static_cast<double>(size_sum) / static_cast<double>(sets), 1) << "), "
         << below << " with optimum < " << kA9Gamma << ", create_query calls " << ckk_calls << " vs " << exhaustive_calls;
}

void a10(Check& c) {
  using V = std::vector<std::size_t>;
  auto s = classify_cases({0.25, 0.25, 0.25, 0.25});
  c.expect(s.good == V{0} && s.average == V{1} && s.bad == V{2, 3}, "uniform four");
  s = classify_cases({0.5874, 0.3130, 0.0970, 0.0026});
  c.expect(s.good == V{0} && s.average == V{1} && s.bad == V{2, 3}, "ex2 priors");
  s = classify_cases(std::vector<double>(10, 0.1));
  c.expect(s.good == V{0, 1, 2} && s.average == V{3, 4, 5} && s.bad == V{6, 7, 8, 9}, "uniform ten");
  c.info << "3 belief vectors";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = c.failures.empty();
    failed += ok ? 0 : 1;
    std::cout << name << (std::string(name).size() < 3 ? "  " : " ") << (ok ? "PASS" : "FAIL") << "  " << c.info.str()
              << "  [" << fmt(secs, 2) << "s]\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(c.failures.size(), 5); ++i)
      std::cout << "      - " << c.failures[i] << '\n';
    if (c.failures.size() > 5) std::cout << "      ... " << c.failures.size() - 5 << " more\n";
  }
  return failed == 0 ? 0 : 1;
}
