// Command-line front end: diagnose, session, experiment, inject, serve.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "seqdiag/conflict.hpp"
#include "seqdiag/diagnosis.hpp"
#include "seqdiag/experiment.hpp"
#include "seqdiag/faultgen.hpp"
#include "seqdiag/json_io.hpp"
#include "seqdiag/server.hpp"

using namespace seqdiag;

namespace {

struct Common {
  std::string kb;
  std::string profile;
  std::size_t n = 9;
  double sigma = 0.95;
  std::string strategy = "entropy";
  std::optional<double> gamma;
  std::uint64_t seed = 0;
  std::string out;
  std::string stop_rule = "gap";
  std::size_t max_queries = 100;
};

/// Exit codes: 1 input errors, 2 nothing to debug, 3 contradictory answers.
struct ExitError : std::runtime_error {
  int code;
  ExitError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExitError(1, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KnowledgeBase load_kb(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return parse_kb(text);
  } catch (const KbSyntaxError& e) {
    throw ExitError(1, path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what());
  } catch (const KbValidationError& e) {
    throw ExitError(1, path + ": " + e.what());
  } catch (const KbUnsatisfiableError& e) {
    throw ExitError(1, path + ": " + e.what());
  }
}

std::vector<double> load_probs(const KnowledgeBase& kb, const std::string& profile_path) {
  const FaultProfile profile = profile_path.empty()
                                   ? sample_profile(PriorDistribution::uniform(), element_names(kb), 0)
                                   : load_profile_file(profile_path);
  return axiom_probabilities(kb, profile);
}

bool has_conflict(const DiagnosisProblem& problem) {
  const AxiomMask all(problem.size(), true);
  return problem.reasoner().violates(all, problem.p_tests, problem.n_tests);
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

int cmd_diagnose(const Common& c, bool brute) {
  const KnowledgeBase kb = load_kb(c.kb);
  const auto probs = load_probs(kb, c.profile);
  DiagnosisProblem problem(kb);
  if (!has_conflict(problem)) {
    std::cout << "no conflicts\n";
    return 2;
  }
  HsTreeStats stats;
  const auto ds = leading_diagnoses(problem, probs, c.n, &stats);
  for (const auto& w : stats.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "diagnoses:\n";
  for (const auto& d : ds)
    std::cout << "  " << std::left << std::setw(24) << problem.label(d.axioms) << std::fixed << std::setprecision(4)
              << d.probability << "  (prior " << std::scientific << std::setprecision(4) << d.prior << ")\n"
              << std::defaultfloat;
  std::cout << "conflicts:\n";
  for (const auto& cs : stats.conflicts) std::cout << "  " << problem.label(cs) << '\n';
  if (brute) {
    if (kb.axioms.size() > 20) throw ExitError(1, "brute force is limited to 20 axioms");
    std::cout << "brute-force minimal diagnoses:\n";
    for (const auto& d : brute_force_minimal_diagnoses(problem)) std::cout << "  " << problem.label(d) << '\n';
  }
  return 0;
}

SessionConfig session_config(const Common& c) {
  SessionConfig cfg;
  cfg.n = c.n;
  cfg.sigma = c.sigma;
  cfg.strategy = Strategy::parse(c.strategy, c.seed);
  cfg.gamma = c.gamma;
  cfg.max_queries = c.max_queries;
  cfg.stop_rule = parse_stop_rule(c.stop_rule);
  cfg.validate();
  return cfg;
}

/// Target ids plus repair axioms. JSON sidecars from `inject` carry both; plain files list ids.
KnowledgeBase load_target(const KnowledgeBase& kb, const std::string& path) {
  const std::string text = read_text(path);
  std::vector<std::string> ids;
  std::vector<Axiom> repair;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json j = json::parse(text);
    ids = j.at("target").get<std::vector<std::string>>();
    if (j.contains("repair"))
      for (const auto& r : j.at("repair")) {
        const auto kbtext = "[axioms]\n" + r.at("id").get<std::string>() + " : " + r.at("text").get<std::string>() + "\n";
        repair.push_back(parse_kb_unchecked(kbtext).axioms.at(0));
      }
  } else {
    std::string cleaned = text;
    for (char& ch : cleaned)
      if (ch == ',' || ch == '[' || ch == ']') ch = ' ';
    std::istringstream is(cleaned);
    for (std::string id; is >> id;) ids.push_back(id);
  }
  DiagnosisProblem problem(kb);
  return target_kb(kb, problem.resolve(ids), repair);
}

Answer prompt(const Session& s) {
  const Partition& p = s.current();
  std::cout << "\nIs every sentence below true in the intended model?\n";
  for (const auto& f : p.query) std::cout << "  " << to_string(f) << '\n';
  while (true) {
    std::cout << "[y]es / [n]o / [u]nknown > " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) throw ExitError(1, "input closed before the session finished");
    if (line == "y" || line == "yes") return Answer::Yes;
    if (line == "n" || line == "no") return Answer::No;
    if (line == "u" || line == "unknown") return Answer::Unknown;
  }
}

int cmd_session(const Common& c, const std::string& oracle_kind, const std::string& target_file) {
  const KnowledgeBase kb = load_kb(c.kb);
  const auto probs = load_probs(kb, c.profile);
  DiagnosisProblem problem(kb);
  if (!has_conflict(problem)) {
    std::cout << "no conflicts\n";
    return 2;
  }
  const SessionConfig cfg = session_config(c);
  Oracle oracle;
  if (oracle_kind == "simulated") {
    if (target_file.empty()) throw ExitError(1, "simulated sessions need --target-file");
    oracle = simulated_oracle(load_target(kb, target_file));
  }
  try {
    Session s(std::make_unique<KbDiagnosisSource>(problem, probs), cfg);
    while (s.running()) {
      const Answer a = oracle ? oracle(s.current(), s.leading()) : prompt(s);
      if (oracle) {
        std::cout << "Q" << s.queries_asked() + 1 << ": {";
        std::vector<std::string> qs;
        for (const auto& f : s.current().query) qs.push_back(to_string(f));
        std::cout << join(qs, ", ") << "} -> " << to_string(a) << '\n';
      }
      s.answer(a);
    }
    std::cout << "status: " << to_string(s.status()) << " after " << s.queries_asked() << " queries\n";
    for (const auto& e : s.result())
      std::cout << "diagnosis " << e.label << " p=" << std::fixed << std::setprecision(4) << e.probability << '\n';
    if (!c.out.empty()) write_text_file(c.out, transcript_json(s, &kb).dump(2) + "\n");
  } catch (const ContradictoryAnswerError& e) {
    throw ExitError(3, std::string("answers are contradictory: ") + e.what());
  } catch (const NoDiagnosisError& e) {
    throw ExitError(3, std::string("answers are contradictory: ") + e.what());
  }
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out, bool quiet) {
  const ExperimentConfig cfg = experiment_config_from_json(read_json_file(config_path));
  const auto base = std::filesystem::path(config_path).parent_path().string();
  const auto rows = run_experiment(cfg, base.empty() ? "." : base);
  const std::string csv = to_csv(rows);
  if (out.empty())
    std::cout << csv;
  else
    write_text_file(out, csv);
  if (!quiet) std::cerr << format_summary(summarize(rows));
  return 0;
}

int cmd_inject(const std::string& kb_path, const std::string& spec_path, const std::string& out,
               std::optional<std::size_t> m, std::optional<std::size_t> t, std::optional<std::uint64_t> seed) {
  const KnowledgeBase kb = load_kb(kb_path);
  GeneratorSpec spec = spec_path.empty() ? GeneratorSpec{} : generator_spec_from_json(read_json_file(spec_path));
  if (m) spec.m = *m;
  if (t) spec.target_cardinality = *t;
  if (seed) spec.seed = *seed;
  InjectionResult r;
  try {
    r = inject_faults(kb, spec);
  } catch (const std::invalid_argument& e) {
    throw ExitError(1, e.what());
  } catch (const GeneratorBudgetError& e) {
    throw ExitError(1, e.what());
  }
  if (out.empty()) throw ExitError(1, "--out is required");
  write_text_file(out, serialize_kb(r.faulty));
  write_text_file(out + ".json", inject_sidecar(r).dump(2) + "\n");
  DiagnosisProblem problem(r.faulty);
  std::cout << "wrote " << out << " (" << r.injections << " injections, attempt " << r.attempts << "), target "
            << problem.label(r.target) << '\n';
  return 0;
}

int cmd_serve(const std::string& bind, const std::string& static_dir) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw ExitError(1, "--bind expects host:port");
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw ExitError(1, "invalid port in '" + bind + "'");
  }
  std::cerr << "listening on " << host << ":" << port << '\n';
  try {
    serve(host, port, static_dir);
  } catch (const std::runtime_error& e) {
    throw ExitError(1, e.what());
  }
  return 0;
}

void add_common(CLI::App* app, Common& c, bool kb_required) {
  auto* kb = app->add_option("--kb", c.kb, "Knowledge base file");
  if (kb_required) kb->required()->check(CLI::ExistingFile);
  app->add_option("--profile", c.profile, "Fault profile JSON (default: 0.01 for every element)")
      ->check(CLI::ExistingFile);
  app->add_option("--n", c.n, "Number of leading diagnoses")->capture_default_str();
  app->add_option("--sigma", c.sigma, "Acceptance threshold")->capture_default_str();
  app->add_option("--strategy", c.strategy, "entropy|split|random")->capture_default_str();
  app->add_option("--gamma", c.gamma, "Use the CKK search with this threshold");
  app->add_option("--seed", c.seed, "Seed for the random strategy")->capture_default_str();
  app->add_option("--out", c.out, "Output file");
  app->add_option("--stop-rule", c.stop_rule, "gap|top1")->capture_default_str();
  app->add_option("--max-queries", c.max_queries, "Query budget")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential diagnosis of propositional knowledge bases"};
  app.require_subcommand(1);

  Common diag_opts, sess_opts;
  bool brute = false;
  auto* diagnose = app.add_subcommand("diagnose", "Print leading diagnoses and conflicts");
  add_common(diagnose, diag_opts, true);
  diagnose->add_flag("--brute-force", brute, "Also enumerate every minimal diagnosis");

  std::string oracle_kind = "interactive", target_file;
  auto* session = app.add_subcommand("session", "Run a query session");
  add_common(session, sess_opts, true);
  session->add_option("--oracle", oracle_kind, "interactive|simulated")
      ->check(CLI::IsMember({"interactive", "simulated"}))
      ->capture_default_str();
  session->add_option("--target-file", target_file, "Target diagnosis: ids, or an inject sidecar")
      ->check(CLI::ExistingFile);

  std::string exp_config, exp_out;
  bool quiet = false;
  auto* experiment = app.add_subcommand("experiment", "Run a batch experiment and write CSV");
  experiment->add_option("--config", exp_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out", exp_out, "CSV output (default stdout)");
  experiment->add_flag("--quiet", quiet, "Skip the summary table");

  std::string inj_kb, inj_spec, inj_out;
  std::optional<std::size_t> inj_m, inj_t;
  std::optional<std::uint64_t> inj_seed;
  auto* inject = app.add_subcommand("inject", "Inject faults into a consistent KB");
  inject->add_option("--kb", inj_kb, "Consistent input KB")->required()->check(CLI::ExistingFile);
  inject->add_option("--spec", inj_spec, "Generator spec JSON")->check(CLI::ExistingFile);
  inject->add_option("--out", inj_out, "Faulty KB output; the sidecar goes to <out>.json")->required();
  inject->add_option("--m", inj_m, "Minimum number of minimum-cardinality diagnoses");
  inject->add_option("--t", inj_t, "Target diagnosis cardinality");
  inject->add_option("--seed", inj_seed, "Generator seed");

  std::string bind = "127.0.0.1:8080", static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "Directory served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage problems share exit 1 with other input errors; 2 is reserved for "no conflicts".
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*diagnose) return cmd_diagnose(diag_opts, brute);
    if (*session) return cmd_session(sess_opts, oracle_kind, target_file);
    if (*experiment) return cmd_experiment(exp_config, exp_out, quiet);
    if (*inject) return cmd_inject(inj_kb, inj_spec, inj_out, inj_m, inj_t, inj_seed);
    if (*serve_cmd) return cmd_serve(bind, static_dir);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
