#include "seqdiag/json_io.hpp"

#include <fstream>
#include <sstream>

namespace seqdiag {

namespace {

void check_schema(const json& j, const char* what) {
  if (!j.is_object()) throw DocumentError(std::string(what) + " must be a JSON object");
  if (!j.contains("schema")) throw DocumentError(std::string(what) + " lacks the \"schema\" field");
  if (j.at("schema") != kSchemaVersion)
    throw DocumentError(std::string(what) + " has unsupported schema " + j.at("schema").dump());
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DocumentError(std::string(what) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DocumentError(std::string(what) + ": " + e.what());
  }
}

std::map<std::string, double> prob_map(const json& j) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) out[k] = v.get<double>();
  return out;
}

json belief_json(const std::vector<BeliefEntry>& entries, const DiagnosisSource& src, const KnowledgeBase* kb) {
  json out = json::array();
  for (const auto& e : entries) {
    json d = {{"label", e.label}, {"probability", e.probability}};
    json axioms = json::array();
    const auto ids = src.axiom_ids(e.axioms);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      json a = {{"id", ids[k]}};
      if (kb) a["text"] = axiom_text(kb->axioms.at(e.axioms[k]));
      axioms.push_back(std::move(a));
    }
    d["axioms"] = std::move(axioms);
    out.push_back(std::move(d));
  }
  return out;
}

json labels(const std::vector<std::string>& ls) { return json(ls); }

json step_json(const TranscriptStep& s, const DiagnosisSource& src, const KnowledgeBase* kb) {
  return {{"query", sentences_json(s.query)},
          {"dx", labels(s.dx)},
          {"dnx", labels(s.dnx)},
          {"dz", labels(s.dz)},
          {"scores", {{"entropy", s.entropy_score}, {"split", s.split_score}}},
          {"answer", to_string(s.answer)},
          {"belief_before", belief_json(s.belief_before, src, kb)},
          {"belief_after", belief_json(s.belief_after, src, kb)}};
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DocumentError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

FaultProfile profile_from_json(const json& j) {
  check_schema(j, "profile");
  return guarded("profile", [&] {
    FaultProfile p;
    if (j.contains("elements")) p.element_probs = prob_map(j.at("elements"));
    if (j.contains("axiom_overrides")) p.axiom_overrides = prob_map(j.at("axiom_overrides"));
    p.validate();
    return p;
  });
}

json to_json(const FaultProfile& p) {
  return {{"schema", kSchemaVersion}, {"elements", p.element_probs}, {"axiom_overrides", p.axiom_overrides}};
}

FaultProfile load_profile_file(const std::string& path) { return profile_from_json(read_json_file(path)); }

json to_json(const SessionConfig& c) {
  json j = {{"n", c.n},
            {"sigma", c.sigma},
            {"strategy", c.strategy.name()},
            {"seed", c.strategy.seed},
            {"max_queries", c.max_queries},
            {"stop_rule", to_string(c.stop_rule)}};
  j["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
  return j;
}

SessionConfig session_config_from_json(const json& j, SessionConfig base) {
  return guarded("session config", [&] {
    SessionConfig c = std::move(base);
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    std::uint64_t seed = c.strategy.seed;
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("strategy")) c.strategy = Strategy::parse(j.at("strategy").get<std::string>(), seed);
    c.strategy.seed = seed;
    if (j.contains("gamma") && !j.at("gamma").is_null()) c.gamma = j.at("gamma").get<double>();
    if (j.contains("max_queries")) c.max_queries = j.at("max_queries").get<std::size_t>();
    if (j.contains("stop_rule")) c.stop_rule = parse_stop_rule(j.at("stop_rule").get<std::string>());
    c.validate();
    return c;
  });
}

json sentences_json(const std::vector<Formula>& fs) {
  json out = json::array();
  for (const auto& f : fs) out.push_back(to_string(f));
  return out;
}

std::string axiom_text(const Axiom& ax) {
  std::string out;
  for (std::size_t i = 0; i < ax.formulas.size(); ++i) {
    if (i) out += " ; ";
    out += to_string(ax.formulas[i]);
  }
  return out;
}

json session_state(const Session& s, const KnowledgeBase* kb) {
  const DiagnosisSource& src = s.source();
  json j;
  j["status"] = to_string(s.status());
  j["queries_asked"] = s.queries_asked();
  j["config"] = to_json(s.config());
  j["leading"] = belief_json(s.belief_entries(), src, kb);
  if (s.running()) {
    const Partition& p = s.current();
    auto names = [&](const std::vector<std::size_t>& idx) {
      json a = json::array();
      for (auto i : idx) a.push_back(src.label(s.leading()[i].axioms));
      return a;
    };
    j["query"] = {{"sentences", sentences_json(p.query)},
                  {"dx", names(p.dx)},
                  {"dnx", names(p.dnx)},
                  {"dz", names(p.dz)},
                  {"scores", {{"entropy", entropy_score(p, s.belief())}, {"split", split_score(p)}}}};
  } else {
    j["query"] = nullptr;
  }
  json history = json::array();
  for (const auto& step : s.history()) history.push_back(step_json(step, src, kb));
  j["history"] = std::move(history);
  j["result"] = s.running() ? json::array() : belief_json(s.result(), src, kb);
  j["warnings"] = src.warnings();
  return j;
}

json transcript_json(const Session& s, const KnowledgeBase* kb) {
  const DiagnosisSource& src = s.source();
  json j;
  j["schema"] = kSchemaVersion;
  j["config"] = to_json(s.config());
  json steps = json::array();
  for (const auto& step : s.history()) steps.push_back(step_json(step, src, kb));
  j["steps"] = std::move(steps);
  j["status"] = to_string(s.status());
  j["queries_asked"] = s.queries_asked();
  j["result"] = belief_json(s.result(), src, kb);
  j["final_belief"] = belief_json(s.belief_entries(), src, kb);
  return j;
}

json to_json(const GeneratorSpec& g) {
  json patterns = json::array();
  for (const auto& p : g.patterns)
    patterns.push_back({{"name", p.name}, {"kind", to_string(p.kind)}, {"probability", p.probability}});
  return {{"schema", kSchemaVersion},
          {"m", g.m},
          {"target_cardinality", g.target_cardinality},
          {"seed", g.seed},
          {"max_attempts", g.max_attempts},
          {"patterns", patterns}};
}

GeneratorSpec generator_spec_from_json(const json& j) {
  if (!j.is_object()) throw DocumentError("generator spec must be a JSON object");
  if (j.contains("schema") && j.at("schema") != kSchemaVersion) throw DocumentError("generator spec: unsupported schema");
  return guarded("generator spec", [&] {
    GeneratorSpec g;
    if (j.contains("m")) g.m = j.at("m").get<std::size_t>();
    if (j.contains("target_cardinality")) g.target_cardinality = j.at("target_cardinality").get<std::size_t>();
    if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_attempts")) g.max_attempts = j.at("max_attempts").get<std::size_t>();
    if (j.contains("patterns")) {
      g.patterns.clear();
      for (const auto& p : j.at("patterns")) {
        FaultPattern fp;
        fp.kind = parse_pattern_kind(p.contains("kind") ? p.at("kind").get<std::string>() : p.at("name").get<std::string>());
        fp.name = p.contains("name") ? p.at("name").get<std::string>() : to_string(fp.kind);
        fp.probability = p.at("probability").get<double>();
        g.patterns.push_back(std::move(fp));
      }
    }
    g.validate();
    return g;
  });
}

json to_json(const TaxonomySpec& t) {
  return {{"modules", t.modules},
          {"axioms_per_module", t.axioms_per_module},
          {"max_children", t.max_children},
          {"tagged_share", t.tagged_share},
          {"seed", t.seed}};
}

TaxonomySpec taxonomy_spec_from_json(const json& j) {
  return guarded("taxonomy spec", [&] {
    TaxonomySpec t;
    if (j.contains("modules")) t.modules = j.at("modules").get<std::size_t>();
    if (j.contains("axioms_per_module")) t.axioms_per_module = j.at("axioms_per_module").get<std::size_t>();
    if (j.contains("max_children")) t.max_children = j.at("max_children").get<std::size_t>();
    if (j.contains("tagged_share")) t.tagged_share = j.at("tagged_share").get<double>();
    if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
    return t;
  });
}

json to_json(const ExperimentConfig& c) {
  json dists = json::array(), cases = json::array(), kbs = json::array(), gens = json::array();
  for (auto d : c.distributions) dists.push_back(to_string(d));
  for (auto k : c.cases) cases.push_back(to_string(k));
  for (const auto& k : c.kbs) kbs.push_back({{"name", k.name}, {"path", k.path}});
  for (const auto& g : c.generators)
    gens.push_back({{"name", g.name}, {"taxonomy", to_json(g.taxonomy)}, {"spec", to_json(g.spec)}});
  return {{"schema", kSchemaVersion},
          {"seed", c.seed},
          {"trials", c.trials},
          {"sigma", c.sigma},
          {"n", c.n},
          {"strategies", c.strategies},
          {"distributions", dists},
          {"cases", cases},
          {"kbs", kbs},
          {"generators", gens},
          {"gamma", c.gamma},
          {"timing", c.timing},
          {"max_queries", c.max_queries},
          {"diagnosis_pool", c.diagnosis_pool},
          {"threads", c.threads}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
  check_schema(j, "experiment config");
  return guarded("experiment config", [&] {
    ExperimentConfig c;
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("strategies")) c.strategies = j.at("strategies").get<std::vector<std::string>>();
    if (j.contains("distributions")) {
      c.distributions.clear();
      for (const auto& d : j.at("distributions")) c.distributions.push_back(parse_prior_kind(d.get<std::string>()));
    }
    if (j.contains("cases")) {
      c.cases.clear();
      for (const auto& k : j.at("cases")) c.cases.push_back(parse_case_kind(k.get<std::string>()));
    }
    if (j.contains("kbs"))
      for (const auto& k : j.at("kbs")) c.kbs.push_back({k.at("name").get<std::string>(), k.at("path").get<std::string>()});
    if (j.contains("generators"))
      for (const auto& g : j.at("generators")) {
        GeneratorEntry e;
        e.name = g.at("name").get<std::string>();
        if (g.contains("taxonomy")) e.taxonomy = taxonomy_spec_from_json(g.at("taxonomy"));
        if (g.contains("spec")) e.spec = generator_spec_from_json(g.at("spec"));
        c.generators.push_back(std::move(e));
      }
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("timing")) c.timing = j.at("timing").get<bool>();
    if (j.contains("max_queries")) c.max_queries = j.at("max_queries").get<std::size_t>();
    if (j.contains("diagnosis_pool")) c.diagnosis_pool = j.at("diagnosis_pool").get<std::size_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
    c.validate();
    return c;
  });
}

json inject_sidecar(const InjectionResult& r) {
  json target = json::array();
  for (auto i : r.target) target.push_back(r.faulty.axioms.at(i).id);
  json repair = json::array();
  for (const auto& ax : r.repair) repair.push_back({{"id", ax.id}, {"text", axiom_text(ax)}});
  json mins = json::array();
  for (const auto& d : r.min_cardinality_diagnoses) {
    json ids = json::array();
    for (auto i : d) ids.push_back(r.faulty.axioms.at(i).id);
    mins.push_back(std::move(ids));
  }
  return {{"schema", kSchemaVersion},
          {"target", target},
          {"repair", repair},
          {"min_cardinality_diagnoses", mins},
          {"injections", r.injections},
          {"attempts", r.attempts}};
}

}  // namespace seqdiag
