#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "seqdiag/experiment.hpp"
#include "seqdiag/faultgen.hpp"
#include "seqdiag/probability.hpp"
#include "seqdiag/session.hpp"

namespace seqdiag {

using json = nlohmann::json;

/// Malformed or out-of-schema document.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// {"schema":1, "elements":{name:p}, "axiom_overrides":{id:p}}
FaultProfile profile_from_json(const json& j);
json to_json(const FaultProfile& p);
FaultProfile load_profile_file(const std::string& path);

json to_json(const SessionConfig& c);
SessionConfig session_config_from_json(const json& j, SessionConfig base = {});

/// Sentences in KB syntax, one string each.
json sentences_json(const std::vector<Formula>& fs);

/// Leading diagnoses, pending query, history and result of a session. With a KB the
/// diagnoses carry their axiom texts.
json session_state(const Session& s, const KnowledgeBase* kb = nullptr);

/// Config, steps and result; written by the session command.
json transcript_json(const Session& s, const KnowledgeBase* kb = nullptr);

json to_json(const GeneratorSpec& g);
GeneratorSpec generator_spec_from_json(const json& j);
json to_json(const TaxonomySpec& t);
TaxonomySpec taxonomy_spec_from_json(const json& j);

json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const json& j);

/// Target ids, repair axioms in KB syntax and the minimum-cardinality diagnoses.
json inject_sidecar(const InjectionResult& r);

/// The text of one axiom line as it would appear in a KB file.
std::string axiom_text(const Axiom& ax);

}  // namespace seqdiag
