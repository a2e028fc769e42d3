#include "seqdiag/server.hpp"

#include <condition_variable>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "seqdiag/diagnosis.hpp"
#include "seqdiag/faultgen.hpp"

namespace seqdiag {

struct SessionService::Entry {
  std::mutex mutex;
  std::condition_variable cv;
  std::uint64_t version = 1;
  bool computing = false;
  std::string error;
  std::shared_ptr<const KnowledgeBase> kb;
  std::unique_ptr<Session> session;
  json last = json::object();
};

json error_body(const std::string& code, const std::string& message, const json& detail) {
  return {{"code", code}, {"message", message}, {"detail", detail}};
}

namespace {

Reply fail(int status, const std::string& code, const std::string& message, const json& detail = json::object()) {
  return {status, error_body(code, message, detail)};
}

Answer parse_answer(const json& j) {
  if (!j.is_string()) throw std::invalid_argument("answer must be a string");
  const auto s = j.get<std::string>();
  if (s == "yes") return Answer::Yes;
  if (s == "no") return Answer::No;
  if (s == "unknown") return Answer::Unknown;
  throw std::invalid_argument("answer must be yes, no or unknown");
}

FaultProfile request_profile(const json& request, const KnowledgeBase& kb) {
  if (!request.contains("profile") || request.at("profile").is_null())
    return sample_profile(PriorDistribution::uniform(), element_names(kb), 0);
  json p = request.at("profile");
  if (p.is_object() && !p.contains("schema")) p["schema"] = kSchemaVersion;
  return profile_from_json(p);
}

}  // namespace

SessionService::SessionService(ServiceOptions options) : options_(options) {}

SessionService::~SessionService() = default;

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Reply SessionService::projection(const std::string& id, Entry& e, std::unique_lock<std::mutex>& lock, bool wait) {
  if (wait) e.cv.wait_for(lock, options_.wait, [&] { return !e.computing; });
  json body = e.last;
  body["id"] = id;
  body["version"] = e.version;
  if (e.computing) {
    body["status"] = "computing";
    body["query"] = nullptr;
  } else if (!e.error.empty()) {
    body["status"] = "error";
    body["error"] = e.error;
  }
  return {200, std::move(body)};
}

namespace {

/// Runs fn on a detached worker that owns the entry, then publishes the new projection.
template <class E, class F>
void launch(std::shared_ptr<E> entry, F fn) {
  entry->computing = true;
  std::thread([entry, fn = std::move(fn)]() mutable {
    std::string error;
    json state;
    try {
      fn(*entry);
      state = session_state(*entry->session, entry->kb.get());
    } catch (const std::exception& ex) {
      error = ex.what();
    }
    std::lock_guard lock(entry->mutex);
    if (error.empty()) entry->last = std::move(state);
    entry->error = std::move(error);
    entry->computing = false;
    entry->cv.notify_all();
  }).detach();
}

}  // namespace

Reply SessionService::create(const json& request) {
  if (!request.is_object()) return fail(400, "bad_request", "request body must be a JSON object");
  if (!request.contains("kb_text") || !request.at("kb_text").is_string())
    return fail(400, "bad_request", "kb_text is required");

  KnowledgeBase kb;
  try {
    kb = parse_kb_unchecked(request.at("kb_text").get<std::string>());
  } catch (const KbSyntaxError& e) {
    return fail(400, "parse_error", e.what(), {{"line", e.line()}, {"column", e.column()}});
  } catch (const KbValidationError& e) {
    return fail(400, "validation_error", e.what());
  }

  SessionConfig config;
  std::vector<double> probs;
  try {
    check_admissible(kb);
    config = session_config_from_json(request);
    probs = axiom_probabilities(kb, request_profile(request, kb));
  } catch (const KbUnsatisfiableError& e) {
    return fail(400, "validation_error", e.what());
  } catch (const std::exception& e) {
    return fail(400, "bad_request", e.what());
  }

  auto entry = std::make_shared<Entry>();
  entry->kb = std::make_shared<const KnowledgeBase>(kb);
  DiagnosisProblem problem(kb);
  try {
    const AxiomMask all(kb.axioms.size(), true);
    if (!problem.reasoner().violates(all, kb.p_tests, kb.n_tests))
      return fail(422, "conflict_free", "the knowledge base has no conflicts; nothing to debug");
  } catch (const ResourceLimitError& e) {
    return fail(422, "resource_limit", e.what());
  }

  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "s" + std::to_string(++counter_) + "-" +
         std::to_string(mix64(counter_ ^ static_cast<std::uint64_t>(
                                            std::chrono::steady_clock::now().time_since_epoch().count())) %
                        1000000007ULL);
    sessions_[id] = entry;
  }
  std::unique_lock lock(entry->mutex);
  launch(entry, [problem, probs, config](Entry& e) {
    e.session = std::make_unique<Session>(std::make_unique<KbDiagnosisSource>(problem, probs), config);
  });
  Reply r = projection(id, *entry, lock, true);
  r.status = 201;
  return r;
}

Reply SessionService::get(const std::string& id) {
  auto e = find(id);
  if (!e) return fail(404, "not_found", "unknown session " + id);
  std::unique_lock lock(e->mutex);
  return projection(id, *e, lock, false);
}

Reply SessionService::answer(const std::string& id, const json& request) {
  auto e = find(id);
  if (!e) return fail(404, "not_found", "unknown session " + id);
  if (!request.is_object() || !request.contains("answer")) return fail(400, "bad_request", "answer is required");
  Answer a;
  try {
    a = parse_answer(request.at("answer"));
  } catch (const std::exception& ex) {
    return fail(400, "bad_request", ex.what());
  }
  std::unique_lock lock(e->mutex);
  if (request.contains("version") && !request.at("version").is_null()) {
    const json& v = request.at("version");
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::uint64_t>() != e->version)
      return fail(409, "stale_version", "session has moved on", {{"version", e->version}});
  }
  if (e->computing) return fail(409, "computing", "a previous request is still being processed", {{"version", e->version}});
  if (!e->session || !e->session->running() || !e->error.empty())
    return fail(409, "not_running", "session is not running", {{"version", e->version}});
  ++e->version;
  launch(e, [a](Entry& en) { en.session->answer(a); });
  return projection(id, *e, lock, true);
}

Reply SessionService::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  sessions_.erase(id);
  return {204, nullptr};
}

void SessionService::wait_idle(const std::string& id) {
  auto e = find(id);
  if (!e) return;
  std::unique_lock lock(e->mutex);
  e->cv.wait(lock, [&] { return !e->computing; });
}

// ---------------------------------------------------------------------------------------

void install_routes(httplib::Server& svr, SessionService& service, const std::string& static_dir) {
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), "application/json");
  };
  auto body_of = [](const httplib::Request& req, json& out) {
    try {
      out = req.body.empty() ? json::object() : json::parse(req.body);
      return true;
    } catch (const json::parse_error&) {
      return false;
    }
  };
  const Reply bad_json{400, error_body("bad_request", "request body is not valid JSON")};

  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  svr.Post("/api/v1/sessions", [&service, send, body_of, bad_json](const httplib::Request& req, httplib::Response& res) {
    json body;
    send(res, body_of(req, body) ? service.create(body) : bad_json);
  });
  svr.Get(R"(/api/v1/sessions/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get(req.matches[1]));
  });
  svr.Delete(R"(/api/v1/sessions/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.remove(req.matches[1]));
  });
  svr.Post(R"(/api/v1/sessions/([^/]+)/answer)",
           [&service, send, body_of, bad_json](const httplib::Request& req, httplib::Response& res) {
             json body;
             send(res, body_of(req, body) ? service.answer(req.matches[1], body) : bad_json);
           });
  if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) svr.set_mount_point("/", static_dir);
}

void serve(const std::string& host, int port, const std::string& static_dir) {
  SessionService service;
  httplib::Server svr;
  install_routes(svr, service, static_dir);
  if (!svr.bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  svr.listen_after_bind();
}

}  // namespace seqdiag
