#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "seqdiag/json_io.hpp"

namespace httplib {
class Server;
}

namespace seqdiag {

/// Status code plus JSON body, independent of the transport.
struct Reply {
  int status = 200;
  json body;
};

struct ServiceOptions {
  /// How long a mutating request waits for selection before answering "computing".
  std::chrono::milliseconds wait{2000};
};

/// Session registry behind the REST endpoints. Sessions compute asynchronously; every
/// completed mutation bumps the session's version.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  Reply create(const json& request);
  Reply get(const std::string& id);
  Reply answer(const std::string& id, const json& request);
  Reply remove(const std::string& id);

  /// Blocks until the session has no pending computation.
  void wait_idle(const std::string& id);

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id);
  Reply projection(const std::string& id, Entry& e, std::unique_lock<std::mutex>& lock, bool wait);

  ServiceOptions options_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

json error_body(const std::string& code, const std::string& message, const json& detail = json::object());

/// Wires the service into an HTTP server: /api/v1/sessions routes, CORS, and static files
/// from static_dir when it names an existing directory.
void install_routes(httplib::Server& server, SessionService& service, const std::string& static_dir = {});

/// Runs until the process is stopped. Throws std::runtime_error when the address cannot be bound.
void serve(const std::string& host, int port, const std::string& static_dir = {});

}  // namespace seqdiag
