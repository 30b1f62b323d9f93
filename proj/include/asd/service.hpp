#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "asd/dialog_engine.hpp"

namespace httplib {
class Server;
}

namespace asd {

struct SymptomReport {
  DialogStatus status = DialogStatus::Active;
  std::vector<SymptomAssignment> explicit_symptoms;
  std::vector<SymptomId> confirmed;
  std::vector<SymptomId> denied;
  std::vector<SymptomId> not_sure;
  int turns = 0;
};

/// What a client sees after each call.
struct SessionView {
  std::string id;
  DialogStatus status = DialogStatus::Active;
  std::optional<SymptomId> question;
  std::optional<SymptomReport> report;  // set once the session is terminal
  int turn = 0;
};

/// Live dialogs with a human in the simulator's seat. Sessions live in memory
/// and expire after a period without requests. Each session has its own agent
/// instance; requests on one session are serialized.
class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  struct Options {
    int tolr = 10;
    std::chrono::seconds idle_expiry = std::chrono::minutes(30);
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
  };

  SessionManager(std::vector<std::string> symptoms, AgentFactory factory, Options options);

  /// Throws UnknownSymptom or InvalidArgument (empty list).
  SessionView create(const std::vector<std::pair<std::string, bool>>& explicit_symptoms);
  /// Throws UnknownSession, SessionTerminal or NoPendingQuestion.
  SessionView answer(const std::string& id, UserAction reply);
  /// Partial report while Active.
  SymptomReport report(const std::string& id);

  const std::vector<std::string>& symptoms() const { return symptoms_; }
  std::size_t size();
  /// Drops sessions idle for longer than the expiry.
  void expire_idle();

  nlohmann::json view_to_json(const SessionView& v) const;
  nlohmann::json report_to_json(const SymptomReport& r) const;

 private:
  struct Session {
    Session(DialogSession d, std::unique_ptr<Agent> a, Clock::time_point t)
        : dialog(std::move(d)), agent(std::move(a)), last_used(t) {}
    std::mutex mutex;
    DialogSession dialog;
    std::unique_ptr<Agent> agent;
    Clock::time_point last_used;
  };

  std::shared_ptr<Session> find(const std::string& id);
  SessionView view_of(const std::string& id, Session& s) const;
  SymptomReport build_report(const Session& s) const;
  std::string new_token();

  std::vector<std::string> symptoms_;
  AgentFactory factory_;
  Options options_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
};

UserAction parse_reply(const std::string& s);

/// POST /sessions, POST /sessions/{id}/answer, GET /sessions/{id}/report,
/// GET /symptoms, with CORS headers for the given origin.
void mount_routes(httplib::Server& server, SessionManager& manager, const std::string& cors_origin = "*");

}  // namespace asd
