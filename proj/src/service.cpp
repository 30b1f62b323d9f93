#include "asd/service.hpp"

#include <algorithm>
#include <iomanip>
#include <random>
#include <sstream>

#include <httplib.h>

#include "asd/error.hpp"

namespace asd {

using nlohmann::json;

SessionManager::SessionManager(std::vector<std::string> symptoms, AgentFactory factory, Options options)
    : symptoms_(std::move(symptoms)), factory_(std::move(factory)), options_(std::move(options)) {
  if (options_.tolr < 1) fail(Errc::InvalidArgument, "tolr must be >= 1");
}

std::string SessionManager::new_token() {
  static thread_local std::random_device rd;
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) os << std::hex << std::setw(8) << std::setfill('0') << rd();
  return os.str();
}

SessionView SessionManager::create(const std::vector<std::pair<std::string, bool>>& explicit_symptoms) {
  if (explicit_symptoms.empty()) fail(Errc::InvalidArgument, "at least one explicit symptom is required");
  std::vector<SymptomAssignment> assigned;
  for (const auto& [name, present] : explicit_symptoms) {
    auto it = std::find(symptoms_.begin(), symptoms_.end(), name);
    if (it == symptoms_.end()) fail(Errc::UnknownSymptom, "unknown symptom '" + name + "'");
    const SymptomId id(static_cast<std::size_t>(it - symptoms_.begin()));
    for (const auto& a : assigned)
      if (a.symptom == id) fail(Errc::DuplicateSymptom, "symptom '" + name + "' listed twice");
    assigned.push_back({id, present});
  }
  expire_idle();
  auto session = std::make_shared<Session>(DialogSession(assigned, symptoms_.size(), options_.tolr), factory_(),
                                            options_.now());
  std::string id = new_token();
  std::lock_guard session_lock(session->mutex);
  session->agent->begin_dialog(id);
  session->dialog.advance(*session->agent);
  {
    std::lock_guard lock(mutex_);
    while (sessions_.count(id)) id = new_token();
    sessions_.emplace(id, session);
  }
  return view_of(id, *session);
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(Errc::UnknownSession, "unknown session");
  return it->second;
}

SessionView SessionManager::answer(const std::string& id, UserAction reply) {
  if (reply == UserAction::SelfReport) fail(Errc::InvalidArgument, "reply must be confirm, deny or not_sure");
  expire_idle();
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.now();
  s->dialog.answer(reply);
  s->dialog.advance(*s->agent);
  return view_of(id, *s);
}

SymptomReport SessionManager::report(const std::string& id) {
  expire_idle();
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.now();
  return build_report(*s);
}

std::size_t SessionManager::size() {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionManager::expire_idle() {
  const auto now = options_.now();
  std::lock_guard lock(mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
    // A session with a request in flight is not idle.
    if (session_lock.owns_lock() && now - it->second->last_used > options_.idle_expiry) it = sessions_.erase(it);
    else ++it;
  }
}

SymptomReport SessionManager::build_report(const Session& s) const {
  SymptomReport r;
  r.status = s.dialog.status();
  r.explicit_symptoms = s.dialog.explicit_symptoms();
  r.turns = s.dialog.state().num_turns;
  for (const auto& e : s.dialog.events()) {
    switch (e.reply) {
      case UserAction::Confirm: r.confirmed.push_back(e.symptom); break;
      case UserAction::Deny: r.denied.push_back(e.symptom); break;
      default: r.not_sure.push_back(e.symptom); break;
    }
  }
  return r;
}

SessionView SessionManager::view_of(const std::string& id, Session& s) const {
  SessionView v;
  v.id = id;
  v.status = s.dialog.status();
  v.question = s.dialog.pending();
  v.turn = s.dialog.state().num_turns;
  if (v.status != DialogStatus::Active) v.report = build_report(s);
  return v;
}

json SessionManager::report_to_json(const SymptomReport& r) const {
  auto names = [&](const std::vector<SymptomId>& ids) {
    json a = json::array();
    for (SymptomId s : ids) a.push_back(symptoms_.at(s.value));
    return a;
  };
  json ex = json::array();
  for (const auto& a : r.explicit_symptoms) ex.push_back({{"symptom", symptoms_.at(a.symptom.value)}, {"present", a.present}});
  return {{"status", to_string(r.status)}, {"explicit", std::move(ex)}, {"confirmed", names(r.confirmed)},
          {"denied", names(r.denied)},     {"not_sure", names(r.not_sure)}, {"turns", r.turns}};
}

json SessionManager::view_to_json(const SessionView& v) const {
  json j{{"session_id", v.id}, {"status", to_string(v.status)}, {"turn", v.turn}};
  if (v.question) j["question"] = {{"symptom", symptoms_.at(v.question->value)}, {"index", v.question->value}};
  if (v.report) j["report"] = report_to_json(*v.report);
  return j;
}

UserAction parse_reply(const std::string& s) {
  if (s == "confirm") return UserAction::Confirm;
  if (s == "deny") return UserAction::Deny;
  if (s == "not_sure") return UserAction::NotSure;
  fail(Errc::InvalidArgument, "reply must be confirm, deny or not_sure");
}

namespace {

int http_status(Errc code) {
  switch (code) {
    case Errc::UnknownSession: return 404;
    case Errc::SessionTerminal:
    case Errc::NoPendingQuestion: return 409;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    send_json(res, http_status(e.code()), {{"error", e.what()}, {"code", errc_name(e.code())}});
  } catch (const json::exception& e) {
    send_json(res, 400, {{"error", std::string("malformed request: ") + e.what()}, {"code", "ParseError"}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", e.what()}, {"code", "Internal"}});
  }
}

}  // namespace

void mount_routes(httplib::Server& server, SessionManager& manager, const std::string& cors_origin) {
  server.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/symptoms", [&](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"symptoms", manager.symptoms()}});
  });

  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body);
      std::vector<std::pair<std::string, bool>> explicit_symptoms;
      for (const auto& e : body.at("explicit")) {
        const json& p = e.contains("present") ? e.at("present") : json(true);
        explicit_symptoms.emplace_back(e.at("symptom").get<std::string>(), p.is_boolean() ? p.get<bool>() : p.get<int>() != 0);
      }
      send_json(res, 201, manager.view_to_json(manager.create(explicit_symptoms)));
    });
  });

  server.Post(R"(/sessions/([0-9a-f]+)/answer)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body);
      const UserAction reply = parse_reply(body.at("reply").get<std::string>());
      send_json(res, 200, manager.view_to_json(manager.answer(req.matches[1], reply)));
    });
  });

  server.Get(R"(/sessions/([0-9a-f]+)/report)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const SymptomReport r = manager.report(req.matches[1]);
      send_json(res, 200, {{"status", to_string(r.status)}, {"report", manager.report_to_json(r)}, {"turn", r.turns}});
    });
  });
}

}  // namespace asd
