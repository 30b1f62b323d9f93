#include "asd/dialog_engine.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "asd/error.hpp"
#include "asd/kgraph.hpp"

namespace asd {

using nlohmann::json;

namespace {

EncoderConfig encoder_of(const Model& m) { return EncoderConfig{m.config.t_max, m.config.n_symptoms}; }

}  // namespace

ModelAgent::ModelAgent(std::shared_ptr<const Model> action_model, std::shared_ptr<const Model> symptom_model,
                       std::shared_ptr<const KnowledgeGraph> kg)
    : action_model_(std::move(action_model)),
      symptom_model_(std::move(symptom_model)),
      kg_(std::move(kg)),
      encoder_(encoder_of(*action_model_)),
      action_(*action_model_, kg_.get()),
      symptom_(*symptom_model_, kg_.get()) {
  if (action_model_->config.task != Task::Action) fail(Errc::InvalidArgument, "action model was trained on the symptom task");
  if (symptom_model_->config.task != Task::Symptom) fail(Errc::InvalidArgument, "symptom model was trained on the action task");
  if (action_model_->config.in_dim != symptom_model_->config.in_dim ||
      action_model_->config.t_max != symptom_model_->config.t_max ||
      action_model_->config.n_symptoms != symptom_model_->config.n_symptoms) {
    fail(Errc::ShapeMismatch, "action and symptom models use different state encodings");
  }
}

AgentDecision ModelAgent::decide(const DialogState& state) {
  DialogState encoded = state;
  encoded.num_turns = std::min(encoded.num_turns, encoder_.t_max);
  const Vec x = vectorize(encoded, encoder_);
  if (argmax(action_.logits(x)) == kConclude) return AgentDecision::Conclude();
  std::vector<bool> mask(state.slots.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = state.slots[i] != SlotStatus::NotQueried;
  return AgentDecision::Query(SymptomId(argmax(masked_logits(symptom_.logits(x), mask))));
}

void RandomAgent::begin_dialog(std::string_view dialog_id) { rng_ = Rng(mix_seed(seed_, hash_string(dialog_id))); }

AgentDecision RandomAgent::decide(const DialogState& state) {
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < state.slots.size(); ++i)
    if (state.slots[i] == SlotStatus::NotQueried) open.push_back(i);
  if (open.empty()) fail(Errc::AllMasked, "no symptom left to query");
  return AgentDecision::Query(SymptomId(open[rng_.below(open.size())]));
}

AgentDecision ScriptedAgent::decide(const DialogState& state) {
  while (next_ < script_.size() && state.known(script_[next_])) ++next_;
  if (next_ < script_.size()) return AgentDecision::Query(script_[next_++]);
  if (conclude_when_done_) return AgentDecision::Conclude();
  for (std::size_t i = 0; i < state.slots.size(); ++i)
    if (state.slots[i] == SlotStatus::NotQueried) return AgentDecision::Query(SymptomId(i));
  fail(Errc::AllMasked, "no symptom left to query");
}

UserAction simulator_reply(const UserGoal& goal, SymptomId symptom) {
  const auto truth = goal.lookup(symptom);
  if (!truth) return UserAction::NotSure;
  return *truth ? UserAction::Confirm : UserAction::Deny;
}

const char* to_string(DialogStatus s) {
  switch (s) {
    case DialogStatus::Active: return "Active";
    case DialogStatus::Concluded: return "Concluded";
    case DialogStatus::TurnLimit: return "TurnLimit";
  }
  return "?";
}

DialogSession::DialogSession(std::vector<SymptomAssignment> explicit_symptoms, std::size_t n_symptoms, int tolr)
    : explicit_(std::move(explicit_symptoms)), state_(DialogState::initial(explicit_, n_symptoms)), tolr_(tolr) {
  if (tolr < 0) fail(Errc::InvalidArgument, "tolr must be non-negative");
}

std::optional<SymptomId> DialogSession::advance(Agent& agent) {
  if (status_ != DialogStatus::Active || pending_) return pending_;
  const bool exhausted =
      std::none_of(state_.slots.begin(), state_.slots.end(), [](SlotStatus s) { return s == SlotStatus::NotQueried; });
  if (state_.num_turns >= tolr_ || exhausted) {
    status_ = DialogStatus::TurnLimit;
    return std::nullopt;
  }
  const AgentDecision d = agent.decide(state_);
  if (d.conclude) {
    status_ = DialogStatus::Concluded;
    return std::nullopt;
  }
  if (d.symptom.value >= state_.slots.size() || state_.known(d.symptom)) {
    fail(Errc::InvalidArgument, "agent queried an already-known or invalid symptom");
  }
  pending_ = d.symptom;
  return pending_;
}

void DialogSession::answer(UserAction reply) {
  if (status_ != DialogStatus::Active) fail(Errc::SessionTerminal, "dialog has already ended");
  if (!pending_) fail(Errc::NoPendingQuestion, "no question is pending");
  const SymptomId s = *pending_;
  state_.slots[s.value] = status_for_reply(reply);
  state_.num_turns += 1;
  state_.agent_action = AgentAction::Request;
  state_.user_action = reply;
  events_.push_back({s, reply});
  pending_.reset();
}

DialogTranscript make_transcript(const UserGoal& goal, const std::vector<TurnEvent>& events, DialogStatus terminal) {
  DialogTranscript t;
  t.goal_id = goal.id;
  t.events = events;
  t.terminal = terminal;
  t.n_queries = events.size();
  t.n_implicit = goal.implicit_symptoms.size();
  for (const auto& e : events) {
    if (goal.is_implicit(e.symptom)) ++t.n_implicit_found;
    else if (!goal.is_explicit(e.symptom)) ++t.n_unrelated;
  }
  return t;
}

DialogTranscript run_dialog(Agent& agent, const UserGoal& goal, int tolr, std::size_t n_symptoms) {
  agent.begin_dialog(goal.id);
  DialogSession session(goal.explicit_symptoms, n_symptoms, tolr);
  while (auto q = session.advance(agent)) session.answer(simulator_reply(goal, *q));
  return make_transcript(goal, session.events(), session.status());
}

DialogMetrics compute_metrics(double n_implicit, double n_implicit_found, double n_unrelated, double n_queries) {
  DialogMetrics m;
  m.hit_rate = n_implicit == 0.0 ? 1.0 : n_implicit_found / n_implicit;
  m.unrelated_rate = n_queries == 0.0 ? 0.0 : n_unrelated / n_queries;
  const double precision = 1.0 - m.unrelated_rate;
  const double denom = m.hit_rate + precision;
  m.f1 = denom == 0.0 ? 0.0 : 2.0 * m.hit_rate * precision / denom;
  return m;
}

DialogMetrics dialog_metrics(const DialogTranscript& t) {
  return compute_metrics(static_cast<double>(t.n_implicit), static_cast<double>(t.n_implicit_found),
                         static_cast<double>(t.n_unrelated), static_cast<double>(t.n_queries));
}

ConversationReport evaluate_conversational(Agent& agent, std::span<const UserGoal> goals, int tolr, std::size_t n_symptoms) {
  if (goals.empty()) fail(Errc::InvalidArgument, "no goals to evaluate");
  ConversationReport r;
  r.tolr = tolr;
  for (const auto& g : goals) {
    ConversationRecord rec;
    rec.transcript = run_dialog(agent, g, tolr, n_symptoms);
    rec.metrics = dialog_metrics(rec.transcript);
    r.mean.hit_rate += rec.metrics.hit_rate;
    r.mean.unrelated_rate += rec.metrics.unrelated_rate;
    r.mean.f1 += rec.metrics.f1;
    r.conversations.push_back(std::move(rec));
  }
  const double n = static_cast<double>(goals.size());
  r.mean.hit_rate /= n;
  r.mean.unrelated_rate /= n;
  r.mean.f1 /= n;
  return r;
}

std::vector<SweepPoint> tolr_sweep(const AgentFactory& factory, std::span<const UserGoal> goals,
                                   std::span<const int> tolr_values, std::size_t n_symptoms) {
  std::vector<SweepPoint> out;
  for (int tolr : tolr_values) {
    if (tolr < 1) fail(Errc::InvalidArgument, "tolr values must be >= 1");
    auto agent = factory();
    const auto r = evaluate_conversational(*agent, goals, tolr, n_symptoms);
    out.push_back({tolr, r.mean.hit_rate, r.mean.unrelated_rate, r.mean.f1});
  }
  return out;
}

std::string report_to_json(const ConversationReport& report, const std::vector<std::string>& symptoms) {
  json convs = json::array();
  for (const auto& c : report.conversations) {
    json events = json::array();
    for (const auto& e : c.transcript.events) events.push_back({{"symptom", symptoms.at(e.symptom.value)}, {"reply", to_string(e.reply)}});
    convs.push_back({{"goal_id", c.transcript.goal_id},
                     {"terminal", to_string(c.transcript.terminal)},
                     {"events", std::move(events)},
                     {"N", c.transcript.n_queries},
                     {"N_u", c.transcript.n_unrelated},
                     {"N_i", c.transcript.n_implicit},
                     {"N_i_found", c.transcript.n_implicit_found},
                     {"hit_rate", c.metrics.hit_rate},
                     {"unrelated_rate", c.metrics.unrelated_rate},
                     {"f1", c.metrics.f1}});
  }
  json j{{"tolr", report.tolr},
         {"n_conversations", report.conversations.size()},
         {"mean_hit_rate", report.mean.hit_rate},
         {"mean_unrelated_rate", report.mean.unrelated_rate},
         {"mean_f1", report.mean.f1},
         {"conversations", std::move(convs)}};
  return j.dump(1) + "\n";
}

std::string sweep_to_csv(const std::vector<SweepPoint>& curve) {
  std::ostringstream os;
  os << "tolr,mean_hit_rate,mean_unrelated_rate,mean_f1\n";
  os << std::setprecision(10);
  for (const auto& p : curve) os << p.tolr << ',' << p.mean_hit_rate << ',' << p.mean_unrelated_rate << ',' << p.mean_f1 << '\n';
  return os.str();
}

std::string sweep_to_table(const std::vector<SweepPoint>& curve) {
  std::ostringstream os;
  os << "TolR   Hit(%)  UnRel(%)   F1(%)\n";
  os << std::fixed << std::setprecision(2);
  for (const auto& p : curve) {
    os << std::setw(4) << p.tolr << "  " << std::setw(7) << 100 * p.mean_hit_rate << "  " << std::setw(8)
       << 100 * p.mean_unrelated_rate << "  " << std::setw(6) << 100 * p.mean_f1 << '\n';
  }
  return os.str();
}

}  // namespace asd
