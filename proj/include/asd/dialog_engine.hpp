#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asd/corpus.hpp"
#include "asd/dialog_state.hpp"
#include "asd/neural.hpp"
#include "asd/rng.hpp"

namespace asd {

class KnowledgeGraph;

struct AgentDecision {
  bool conclude = false;
  SymptomId symptom;  // valid when !conclude

  static AgentDecision Conclude() { return {true, SymptomId()}; }
  static AgentDecision Query(SymptomId s) { return {false, s}; }
  bool operator==(const AgentDecision&) const = default;
};

/// Dialog policy. decide() must only query NotQueried symptoms.
class Agent {
 public:
  virtual ~Agent() = default;
  /// Called once before each dialog; stochastic agents reseed from the id.
  virtual void begin_dialog(std::string_view /*dialog_id*/) {}
  virtual AgentDecision decide(const DialogState& state) = 0;
};

/// Action model picks Conclude/Query; the symptom model picks the argmax over
/// NotQueried symptoms. Turn counts beyond the models' t_max are encoded as
/// t_max.
class ModelAgent : public Agent {
 public:
  ModelAgent(std::shared_ptr<const Model> action_model, std::shared_ptr<const Model> symptom_model,
             std::shared_ptr<const KnowledgeGraph> kg);
  AgentDecision decide(const DialogState& state) override;

 private:
  std::shared_ptr<const Model> action_model_;
  std::shared_ptr<const Model> symptom_model_;
  std::shared_ptr<const KnowledgeGraph> kg_;
  EncoderConfig encoder_;
  Predictor action_;
  Predictor symptom_;
};

/// Never concludes; queries a uniformly random NotQueried symptom. The stream
/// is reseeded per dialog from (seed, dialog id).
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  void begin_dialog(std::string_view dialog_id) override;
  AgentDecision decide(const DialogState& state) override;

 private:
  std::uint64_t seed_;
  Rng rng_;
};

/// Asks a fixed list of symptoms in order, then concludes, or keeps asking the
/// lowest unqueried symptom when conclude_when_done is false.
class ScriptedAgent : public Agent {
 public:
  explicit ScriptedAgent(std::vector<SymptomId> script, bool conclude_when_done = true)
      : script_(std::move(script)), conclude_when_done_(conclude_when_done) {}
  void begin_dialog(std::string_view) override { next_ = 0; }
  AgentDecision decide(const DialogState& state) override;

 private:
  std::vector<SymptomId> script_;
  bool conclude_when_done_;
  std::size_t next_ = 0;
};

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

/// Rule-based patient: Confirm/Deny per the goal's truth value for symptoms in
/// S_e or S_i, NotSure for everything else.
UserAction simulator_reply(const UserGoal& goal, SymptomId symptom);

enum class DialogStatus { Active, Concluded, TurnLimit };
const char* to_string(DialogStatus s);

struct TurnEvent {
  SymptomId symptom;
  UserAction reply;
  bool operator==(const TurnEvent&) const = default;
};

/// One conversation driven step by step. Shared by the offline simulator loop
/// and the live service, where a human supplies the replies.
class DialogSession {
 public:
  DialogSession(std::vector<SymptomAssignment> explicit_symptoms, std::size_t n_symptoms, int tolr);

  /// Runs the agent until a question is pending or the dialog ends. Returns
  /// the pending question, if any. Stops with TurnLimit once tolr queries were
  /// made or no NotQueried symptom remains.
  std::optional<SymptomId> advance(Agent& agent);
  /// Records the reply to the pending question.
  void answer(UserAction reply);

  DialogStatus status() const { return status_; }
  std::optional<SymptomId> pending() const { return pending_; }
  const DialogState& state() const { return state_; }
  const std::vector<TurnEvent>& events() const { return events_; }
  const std::vector<SymptomAssignment>& explicit_symptoms() const { return explicit_; }
  int tolr() const { return tolr_; }

 private:
  std::vector<SymptomAssignment> explicit_;
  DialogState state_;
  int tolr_;
  DialogStatus status_ = DialogStatus::Active;
  std::optional<SymptomId> pending_;
  std::vector<TurnEvent> events_;
};

struct DialogTranscript {
  std::string goal_id;
  std::vector<TurnEvent> events;
  DialogStatus terminal = DialogStatus::Concluded;
  std::size_t n_queries = 0;         // N
  std::size_t n_unrelated = 0;       // N_u
  std::size_t n_implicit = 0;        // N_i
  std::size_t n_implicit_found = 0;  // N_i'

  bool operator==(const DialogTranscript&) const = default;
};

/// Counters recomputed from the event list against the goal.
DialogTranscript make_transcript(const UserGoal& goal, const std::vector<TurnEvent>& events, DialogStatus terminal);

DialogTranscript run_dialog(Agent& agent, const UserGoal& goal, int tolr, std::size_t n_symptoms);

struct DialogMetrics {
  double hit_rate = 0.0;        // R_h
  double unrelated_rate = 0.0;  // R_u
  double f1 = 0.0;
};

/// R_h = N_i'/N_i (1 when N_i = 0), R_u = N_u/N (0 when N = 0),
/// F1 = 2 R_h (1 - R_u) / (R_h + 1 - R_u) (0 when the denominator is 0).
/// Counts are real so expected-value analyses can be evaluated directly.
DialogMetrics compute_metrics(double n_implicit, double n_implicit_found, double n_unrelated, double n_queries);
DialogMetrics dialog_metrics(const DialogTranscript& t);

struct ConversationRecord {
  DialogTranscript transcript;
  DialogMetrics metrics;
};

struct ConversationReport {
  int tolr = 0;
  std::vector<ConversationRecord> conversations;
  DialogMetrics mean;  // per-conversation metrics averaged; F1 is the mean of per-dialog F1
};

ConversationReport evaluate_conversational(Agent& agent, std::span<const UserGoal> goals, int tolr, std::size_t n_symptoms);

struct SweepPoint {
  int tolr = 0;
  double mean_hit_rate = 0.0;
  double mean_unrelated_rate = 0.0;
  double mean_f1 = 0.0;
};

/// A fresh agent from the factory per TolR value.
std::vector<SweepPoint> tolr_sweep(const AgentFactory& factory, std::span<const UserGoal> goals,
                                   std::span<const int> tolr_values, std::size_t n_symptoms);

std::string report_to_json(const ConversationReport& report, const std::vector<std::string>& symptoms);
std::string sweep_to_csv(const std::vector<SweepPoint>& curve);
std::string sweep_to_table(const std::vector<SweepPoint>& curve);

}  // namespace asd
