#include "asd/dialog_state.hpp"

#include "asd/error.hpp"

namespace asd {

const char* to_string(UserAction a) {
  switch (a) {
    case UserAction::SelfReport: return "SelfReport";
    case UserAction::Confirm: return "Confirm";
    case UserAction::Deny: return "Deny";
    case UserAction::NotSure: return "NotSure";
  }
  return "?";
}

const char* to_string(AgentAction a) { return a == AgentAction::Initiate ? "Initiate" : "Request"; }

void EncoderConfig::check() const {
  if (t_max < 1) fail(Errc::InvalidArgument, "t_max must be >= 1");
  if (n_symptoms == 0) fail(Errc::InvalidArgument, "n_symptoms must be >= 1");
}

DialogState DialogState::initial(std::span<const SymptomAssignment> explicit_symptoms, std::size_t n_symptoms) {
  DialogState st;
  st.slots.assign(n_symptoms, SlotStatus::NotQueried);
  for (const auto& a : explicit_symptoms) {
    if (a.symptom.value >= n_symptoms) fail(Errc::OutOfRange, "explicit symptom out of range");
    st.slots[a.symptom.value] = a.present ? SlotStatus::Confirmed : SlotStatus::Denied;
  }
  return st;
}

SlotStatus status_for_reply(UserAction reply) {
  switch (reply) {
    case UserAction::Confirm: return SlotStatus::Confirmed;
    case UserAction::Deny: return SlotStatus::Denied;
    case UserAction::NotSure: return SlotStatus::Unrelated;
    case UserAction::SelfReport: break;
  }
  fail(Errc::InvalidArgument, "SelfReport is not a reply to a query");
}

std::vector<double> vectorize(const DialogState& state, const EncoderConfig& cfg) {
  cfg.check();
  if (state.num_turns < 0 || state.num_turns > cfg.t_max) {
    fail(Errc::TurnOverflow, "num_turns " + std::to_string(state.num_turns) + " outside 0.." + std::to_string(cfg.t_max));
  }
  if (state.slots.size() != cfg.n_symptoms) fail(Errc::ShapeMismatch, "slot count does not match n_symptoms");
  std::vector<double> x(cfg.input_dim(), 0.0);
  x[static_cast<std::size_t>(state.user_action)] = 1.0;
  x[EncoderConfig::kUserActions + static_cast<std::size_t>(state.agent_action)] = 1.0;
  x[cfg.turn_offset() + static_cast<std::size_t>(state.num_turns)] = 1.0;
  for (std::size_t i = 0; i < cfg.n_symptoms; ++i) x[cfg.slot_offset() + i] = static_cast<int>(state.slots[i]);
  return x;
}

std::vector<bool> known_mask(std::span<const double> x, const EncoderConfig& cfg) {
  if (x.size() != cfg.input_dim()) fail(Errc::ShapeMismatch, "state vector length does not match encoder config");
  std::vector<bool> mask(cfg.n_symptoms);
  for (std::size_t i = 0; i < cfg.n_symptoms; ++i) mask[i] = x[cfg.slot_offset() + i] != 0.0;
  return mask;
}

}  // namespace asd
