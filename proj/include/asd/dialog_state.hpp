#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "asd/corpus.hpp"

namespace asd {

enum class UserAction { SelfReport, Confirm, Deny, NotSure };
enum class AgentAction { Initiate, Request };

/// Numeric values are the slot encoding.
enum class SlotStatus : int { NotQueried = 0, Confirmed = 1, Denied = -1, Unrelated = -2 };

const char* to_string(UserAction a);
const char* to_string(AgentAction a);

struct EncoderConfig {
  int t_max = 20;  // NumTurns one-hot covers 0..t_max
  std::size_t n_symptoms = 66;

  static constexpr std::size_t kUserActions = 4;
  static constexpr std::size_t kAgentActions = 2;

  std::size_t turn_offset() const { return kUserActions + kAgentActions; }
  std::size_t slot_offset() const { return turn_offset() + static_cast<std::size_t>(t_max) + 1; }
  std::size_t input_dim() const { return slot_offset() + n_symptoms; }
  void check() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct DialogState {
  UserAction user_action = UserAction::SelfReport;
  AgentAction agent_action = AgentAction::Initiate;
  int num_turns = 0;  // agent queries so far; the self-report is turn 0
  std::vector<SlotStatus> slots;

  bool operator==(const DialogState&) const = default;

  /// Dialog opening: explicit assignments filled, everything else NotQueried.
  static DialogState initial(std::span<const SymptomAssignment> explicit_symptoms, std::size_t n_symptoms);

  bool known(SymptomId s) const { return slots[s.value] != SlotStatus::NotQueried; }
};

SlotStatus status_for_reply(UserAction reply);

/// [one-hot user action | one-hot agent action | one-hot turns 0..t_max | slot values].
std::vector<double> vectorize(const DialogState& state, const EncoderConfig& cfg);

/// Mask of known symptoms (non-zero slot entries) read back from a vector.
std::vector<bool> known_mask(std::span<const double> x, const EncoderConfig& cfg);

}  // namespace asd
