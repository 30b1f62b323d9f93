#pragma once

#include <algorithm>
#include <vector>

#include "asd/corpus.hpp"
#include "asd/dialog_state.hpp"

namespace asd::test {

struct Census {
  std::size_t known_implicit = 0;
  std::size_t unrelated = 0;
  std::size_t violations = 0;
};

// Checks every state invariant that does not depend on the label.
inline Census inspect(const UserGoal& g, const DialogState& s, const EncoderConfig& cfg) {
  Census c;
  auto bad = [&](bool cond) { c.violations += cond ? 1 : 0; };
  bad(s.slots.size() != cfg.n_symptoms);
  for (const auto& a : g.explicit_symptoms)
    bad(s.slots[a.symptom.value] != (a.present ? SlotStatus::Confirmed : SlotStatus::Denied));
  std::vector<UserAction> replies;
  for (std::size_t i = 0; i < s.slots.size(); ++i) {
    const SymptomId id(i);
    const SlotStatus st = s.slots[i];
    if (g.is_explicit(id) || st == SlotStatus::NotQueried) continue;
    if (st == SlotStatus::Unrelated) {
      bad(g.lookup(id).has_value());
      ++c.unrelated;
      replies.push_back(UserAction::NotSure);
    } else {
      bad(!g.is_implicit(id));
      bad((st == SlotStatus::Confirmed) != g.lookup(id).value_or(false));
      ++c.known_implicit;
      replies.push_back(st == SlotStatus::Confirmed ? UserAction::Confirm : UserAction::Deny);
    }
  }
  const int turns = static_cast<int>(c.known_implicit + c.unrelated);
  bad(s.num_turns != turns);
  bad(s.num_turns > cfg.t_max);
  const bool initiate = s.agent_action == AgentAction::Initiate;
  bad(initiate != (s.num_turns == 0));
  bad(initiate != (s.user_action == UserAction::SelfReport));
  if (!initiate) bad(std::find(replies.begin(), replies.end(), s.user_action) == replies.end());
  return c;
}

}  // namespace asd::test
