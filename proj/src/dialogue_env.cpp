#include "dmrl/dialogue_env.hpp"

#include <optional>

namespace dmrl {

float compute_reward(const StepOutcome& outcome) {
  float r = kStepReward;
  if (outcome.terminal) r += outcome.success ? kSuccessBonus : kFailurePenalty;
  return r;
}

DialogueEnv::DialogueEnv(const KnowledgeBase& kb)
    : kb_(kb), catalog_(kb.schema()), layout_(kb.schema()) {}

Episode DialogueEnv::run_dialogue(DialogueAgent& agent, const Goal& goal, Mode mode,
                                  const NoiseConfig& noise, Rng& rng) const {
  const auto& schema = kb_.schema();
  Episode ep;
  SlotValues perceived;
  std::vector<float> current_slots(schema.num_slots(), 0.0f);
  auto absorb = [&](const Frame& f) {
    for (const auto& [slot, value] : f.inform) {
      if (slot == kTicketSlot) continue;
      perceived[slot] = value;
      current_slots[schema.slot_index(slot)] = 1.0f;
    }
  };

  auto [state, user_frame] = simulator_reset(goal, rng);
  Frame observed = corrupt_frame(user_frame, noise, kb_, rng);
  absorb(observed);
  ep.transcript.push_back({0, Speaker::user, observed});
  std::optional<Frame> last_agent;
  agent.begin_dialogue();

  while (true) {
    Observation obs = encode_observation(schema, observed, last_agent, state.turn,
                                         kb_query(kb_, perceived));
    if (!ep.steps.empty()) {
      auto user = user_segment(layout_, obs.values);
      ep.steps.back().next_user.assign(user.begin(), user.end());
    }
    const int action = agent.act({obs, observed, state.turn, perceived, current_slots}, mode);
    Frame agent_frame = catalog_.realize(action, kb_, perceived);
    ep.transcript.push_back({state.turn, Speaker::agent, agent_frame});

    auto [reply, next] = user_step(std::move(state), agent_frame, kb_, rng);
    state = std::move(next);
    const StepOutcome outcome{state.outcome != Outcome::ongoing,
                              state.outcome == Outcome::success};

    Transition t;
    t.obs = std::move(obs.values);
    t.action = action;
    t.reward = compute_reward(outcome);
    t.current_slots = current_slots;
    t.terminal = outcome.terminal;
    t.success = outcome.success;
    ep.steps.push_back(std::move(t));
    // The agent fills the ticket slot itself when it offers a real row.
    if (auto it = agent_frame.inform.find(std::string(kTicketSlot));
        it != agent_frame.inform.end() && it->second != kNoMatch) {
      current_slots[schema.slot_index(kTicketSlot)] = 1.0f;
    }

    if (outcome.terminal) {
      ep.success = outcome.success;
      ep.transcript.push_back({state.turn, Speaker::user, reply});
      break;
    }
    observed = corrupt_frame(reply, noise, kb_, rng);
    absorb(observed);
    ep.transcript.push_back({state.turn, Speaker::user, observed});
    last_agent = std::move(agent_frame);
  }
  return ep;
}

int RulePolicy::act(const DialogueView& view, Mode) {
  auto step = rule_act(std::move(state_), view.user_frame, env_.kb(), env_.catalog());
  state_ = std::move(step.state);
  return step.action;
}

}  // namespace dmrl
