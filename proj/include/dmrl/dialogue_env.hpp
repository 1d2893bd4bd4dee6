#pragma once

#include <vector>

#include "dmrl/action_catalog.hpp"
#include "dmrl/episode.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/observation.hpp"
#include "dmrl/rng.hpp"
#include "dmrl/rule_agent.hpp"
#include "dmrl/user_sim.hpp"

namespace dmrl {

enum class Mode { train, eval };

// Everything an agent may look at before choosing its next action.
struct DialogueView {
  const Observation& obs;
  // User frame as observed, i.e. after noise.
  const Frame& user_frame;
  int turn;
  const SlotValues& perceived;
  const std::vector<float>& current_slots;
};

class DialogueAgent {
 public:
  virtual ~DialogueAgent() = default;
  virtual void begin_dialogue() = 0;
  // Returns an action catalog index. Eval mode must act greedily.
  virtual int act(const DialogueView& view, Mode mode) = 0;
};

// Per-step reward: -1 each step, +2*16 on terminal success, -16 on terminal
// failure.
inline constexpr float kStepReward = -1.0f;
inline constexpr float kSuccessBonus = 2.0f * kMaxTurns;
inline constexpr float kFailurePenalty = -static_cast<float>(kMaxTurns);

struct StepOutcome {
  bool terminal = false;
  bool success = false;
};
float compute_reward(const StepOutcome& outcome);

class DialogueEnv {
 public:
  explicit DialogueEnv(const KnowledgeBase& kb);

  const KnowledgeBase& kb() const { return kb_; }
  const DomainSchema& schema() const { return kb_.schema(); }
  const ActionCatalog& catalog() const { return catalog_; }
  const ObservationLayout& layout() const { return layout_; }

  // Plays one dialogue to completion. `rng` drives the simulator and the
  // noise model; agents own their exploration randomness.
  Episode run_dialogue(DialogueAgent& agent, const Goal& goal, Mode mode,
                       const NoiseConfig& noise, Rng& rng) const;

 private:
  const KnowledgeBase& kb_;
  ActionCatalog catalog_;
  ObservationLayout layout_;
};

// Adapter driving the handcrafted rule agent through the DialogueAgent
// interface.
class RulePolicy : public DialogueAgent {
 public:
  explicit RulePolicy(const DialogueEnv& env) : env_(env) {}
  void begin_dialogue() override { state_ = rule_agent_start(); }
  int act(const DialogueView& view, Mode mode) override;

 private:
  const DialogueEnv& env_;
  RuleAgentState state_ = rule_agent_start();
};

// Always emits the same action; handy for tests and degenerate baselines.
class FixedPolicy : public DialogueAgent {
 public:
  explicit FixedPolicy(int action) : action_(action) {}
  void begin_dialogue() override {}
  int act(const DialogueView&, Mode) override { return action_; }

 private:
  int action_;
};

}  // namespace dmrl
