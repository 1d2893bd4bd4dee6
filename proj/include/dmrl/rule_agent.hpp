#pragma once

#include <set>
#include <string>
#include <vector>

#include "dmrl/action_catalog.hpp"
#include "dmrl/frame.hpp"
#include "dmrl/kb.hpp"

namespace dmrl {

// Handcrafted agent used to pre-fill the replay buffer and as the
// comparison baseline. It asks for the key slots in a fixed order, offers
// the first matching ticket, then closes.
struct RuleAgentState {
  enum class Phase { gathering, informing, closing };

  SlotValues gathered;
  // Slots already asked for; a slot is never asked twice, whatever the answer.
  std::set<std::string> requested;
  std::set<std::string> dont_care;
  Phase phase = Phase::gathering;
  std::vector<std::string> request_order;
};

const std::vector<std::string>& canonical_request_order();

RuleAgentState rule_agent_start();

struct RuleStep {
  Frame frame;
  int action = -1;  // catalog index of `frame`
  RuleAgentState state;
};

RuleStep rule_act(RuleAgentState state, const Frame& user_frame,
                  const KnowledgeBase& kb, const ActionCatalog& catalog);

}  // namespace dmrl
