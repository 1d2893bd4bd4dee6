#include "dmrl/rule_agent.hpp"

#include <algorithm>

namespace dmrl {

const std::vector<std::string>& canonical_request_order() {
  static const std::vector<std::string> kOrder = {
      "moviename", "city", "date", "starttime", "numberofpeople"};
  return kOrder;
}

RuleAgentState rule_agent_start() {
  RuleAgentState s;
  s.request_order = canonical_request_order();
  return s;
}

RuleStep rule_act(RuleAgentState state, const Frame& user_frame,
                  const KnowledgeBase& kb, const ActionCatalog& catalog) {
  for (const auto& [slot, value] : user_frame.inform) {
    if (slot != kTicketSlot) state.gathered[slot] = value;
  }
  // Whatever came back, a requested slot that is still empty is treated as
  // "don't care".
  for (const auto& slot : state.requested) {
    if (!state.gathered.count(slot)) state.dont_care.insert(slot);
  }

  RuleStep step;
  if (state.phase == RuleAgentState::Phase::gathering) {
    auto next = std::find_if(state.request_order.begin(), state.request_order.end(),
                             [&](const std::string& s) {
                               return !state.gathered.count(s) && !state.requested.count(s);
                             });
    if (next != state.request_order.end()) {
      state.requested.insert(*next);
      step.action = catalog.request_index(*next);
    } else {
      state.phase = RuleAgentState::Phase::informing;
      step.action = catalog.inform_index(std::string(kTicketSlot));
    }
  } else {
    state.phase = RuleAgentState::Phase::closing;
    step.action = catalog.standalone_index("closing");
  }
  step.frame = catalog.realize(step.action, kb, state.gathered);
  step.state = std::move(state);
  return step;
}

}  // namespace dmrl
