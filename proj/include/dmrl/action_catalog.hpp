#pragma once

#include <string>
#include <vector>

#include "dmrl/frame.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/schema.hpp"

namespace dmrl {

struct AgentAction {
  enum class Kind { standalone, request, inform, match_found, task_complete };
  Kind kind = Kind::standalone;
  // Act name for standalone actions, slot name for request/inform.
  std::string name;

  bool offers_ticket() const {
    return kind == Kind::match_found || kind == Kind::task_complete ||
           (kind == Kind::inform && name == kTicketSlot);
  }
  std::string label() const;
};

// Ordered agent action set: six standalone acts, one request per slot, one
// inform per slot and inform(taskcomplete). 39 actions for the reference
// schema.
class ActionCatalog {
 public:
  explicit ActionCatalog(const DomainSchema& schema);

  int size() const { return static_cast<int>(actions_.size()); }
  const AgentAction& at(int index) const;  // throws CatalogError
  int index_of(const AgentAction& action) const;  // throws CatalogError
  int request_index(const std::string& slot) const;
  int inform_index(const std::string& slot) const;
  int standalone_index(const std::string& act) const;
  int match_found_index() const;
  const std::vector<AgentAction>& actions() const { return actions_; }

  // Turns an action into the agent frame sent to the user. Slot values for
  // informs and ticket offers come from the first KB row matching the
  // constraints the agent has perceived so far.
  Frame realize(int index, const KnowledgeBase& kb,
                const SlotValues& perceived) const;

 private:
  std::vector<AgentAction> actions_;
};

// Slots carried by a ticket offer besides the ticket id itself.
const std::vector<std::string>& ticket_slots();

}  // namespace dmrl
