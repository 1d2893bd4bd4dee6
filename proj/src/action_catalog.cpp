#include "dmrl/action_catalog.hpp"

#include "dmrl/errors.hpp"
#include "dmrl/user_sim.hpp"

namespace dmrl {

const std::vector<std::string>& ticket_slots() { return mandatory_slots(); }

std::string AgentAction::label() const {
  switch (kind) {
    case Kind::standalone: return name;
    case Kind::request: return "request(" + name + ")";
    case Kind::inform: return "inform(" + name + ")";
    case Kind::match_found: return "match_found";
    case Kind::task_complete: return "inform(taskcomplete)";
  }
  return name;
}

ActionCatalog::ActionCatalog(const DomainSchema& schema) {
  using K = AgentAction::Kind;
  for (const char* act : {"greeting", "thanks", "deny", "closing", "confirm_answer"}) {
    actions_.push_back({K::standalone, act});
  }
  actions_.push_back({K::match_found, "match_found"});
  for (const auto& s : schema.slots) actions_.push_back({K::request, s});
  for (const auto& s : schema.slots) actions_.push_back({K::inform, s});
  actions_.push_back({K::task_complete, "taskcomplete"});
}

const AgentAction& ActionCatalog::at(int index) const {
  if (index < 0 || index >= size()) {
    throw CatalogError("action index " + std::to_string(index) + " out of range");
  }
  return actions_[index];
}

int ActionCatalog::index_of(const AgentAction& action) const {
  for (int i = 0; i < size(); ++i) {
    if (actions_[i].kind == action.kind && actions_[i].name == action.name) return i;
  }
  throw CatalogError("action " + action.label() + " not in catalog");
}

int ActionCatalog::request_index(const std::string& slot) const {
  return index_of({AgentAction::Kind::request, slot});
}
int ActionCatalog::inform_index(const std::string& slot) const {
  return index_of({AgentAction::Kind::inform, slot});
}
int ActionCatalog::standalone_index(const std::string& act) const {
  return index_of({AgentAction::Kind::standalone, act});
}
int ActionCatalog::match_found_index() const {
  return index_of({AgentAction::Kind::match_found, "match_found"});
}

Frame ActionCatalog::realize(int index, const KnowledgeBase& kb,
                             const SlotValues& perceived) const {
  const auto& action = at(index);
  Frame f;
  if (action.offers_ticket()) {
    f.act = "inform";
    const long row = kb.first_match(perceived);
    if (row < 0) {
      f.inform[std::string(kTicketSlot)] = kNoMatch;
    } else {
      f.inform[std::string(kTicketSlot)] = std::to_string(row);
      for (const auto& s : ticket_slots()) {
        const auto& v = kb.value(row, kb.schema().slot_index(s));
        if (!v.empty()) f.inform[s] = v;
      }
    }
    return f;
  }
  switch (action.kind) {
    case AgentAction::Kind::standalone:
      f.act = action.name;
      break;
    case AgentAction::Kind::request:
      f.act = "request";
      f.request.insert(action.name);
      break;
    case AgentAction::Kind::inform: {
      f.act = "inform";
      const long row = kb.first_match(perceived);
      std::string value = kNoMatch;
      if (row >= 0) {
        const auto& v = kb.value(row, kb.schema().slot_index(action.name));
        if (!v.empty()) value = v;
      }
      f.inform[action.name] = value;
      break;
    }
    default:
      break;
  }
  return f;
}

}  // namespace dmrl
