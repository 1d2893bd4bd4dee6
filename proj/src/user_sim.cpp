#include "dmrl/user_sim.hpp"

#include <algorithm>
#include <charconv>

#include "dmrl/errors.hpp"

namespace dmrl {
namespace {

Frame make_frame(std::string act) {
  Frame f;
  f.act = std::move(act);
  return f;
}

long parse_row(const std::string& ticket, std::size_t rows) {
  long row = -1;
  auto [p, ec] = std::from_chars(ticket.data(), ticket.data() + ticket.size(), row);
  if (ec != std::errc() || p != ticket.data() + ticket.size()) return -1;
  if (row < 0 || static_cast<std::size_t>(row) >= rows) return -1;
  return row;
}

void drop_agenda_inform(SimulatorState& state, const std::string& slot) {
  auto& a = state.agenda;
  a.erase(std::remove_if(a.begin(), a.end(),
                         [&](const Frame& f) {
                           return f.act == "inform" && f.inform.count(slot);
                         }),
          a.end());
}

Frame pop_agenda(SimulatorState& state) {
  if (state.agenda.empty()) return make_frame("thanks");
  Frame f = std::move(state.agenda.back());
  state.agenda.pop_back();
  return f;
}

}  // namespace

void NoiseConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(slot_error_prob)) throw ConfigError("slot_error_prob outside [0,1]");
  if (!prob(intent_error_prob)) throw ConfigError("intent_error_prob outside [0,1]");
  double sum = 0.0;
  for (double w : error_mix) {
    if (w < 0.0) throw ConfigError("negative error_mix weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("error_mix must sum to 1");
}

bool is_ticket_offer(const Frame& agent_frame) {
  return agent_frame.inform.count(std::string(kTicketSlot)) > 0;
}

std::pair<SimulatorState, Frame> simulator_reset(const Goal& goal, Rng& rng) {
  SimulatorState state;
  state.goal = goal;

  std::vector<std::string> requests;
  for (const auto& r : goal.requests) {
    if (r != kTicketSlot) requests.push_back(r);
  }
  std::shuffle(requests.begin(), requests.end(), rng);
  for (const auto& r : requests) {
    Frame f = make_frame("request");
    f.request.insert(r);
    state.agenda.push_back(std::move(f));
  }
  std::vector<std::pair<std::string, std::string>> informs(goal.constraints.begin(),
                                                           goal.constraints.end());
  std::shuffle(informs.begin(), informs.end(), rng);
  for (auto& [slot, value] : informs) {
    Frame f = make_frame("inform");
    f.inform[slot] = value;
    state.agenda.push_back(std::move(f));
  }

  Frame first = make_frame("request");
  first.request.insert(std::string(kTicketSlot));
  if (!informs.empty()) {
    const int k = uniform_int(rng, 1, std::min<int>(3, static_cast<int>(informs.size())));
    for (int i = 0; i < k; ++i) {
      Frame top = pop_agenda(state);
      first.inform.insert(top.inform.begin(), top.inform.end());
    }
  }
  return {std::move(state), std::move(first)};
}

std::pair<Frame, SimulatorState> user_step(SimulatorState state,
                                           const Frame& agent_frame,
                                           const KnowledgeBase& kb, Rng& rng) {
  (void)rng;  // the rule table is deterministic given the agenda
  if (state.outcome != Outcome::ongoing) {
    throw UsageError("user_step called after the dialogue ended");
  }
  const auto& goal = state.goal;
  Frame reply;

  if (agent_frame.act == "closing") {
    state.outcome = state.offer_accepted ? Outcome::success : Outcome::failure;
    reply = make_frame("closing");
  } else if (is_ticket_offer(agent_frame)) {
    for (const auto& [slot, value] : agent_frame.inform) {
      state.informed_by_agent[slot] = value;
    }
    const long row = parse_row(agent_frame.inform.at(std::string(kTicketSlot)),
                               kb.row_count());
    const std::string* mismatch = nullptr;
    bool ok = row >= 0;
    if (ok) {
      for (const auto& [slot, value] : goal.constraints) {
        if (kb.value(row, kb.schema().slot_index(slot)) != value) {
          ok = false;
          mismatch = &slot;
          break;
        }
      }
    }
    if (ok) {
      ok = std::all_of(goal.requests.begin(), goal.requests.end(),
                       [&](const std::string& r) {
                         return state.informed_by_agent.count(r) > 0;
                       });
    }
    state.offer_accepted = ok;
    if (ok) {
      reply = make_frame("thanks");
    } else {
      reply = make_frame("deny");
      if (mismatch) reply.inform[*mismatch] = goal.constraints.at(*mismatch);
    }
  } else if (agent_frame.act == "request") {
    Frame inform = make_frame("inform");
    for (const auto& slot : agent_frame.request) {
      auto it = goal.constraints.find(slot);
      if (it != goal.constraints.end()) {
        inform.inform[slot] = it->second;
        drop_agenda_inform(state, slot);
      }
    }
    reply = inform.inform.empty() ? make_frame("not_sure") : std::move(inform);
  } else if (agent_frame.act == "inform") {
    const std::string* wrong = nullptr;
    for (const auto& [slot, value] : agent_frame.inform) {
      state.informed_by_agent[slot] = value;
      auto it = goal.constraints.find(slot);
      if (!wrong && it != goal.constraints.end() && it->second != value) {
        wrong = &slot;
      }
    }
    if (wrong) {
      reply = make_frame("deny");
      reply.inform[*wrong] = goal.constraints.at(*wrong);
    } else {
      reply = pop_agenda(state);
    }
  } else {
    // Greeting, thanks, confirmations: the user keeps going with its agenda.
    reply = pop_agenda(state);
  }

  ++state.turn;
  if (state.outcome == Outcome::ongoing && state.turn >= kMaxTurns) {
    state.outcome = Outcome::failure;
  }
  return {std::move(reply), std::move(state)};
}

Frame corrupt_frame(const Frame& frame, const NoiseConfig& cfg,
                    const KnowledgeBase& kb, Rng& rng) {
  const auto& schema = kb.schema();
  Frame out;
  out.act = frame.act;
  out.request = frame.request;
  std::discrete_distribution<int> kind(cfg.error_mix.begin(), cfg.error_mix.end());

  for (const auto& [slot, value] : frame.inform) {
    if (cfg.slot_error_prob <= 0.0 || uniform01(rng) >= cfg.slot_error_prob) {
      out.inform[slot] = value;
      continue;
    }
    switch (kind(rng)) {
      case NoiseConfig::value_swap: {
        int s = schema.slot_index(slot);
        std::vector<std::string> others;
        if (s >= 0) {
          for (const auto& v : kb.distinct_values(s)) {
            if (v != value) others.push_back(v);
          }
        }
        if (others.empty()) {
          out.inform[slot] = value;
        } else {
          out.inform[slot] = others[uniform_int(rng, 0, static_cast<int>(others.size()) - 1)];
        }
        break;
      }
      case NoiseConfig::slot_delete:
        break;
      case NoiseConfig::slot_substitute: {
        std::vector<std::string> targets;
        for (const auto& s : schema.slots) {
          if (s == slot || s == kTicketSlot) continue;
          if (frame.inform.count(s) || out.inform.count(s) || frame.request.count(s)) continue;
          targets.push_back(s);
        }
        if (!targets.empty()) {
          out.inform[targets[uniform_int(rng, 0, static_cast<int>(targets.size()) - 1)]] = value;
        }
        break;
      }
    }
  }

  if (cfg.intent_error_prob > 0.0 && uniform01(rng) < cfg.intent_error_prob) {
    std::vector<std::string> acts;
    for (const auto& a : schema.user_acts) {
      if (a != frame.act) acts.push_back(a);
    }
    if (!acts.empty()) out.act = acts[uniform_int(rng, 0, static_cast<int>(acts.size()) - 1)];
  }
  return out;
}

}  // namespace dmrl
