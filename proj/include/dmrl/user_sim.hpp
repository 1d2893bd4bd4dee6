#pragma once

#include <array>
#include <utility>
#include <vector>

#include "dmrl/frame.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/rng.hpp"

namespace dmrl {

inline constexpr int kMaxTurns = 16;

// Slot- and intent-level corruption applied to outgoing user frames.
struct NoiseConfig {
  enum Kind { value_swap = 0, slot_delete = 1, slot_substitute = 2 };

  double slot_error_prob = 0.0;
  double intent_error_prob = 0.0;
  // Weights over value_swap, slot_delete, slot_substitute.
  std::array<double, 3> error_mix{1.0 / 3, 1.0 / 3, 1.0 / 3};

  void validate() const;  // throws ConfigError
};

enum class Outcome { ongoing, success, failure };

struct SimulatorState {
  Goal goal;
  // Pending user frames; back() is the top of the stack.
  std::vector<Frame> agenda;
  int turn = 0;
  SlotValues informed_by_agent;
  Outcome outcome = Outcome::ongoing;
  // Result of adjudicating the most recent ticket offer.
  bool offer_accepted = false;
};

// Builds the agenda for `goal` and returns the opening user frame: a ticket
// request carrying one to three of the goal constraints.
std::pair<SimulatorState, Frame> simulator_reset(const Goal& goal, Rng& rng);

// Responds to one agent frame. Throws UsageError once the dialogue is over.
std::pair<Frame, SimulatorState> user_step(SimulatorState state,
                                           const Frame& agent_frame,
                                           const KnowledgeBase& kb, Rng& rng);

// True when the agent frame offers a ticket (carries the ticket slot).
bool is_ticket_offer(const Frame& agent_frame);

// Ticket value used when no KB row matches the agent's constraints.
inline constexpr const char* kNoMatch = "none";

Frame corrupt_frame(const Frame& frame, const NoiseConfig& cfg,
                    const KnowledgeBase& kb, Rng& rng);

}  // namespace dmrl
