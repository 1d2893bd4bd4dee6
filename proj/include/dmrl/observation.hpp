#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dmrl/frame.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/schema.hpp"

namespace dmrl {

// Segment offsets of the observation vector:
//   u_act | u_is | u_rs | a_act | a_is | a_rs | turn | kb_bin | kb_cnt
struct ObservationLayout {
  explicit ObservationLayout(const DomainSchema& schema);

  int user_acts, agent_acts, slots;
  int u_act, u_is, u_rs, a_act, a_is, a_rs, turn, kb_bin, kb_cnt;
  int size;

  // The user part (u_act, u_is, u_rs) is the supervised target block.
  int user_size() const { return user_acts + 2 * slots; }
};

struct Observation {
  std::vector<float> values;
};

// Absent frames leave their segments at zero. Throws std::out_of_range when
// turn is outside [0, kMaxTurns].
Observation encode_observation(const DomainSchema& schema,
                               const std::optional<Frame>& user_frame,
                               const std::optional<Frame>& agent_frame, int turn,
                               const KbResult& kb_result);

// Leading user_size() entries of an encoded observation.
std::span<const float> user_segment(const ObservationLayout& layout,
                                    std::span<const float> obs);

}  // namespace dmrl
