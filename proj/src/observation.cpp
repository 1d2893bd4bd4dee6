#include "dmrl/observation.hpp"

#include <stdexcept>
#include <string>

#include "dmrl/errors.hpp"
#include "dmrl/user_sim.hpp"

namespace dmrl {

ObservationLayout::ObservationLayout(const DomainSchema& schema)
    : user_acts(schema.num_user_acts()),
      agent_acts(schema.num_agent_acts()),
      slots(schema.num_slots()) {
  u_act = 0;
  u_is = u_act + user_acts;
  u_rs = u_is + slots;
  a_act = u_rs + slots;
  a_is = a_act + agent_acts;
  a_rs = a_is + slots;
  turn = a_rs + slots;
  kb_bin = turn + 1;
  kb_cnt = kb_bin + slots + 1;
  size = kb_cnt + slots + 1;
}

namespace {

void put_frame(std::vector<float>& v, const DomainSchema& schema,
               const Frame& frame, int act_idx, int act_off, int is_off, int rs_off) {
  if (act_idx < 0) throw SchemaError("unknown act '" + frame.act + "'");
  v[act_off + act_idx] = 1.0f;
  for (const auto& [slot, value] : frame.inform) {
    int s = schema.slot_index(slot);
    if (s < 0) throw SchemaError("unknown slot '" + slot + "'");
    v[is_off + s] = 1.0f;
  }
  for (const auto& slot : frame.request) {
    int s = schema.slot_index(slot);
    if (s < 0) throw SchemaError("unknown slot '" + slot + "'");
    v[rs_off + s] = 1.0f;
  }
}

}  // namespace

Observation encode_observation(const DomainSchema& schema,
                               const std::optional<Frame>& user_frame,
                               const std::optional<Frame>& agent_frame, int turn,
                               const KbResult& kb_result) {
  if (turn < 0 || turn > kMaxTurns) {
    throw std::out_of_range("turn " + std::to_string(turn) + " outside [0, 16]");
  }
  const ObservationLayout layout(schema);
  if (static_cast<int>(kb_result.bin.size()) != layout.slots + 1 ||
      static_cast<int>(kb_result.cnt.size()) != layout.slots + 1) {
    throw ShapeError("kb result width does not match schema");
  }
  Observation obs;
  auto& v = obs.values;
  v.assign(layout.size, 0.0f);
  if (user_frame) {
    put_frame(v, schema, *user_frame, schema.user_act_index(user_frame->act),
              layout.u_act, layout.u_is, layout.u_rs);
  }
  if (agent_frame) {
    put_frame(v, schema, *agent_frame, schema.agent_act_index(agent_frame->act),
              layout.a_act, layout.a_is, layout.a_rs);
  }
  v[layout.turn] = static_cast<float>(turn) / static_cast<float>(kMaxTurns);
  std::copy(kb_result.bin.begin(), kb_result.bin.end(), v.begin() + layout.kb_bin);
  std::copy(kb_result.cnt.begin(), kb_result.cnt.end(), v.begin() + layout.kb_cnt);
  return obs;
}

std::span<const float> user_segment(const ObservationLayout& layout,
                                    std::span<const float> obs) {
  return obs.first(static_cast<std::size_t>(layout.user_size()));
}

}  // namespace dmrl
