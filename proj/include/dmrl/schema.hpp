#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dmrl {

// Slot and act vocabularies for one domain. Order matters: every vector
// layout in the project (observations, KB results, action catalog) follows
// the order given here.
struct DomainSchema {
  std::vector<std::string> slots;
  std::vector<std::string> user_acts;
  std::vector<std::string> agent_acts;
  // Slots a user goal may constrain.
  std::vector<std::string> informable;
  // Slots a user goal may ask the agent to fill.
  std::vector<std::string> requestable;

  int slot_index(std::string_view slot) const;      // -1 when unknown
  int user_act_index(std::string_view act) const;   // -1 when unknown
  int agent_act_index(std::string_view act) const;  // -1 when unknown
  bool has_slot(std::string_view slot) const { return slot_index(slot) >= 0; }
  bool is_informable(std::string_view slot) const;
  bool is_requestable(std::string_view slot) const;

  int num_slots() const { return static_cast<int>(slots.size()); }
  int num_user_acts() const { return static_cast<int>(user_acts.size()); }
  int num_agent_acts() const { return static_cast<int>(agent_acts.size()); }

  // Throws SchemaError when an invariant is broken.
  void validate() const;

  // Stable 64-bit fingerprint of all names in order.
  std::uint64_t hash() const;
};

inline constexpr std::string_view kTicketSlot = "ticket";

// Slots every KB row must carry.
const std::vector<std::string>& mandatory_slots();

// The movie-ticket schema: 16 slots, 11 acts per speaker.
const DomainSchema& reference_schema();

// Text format, one list per line:
//   slots: city, state, ...
//   user_acts: greeting, inform, ...
//   agent_acts: ...
//   informable: ...
//   requestable: ...
// Blank lines and lines starting with '#' are ignored.
DomainSchema load_schema(const std::filesystem::path& path);
DomainSchema parse_schema(std::string_view text);
std::string format_schema(const DomainSchema& schema);

}  // namespace dmrl
