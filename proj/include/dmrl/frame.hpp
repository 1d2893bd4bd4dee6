#pragma once

#include <set>
#include <string>
#include <vector>

#include "dmrl/kb.hpp"
#include "dmrl/schema.hpp"

namespace dmrl {

enum class Speaker { user, agent };

// One semantic dialogue turn.
struct Frame {
  std::string act;
  SlotValues inform;
  std::set<std::string> request;

  bool operator==(const Frame&) const = default;
};

// Throws SchemaError when the act is not in the speaker's act list, a slot is
// unknown, or a slot is both informed and requested.
void validate_frame(const Frame& frame, const DomainSchema& schema, Speaker speaker);

struct TranscriptLine {
  int turn = 0;
  Speaker speaker = Speaker::user;
  Frame frame;
};

// `turn|speaker|act|inform|request`, inform as `slot=value,...` and request
// as `slot,...`, both in sorted slot order.
std::string format_transcript_line(const TranscriptLine& line);
std::string format_transcript(const std::vector<TranscriptLine>& lines);

}  // namespace dmrl
