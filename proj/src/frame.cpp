#include "dmrl/frame.hpp"

#include "dmrl/errors.hpp"

namespace dmrl {

void validate_frame(const Frame& frame, const DomainSchema& schema,
                    Speaker speaker) {
  const int act = speaker == Speaker::user ? schema.user_act_index(frame.act)
                                           : schema.agent_act_index(frame.act);
  if (act < 0) throw SchemaError("unknown act '" + frame.act + "'");
  for (const auto& [slot, value] : frame.inform) {
    if (!schema.has_slot(slot)) throw SchemaError("unknown inform slot '" + slot + "'");
    if (frame.request.count(slot)) {
      throw SchemaError("slot '" + slot + "' both informed and requested");
    }
  }
  for (const auto& slot : frame.request) {
    if (!schema.has_slot(slot)) throw SchemaError("unknown request slot '" + slot + "'");
  }
}

std::string format_transcript_line(const TranscriptLine& line) {
  std::string out = std::to_string(line.turn);
  out += line.speaker == Speaker::user ? "|user|" : "|agent|";
  out += line.frame.act;
  out += '|';
  bool first = true;
  for (const auto& [slot, value] : line.frame.inform) {
    if (!first) out += ',';
    out += slot + "=" + value;
    first = false;
  }
  out += '|';
  first = true;
  for (const auto& slot : line.frame.request) {
    if (!first) out += ',';
    out += slot;
    first = false;
  }
  return out;
}

std::string format_transcript(const std::vector<TranscriptLine>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += format_transcript_line(l);
    out += '\n';
  }
  return out;
}

}  // namespace dmrl
