#include "dmrl/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dmrl/errors.hpp"
#include "dmrl/rng.hpp"

namespace dmrl {
namespace {

int index_of(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

void require_unique(const std::vector<std::string>& names,
                    const char* what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw SchemaError(std::string("empty name in ") + what);
    if (!seen.insert(n).second) {
      throw SchemaError(std::string("duplicate name '") + n + "' in " + what);
    }
  }
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto next = s.find(',', pos);
    if (next == std::string_view::npos) next = s.size();
    auto item = trim(s.substr(pos, next - pos));
    if (!item.empty()) out.push_back(std::move(item));
    pos = next + 1;
  }
  return out;
}

}  // namespace

int DomainSchema::slot_index(std::string_view slot) const {
  return index_of(slots, slot);
}
int DomainSchema::user_act_index(std::string_view act) const {
  return index_of(user_acts, act);
}
int DomainSchema::agent_act_index(std::string_view act) const {
  return index_of(agent_acts, act);
}
bool DomainSchema::is_informable(std::string_view slot) const {
  return index_of(informable, slot) >= 0;
}
bool DomainSchema::is_requestable(std::string_view slot) const {
  return index_of(requestable, slot) >= 0;
}

void DomainSchema::validate() const {
  require_unique(slots, "slots");
  require_unique(user_acts, "user_acts");
  require_unique(agent_acts, "agent_acts");
  require_unique(informable, "informable");
  require_unique(requestable, "requestable");
  for (const auto& s : informable) {
    if (!has_slot(s)) throw SchemaError("informable slot '" + s + "' not in slots");
  }
  for (const auto& s : requestable) {
    if (!has_slot(s)) throw SchemaError("requestable slot '" + s + "' not in slots");
  }
  if (!is_requestable(kTicketSlot)) {
    throw SchemaError("'ticket' must be requestable");
  }
  for (const auto& s : mandatory_slots()) {
    if (!has_slot(s)) throw SchemaError("mandatory slot '" + s + "' missing");
  }
  for (const char* act : {"inform", "request", "not_sure", "deny", "thanks",
                          "closing"}) {
    if (user_act_index(act) < 0) {
      throw SchemaError(std::string("user act '") + act + "' missing");
    }
  }
  for (const char* act : {"greeting", "inform", "request", "thanks", "deny",
                          "closing", "confirm_answer"}) {
    if (agent_act_index(act) < 0) {
      throw SchemaError(std::string("agent act '") + act + "' missing");
    }
  }
}

std::uint64_t DomainSchema::hash() const {
  std::uint64_t h = fnv1a("schema", 6);
  for (const auto* list : {&slots, &user_acts, &agent_acts, &informable,
                           &requestable}) {
    for (const auto& n : *list) {
      h = fnv1a(n.data(), n.size(), h);
      h = fnv1a(",", 1, h);
    }
    h = fnv1a(";", 1, h);
  }
  return h;
}

const std::vector<std::string>& mandatory_slots() {
  static const std::vector<std::string> kSlots = {
      "moviename", "theater", "starttime", "date", "city"};
  return kSlots;
}

const DomainSchema& reference_schema() {
  static const DomainSchema kSchema = [] {
    DomainSchema s;
    s.slots = {"city",          "state",        "zip",
               "theater",       "theater_chain", "moviename",
               "genre",         "starttime",    "date",
               "numberofpeople", "video_format", "mpaa_rating",
               "distanceconstraints", "price",  "critic_rating",
               "ticket"};
    s.user_acts = {"greeting", "inform",          "request",
                   "confirm_question", "confirm_answer", "multiple_choice",
                   "thanks",   "deny",            "closing",
                   "not_sure", "welcome"};
    s.agent_acts = s.user_acts;
    s.informable = {"moviename", "city", "date", "starttime", "numberofpeople"};
    s.requestable = {"ticket", "theater", "starttime", "date"};
    s.validate();
    return s;
  }();
  return kSchema;
}

DomainSchema parse_schema(std::string_view text) {
  DomainSchema schema;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto colon = t.find(':');
    if (colon == std::string::npos) {
      throw ParseError("schema line " + std::to_string(line_no) +
                       ": expected 'key: a, b, ...'");
    }
    auto key = trim(std::string_view(t).substr(0, colon));
    auto values = split_list(std::string_view(t).substr(colon + 1));
    if (key == "slots") schema.slots = values;
    else if (key == "user_acts") schema.user_acts = values;
    else if (key == "agent_acts") schema.agent_acts = values;
    else if (key == "informable") schema.informable = values;
    else if (key == "requestable") schema.requestable = values;
    else {
      throw ParseError("schema line " + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }
  schema.validate();
  return schema;
}

DomainSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

std::string format_schema(const DomainSchema& schema) {
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += v[i];
    }
    return out;
  };
  std::string out;
  out += "slots: " + join(schema.slots) + "\n";
  out += "user_acts: " + join(schema.user_acts) + "\n";
  out += "agent_acts: " + join(schema.agent_acts) + "\n";
  out += "informable: " + join(schema.informable) + "\n";
  out += "requestable: " + join(schema.requestable) + "\n";
  return out;
}

}  // namespace dmrl
