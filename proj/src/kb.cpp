#include "dmrl/kb.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dmrl/errors.hpp"

namespace dmrl {

KnowledgeBase::KnowledgeBase(DomainSchema schema,
                             std::vector<std::vector<std::string>> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  if (rows_.empty()) throw ParseError("knowledge base has no rows");
  const auto n = static_cast<std::size_t>(schema_.num_slots());
  distinct_.assign(n, {});
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != n) {
      throw ShapeError("row " + std::to_string(r) + " has wrong width");
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (!rows_[r][s].empty()) distinct_[s].push_back(rows_[r][s]);
    }
  }
  for (auto& v : distinct_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

SlotValues KnowledgeBase::row_values(std::size_t i) const {
  SlotValues out;
  const auto& r = rows_.at(i);
  for (int s = 0; s < schema_.num_slots(); ++s) {
    if (!r[s].empty()) out[schema_.slots[s]] = r[s];
  }
  return out;
}

long KnowledgeBase::first_match(const SlotValues& constraints) const {
  std::vector<std::pair<int, const std::string*>> idx;
  for (const auto& [slot, value] : constraints) {
    int s = schema_.slot_index(slot);
    if (s < 0) throw SchemaError("unknown slot '" + slot + "'");
    idx.emplace_back(s, &value);
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    bool ok = std::all_of(idx.begin(), idx.end(), [&](const auto& c) {
      return rows_[r][c.first] == *c.second;
    });
    if (ok) return static_cast<long>(r);
  }
  return -1;
}

KnowledgeBase parse_kb(std::string_view text, const DomainSchema& schema) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> row(schema.num_slots());
    std::size_t pos = 0;
    while (pos < line.size()) {
      auto end = line.find(';', pos);
      if (end == std::string::npos) end = line.size();
      std::string_view pair(line.data() + pos, end - pos);
      pos = end + 1;
      if (pair.empty()) continue;
      auto eq = pair.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("kb line " + std::to_string(line_no) +
                         ": expected slot=value, got '" + std::string(pair) + "'");
      }
      std::string slot(pair.substr(0, eq));
      std::string value(pair.substr(eq + 1));
      int s = schema.slot_index(slot);
      if (s < 0) {
        throw ParseError("kb line " + std::to_string(line_no) +
                         ": unknown slot '" + slot + "'");
      }
      row[s] = std::move(value);
    }
    for (const auto& m : mandatory_slots()) {
      if (row[schema.slot_index(m)].empty()) {
        throw ParseError("kb line " + std::to_string(line_no) +
                         ": missing mandatory slot '" + m + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("kb contains no rows");
  return KnowledgeBase(schema, std::move(rows));
}

KnowledgeBase load_kb(const std::filesystem::path& path,
                      const DomainSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kb file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kb(ss.str(), schema);
}

std::string format_kb(const KnowledgeBase& kb) {
  std::string out;
  const auto& schema = kb.schema();
  for (std::size_t r = 0; r < kb.row_count(); ++r) {
    bool first = true;
    for (int s = 0; s < schema.num_slots(); ++s) {
      const auto& v = kb.value(r, s);
      if (v.empty()) continue;
      if (!first) out += ';';
      out += schema.slots[s] + "=" + v;
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::filesystem::path bundled_kb_path() {
  return std::filesystem::path(DMRL_DATA_DIR) / "kb.txt";
}
std::filesystem::path bundled_schema_path() {
  return std::filesystem::path(DMRL_DATA_DIR) / "schema.txt";
}

namespace {

struct TheaterInfo {
  const char* name;
  const char* chain;
  const char* city;
  const char* state;
  const char* zip;
  const char* distance;
};

struct MovieInfo {
  const char* name;
  const char* genre;
  const char* mpaa;
  const char* critic;
};

}  // namespace

KnowledgeBase generate_kb_fixture(const DomainSchema& schema, std::size_t rows,
                                  std::uint64_t seed) {
  static const TheaterInfo kTheaters[] = {
      {"regal meridian 16", "regal", "seattle", "wa", "98101", "downtown"},
      {"amc pacific place 11", "amc", "seattle", "wa", "98101", "downtown"},
      {"cinerama", "independent", "seattle", "wa", "98121", "near space needle"},
      {"regal lloyd center 10", "regal", "portland", "or", "97232", "east side"},
      {"cinemark century eastport", "cinemark", "portland", "or", "97266", "southeast"},
      {"amc lincoln square 13", "amc", "bellevue", "wa", "98004", "downtown"},
      {"regal crossroads", "regal", "bellevue", "wa", "98008", "east side"},
      {"cinemark redmond 14", "cinemark", "redmond", "wa", "98052", "town center"},
  };
  static const MovieInfo kMovies[] = {
      {"race", "drama", "pg-13", "7.1"},
      {"zootopia", "animation", "pg", "8.0"},
      {"deadpool", "action", "r", "8.1"},
      {"the witch", "horror", "r", "6.8"},
      {"kung fu panda 3", "animation", "pg", "7.2"},
      {"london has fallen", "action", "r", "6.2"},
      {"the revenant", "drama", "r", "8.0"},
      {"hail caesar", "comedy", "pg-13", "6.4"},
      {"eddie the eagle", "comedy", "pg-13", "7.4"},
      {"gods of egypt", "fantasy", "pg-13", "5.5"},
  };
  static const char* kDates[] = {"today", "tomorrow", "friday", "saturday"};
  static const char* kTimes[] = {"1:30pm", "4:00pm", "7:00pm", "9:10pm", "10:00pm"};
  static const char* kPeople[] = {"1", "2", "3", "4"};
  static const char* kFormats[] = {"standard", "3d", "imax"};

  Rng rng = make_rng(seed, 17);
  auto pick = [&](auto& arr) {
    return arr[uniform_int(rng, 0, static_cast<int>(std::size(arr)) - 1)];
  };
  auto put = [&](std::vector<std::string>& row, const char* slot,
                 std::string value) {
    int s = schema.slot_index(slot);
    if (s >= 0) row[s] = std::move(value);
  };

  std::vector<std::vector<std::string>> out;
  std::set<std::string> seen;
  while (out.size() < rows) {
    const auto& th = pick(kTheaters);
    const auto& mv = pick(kMovies);
    std::string date = pick(kDates);
    std::string time = pick(kTimes);
    std::string people = pick(kPeople);
    std::string format = pick(kFormats);
    std::string key = std::string(th.name) + "|" + mv.name + "|" + date + "|" + time;
    if (!seen.insert(key).second) continue;
    std::vector<std::string> row(schema.num_slots());
    put(row, "city", th.city);
    put(row, "state", th.state);
    put(row, "zip", th.zip);
    put(row, "theater", th.name);
    put(row, "theater_chain", th.chain);
    put(row, "moviename", mv.name);
    put(row, "genre", mv.genre);
    put(row, "starttime", time);
    put(row, "date", date);
    put(row, "numberofpeople", people);
    put(row, "video_format", format);
    put(row, "mpaa_rating", mv.mpaa);
    put(row, "distanceconstraints", th.distance);
    put(row, "price", format == "standard" ? "12" : (format == "3d" ? "15" : "18"));
    put(row, "critic_rating", mv.critic);
    out.push_back(std::move(row));
  }
  return KnowledgeBase(schema, std::move(out));
}

KbResult kb_query(const KnowledgeBase& kb, const SlotValues& constraints) {
  const auto& schema = kb.schema();
  const int n = schema.num_slots();
  std::vector<std::pair<int, const std::string*>> idx;
  idx.reserve(constraints.size());
  for (const auto& [slot, value] : constraints) {
    int s = schema.slot_index(slot);
    if (s < 0) throw SchemaError("unknown slot '" + slot + "' in constraints");
    idx.emplace_back(s, &value);
  }
  std::vector<std::size_t> per_slot(n, 0);
  std::size_t all = 0;
  for (std::size_t r = 0; r < kb.row_count(); ++r) {
    const auto& row = kb.row(r);
    bool ok = true;
    for (const auto& [s, v] : idx) {
      if (row[s] == *v) ++per_slot[s];
      else ok = false;
    }
    if (ok) ++all;
  }
  const auto rows = static_cast<float>(kb.row_count());
  KbResult out;
  out.bin.assign(n + 1, 1.0f);
  out.cnt.assign(n + 1, 1.0f);
  for (const auto& [s, v] : idx) {
    out.cnt[s] = static_cast<float>(per_slot[s]) / rows;
    out.bin[s] = per_slot[s] > 0 ? 1.0f : 0.0f;
  }
  out.cnt[n] = static_cast<float>(all) / rows;
  out.bin[n] = all > 0 ? 1.0f : 0.0f;
  return out;
}

Goal sample_goal(const KnowledgeBase& kb, Rng& rng) {
  if (kb.row_count() == 0) throw UsageError("cannot sample a goal from an empty kb");
  const auto& schema = kb.schema();
  Goal goal;
  goal.source_row = uniform_int(rng, 0, static_cast<int>(kb.row_count()) - 1);

  std::vector<std::string> candidates;
  for (const auto& slot : schema.informable) {
    if (!kb.value(goal.source_row, schema.slot_index(slot)).empty()) {
      candidates.push_back(slot);
    }
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const int max_n = std::min<int>(5, static_cast<int>(candidates.size()));
  const int n = max_n < 2 ? max_n : uniform_int(rng, 2, max_n);
  for (int i = 0; i < n; ++i) {
    const auto& slot = candidates[i];
    goal.constraints[slot] = kb.value(goal.source_row, schema.slot_index(slot));
  }

  goal.requests.insert(std::string(kTicketSlot));
  std::vector<std::string> extra;
  for (const char* slot : {"theater", "starttime", "date"}) {
    if (schema.has_slot(slot) && !goal.constraints.count(slot)) {
      extra.emplace_back(slot);
    }
  }
  std::shuffle(extra.begin(), extra.end(), rng);
  const int m = uniform_int(rng, 0, std::min<int>(2, static_cast<int>(extra.size())));
  for (int i = 0; i < m; ++i) goal.requests.insert(extra[i]);
  return goal;
}

bool goal_satisfiable(const KnowledgeBase& kb, const Goal& goal) {
  return kb.first_match(goal.constraints) >= 0;
}

}  // namespace dmrl
