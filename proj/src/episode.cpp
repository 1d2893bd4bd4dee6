#include "dmrl/episode.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dmrl/errors.hpp"
#include "dmrl/rng.hpp"

namespace dmrl {

double Episode::total_return() const {
  double r = 0.0;
  for (const auto& t : steps) r += t.reward;
  return r;
}

namespace {

void put_float(std::string& line, float v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(v));
  line += buf;
}

}  // namespace

void write_episodes(std::ostream& out, const std::vector<Episode>& episodes) {
  std::size_t obs_n = 0, user_n = 0, cs_n = 0;
  for (const auto& ep : episodes) {
    for (const auto& t : ep.steps) {
      obs_n = t.obs.size();
      cs_n = t.current_slots.size();
      if (!t.next_user.empty()) user_n = t.next_user.size();
    }
  }
  out << "episode,step,source,action,reward,terminal,success,has_next";
  for (std::size_t i = 0; i < obs_n; ++i) out << ",obs_" << i;
  for (std::size_t i = 0; i < user_n; ++i) out << ",next_" << i;
  for (std::size_t i = 0; i < cs_n; ++i) out << ",cs_" << i;
  out << '\n';
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& ep = episodes[e];
    for (std::size_t s = 0; s < ep.steps.size(); ++s) {
      const auto& t = ep.steps[s];
      if (t.obs.size() != obs_n || t.current_slots.size() != cs_n ||
          (!t.next_user.empty() && t.next_user.size() != user_n)) {
        throw ShapeError("episodes have inconsistent widths");
      }
      std::string line = std::to_string(e) + "," + std::to_string(s) + "," +
                         (ep.source == EpisodeSource::rule ? "rule" : "agent") + "," +
                         std::to_string(t.action);
      put_float(line, t.reward);
      line += t.terminal ? ",1" : ",0";
      line += t.success ? ",1" : ",0";
      line += t.next_user.empty() ? ",0" : ",1";
      for (float v : t.obs) put_float(line, v);
      for (std::size_t i = 0; i < user_n; ++i) {
        put_float(line, t.next_user.empty() ? 0.0f : t.next_user[i]);
      }
      for (float v : t.current_slots) put_float(line, v);
      out << line << '\n';
    }
  }
}

std::vector<Episode> read_episodes(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("episode dump is empty");
  std::size_t obs_n = 0, user_n = 0, cs_n = 0;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("obs_", 0) == 0) ++obs_n;
      else if (col.rfind("next_", 0) == 0) ++user_n;
      else if (col.rfind("cs_", 0) == 0) ++cs_n;
    }
  }
  std::vector<Episode> out;
  std::string line;
  int line_no = 1;
  long last_episode = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    if (cols.size() != 8 + obs_n + user_n + cs_n) {
      throw ParseError("episode dump line " + std::to_string(line_no) + ": wrong column count");
    }
    const long e = std::stol(cols[0]);
    if (e != last_episode) {
      out.emplace_back();
      out.back().source = cols[2] == "rule" ? EpisodeSource::rule : EpisodeSource::agent;
      last_episode = e;
    }
    Transition t;
    t.action = std::stoi(cols[3]);
    t.reward = std::stof(cols[4]);
    t.terminal = cols[5] == "1";
    t.success = cols[6] == "1";
    const bool has_next = cols[7] == "1";
    std::size_t k = 8;
    for (std::size_t i = 0; i < obs_n; ++i) t.obs.push_back(std::stof(cols[k++]));
    for (std::size_t i = 0; i < user_n; ++i) {
      float v = std::stof(cols[k++]);
      if (has_next) t.next_user.push_back(v);
    }
    for (std::size_t i = 0; i < cs_n; ++i) t.current_slots.push_back(std::stof(cols[k++]));
    if (t.terminal) out.back().success = t.success;
    out.back().steps.push_back(std::move(t));
  }
  return out;
}

void save_episodes(const std::filesystem::path& path, const std::vector<Episode>& episodes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_episodes(out, episodes);
}

std::vector<Episode> load_episodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_episodes(in);
}

std::uint64_t episode_hash(const Episode& ep, std::uint64_t h) {
  for (const auto& t : ep.steps) {
    h = fnv1a(t.obs.data(), t.obs.size() * sizeof(float), h);
    h = fnv1a(&t.action, sizeof t.action, h);
    h = fnv1a(&t.reward, sizeof t.reward, h);
    h = fnv1a(t.next_user.data(), t.next_user.size() * sizeof(float), h);
    const unsigned char flags = (t.terminal ? 1 : 0) | (t.success ? 2 : 0);
    h = fnv1a(&flags, 1, h);
  }
  const unsigned char src = ep.source == EpisodeSource::rule ? 1 : 0;
  return fnv1a(&src, 1, h);
}

}  // namespace dmrl
