#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dmrl/frame.hpp"

namespace dmrl {

struct Transition {
  std::vector<float> obs;
  int action = 0;
  float reward = 0.0f;
  // Encoded user segments of the following observation; empty at the
  // terminal step.
  std::vector<float> next_user;
  // OR-accumulated slot-filled indicator of the handcrafted tracker, as of
  // this observation.
  std::vector<float> current_slots;
  bool terminal = false;
  bool success = false;
};

enum class EpisodeSource { agent, rule };

struct Episode {
  std::vector<Transition> steps;
  EpisodeSource source = EpisodeSource::agent;
  bool success = false;
  std::vector<TranscriptLine> transcript;

  std::size_t size() const { return steps.size(); }
  double total_return() const;
};

// Text dump, one line per transition:
//   episode,step,source,action,reward,terminal,success,has_next,
//   obs_0..obs_{O-1},next_0..next_{U-1},cs_0..cs_{S-1}
// preceded by a header naming the columns. next_* is zero-filled when
// has_next is 0. Floats are written with 9 significant digits, which
// round-trips exactly.
void write_episodes(std::ostream& out, const std::vector<Episode>& episodes);
std::vector<Episode> read_episodes(std::istream& in);
void save_episodes(const std::filesystem::path& path, const std::vector<Episode>& episodes);
std::vector<Episode> load_episodes(const std::filesystem::path& path);

std::uint64_t episode_hash(const Episode& ep, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace dmrl
