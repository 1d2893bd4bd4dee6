#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "dmrl/dialogue_env.hpp"
#include "dmrl/episode.hpp"
#include "dmrl/hybrid_net.hpp"
#include "dmrl/rng.hpp"

namespace dmrl {

inline constexpr std::size_t kReplayCapacity = 40000;

// Prediction window of `length` steps at `start`; every earlier step of the
// same episode is its burn-in.
struct SampledSegment {
  std::shared_ptr<const Episode> episode;
  std::uint64_t episode_id = 0;
  int start = 0;
  int length = 0;

  std::span<const Transition> burn_in() const {
    return std::span<const Transition>(episode->steps).first(start);
  }
  std::span<const Transition> prediction() const {
    return std::span<const Transition>(episode->steps).subspan(start, length);
  }
  SegmentRef ref() const { return {episode.get(), start, length}; }
};

enum class SegmentSampling {
  // Episode uniformly, then start uniformly among its valid starts.
  episode_uniform,
  // Uniformly over all (episode, start) pairs in the buffer.
  transition_uniform,
};

// Whole-episode FIFO; capacity counts transitions and eviction drops the
// oldest episodes until the count fits.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = kReplayCapacity) : capacity_(capacity) {}

  void push_episode(Episode ep);

  std::vector<SampledSegment> sample_segments(
      int n, int s, Rng& rng,
      SegmentSampling mode = SegmentSampling::episode_uniform) const;

  std::size_t capacity() const { return capacity_; }
  std::size_t transition_count() const { return transitions_; }
  std::size_t episode_count() const { return episodes_.size(); }
  const Episode& episode(std::size_t i) const { return *episodes_.at(i).episode; }
  std::uint64_t episode_id(std::size_t i) const { return episodes_.at(i).id; }

  // Order-sensitive hash of the stored episodes.
  std::uint64_t content_hash() const;

  std::vector<Episode> snapshot() const;

 private:
  struct Entry {
    std::shared_ptr<const Episode> episode;
    std::uint64_t id;
  };
  std::size_t capacity_;
  std::size_t transitions_ = 0;
  std::uint64_t next_id_ = 0;
  std::deque<Entry> episodes_;
};

// Replay Buffer Spiking: plays `episodes` rule-agent dialogues with goals
// drawn from `rng` and pushes them (tagged EpisodeSource::rule).
void rbs_fill(ReplayBuffer& buffer, const DialogueEnv& env, const NoiseConfig& noise,
              int episodes, Rng& rng);

}  // namespace dmrl
