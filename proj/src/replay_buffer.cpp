#include "dmrl/replay_buffer.hpp"

#include <algorithm>

#include "dmrl/errors.hpp"

namespace dmrl {

void ReplayBuffer::push_episode(Episode ep) {
  if (ep.steps.empty()) throw UsageError("cannot store an empty episode");
  transitions_ += ep.steps.size();
  episodes_.push_back({std::make_shared<const Episode>(std::move(ep)), next_id_++});
  while (transitions_ > capacity_ && !episodes_.empty()) {
    transitions_ -= episodes_.front().episode->steps.size();
    episodes_.pop_front();
  }
}

std::vector<SampledSegment> ReplayBuffer::sample_segments(int n, int s, Rng& rng,
                                                          SegmentSampling mode) const {
  if (episodes_.empty()) throw UsageError("sampling from an empty replay buffer");
  if (n <= 0 || s <= 0) throw UsageError("segment count and length must be positive");
  auto valid_starts = [s](const Episode& ep) {
    const int len = static_cast<int>(ep.steps.size());
    return len - std::min(s, len) + 1;
  };
  std::vector<double> weights;
  if (mode == SegmentSampling::transition_uniform) {
    weights.reserve(episodes_.size());
    for (const auto& e : episodes_) weights.push_back(valid_starts(*e.episode));
  }
  std::vector<SampledSegment> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::size_t idx;
    if (mode == SegmentSampling::episode_uniform) {
      idx = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(episodes_.size()) - 1));
    } else {
      idx = static_cast<std::size_t>(
          std::discrete_distribution<int>(weights.begin(), weights.end())(rng));
    }
    const auto& e = episodes_[idx];
    const int len = static_cast<int>(e.episode->steps.size());
    const int length = std::min(s, len);
    const int start = uniform_int(rng, 0, valid_starts(*e.episode) - 1);
    out.push_back({e.episode, e.id, start, length});
  }
  return out;
}

std::uint64_t ReplayBuffer::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& e : episodes_) h = episode_hash(*e.episode, h);
  return h;
}

std::vector<Episode> ReplayBuffer::snapshot() const {
  std::vector<Episode> out;
  out.reserve(episodes_.size());
  for (const auto& e : episodes_) out.push_back(*e.episode);
  return out;
}

void rbs_fill(ReplayBuffer& buffer, const DialogueEnv& env, const NoiseConfig& noise,
              int episodes, Rng& rng) {
  RulePolicy rule(env);
  for (int i = 0; i < episodes; ++i) {
    const Goal goal = sample_goal(env.kb(), rng);
    Episode ep = env.run_dialogue(rule, goal, Mode::train, noise, rng);
    ep.source = EpisodeSource::rule;
    buffer.push_episode(std::move(ep));
  }
}

}  // namespace dmrl
