#pragma once

#include <cstdint>
#include <vector>

#include "dmrl/dialogue_env.hpp"
#include "dmrl/epsilon.hpp"
#include "dmrl/hybrid_net.hpp"
#include "dmrl/nn/checkpoint.hpp"
#include "dmrl/nn/optim.hpp"
#include "dmrl/replay_buffer.hpp"

namespace dmrl {

// Epsilon-greedy choice over Q values; eval mode is always greedy.
int select_action(std::span<const float> q, double epsilon, Mode mode, Rng& rng);

// Acting side of a learned agent: tracks the belief state across one
// dialogue and picks actions from the online Q head.
class NeuralAgent : public DialogueAgent {
 public:
  NeuralAgent(HybridNet<float>& net, EpsilonSchedule schedule, std::uint64_t seed);

  void begin_dialogue() override;
  int act(const DialogueView& view, Mode mode) override;

  long step_count() const { return steps_; }
  void set_step_count(long n) { steps_ = n; }
  double epsilon() const { return schedule_.at(steps_); }

  // Belief vectors of the current dialogue, one per action taken.
  void record_hidden(bool on) { record_ = on; }
  const std::vector<std::vector<float>>& hidden_trace() const { return trace_; }

 private:
  HybridNet<float>& net_;
  EpsilonSchedule schedule_;
  Rng rng_;
  long steps_ = 0;
  bool record_ = false;
  BeliefState<float> state_;
  std::vector<std::vector<float>> trace_;
};

enum class TargetSync { per_step, per_epoch };

struct LearnerConfig {
  int batch_size = 8;
  int time_steps = 3;
  double gamma = 0.9;
  double sl_lr = 1e-4;
  double rl_lr = 5e-4;
  double tau = 0.001;
  double l1 = 1e-4;
  bool clip = true;
  double clip_low = nn::kClipLow;
  double clip_high = nn::kClipHigh;
  nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
  TargetSync target_sync = TargetSync::per_step;
  SegmentSampling segment_sampling = SegmentSampling::episode_uniform;
};

struct TrainMetrics {
  long step = 0;
  double sl_loss = 0.0;
  double rl_loss = 0.0;
  double mean_abs_h = 0.0;
  double epsilon = 0.0;
  bool skipped = false;
};

// Interleaved SL and RL updates on replayed segments.
class Learner {
 public:
  Learner(HybridNet<float>& net, Variant variant, const LearnerConfig& cfg);

  // One SL update (when the variant has SL heads), one RL update, then a
  // Polyak step of the target network (per_step sync). Skips with
  // `skipped = true` while the buffer holds fewer transitions than a batch.
  TrainMetrics train_step(const ReplayBuffer& buffer, Rng& rng);

  // Hard target copy for per_epoch sync; no-op otherwise.
  void end_epoch();

  // Clip (when enabled) and apply gradients with the SL or RL optimizer.
  void apply_gradients(nn::GradientSet<float> grads, bool rl);

  long steps() const { return steps_; }
  const LearnerConfig& config() const { return cfg_; }

 private:
  HybridNet<float>& net_;
  Variant variant_;
  LearnerConfig cfg_;
  nn::Optimizer<float> sl_opt_;
  nn::Optimizer<float> rl_opt_;
  long steps_ = 0;
};

nn::Checkpoint make_checkpoint(const HybridNet<float>& net, Variant variant,
                               std::uint64_t schema_hash);
// Rebuilds the network stored in a checkpoint.
HybridNet<float> net_from_checkpoint(const nn::Checkpoint& ckpt, Variant* variant = nullptr);

}  // namespace dmrl
