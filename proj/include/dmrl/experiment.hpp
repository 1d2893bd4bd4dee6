#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dmrl/dialogue_env.hpp"
#include "dmrl/hybrid_net.hpp"
#include "dmrl/interp.hpp"
#include "dmrl/neural_agent.hpp"
#include "dmrl/user_sim.hpp"

namespace dmrl {

// Key names below are the config-file keys, one for one.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  NoiseConfig noise;
  int epochs = 50;
  int dialogues_per_epoch = 100;
  int eval_dialogues = 100;
  int rbs_episodes = 300;
  Variant variant = Variant::hybrid;
  int updates_per_dialogue = 1;

  int hidden = 64;
  int time_steps = 3;
  int batch_size = 8;
  double sl_learning_rate = 1e-4;
  double rl_learning_rate = 5e-4;
  int replay_size = 40000;
  double epsilon_initial = 0.9;
  double epsilon_min = 0.01;
  double epsilon_decay = 0.001;
  double gamma = 0.9;
  double tau = 0.001;
  std::string target_sync = "per_step";  // per_step (Polyak) | per_epoch (hard copy)
  bool gradient_clip = true;
  double clip_low = -10.0;
  double clip_high = 10.0;
  double l1 = 1e-4;
  std::string optimizer = "adam";  // adam | sgd
  std::string segment_sampling = "episode_uniform";
  int baseline_hidden = 0;  // dqn_baseline width; 0 picks the parameter-parity width

  bool dump_hidden = true;
  bool dump_policy = true;
  std::string kb_path;  // empty: bundled fixture

  void validate() const;  // throws ConfigError
};

ExperimentConfig parse_config(std::string_view json_text);  // unknown keys are errors
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& cfg);

LearnerConfig learner_config(const ExperimentConfig& cfg);
NetConfig net_config(const ExperimentConfig& cfg, const DomainSchema& schema);

// Feedforward width whose parameter count is closest to the hybrid net's.
int parity_hidden_width(const NetConfig& hybrid);

struct EpochMetrics {
  int epoch = 0;
  double success_rate = 0.0;
  double mean_turns = 0.0;
  double mean_return = 0.0;
  double epsilon = 0.0;
  double sl_loss = 0.0;
  double rl_loss = 0.0;
  double mean_abs_h = 0.0;
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const EpochMetrics& m);
std::vector<EpochMetrics> load_metrics(const std::filesystem::path& csv);

// Greedy evaluation over `n` goals drawn from `rng`. Optional sinks collect
// the chosen actions and, for neural agents, per-turn hidden records.
struct EvalSinks {
  std::vector<int>* actions = nullptr;
  std::vector<HiddenRecord>* hidden = nullptr;
  int epoch = 0;
};
EpochMetrics evaluate_agent(const DialogueEnv& env, DialogueAgent& agent, int n,
                            const NoiseConfig& noise, Rng& rng, EvalSinks sinks = {});

struct RunResult {
  std::vector<EpochMetrics> epochs;
  double rule_success_rate = 0.0;
  std::size_t parameter_count = 0;
  std::filesystem::path checkpoint;
};

// Full training run writing config.json, metrics.csv, checkpoint.bin,
// run_info.json and (per config) hidden.csv / policy.csv into `out_dir`.
RunResult train(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                std::ostream* log = nullptr);

// `ckpt` may be the literal "rule" for the handcrafted agent. n must be >= 1.
EpochMetrics evaluate(const std::string& ckpt, int n, double noise, std::uint64_t seed);
EpochMetrics evaluate(const std::string& ckpt, int n, const NoiseConfig& noise, std::uint64_t seed);

// Success-rate plot of a run directory; returns the written SVG path.
std::filesystem::path plot_run(const std::filesystem::path& run_dir);

}  // namespace dmrl
