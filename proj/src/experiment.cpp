#include "dmrl/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "dmrl/errors.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/nn/checkpoint.hpp"
#include "dmrl/replay_buffer.hpp"
#include "dmrl/svg.hpp"

namespace dmrl {

using nlohmann::json;

namespace {

// RNG stream ids; one per consumer so changing one consumer's draw count
// never shifts another's.
enum Stream : std::uint64_t {
  kCollect = 1,
  kLearn = 2,
  kExplore = 3,
  kRbs = 4,
  kInit = 5,
  kRuleRate = 6,
  kEvalBase = 1000,
};

constexpr int kRuleRateDialogues = 1000;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

template <typename T>
void take(json& j, const char* key, T& dst) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    dst = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
  j.erase(it);
}

std::string fixed(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

json to_json(const ExperimentConfig& c) {
  return json{
      {"seed", c.seed},
      {"noise",
       {{"slot_error_prob", c.noise.slot_error_prob},
        {"intent_error_prob", c.noise.intent_error_prob},
        {"error_mix", c.noise.error_mix}}},
      {"epochs", c.epochs},
      {"dialogues_per_epoch", c.dialogues_per_epoch},
      {"eval_dialogues", c.eval_dialogues},
      {"rbs_episodes", c.rbs_episodes},
      {"variant", to_string(c.variant)},
      {"updates_per_dialogue", c.updates_per_dialogue},
      {"hidden", c.hidden},
      {"time_steps", c.time_steps},
      {"batch_size", c.batch_size},
      {"sl_learning_rate", c.sl_learning_rate},
      {"rl_learning_rate", c.rl_learning_rate},
      {"replay_size", c.replay_size},
      {"epsilon_initial", c.epsilon_initial},
      {"epsilon_min", c.epsilon_min},
      {"epsilon_decay", c.epsilon_decay},
      {"gamma", c.gamma},
      {"tau", c.tau},
      {"target_sync", c.target_sync},
      {"gradient_clip", c.gradient_clip},
      {"clip_low", c.clip_low},
      {"clip_high", c.clip_high},
      {"l1", c.l1},
      {"optimizer", c.optimizer},
      {"segment_sampling", c.segment_sampling},
      {"baseline_hidden", c.baseline_hidden},
      {"dump_hidden", c.dump_hidden},
      {"dump_policy", c.dump_policy},
      {"kb_path", c.kb_path},
  };
}

}  // namespace

void ExperimentConfig::validate() const {
  noise.validate();
  require(epochs > 0, "epochs must be positive");
  require(dialogues_per_epoch > 0, "dialogues_per_epoch must be positive");
  require(eval_dialogues > 0, "eval_dialogues must be positive");
  require(rbs_episodes >= 0, "rbs_episodes must be non-negative");
  require(updates_per_dialogue >= 0, "updates_per_dialogue must be non-negative");
  require(hidden > 0, "hidden must be positive");
  require(time_steps > 0, "time_steps must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(sl_learning_rate > 0 && rl_learning_rate > 0, "learning rates must be positive");
  require(replay_size > 0, "replay_size must be positive");
  require(epsilon_min >= 0 && epsilon_initial >= epsilon_min && epsilon_initial <= 1,
          "epsilon schedule must satisfy 0 <= min <= initial <= 1");
  require(epsilon_decay >= 0, "epsilon_decay must be non-negative");
  require(gamma >= 0 && gamma <= 1, "gamma must lie in [0, 1]");
  require(tau > 0 && tau <= 1, "tau must lie in (0, 1]");
  require(target_sync == "per_step" || target_sync == "per_epoch",
          "target_sync must be per_step or per_epoch");
  require(clip_low < clip_high, "clip_low must be below clip_high");
  require(l1 >= 0, "l1 must be non-negative");
  require(optimizer == "adam" || optimizer == "sgd", "optimizer must be adam or sgd");
  require(segment_sampling == "episode_uniform" || segment_sampling == "transition_uniform",
          "segment_sampling must be episode_uniform or transition_uniform");
  require(baseline_hidden >= 0, "baseline_hidden must be non-negative");
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  take(j, "seed", c.seed);
  if (auto it = j.find("noise"); it != j.end()) {
    json n = *it;
    if (!n.is_object()) throw ConfigError("config key 'noise' must be an object");
    take(n, "slot_error_prob", c.noise.slot_error_prob);
    take(n, "intent_error_prob", c.noise.intent_error_prob);
    take(n, "error_mix", c.noise.error_mix);
    if (!n.empty()) throw ConfigError("unknown noise key '" + n.begin().key() + "'");
    j.erase(it);
  }
  take(j, "epochs", c.epochs);
  take(j, "dialogues_per_epoch", c.dialogues_per_epoch);
  take(j, "eval_dialogues", c.eval_dialogues);
  take(j, "rbs_episodes", c.rbs_episodes);
  std::string variant = to_string(c.variant);
  take(j, "variant", variant);
  c.variant = parse_variant(variant);
  take(j, "updates_per_dialogue", c.updates_per_dialogue);
  take(j, "hidden", c.hidden);
  take(j, "time_steps", c.time_steps);
  take(j, "batch_size", c.batch_size);
  take(j, "sl_learning_rate", c.sl_learning_rate);
  take(j, "rl_learning_rate", c.rl_learning_rate);
  take(j, "replay_size", c.replay_size);
  take(j, "epsilon_initial", c.epsilon_initial);
  take(j, "epsilon_min", c.epsilon_min);
  take(j, "epsilon_decay", c.epsilon_decay);
  take(j, "gamma", c.gamma);
  take(j, "tau", c.tau);
  take(j, "target_sync", c.target_sync);
  take(j, "gradient_clip", c.gradient_clip);
  take(j, "clip_low", c.clip_low);
  take(j, "clip_high", c.clip_high);
  take(j, "l1", c.l1);
  take(j, "optimizer", c.optimizer);
  take(j, "segment_sampling", c.segment_sampling);
  take(j, "baseline_hidden", c.baseline_hidden);
  take(j, "dump_hidden", c.dump_hidden);
  take(j, "dump_policy", c.dump_policy);
  take(j, "kb_path", c.kb_path);
  if (!j.empty()) throw ConfigError("unknown config key '" + j.begin().key() + "'");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

LearnerConfig learner_config(const ExperimentConfig& c) {
  LearnerConfig l;
  l.batch_size = c.batch_size;
  l.time_steps = c.time_steps;
  l.gamma = c.gamma;
  l.sl_lr = c.sl_learning_rate;
  l.rl_lr = c.rl_learning_rate;
  l.tau = c.tau;
  l.l1 = c.l1;
  l.clip = c.gradient_clip;
  l.clip_low = c.clip_low;
  l.clip_high = c.clip_high;
  l.optimizer = c.optimizer == "sgd" ? nn::OptimizerKind::sgd : nn::OptimizerKind::adam;
  l.target_sync = c.target_sync == "per_epoch" ? TargetSync::per_epoch : TargetSync::per_step;
  l.segment_sampling = c.segment_sampling == "transition_uniform"
                           ? SegmentSampling::transition_uniform
                           : SegmentSampling::episode_uniform;
  return l;
}

int parity_hidden_width(const NetConfig& hybrid) {
  const auto target = static_cast<double>(online_parameter_count(hybrid));
  NetConfig ff = hybrid;
  ff.encoder = EncoderKind::feedforward;
  ff.sl_heads = false;
  // Parameter count is affine in the width: count(H) = a*H + b.
  ff.hidden = 1;
  const auto c1 = static_cast<double>(online_parameter_count(ff));
  ff.hidden = 2;
  const auto c2 = static_cast<double>(online_parameter_count(ff));
  const double a = c2 - c1, b = c1 - a;
  return std::max(1, static_cast<int>(std::lround((target - b) / a)));
}

NetConfig net_config(const ExperimentConfig& c, const DomainSchema& schema) {
  NetConfig n;
  const ObservationLayout layout(schema);
  n.obs_size = layout.size;
  n.current_slots_size = schema.num_slots();
  n.hidden = c.hidden;
  n.actions = ActionCatalog(schema).size();
  n.user_acts = schema.num_user_acts();
  n.slots = schema.num_slots();
  n.encoder = encoder_for(c.variant);
  n.sl_heads = uses_sl_heads(c.variant);
  if (c.variant == Variant::dqn_baseline) {
    if (c.baseline_hidden > 0) {
      n.hidden = c.baseline_hidden;
    } else {
      NetConfig ref = n;
      ref.encoder = EncoderKind::lstm;
      ref.sl_heads = true;
      n.hidden = parity_hidden_width(ref);
    }
  }
  return n;
}

void write_metrics_header(std::ostream& out) {
  out << "epoch,success_rate,mean_turns,mean_return,epsilon,sl_loss,rl_loss,mean_abs_h\n";
}

void write_metrics_row(std::ostream& out, const EpochMetrics& m) {
  out << m.epoch << ',' << fixed(m.success_rate, 4) << ',' << fixed(m.mean_turns, 4) << ','
      << fixed(m.mean_return, 4) << ',' << fixed(m.epsilon, 6) << ',' << fixed(m.sl_loss, 6)
      << ',' << fixed(m.rl_loss, 6) << ',' << fixed(m.mean_abs_h, 6) << '\n';
}

std::vector<EpochMetrics> load_metrics(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw IoError("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  if (line != "epoch,success_rate,mean_turns,mean_return,epsilon,sl_loss,rl_loss,mean_abs_h") {
    throw ParseError(csv.string() + ": unexpected metrics header");
  }
  std::vector<EpochMetrics> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    EpochMetrics m;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &m.epoch, &m.success_rate,
                    &m.mean_turns, &m.mean_return, &m.epsilon, &m.sl_loss, &m.rl_loss,
                    &m.mean_abs_h) != 8) {
      throw ParseError(csv.string() + ": bad row at line " + std::to_string(line_no));
    }
    out.push_back(m);
  }
  return out;
}

EpochMetrics evaluate_agent(const DialogueEnv& env, DialogueAgent& agent, int n,
                            const NoiseConfig& noise, Rng& rng, EvalSinks sinks) {
  if (n <= 0) throw ConfigError("evaluation needs at least one dialogue");
  auto* neural = dynamic_cast<NeuralAgent*>(&agent);
  if (neural) neural->record_hidden(sinks.hidden != nullptr);
  EpochMetrics m;
  m.epoch = sinks.epoch;
  int successes = 0;
  double turns = 0, ret = 0;
  for (int d = 0; d < n; ++d) {
    const Goal goal = sample_goal(env.kb(), rng);
    const Episode ep = env.run_dialogue(agent, goal, Mode::eval, noise, rng);
    successes += ep.success ? 1 : 0;
    turns += static_cast<double>(ep.size());
    ret += ep.total_return();
    if (sinks.actions) {
      for (const auto& t : ep.steps) sinks.actions->push_back(t.action);
    }
    if (sinks.hidden && neural) {
      const auto& trace = neural->hidden_trace();
      for (std::size_t t = 0; t < ep.steps.size() && t < trace.size(); ++t) {
        sinks.hidden->push_back({sinks.epoch, d, static_cast<int>(t), ep.steps[t].terminal,
                                 trace[t], ep.steps[t].current_slots});
      }
    }
  }
  if (neural) neural->record_hidden(false);
  m.success_rate = static_cast<double>(successes) / n;
  m.mean_turns = turns / n;
  m.mean_return = ret / n;
  return m;
}

namespace {

KnowledgeBase load_run_kb(const ExperimentConfig& cfg) {
  return load_kb(cfg.kb_path.empty() ? bundled_kb_path() : std::filesystem::path(cfg.kb_path));
}

}  // namespace

RunResult train(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                std::ostream* log) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const KnowledgeBase kb = load_run_kb(cfg);
  const DialogueEnv env(kb);
  open_out(out_dir / "config.json") << format_config(cfg);

  RunResult result;
  {
    RulePolicy rule(env);
    Rng rng = make_rng(cfg.seed, kRuleRate);
    result.rule_success_rate =
        evaluate_agent(env, rule, kRuleRateDialogues, cfg.noise, rng).success_rate;
  }

  const NetConfig ncfg = net_config(cfg, kb.schema());
  HybridNet<float> net(ncfg);
  {
    Rng init = make_rng(cfg.seed, kInit);
    net.init_uniform(init);
  }
  result.parameter_count = net.online.parameter_count();

  const EpsilonSchedule schedule{cfg.epsilon_initial, cfg.epsilon_min, cfg.epsilon_decay};
  NeuralAgent agent(net, schedule, mix_seed(cfg.seed, kExplore));
  Learner learner(net, cfg.variant, learner_config(cfg));
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.replay_size));
  {
    Rng rbs = make_rng(cfg.seed, kRbs);
    rbs_fill(buffer, env, cfg.noise, cfg.rbs_episodes, rbs);
  }

  Rng collect = make_rng(cfg.seed, kCollect);
  Rng learn = make_rng(cfg.seed, kLearn);
  const std::uint64_t schema_hash = kb.schema().hash();
  result.checkpoint = out_dir / "checkpoint.bin";

  auto metrics = open_out(out_dir / "metrics.csv");
  write_metrics_header(metrics);
  std::ofstream hidden_out, policy_out;
  if (cfg.dump_hidden) {
    hidden_out = open_out(out_dir / "hidden.csv");
    write_hidden_header(hidden_out, ncfg.belief_size(), kb.schema().num_slots());
  }
  std::vector<PolicyHistogram> hists;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double sl = 0, rl = 0, abs_h = 0;
    int updates = 0;
    try {
      for (int d = 0; d < cfg.dialogues_per_epoch; ++d) {
        const Goal goal = sample_goal(kb, collect);
        Episode ep = env.run_dialogue(agent, goal, Mode::train, cfg.noise, collect);
        buffer.push_episode(std::move(ep));
        for (int u = 0; u < cfg.updates_per_dialogue; ++u) {
          const TrainMetrics tm = learner.train_step(buffer, learn);
          if (tm.skipped) {
            if (log) *log << "warning: replay buffer too small, update skipped\n";
            continue;
          }
          sl += tm.sl_loss;
          rl += tm.rl_loss;
          abs_h += tm.mean_abs_h;
          ++updates;
        }
      }
    } catch (const NumericError&) {
      nn::save_checkpoint(out_dir / "diagnostic.bin", make_checkpoint(net, cfg.variant, schema_hash));
      throw;
    }
    learner.end_epoch();

    std::vector<int> actions;
    std::vector<HiddenRecord> records;
    Rng eval = make_rng(cfg.seed, kEvalBase + static_cast<std::uint64_t>(epoch));
    EvalSinks sinks{cfg.dump_policy ? &actions : nullptr, cfg.dump_hidden ? &records : nullptr,
                    epoch};
    EpochMetrics m = evaluate_agent(env, agent, cfg.eval_dialogues, cfg.noise, eval, sinks);
    m.epsilon = agent.epsilon();
    if (updates > 0) {
      m.sl_loss = sl / updates;
      m.rl_loss = rl / updates;
      m.mean_abs_h = abs_h / updates;
    }
    write_metrics_row(metrics, m);
    metrics.flush();
    if (cfg.dump_hidden) append_hidden_rows(hidden_out, records);
    if (cfg.dump_policy) hists.push_back(policy_histogram(epoch, actions, ncfg.actions));
    nn::save_checkpoint(result.checkpoint, make_checkpoint(net, cfg.variant, schema_hash));
    result.epochs.push_back(m);
    if (log) {
      *log << "epoch " << epoch << " success " << fixed(m.success_rate, 2) << " turns "
           << fixed(m.mean_turns, 2) << " eps " << fixed(m.epsilon, 3) << " rl "
           << fixed(m.rl_loss, 4) << " sl " << fixed(m.sl_loss, 4) << '\n';
    }
  }
  if (cfg.dump_policy) {
    policy_out = open_out(out_dir / "policy.csv");
    write_policy_histograms(policy_out, hists);
  }

  json info{{"variant", to_string(cfg.variant)},
            {"seed", cfg.seed},
            {"rule_success_rate", result.rule_success_rate},
            {"parameter_count", result.parameter_count},
            {"hidden", ncfg.hidden},
            {"schema_hash", schema_hash}};
  open_out(out_dir / "run_info.json") << info.dump(2) << '\n';
  return result;
}

EpochMetrics evaluate(const std::string& ckpt, int n, double noise, std::uint64_t seed) {
  NoiseConfig cfg;
  cfg.slot_error_prob = noise;
  return evaluate(ckpt, n, cfg, seed);
}

EpochMetrics evaluate(const std::string& ckpt, int n, const NoiseConfig& noise, std::uint64_t seed) {
  if (n <= 0) throw ConfigError("n must be at least 1");
  noise.validate();
  const KnowledgeBase kb = load_kb(bundled_kb_path());
  const DialogueEnv env(kb);
  Rng rng = make_rng(seed, kEvalBase);
  if (ckpt == "rule") {
    RulePolicy rule(env);
    return evaluate_agent(env, rule, n, noise, rng);
  }
  const nn::Checkpoint ck = nn::load_checkpoint(ckpt, kb.schema().hash());
  HybridNet<float> net = net_from_checkpoint(ck);
  NeuralAgent agent(net, EpsilonSchedule{}, seed);
  return evaluate_agent(env, agent, n, noise, rng);
}

std::filesystem::path plot_run(const std::filesystem::path& run_dir) {
  const auto csv = run_dir / "metrics.csv";
  if (!std::filesystem::exists(csv)) throw IoError("missing " + csv.string());
  const auto rows = load_metrics(csv);
  std::vector<double> ys;
  for (const auto& r : rows) ys.push_back(r.success_rate);
  std::vector<HLine> refs;
  const auto info_path = run_dir / "run_info.json";
  if (std::filesystem::exists(info_path)) {
    std::ifstream in(info_path);
    const json info = json::parse(in, nullptr, false);
    if (info.is_object() && info.contains("rule_success_rate")) {
      refs.push_back({info["rule_success_rate"].get<double>(), "#2ca02c", "rule agent"});
    }
  }
  refs.push_back({0.9, "#d62728", "0.9"});
  const auto out = run_dir / "success_rate.svg";
  open_out(out) << svg_line_chart("success rate per epoch", ys, 0.0, 1.0, refs);
  return out;
}

}  // namespace dmrl
