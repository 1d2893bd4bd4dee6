#include "dmrl/neural_agent.hpp"

#include <string>

namespace dmrl {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::hybrid: return "hybrid";
    case Variant::drqn_only: return "drqn_only";
    case Variant::dqn_baseline: return "dqn_baseline";
    case Variant::hybrid_current_slots: return "hybrid_current_slots";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  for (auto v : {Variant::hybrid, Variant::drqn_only, Variant::dqn_baseline,
                 Variant::hybrid_current_slots}) {
    if (s == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + s + "'");
}

EncoderKind encoder_for(Variant v) {
  switch (v) {
    case Variant::dqn_baseline: return EncoderKind::feedforward;
    case Variant::hybrid_current_slots: return EncoderKind::current_slots;
    default: return EncoderKind::lstm;
  }
}

bool uses_sl_heads(Variant v) {
  return v == Variant::hybrid || v == Variant::hybrid_current_slots;
}

std::size_t online_parameter_count(const NetConfig& cfg) {
  return HybridNet<float>(cfg).online.parameter_count();
}

int select_action(std::span<const float> q, double epsilon, Mode mode, Rng& rng) {
  if (mode == Mode::train && uniform01(rng) < epsilon) {
    return uniform_int(rng, 0, static_cast<int>(q.size()) - 1);
  }
  return argmax(q);
}

NeuralAgent::NeuralAgent(HybridNet<float>& net, EpsilonSchedule schedule, std::uint64_t seed)
    : net_(net), schedule_(schedule), rng_(make_rng(seed, 3)), state_(net.zero_state()) {}

void NeuralAgent::begin_dialogue() {
  state_ = net_.zero_state();
  trace_.clear();
}

int NeuralAgent::act(const DialogueView& view, Mode mode) {
  state_ = net_.step(Which::online, to_vec<float>(view.obs.values),
                     to_vec<float>(view.current_slots), state_);
  if (record_) trace_.emplace_back(state_.h.data(), state_.h.data() + state_.h.size());
  const Eigen::VectorXf q = net_.q_values(state_.h, Which::online);
  const int a = select_action(std::span<const float>(q.data(), q.size()), epsilon(), mode, rng_);
  if (mode == Mode::train) ++steps_;
  return a;
}

Learner::Learner(HybridNet<float>& net, Variant variant, const LearnerConfig& cfg)
    : net_(net),
      variant_(variant),
      cfg_(cfg),
      sl_opt_(cfg.optimizer, cfg.sl_lr),
      rl_opt_(cfg.optimizer, cfg.rl_lr) {}

void Learner::apply_gradients(nn::GradientSet<float> grads, bool rl) {
  if (cfg_.clip) {
    nn::clip_gradients(grads, static_cast<float>(cfg_.clip_low),
                       static_cast<float>(cfg_.clip_high));
  }
  (rl ? rl_opt_ : sl_opt_).step(net_.online, grads);
}

TrainMetrics Learner::train_step(const ReplayBuffer& buffer, Rng& rng) {
  TrainMetrics m;
  m.step = steps_;
  if (buffer.transition_count() < static_cast<std::size_t>(cfg_.batch_size)) {
    m.skipped = true;
    return m;
  }
  auto refs = [](const std::vector<SampledSegment>& segs) {
    std::vector<SegmentRef> out;
    out.reserve(segs.size());
    for (const auto& s : segs) out.push_back(s.ref());
    return out;
  };

  if (uses_sl_heads(variant_)) {
    const auto segs = buffer.sample_segments(cfg_.batch_size, cfg_.time_steps, rng,
                                             cfg_.segment_sampling);
    const auto batch = refs(segs);
    auto grads = net_.online.zeros_like();
    const auto r = loss_and_gradients<float>(net_, batch, nullptr,
                                             {true, false, cfg_.l1, cfg_.gamma}, &grads);
    m.sl_loss = r.sl_loss;
    m.mean_abs_h = r.mean_abs_h;
    apply_gradients(std::move(grads), false);
  }

  {
    const auto segs = buffer.sample_segments(cfg_.batch_size, cfg_.time_steps, rng,
                                             cfg_.segment_sampling);
    const auto batch = refs(segs);
    const auto targets = rl_targets<float>(net_, batch, cfg_.gamma);
    auto grads = net_.online.zeros_like();
    const auto r = loss_and_gradients<float>(net_, batch, &targets,
                                             {false, true, 0.0, cfg_.gamma}, &grads);
    m.rl_loss = r.rl_loss;
    if (!uses_sl_heads(variant_)) m.mean_abs_h = r.mean_abs_h;
    apply_gradients(std::move(grads), true);
  }

  if (auto bad = net_.online.first_non_finite(); !bad.empty()) {
    throw NumericError("non-finite parameters in tensor '" + bad + "'");
  }
  if (cfg_.target_sync == TargetSync::per_step) net_.polyak_update(cfg_.tau);
  ++steps_;
  return m;
}

void Learner::end_epoch() {
  if (cfg_.target_sync == TargetSync::per_epoch) net_.sync_target();
}

nn::Checkpoint make_checkpoint(const HybridNet<float>& net, Variant variant,
                               std::uint64_t schema_hash) {
  nn::Checkpoint ck;
  ck.schema_hash = schema_hash;
  const auto& c = net.config();
  ck.meta["variant"] = to_string(variant);
  ck.meta["obs_size"] = std::to_string(c.obs_size);
  ck.meta["hidden"] = std::to_string(c.hidden);
  ck.meta["actions"] = std::to_string(c.actions);
  ck.meta["user_acts"] = std::to_string(c.user_acts);
  ck.meta["slots"] = std::to_string(c.slots);
  ck.meta["current_slots_size"] = std::to_string(c.current_slots_size);
  ck.meta["sl_heads"] = c.sl_heads ? "1" : "0";
  for (const auto& t : net.online.tensors()) {
    int i = ck.tensors.add("online/" + t.name, static_cast<int>(t.value.rows()),
                           static_cast<int>(t.value.cols()));
    ck.tensors[i] = t.value;
  }
  for (const auto& t : net.target.tensors()) {
    int i = ck.tensors.add("target/" + t.name, static_cast<int>(t.value.rows()),
                           static_cast<int>(t.value.cols()));
    ck.tensors[i] = t.value;
  }
  return ck;
}

HybridNet<float> net_from_checkpoint(const nn::Checkpoint& ckpt, Variant* variant) {
  auto meta = [&](const char* key) -> const std::string& {
    auto it = ckpt.meta.find(key);
    if (it == ckpt.meta.end()) throw VersionError(std::string("checkpoint lacks '") + key + "'");
    return it->second;
  };
  const Variant v = parse_variant(meta("variant"));
  if (variant) *variant = v;
  NetConfig cfg;
  cfg.encoder = encoder_for(v);
  cfg.obs_size = std::stoi(meta("obs_size"));
  cfg.hidden = std::stoi(meta("hidden"));
  cfg.actions = std::stoi(meta("actions"));
  cfg.user_acts = std::stoi(meta("user_acts"));
  cfg.slots = std::stoi(meta("slots"));
  cfg.current_slots_size = std::stoi(meta("current_slots_size"));
  cfg.sl_heads = meta("sl_heads") == "1";
  HybridNet<float> net(cfg);
  auto fill = [&](ParamSet<float>& dst, const std::string& prefix) {
    for (auto& t : dst.tensors()) {
      const int i = ckpt.tensors.find(prefix + t.name);
      if (i < 0) throw VersionError("checkpoint lacks tensor '" + prefix + t.name + "'");
      if (ckpt.tensors[i].rows() != t.value.rows() || ckpt.tensors[i].cols() != t.value.cols()) {
        throw VersionError("checkpoint tensor '" + prefix + t.name + "' has the wrong shape");
      }
      t.value = ckpt.tensors[i];
    }
  };
  fill(net.online, "online/");
  fill(net.target, "target/");
  return net;
}

}  // namespace dmrl
