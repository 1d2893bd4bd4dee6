#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dmrl/episode.hpp"
#include "dmrl/epsilon.hpp"
#include "dmrl/errors.hpp"
#include "dmrl/nn/layers.hpp"
#include "dmrl/nn/param_set.hpp"
#include "dmrl/rng.hpp"

namespace dmrl {

using nn::Mat;
using nn::ParamSet;
using nn::Vec;

enum class Variant { hybrid, drqn_only, dqn_baseline, hybrid_current_slots };
enum class EncoderKind { lstm, feedforward, current_slots };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);  // throws ConfigError
EncoderKind encoder_for(Variant v);
bool uses_sl_heads(Variant v);

struct NetConfig {
  EncoderKind encoder = EncoderKind::lstm;
  int obs_size = 121;
  int current_slots_size = 16;
  int hidden = 64;
  int actions = 39;
  int user_acts = 11;
  int slots = 16;
  bool sl_heads = true;

  int belief_size() const {
    return encoder == EncoderKind::current_slots ? current_slots_size : hidden;
  }
};

template <typename T>
struct BeliefState {
  Vec<T> h;
  Vec<T> c;  // LSTM cell; empty for the other encoders
};

template <typename T>
struct SlPrediction {
  Vec<T> p_act;  // softmax over user acts
  Vec<T> p_is;   // per-slot sigmoid
  Vec<T> p_rs;
};

enum class Which { online, target };

template <typename T>
struct EncoderCache {
  nn::LstmCache<T> lstm;
  Vec<T> x;
  Vec<T> h;
};

// Tensor positions inside one ParamSet; -1 when the tensor does not exist.
struct HeadIndex {
  int wx = -1, wh = -1, b = -1;  // encoder
  int qv_w = -1, qv_b = -1, qa_w = -1, qa_b = -1;
  int act_w = -1, act_b = -1, is_w = -1, is_b = -1, rs_w = -1, rs_b = -1;
};

// Recurrent state tracker (or one of its ablations) feeding a dueling
// Q head and three supervised heads predicting the next user act, informed
// slots and requested slots. The target copy covers encoder and Q head only.
template <typename T>
class HybridNet {
 public:
  explicit HybridNet(const NetConfig& cfg) : cfg_(cfg) {
    online_idx_ = build(online, cfg_.sl_heads);
    target_idx_ = build(target, false);
  }

  const NetConfig& config() const { return cfg_; }
  const HeadIndex& index(Which w) const { return w == Which::online ? online_idx_ : target_idx_; }
  ParamSet<T>& params(Which w) { return w == Which::online ? online : target; }
  const ParamSet<T>& params(Which w) const { return w == Which::online ? online : target; }

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]; target starts as a copy.
  void init_uniform(Rng& rng) {
    for (auto& t : online.tensors()) {
      const bool bias = t.value.cols() == 1 && t.name.ends_with("/b");
      int fan_in = static_cast<int>(t.value.cols());
      if (bias) fan_in = fan_in_for(t.name);
      const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, fan_in)));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index k = 0; k < t.value.size(); ++k) t.value.data()[k] = T(u(rng));
    }
    sync_target();
  }

  void sync_target() {
    for (auto& t : target.tensors()) t.value = online[online.find(t.name)];
  }

  // target <- tau * online + (1 - tau) * target
  void polyak_update(double tau) {
    for (auto& t : target.tensors()) {
      const auto& src = online[online.find(t.name)];
      t.value = T(tau) * src + T(1.0 - tau) * t.value;
    }
  }

  BeliefState<T> zero_state() const {
    BeliefState<T> s;
    s.h = Vec<T>::Zero(cfg_.belief_size());
    if (cfg_.encoder == EncoderKind::lstm) s.c = Vec<T>::Zero(cfg_.hidden);
    return s;
  }

  BeliefState<T> step(Which w, const Vec<T>& obs, const Vec<T>& current_slots,
                      const BeliefState<T>& prev, EncoderCache<T>* cache = nullptr) const {
    const auto& p = params(w);
    const auto& ix = index(w);
    BeliefState<T> out;
    switch (cfg_.encoder) {
      case EncoderKind::lstm:
        nn::lstm_step<T>({p[ix.wx], p[ix.wh], p[ix.b]}, obs, prev.h, prev.c, out.h, out.c,
                         cache ? &cache->lstm : nullptr);
        break;
      case EncoderKind::feedforward:
        out.h = nn::affine<T>(p[ix.wx], p[ix.b], obs).array().tanh();
        if (cache) {
          cache->x = obs;
          cache->h = out.h;
        }
        break;
      case EncoderKind::current_slots:
        if (current_slots.size() != cfg_.current_slots_size) {
          throw ShapeError("current slots vector has wrong width");
        }
        out.h = current_slots;
        break;
    }
    return out;
  }

  // Folds the encoder over `inputs` (pairs of observation and current-slots
  // vectors) starting from `start`; returns every intermediate state.
  std::vector<BeliefState<T>> track_sequence(Which w, std::span<const Vec<T>> observations,
                                             std::span<const Vec<T>> current_slots,
                                             const BeliefState<T>& start) const {
    std::vector<BeliefState<T>> out;
    out.reserve(observations.size());
    BeliefState<T> s = start;
    for (std::size_t t = 0; t < observations.size(); ++t) {
      s = step(w, observations[t], current_slots.empty() ? Vec<T>() : current_slots[t], s);
      out.push_back(s);
    }
    return out;
  }

  // Dueling combination Q = V + A - mean(A).
  Vec<T> q_values(const Vec<T>& h, Which w = Which::online) const {
    const auto& p = params(w);
    const auto& ix = index(w);
    const T v = nn::affine<T>(p[ix.qv_w], p[ix.qv_b], h)(0);
    Vec<T> a = nn::affine<T>(p[ix.qa_w], p[ix.qa_b], h);
    return (a.array() - a.mean() + v).matrix();
  }

  SlPrediction<T> sl_predict(const Vec<T>& h) const {
    if (!cfg_.sl_heads) throw UsageError("network has no supervised heads");
    const auto& p = online;
    const auto& ix = online_idx_;
    return {nn::softmax<T>(nn::affine<T>(p[ix.act_w], p[ix.act_b], h)),
            nn::sigmoid<T>(nn::affine<T>(p[ix.is_w], p[ix.is_b], h)),
            nn::sigmoid<T>(nn::affine<T>(p[ix.rs_w], p[ix.rs_b], h))};
  }

  template <typename U>
  HybridNet<U> cast() const {
    HybridNet<U> out(cfg_);
    out.online = online.template cast<U>();
    out.target = target.template cast<U>();
    return out;
  }

  ParamSet<T> online;
  ParamSet<T> target;

 private:
  HeadIndex build(ParamSet<T>& p, bool sl) const {
    HeadIndex ix;
    const int B = cfg_.belief_size();
    switch (cfg_.encoder) {
      case EncoderKind::lstm:
        ix.wx = p.add("tracker/wx", 4 * cfg_.hidden, cfg_.obs_size);
        ix.wh = p.add("tracker/wh", 4 * cfg_.hidden, cfg_.hidden);
        ix.b = p.add("tracker/b", 4 * cfg_.hidden, 1);
        break;
      case EncoderKind::feedforward:
        ix.wx = p.add("encoder/w", cfg_.hidden, cfg_.obs_size);
        ix.b = p.add("encoder/b", cfg_.hidden, 1);
        break;
      case EncoderKind::current_slots:
        break;
    }
    ix.qv_w = p.add("q_value/w", 1, B);
    ix.qv_b = p.add("q_value/b", 1, 1);
    ix.qa_w = p.add("q_advantage/w", cfg_.actions, B);
    ix.qa_b = p.add("q_advantage/b", cfg_.actions, 1);
    if (sl) {
      ix.act_w = p.add("sl_act/w", cfg_.user_acts, B);
      ix.act_b = p.add("sl_act/b", cfg_.user_acts, 1);
      ix.is_w = p.add("sl_is/w", cfg_.slots, B);
      ix.is_b = p.add("sl_is/b", cfg_.slots, 1);
      ix.rs_w = p.add("sl_rs/w", cfg_.slots, B);
      ix.rs_b = p.add("sl_rs/b", cfg_.slots, 1);
    }
    return ix;
  }

  int fan_in_for(const std::string& bias_name) const {
    const auto prefix = bias_name.substr(0, bias_name.rfind('/'));
    if (prefix == "tracker") return cfg_.obs_size + cfg_.hidden;
    if (prefix == "encoder") return cfg_.obs_size;
    return cfg_.belief_size();
  }

  NetConfig cfg_;
  HeadIndex online_idx_;
  HeadIndex target_idx_;
};

// Parameter count of the online network for a configuration.
std::size_t online_parameter_count(const NetConfig& cfg);

// ---------------------------------------------------------------------------
// Losses

// A slice of one episode: `length` prediction steps starting at `start`;
// every earlier step of the episode is burn-in.
struct SegmentRef {
  const Episode* episode = nullptr;
  int start = 0;
  int length = 0;
};

struct LossOptions {
  bool sl = true;
  bool rl = true;
  double l1 = 1e-4;
  double gamma = 0.9;
};

struct LossReport {
  double sl_loss = 0.0;
  double rl_loss = 0.0;
  double mean_abs_h = 0.0;
};

template <typename T>
Vec<T> to_vec(const std::vector<float>& v) {
  return Eigen::Map<const Eigen::VectorXf>(v.data(), static_cast<Eigen::Index>(v.size()))
      .template cast<T>();
}

// Double-DQN bootstrap targets for every prediction step of every segment:
// y = r at terminal steps, otherwise
// y = r + gamma * Q_target(h'_{t+1}, argmax_a Q_online(h_{t+1}, a)).
template <typename T>
std::vector<std::vector<T>> rl_targets(const HybridNet<T>& net, std::span<const SegmentRef> batch,
                                       double gamma) {
  std::vector<std::vector<T>> out;
  out.reserve(batch.size());
  for (const auto& seg : batch) {
    const auto& steps = seg.episode->steps;
    const int last = seg.start + seg.length - 1;
    const int horizon = std::min<int>(last + 1, static_cast<int>(steps.size()) - 1);
    auto on = net.zero_state();
    auto tg = net.zero_state();
    std::vector<BeliefState<T>> on_states, tg_states;
    for (int t = 0; t <= horizon; ++t) {
      const Vec<T> x = to_vec<T>(steps[t].obs);
      const Vec<T> cs = to_vec<T>(steps[t].current_slots);
      on = net.step(Which::online, x, cs, on);
      tg = net.step(Which::target, x, cs, tg);
      if (t > seg.start) {
        on_states.push_back(on);
        tg_states.push_back(tg);
      }
    }
    std::vector<T> ys;
    for (int k = 0; k < seg.length; ++k) {
      const auto& tr = steps[seg.start + k];
      T y = T(tr.reward);
      if (!tr.terminal) {
        const auto& h_on = on_states.at(k).h;
        const auto& h_tg = tg_states.at(k).h;
        const Vec<T> q_on = net.q_values(h_on, Which::online);
        const Vec<T> q_tg = net.q_values(h_tg, Which::target);
        y += T(gamma) * q_tg(argmax(q_on));
      }
      ys.push_back(y);
    }
    out.push_back(std::move(ys));
  }
  return out;
}

// Mean over segments of the per-segment losses:
//   rl = mean_k (Q_online(h_k, a_k) - y_k)^2
//   sl = mean over non-terminal k of [CE(act) + mean BCE(is) + mean BCE(rs)]
//        + l1 * mean_k sum_i |h_k,i|   (per-step L1 norm, averaged over steps)
// The state entering the first prediction step comes from folding the
// online encoder over the burn-in prefix and is treated as a constant, so
// gradients flow through prediction steps only. When `grads` is non-null it
// must be online.zeros_like() (or a running sum of the same shape) and
// receives dLoss/dParams where Loss = sl (if enabled) + rl (if enabled).
template <typename T>
LossReport loss_and_gradients(const HybridNet<T>& net, std::span<const SegmentRef> batch,
                              const std::vector<std::vector<T>>* targets,
                              const LossOptions& opt, ParamSet<T>* grads) {
  if (batch.empty()) throw UsageError("loss over an empty batch");
  if (opt.rl && (!targets || targets->size() != batch.size())) {
    throw UsageError("rl loss needs one target vector per segment");
  }
  if (opt.sl && !net.config().sl_heads) throw UsageError("network has no supervised heads");
  const auto& cfg = net.config();
  const auto& p = net.online;
  const auto& ix = net.index(Which::online);
  const int B = cfg.belief_size();
  const T inv_batch = T(1) / T(static_cast<double>(batch.size()));
  LossReport report;
  double abs_h_sum = 0.0;
  long abs_h_count = 0;

  for (std::size_t si = 0; si < batch.size(); ++si) {
    const auto& seg = batch[si];
    const auto& steps = seg.episode->steps;
    if (seg.length <= 0 || seg.start < 0 ||
        seg.start + seg.length > static_cast<int>(steps.size())) {
      throw UsageError("segment outside its episode");
    }
    auto state = net.zero_state();
    for (int t = 0; t < seg.start; ++t) {
      state = net.step(Which::online, to_vec<T>(steps[t].obs), to_vec<T>(steps[t].current_slots),
                       state);
    }
    const int L = seg.length;
    std::vector<EncoderCache<T>> caches(L);
    std::vector<BeliefState<T>> states;
    states.reserve(L);
    for (int k = 0; k < L; ++k) {
      const auto& tr = steps[seg.start + k];
      state = net.step(Which::online, to_vec<T>(tr.obs), to_vec<T>(tr.current_slots), state,
                       &caches[k]);
      if (!state.h.allFinite()) throw NumericError("non-finite activation in encoder output");
      states.push_back(state);
    }

    int sl_steps = 0;
    for (int k = 0; k < L; ++k) {
      if (!steps[seg.start + k].next_user.empty()) ++sl_steps;
    }

    std::vector<Vec<T>> dh(L, Vec<T>::Zero(B));
    double seg_rl = 0.0, seg_sl = 0.0, seg_l1 = 0.0;
    for (int k = 0; k < L; ++k) {
      const auto& tr = steps[seg.start + k];
      const Vec<T>& h = states[k].h;
      for (Eigen::Index d = 0; d < h.size(); ++d) {
        abs_h_sum += std::abs(static_cast<double>(h(d)));
      }
      abs_h_count += h.size();

      if (opt.rl) {
        const T v = nn::affine<T>(p[ix.qv_w], p[ix.qv_b], h)(0);
        const Vec<T> a = nn::affine<T>(p[ix.qa_w], p[ix.qa_b], h);
        const T q = v + a(tr.action) - a.mean();
        if (!std::isfinite(static_cast<double>(q))) throw NumericError("non-finite Q value");
        const T diff = q - (*targets)[si][k];
        seg_rl += static_cast<double>(diff * diff) / L;
        if (grads) {
          const T dq = T(2) * diff / T(L) * inv_batch;
          Vec<T> da = Vec<T>::Constant(cfg.actions, -dq / T(cfg.actions));
          da(tr.action) += dq;
          Vec<T> dv = Vec<T>::Constant(1, dq);
          dh[k] += nn::affine_backward<T>(p[ix.qv_w], h, dv, (*grads)[ix.qv_w], (*grads)[ix.qv_b]);
          dh[k] += nn::affine_backward<T>(p[ix.qa_w], h, da, (*grads)[ix.qa_w], (*grads)[ix.qa_b]);
        }
      }

      if (opt.sl) {
        if (!tr.next_user.empty()) {
          const Vec<T> target = to_vec<T>(tr.next_user);
          const int A = cfg.user_acts, S = cfg.slots;
          if (target.size() != A + 2 * S) throw ShapeError("next_user target has wrong width");
          const T w = T(1) / T(sl_steps);
          // act head: softmax cross-entropy
          const Vec<T> logits = nn::affine<T>(p[ix.act_w], p[ix.act_b], h);
          const T mx = logits.maxCoeff();
          const T lse = mx + std::log((logits.array() - mx).exp().sum());
          const Vec<T> t_act = target.segment(0, A);
          const T t_sum = t_act.sum();
          seg_sl += static_cast<double>(w * (lse * t_sum - t_act.dot(logits)));
          // slot heads: mean binary cross-entropy
          auto bce = [&](int w_idx, int b_idx, const Vec<T>& t, T& loss) {
            const Vec<T> z = nn::affine<T>(p[w_idx], p[b_idx], h);
            T l = 0;
            for (int d = 0; d < S; ++d) l += nn::softplus(z(d)) - t(d) * z(d);
            loss = l / T(S);
            return z;
          };
          T l_is, l_rs;
          const Vec<T> t_is = target.segment(A, S), t_rs = target.segment(A + S, S);
          const Vec<T> z_is = bce(ix.is_w, ix.is_b, t_is, l_is);
          const Vec<T> z_rs = bce(ix.rs_w, ix.rs_b, t_rs, l_rs);
          seg_sl += static_cast<double>(w * (l_is + l_rs));
          if (grads) {
            const T scale = w * inv_batch;
            const Vec<T> d_act = (nn::softmax<T>(logits) * t_sum - t_act) * scale;
            const Vec<T> d_is = (nn::sigmoid<T>(z_is) - t_is) * (scale / T(S));
            const Vec<T> d_rs = (nn::sigmoid<T>(z_rs) - t_rs) * (scale / T(S));
            dh[k] += nn::affine_backward<T>(p[ix.act_w], h, d_act, (*grads)[ix.act_w], (*grads)[ix.act_b]);
            dh[k] += nn::affine_backward<T>(p[ix.is_w], h, d_is, (*grads)[ix.is_w], (*grads)[ix.is_b]);
            dh[k] += nn::affine_backward<T>(p[ix.rs_w], h, d_rs, (*grads)[ix.rs_w], (*grads)[ix.rs_b]);
          }
        }
        if (opt.l1 > 0.0) {
          const T scale = T(opt.l1) / T(static_cast<double>(L));
          seg_l1 += static_cast<double>(scale * h.cwiseAbs().sum());
          if (grads) {
            // Subgradient of |h| is taken as 0 at h = 0.
            dh[k] += (h.array().sign() * (scale * inv_batch)).matrix();
          }
        }
      }
    }
    report.rl_loss += seg_rl;
    report.sl_loss += seg_sl + seg_l1;

    if (!grads) continue;
    switch (cfg.encoder) {
      case EncoderKind::lstm: {
        const nn::LstmRef<T> cell{p[ix.wx], p[ix.wh], p[ix.b]};
        Vec<T> carry_h = Vec<T>::Zero(cfg.hidden), carry_c = Vec<T>::Zero(cfg.hidden);
        Vec<T> dh_prev, dc_prev;
        for (int k = L - 1; k >= 0; --k) {
          nn::lstm_step_backward<T>(cell, caches[k].lstm, Vec<T>(dh[k] + carry_h), carry_c,
                                    (*grads)[ix.wx], (*grads)[ix.wh], (*grads)[ix.b], dh_prev,
                                    dc_prev);
          carry_h = std::move(dh_prev);
          carry_c = std::move(dc_prev);
        }
        break;
      }
      case EncoderKind::feedforward:
        for (int k = 0; k < L; ++k) {
          const Vec<T> dz = dh[k].cwiseProduct(
              (T(1) - caches[k].h.array().square()).matrix());
          (*grads)[ix.wx].noalias() += dz * caches[k].x.transpose();
          (*grads)[ix.b].col(0) += dz;
        }
        break;
      case EncoderKind::current_slots:
        break;
    }
  }
  report.rl_loss /= static_cast<double>(batch.size());
  report.sl_loss /= static_cast<double>(batch.size());
  report.mean_abs_h = abs_h_count ? abs_h_sum / static_cast<double>(abs_h_count) : 0.0;
  if (!opt.sl) report.sl_loss = 0.0;
  if (!opt.rl) report.rl_loss = 0.0;
  if (!std::isfinite(report.sl_loss) || !std::isfinite(report.rl_loss)) {
    throw NumericError("non-finite loss");
  }
  return report;
}

}  // namespace dmrl
