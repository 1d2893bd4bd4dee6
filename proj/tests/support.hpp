#pragma once
// Shared fixtures for the unit and acceptance tests.

#include <filesystem>
#include <string>

#include "dmrl/episode.hpp"
#include "dmrl/hybrid_net.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/rng.hpp"

namespace dmrl::testing {

inline const KnowledgeBase& bundled_kb() {
  static const KnowledgeBase kb = load_kb(bundled_kb_path());
  return kb;
}

// Independent kb_query oracle: plain per-slot and conjunctive linear scans.
inline KbResult brute_force_query(const KnowledgeBase& kb, const SlotValues& c) {
  const auto& schema = kb.schema();
  const int n = schema.num_slots();
  KbResult r;
  r.bin.assign(n + 1, 1.0f);
  r.cnt.assign(n + 1, 1.0f);
  for (int s = 0; s < n; ++s) {
    auto it = c.find(schema.slots[s]);
    if (it == c.end()) continue;
    int hits = 0;
    for (std::size_t row = 0; row < kb.row_count(); ++row) hits += kb.value(row, s) == it->second;
    r.cnt[s] = static_cast<float>(hits) / static_cast<float>(kb.row_count());
    r.bin[s] = hits > 0 ? 1.0f : 0.0f;
  }
  int all = 0;
  for (std::size_t row = 0; row < kb.row_count(); ++row) {
    bool ok = true;
    for (const auto& [slot, v] : c) ok = ok && kb.value(row, schema.slot_index(slot)) == v;
    all += ok;
  }
  r.cnt[n] = static_cast<float>(all) / static_cast<float>(kb.row_count());
  r.bin[n] = all > 0 ? 1.0f : 0.0f;
  return r;
}

// Tiny network shapes for exhaustive finite-difference checks.
inline NetConfig tiny_config(EncoderKind enc, bool sl = true) {
  NetConfig c;
  c.encoder = enc;
  c.obs_size = 7;
  c.current_slots_size = 3;
  c.hidden = 5;
  c.actions = 4;
  c.user_acts = 3;
  c.slots = 3;
  c.sl_heads = sl;
  return c;
}

// Random episode shaped for `cfg`: observation entries in [0, 1), next-user
// targets as a one-hot act plus random slot bits, OR-accumulated current
// slots, last step terminal.
inline Episode random_episode(const NetConfig& cfg, int length, Rng& rng) {
  Episode ep;
  std::vector<float> cs(cfg.current_slots_size, 0.0f);
  for (int t = 0; t < length; ++t) {
    Transition tr;
    for (int i = 0; i < cfg.obs_size; ++i) tr.obs.push_back(static_cast<float>(uniform01(rng)));
    tr.action = uniform_int(rng, 0, cfg.actions - 1);
    tr.terminal = t == length - 1;
    tr.reward = tr.terminal ? (uniform01(rng) < 0.5 ? 31.0f : -17.0f) : -1.0f;
    tr.success = tr.terminal && tr.reward > 0;
    if (!tr.terminal) {
      const int act = uniform_int(rng, 0, cfg.user_acts - 1);
      for (int i = 0; i < cfg.user_acts; ++i) tr.next_user.push_back(i == act ? 1.0f : 0.0f);
      for (int i = 0; i < 2 * cfg.slots; ++i) tr.next_user.push_back(uniform01(rng) < 0.3 ? 1.0f : 0.0f);
    }
    for (auto& v : cs) {
      if (uniform01(rng) < 0.3) v = 1.0f;
    }
    tr.current_slots = cs;
    ep.steps.push_back(std::move(tr));
  }
  ep.success = ep.steps.back().success;
  return ep;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("dmrl_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace dmrl::testing
