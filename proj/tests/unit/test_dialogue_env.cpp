#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "dmrl/dialogue_env.hpp"
#include "dmrl/episode.hpp"
#include "dmrl/observation.hpp"

using namespace dmrl;
using dmrl::testing::bundled_kb;

TEST_CASE("observation layout for the reference schema") {
  const ObservationLayout l(reference_schema());
  CHECK(l.size == 11 + 16 + 16 + 11 + 16 + 16 + 1 + 17 + 17);
  CHECK(l.size == 121);
  CHECK(l.user_size() == 43);
}

TEST_CASE("encode_observation components") {
  const auto& s = reference_schema();
  const ObservationLayout l(s);
  const auto kbr = kb_query(bundled_kb(), {});
  const auto o = encode_observation(s, Frame{"inform", {{"city", "seattle"}}, {}}, std::nullopt, 4, kbr);
  REQUIRE(o.values.size() == 121u);
  CHECK(o.values[l.turn] == doctest::Approx(0.25));
  int ones = 0;
  for (int i = 0; i < s.num_user_acts(); ++i) ones += o.values[l.u_act + i] == 1.0f;
  CHECK(ones == 1);
  CHECK(o.values[l.u_act + s.user_act_index("inform")] == 1.0f);
  CHECK(o.values[l.u_is + s.slot_index("city")] == 1.0f);
  for (int i = l.a_act; i < l.turn; ++i) CHECK(o.values[i] == 0.0f);
  CHECK_THROWS_AS(encode_observation(s, std::nullopt, std::nullopt, 17, kbr), std::out_of_range);
  CHECK_THROWS_AS(encode_observation(s, std::nullopt, std::nullopt, -1, kbr), std::out_of_range);
}

TEST_CASE("reward constants") {
  CHECK(compute_reward({false, false}) == -1.0f);
  CHECK(compute_reward({true, true}) == 31.0f);
  CHECK(compute_reward({true, false}) == -17.0f);
}

TEST_CASE("action catalog has 39 actions") {
  const ActionCatalog cat(reference_schema());
  CHECK(cat.size() == 39);
  for (int i = 0; i < cat.size(); ++i) CHECK(cat.index_of(cat.at(i)) == i);
  CHECK_THROWS(cat.at(39));
}

TEST_CASE("always-greeting agent fails at turn 16 with return -32") {
  const auto& kb = bundled_kb();
  const DialogueEnv env(kb);
  FixedPolicy greet(env.catalog().standalone_index("greeting"));
  Rng rng = make_rng(31, 0);
  const Episode ep = env.run_dialogue(greet, sample_goal(kb, rng), Mode::eval, NoiseConfig{}, rng);
  CHECK(ep.size() == 16u);
  CHECK_FALSE(ep.success);
  CHECK(ep.total_return() == doctest::Approx(-32.0));
}

TEST_CASE("episode invariants over rule and random rollouts") {
  const auto& kb = bundled_kb();
  const DialogueEnv env(kb);
  const ObservationLayout& l = env.layout();
  RulePolicy rule(env);
  NoiseConfig noise;
  noise.slot_error_prob = 0.2;
  Rng rng = make_rng(32, 0);
  for (int d = 0; d < 200; ++d) {
    std::unique_ptr<DialogueAgent> agent;
    if (d % 2) agent = std::make_unique<FixedPolicy>(d % env.catalog().size());
    DialogueAgent& a = agent ? *agent : static_cast<DialogueAgent&>(rule);
    const Episode ep = env.run_dialogue(a, sample_goal(kb, rng), Mode::train, noise, rng);
    double ret = 0;
    for (std::size_t t = 0; t < ep.size(); ++t) {
      const auto& tr = ep.steps[t];
      ret += tr.reward;
      CHECK(tr.obs.size() == 121u);
      CHECK(tr.terminal == (t + 1 == ep.size()));
      if (!tr.terminal) {
        const auto next = user_segment(l, ep.steps[t + 1].obs);
        CHECK(std::vector<float>(next.begin(), next.end()) == tr.next_user);
      } else {
        CHECK(tr.next_user.empty());
      }
      if (t > 0) {
        for (std::size_t k = 0; k < tr.current_slots.size(); ++k) {
          CHECK(tr.current_slots[k] >= ep.steps[t - 1].current_slots[k]);
        }
      }
    }
    CHECK(ret == doctest::Approx(ep.total_return()));
    if (ep.success) CHECK(ep.total_return() == doctest::Approx(31.0 - (ep.size() - 1.0)));
  }
}

TEST_CASE("eval rollouts are deterministic for a fixed seed") {
  const auto& kb = bundled_kb();
  const DialogueEnv env(kb);
  RulePolicy rule(env);
  NoiseConfig noise;
  noise.slot_error_prob = 0.2;
  auto run = [&] {
    Rng rng = make_rng(33, 0);
    return env.run_dialogue(rule, sample_goal(kb, rng), Mode::eval, noise, rng);
  };
  const Episode a = run(), b = run();
  CHECK(episode_hash(a) == episode_hash(b));
  CHECK(format_transcript(a.transcript) == format_transcript(b.transcript));
}

TEST_CASE("episode csv round trip") {
  const auto& kb = bundled_kb();
  const DialogueEnv env(kb);
  RulePolicy rule(env);
  Rng rng = make_rng(34, 0);
  std::vector<Episode> eps;
  for (int i = 0; i < 5; ++i) {
    eps.push_back(env.run_dialogue(rule, sample_goal(kb, rng), Mode::eval, NoiseConfig{}, rng));
  }
  std::stringstream ss;
  write_episodes(ss, eps);
  const auto back = read_episodes(ss);
  REQUIRE(back.size() == eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(episode_hash(back[i]) == episode_hash(eps[i]));
}

TEST_CASE("transcript line format") {
  TranscriptLine line{3, Speaker::agent, Frame{"inform", {{"date", "today"}, {"city", "x"}}, {"theater"}}};
  CHECK(format_transcript_line(line) == "3|agent|inform|city=x,date=today|theater");
}
