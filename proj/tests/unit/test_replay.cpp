#include <map>

#include "doctest.h"
#include "support.hpp"

#include "dmrl/dialogue_env.hpp"
#include "dmrl/errors.hpp"
#include "dmrl/replay_buffer.hpp"

using namespace dmrl;
using dmrl::testing::random_episode;
using dmrl::testing::tiny_config;

namespace {

Episode tagged(int length, float tag) {
  Rng rng = make_rng(static_cast<std::uint64_t>(tag * 1000), 0);
  Episode ep = random_episode(tiny_config(EncoderKind::lstm), length, rng);
  ep.steps[0].reward = tag;
  return ep;
}

}  // namespace

TEST_CASE("capacity counts transitions and evicts whole episodes") {
  ReplayBuffer buf(10);
  buf.push_episode(tagged(4, 1));
  buf.push_episode(tagged(4, 2));
  CHECK(buf.transition_count() == 8u);
  buf.push_episode(tagged(4, 3));
  CHECK(buf.transition_count() == 8u);
  CHECK(buf.episode_count() == 2u);
  CHECK(buf.episode(0).steps[0].reward == 2.0f);
  buf.push_episode(tagged(4, 4));
  CHECK(buf.episode(0).steps[0].reward == 3.0f);
  CHECK(buf.episode(1).steps[0].reward == 4.0f);
  CHECK_THROWS_AS(buf.push_episode(Episode{}), UsageError);
}

TEST_CASE("transition count never exceeds capacity") {
  ReplayBuffer buf(50);
  Rng rng = make_rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    Episode ep;
    ep.steps.resize(static_cast<std::size_t>(uniform_int(rng, 1, 16)));
    ep.steps.back().terminal = true;
    buf.push_episode(std::move(ep));
    REQUIRE(buf.transition_count() <= 50u);
  }
}

TEST_CASE("segment windows") {
  ReplayBuffer buf;
  buf.push_episode(tagged(7, 1));
  Rng rng = make_rng(2, 0);
  bool saw_start4 = false, saw_start0 = false;
  for (int i = 0; i < 500; ++i) {
    for (const auto& s : buf.sample_segments(8, 3, rng)) {
      CHECK(s.length == 3);
      CHECK(s.start + s.length <= 7);
      CHECK(s.burn_in().size() == static_cast<std::size_t>(s.start));
      if (s.start == 4) {
        saw_start4 = true;
        CHECK(s.prediction().data() == &s.episode->steps[4]);
        CHECK(s.prediction().size() == 3u);
      }
      if (s.start == 0) {
        saw_start0 = true;
        CHECK(s.burn_in().empty());
      }
    }
  }
  CHECK(saw_start4);
  CHECK(saw_start0);

  ReplayBuffer shorty;
  shorty.push_episode(tagged(2, 2));
  const auto seg = shorty.sample_segments(1, 3, rng).front();
  CHECK(seg.start == 0);
  CHECK(seg.length == 2);
  CHECK(seg.burn_in().empty());
  ReplayBuffer none;
  CHECK_THROWS_AS(none.sample_segments(8, 3, rng), UsageError);
}

TEST_CASE("burn-in reconstructs the full-prefix state exactly") {
  const auto cfg = tiny_config(EncoderKind::lstm);
  HybridNet<float> net(cfg);
  Rng rng = make_rng(3, 0);
  net.init_uniform(rng);
  ReplayBuffer buf;
  for (int i = 0; i < 30; ++i) buf.push_episode(random_episode(cfg, uniform_int(rng, 1, 16), rng));
  for (const auto& s : buf.sample_segments(300, 3, rng)) {
    auto burn = net.zero_state();
    for (const auto& t : s.burn_in()) burn = net.step(Which::online, to_vec<float>(t.obs), {}, burn);
    auto full = net.zero_state();
    for (int t = 0; t < s.start; ++t) {
      full = net.step(Which::online, to_vec<float>(s.episode->steps[t].obs), {}, full);
    }
    REQUIRE(burn.h == full.h);
    REQUIRE(burn.c == full.c);
  }
}

TEST_CASE("sampling covers all valid starts uniformly (chi-square)") {
  ReplayBuffer buf;
  buf.push_episode(tagged(2, 1));
  buf.push_episode(tagged(5, 2));
  buf.push_episode(tagged(7, 3));
  Rng rng = make_rng(4, 0);
  std::map<std::pair<std::uint64_t, int>, int> counts;
  const int draws = 50000;
  for (int i = 0; i < draws / 10; ++i) {
    for (const auto& s : buf.sample_segments(10, 3, rng)) ++counts[{s.episode_id, s.start}];
  }
  const int starts[3] = {1, 3, 5};
  REQUIRE(counts.size() == 9u);
  double chi2 = 0;
  for (const auto& [key, n] : counts) {
    const double expected = draws / 3.0 / starts[key.first];
    chi2 += (n - expected) * (n - expected) / expected;
  }
  CHECK(chi2 < 26.12);  // df = 8, p = 0.001

  std::map<std::pair<std::uint64_t, int>, int> tcounts;
  for (int i = 0; i < draws / 10; ++i) {
    for (const auto& s : buf.sample_segments(10, 3, rng, SegmentSampling::transition_uniform)) {
      ++tcounts[{s.episode_id, s.start}];
    }
  }
  double tchi2 = 0;
  for (const auto& [key, n] : tcounts) {
    const double expected = draws / 9.0;
    tchi2 += (n - expected) * (n - expected) / expected;
  }
  CHECK(tchi2 < 26.12);
}

TEST_CASE("rbs_fill pushes tagged rule episodes deterministically") {
  const auto& kb = dmrl::testing::bundled_kb();
  const DialogueEnv env(kb);
  auto fill = [&] {
    ReplayBuffer buf;
    Rng rng = make_rng(5, 0);
    rbs_fill(buf, env, NoiseConfig{}, 300, rng);
    return buf;
  };
  const auto a = fill();
  CHECK(a.episode_count() == 300u);
  for (std::size_t i = 0; i < a.episode_count(); ++i) CHECK(a.episode(i).source == EpisodeSource::rule);
  CHECK(a.content_hash() == fill().content_hash());
}
