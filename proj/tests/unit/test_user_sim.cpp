#include "doctest.h"
#include "support.hpp"

#include "dmrl/action_catalog.hpp"
#include "dmrl/errors.hpp"
#include "dmrl/frame.hpp"
#include "dmrl/user_sim.hpp"

using namespace dmrl;
using dmrl::testing::bundled_kb;

TEST_CASE("opening frame requests a ticket and carries goal constraints") {
  Goal g;
  g.constraints = {{"moviename", "race"}, {"date", "tomorrow"}};
  g.requests = {"ticket"};
  Rng rng = make_rng(1, 0);
  const auto [st, f] = simulator_reset(g, rng);
  CHECK(f.act == "request");
  CHECK(f.request == std::set<std::string>{"ticket"});
  CHECK_FALSE(f.inform.empty());
  for (const auto& [slot, v] : f.inform) CHECK(g.constraints.at(slot) == v);

  Rng r2 = make_rng(1, 0);
  CHECK(simulator_reset(g, r2).second == f);
}

TEST_CASE("opening frame with no constraints informs nothing") {
  Goal g;
  g.requests = {"ticket"};
  Rng rng = make_rng(2, 0);
  CHECK(simulator_reset(g, rng).second.inform.empty());
}

TEST_CASE("user answers an agent request from the goal") {
  Goal g;
  g.constraints = {{"moviename", "race"}, {"city", "seattle"}};
  g.requests = {"ticket"};
  Rng rng = make_rng(3, 0);
  auto st = simulator_reset(g, rng).first;
  Frame ask{"request", {}, {"city"}};
  const auto [reply, next] = user_step(st, ask, bundled_kb(), rng);
  CHECK(reply.act == "inform");
  CHECK(reply.inform.at("city") == "seattle");
}

TEST_CASE("turn limit ends in failure") {
  const auto& kb = bundled_kb();
  Rng rng = make_rng(4, 0);
  const Goal g = sample_goal(kb, rng);
  auto st = simulator_reset(g, rng).first;
  Frame greet{"greeting", {}, {}};
  int guard = 0;
  while (st.outcome == Outcome::ongoing && guard++ < 100) st = user_step(st, greet, kb, rng).second;
  CHECK(st.outcome == Outcome::failure);
  CHECK(st.turn == kMaxTurns);
  CHECK_THROWS_AS(user_step(st, greet, kb, rng), UsageError);
}

TEST_CASE("consistent ticket offer then closing succeeds") {
  const auto& kb = bundled_kb();
  const ActionCatalog cat(kb.schema());
  Rng rng = make_rng(5, 0);
  const Goal g = sample_goal(kb, rng);
  auto st = simulator_reset(g, rng).first;
  const Frame offer = cat.realize(cat.inform_index("ticket"), kb, g.constraints);
  CHECK(is_ticket_offer(offer));
  st = user_step(st, offer, kb, rng).second;
  CHECK(st.offer_accepted);
  st = user_step(st, Frame{"closing", {}, {}}, kb, rng).second;
  CHECK(st.outcome == Outcome::success);
}

TEST_CASE("wrong ticket offer is denied and closing fails") {
  const auto& kb = bundled_kb();
  const ActionCatalog cat(kb.schema());
  Rng rng = make_rng(6, 0);
  Goal g = sample_goal(kb, rng);
  auto st = simulator_reset(g, rng).first;
  SlotValues wrong{{"city", "atlantis"}};
  const auto [reply, next] = user_step(st, cat.realize(cat.inform_index("ticket"), kb, wrong), kb, rng);
  CHECK(reply.act == "deny");
  CHECK_FALSE(next.offer_accepted);
  CHECK(user_step(next, Frame{"closing", {}, {}}, kb, rng).second.outcome == Outcome::failure);
}

TEST_CASE("corrupt_frame identity and forced deletion") {
  const auto& kb = bundled_kb();
  Frame f{"inform", {{"city", "seattle"}, {"date", "today"}}, {"ticket"}};
  Rng rng = make_rng(7, 0);
  NoiseConfig none;
  CHECK(corrupt_frame(f, none, kb, rng) == f);
  NoiseConfig del;
  del.slot_error_prob = 1.0;
  del.error_mix = {0.0, 1.0, 0.0};
  const Frame g = corrupt_frame(f, del, kb, rng);
  CHECK(g.inform.empty());
  CHECK(g.request == f.request);
  CHECK(g.act == f.act);
}

TEST_CASE("noise config validation") {
  NoiseConfig c;
  c.slot_error_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  NoiseConfig d;
  d.error_mix = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("slot noise rate over 10000 inform pairs") {
  const auto& kb = bundled_kb();
  NoiseConfig cfg;
  cfg.slot_error_prob = 0.20;
  Rng rng = make_rng(8, 0);
  int pairs = 0, corrupted = 0;
  while (pairs < 10000) {
    const auto row = static_cast<std::size_t>(uniform_int(rng, 0, 99));
    const std::string v = kb.value(row, kb.schema().slot_index("city"));
    Frame f{"inform", {{"city", v}}, {}};
    const Frame g = corrupt_frame(f, cfg, kb, rng);
    ++pairs;
    corrupted += !(g.inform == f.inform);
  }
  const double rate = static_cast<double>(corrupted) / pairs;
  CHECK(rate >= 0.18);
  CHECK(rate <= 0.22);
}

TEST_CASE("emitted frames are valid and corruption keeps requests") {
  const auto& kb = bundled_kb();
  const ActionCatalog cat(kb.schema());
  NoiseConfig cfg;
  cfg.slot_error_prob = 0.5;
  cfg.intent_error_prob = 0.1;
  Rng rng = make_rng(9, 0);
  for (int d = 0; d < 200; ++d) {
    const Goal g = sample_goal(kb, rng);
    auto [st, f] = simulator_reset(g, rng);
    while (true) {
      CHECK_NOTHROW(validate_frame(f, kb.schema(), Speaker::user));
      const Frame noisy = corrupt_frame(f, cfg, kb, rng);
      CHECK(noisy.request.size() == f.request.size());
      CHECK_NOTHROW(validate_frame(noisy, kb.schema(), Speaker::user));
      if (st.outcome != Outcome::ongoing) break;
      const int a = uniform_int(rng, 0, cat.size() - 1);
      std::tie(f, st) = user_step(st, cat.realize(a, kb, g.constraints), kb, rng);
    }
  }
}

TEST_CASE("simulator is a pure function of goal, agent frames and seed") {
  const auto& kb = bundled_kb();
  const ActionCatalog cat(kb.schema());
  auto run = [&](std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    const Goal g = sample_goal(kb, rng);
    auto [st, f] = simulator_reset(g, rng);
    std::vector<std::string> lines;
    int a = 0;
    while (st.outcome == Outcome::ongoing) {
      lines.push_back(format_transcript_line({st.turn, Speaker::user, f}));
      std::tie(f, st) = user_step(st, cat.realize(a++ % cat.size(), kb, {}), kb, rng);
    }
    return lines;
  };
  CHECK(run(42) == run(42));
}
