#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "dmrl/errors.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/schema.hpp"

using namespace dmrl;
using dmrl::testing::bundled_kb;

TEST_CASE("reference schema shape") {
  const auto& s = reference_schema();
  CHECK(s.num_slots() == 16);
  CHECK(s.num_user_acts() == 11);
  CHECK(s.num_agent_acts() == 11);
  CHECK(s.slots.back() == "ticket");
  CHECK(s.is_requestable("ticket"));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("schema text round trip and bundled schema file") {
  const auto& s = reference_schema();
  const auto back = parse_schema(format_schema(s));
  CHECK(back.slots == s.slots);
  CHECK(back.informable == s.informable);
  CHECK(back.hash() == s.hash());
  CHECK(load_schema(bundled_schema_path()).hash() == s.hash());
}

TEST_CASE("schema validation rejects duplicates and a missing ticket") {
  auto s = reference_schema();
  s.slots.push_back("city");
  CHECK_THROWS_AS(s.validate(), SchemaError);
  auto t = reference_schema();
  t.requestable = {"theater"};
  CHECK_THROWS_AS(t.validate(), SchemaError);
}

TEST_CASE("bundled kb has 100 rows and equals the generated fixture") {
  const auto& kb = bundled_kb();
  CHECK(kb.row_count() == 100);
  const auto gen = generate_kb_fixture(reference_schema(), kFixtureRows, kFixtureSeed);
  CHECK(format_kb(gen) == format_kb(kb));
  for (std::size_t r = 0; r < kb.row_count(); ++r) {
    for (const auto& slot : mandatory_slots()) {
      CHECK_FALSE(kb.value(r, kb.schema().slot_index(slot)).empty());
    }
  }
}

TEST_CASE("kb parse errors") {
  CHECK_THROWS_AS(parse_kb(""), ParseError);
  CHECK_THROWS_AS(parse_kb("\n\n"), ParseError);
  const std::string good = "city=seattle;theater=a;moviename=m;starttime=1pm;date=today";
  CHECK_NOTHROW(parse_kb(good));
  try {
    parse_kb(good + "\ncity=seattle;moviename=m;starttime=1pm;date=today");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("theater") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_kb(good + ";nosuchslot=1"), ParseError);
  CHECK_THROWS_AS(load_kb("/nonexistent/kb.txt"), IoError);
}

TEST_CASE("kb_query examples") {
  const auto& kb = bundled_kb();
  const int n = kb.schema().num_slots();
  SUBCASE("empty constraints match everything") {
    const auto r = kb_query(kb, {});
    REQUIRE(r.cnt.size() == static_cast<std::size_t>(n + 1));
    CHECK(r.cnt.back() == 1.0f);
    for (float b : r.bin) CHECK(b == 1.0f);
  }
  SUBCASE("seattle equals a linear scan") {
    const SlotValues c{{"city", "seattle"}};
    const auto r = kb_query(kb, c);
    const auto o = dmrl::testing::brute_force_query(kb, c);
    CHECK(r.cnt == o.cnt);
    CHECK(r.bin == o.bin);
    CHECK(r.cnt.back() > 0.0f);
  }
  SUBCASE("absent value") {
    const auto r = kb_query(kb, {{"city", "atlantis"}});
    CHECK(r.cnt.back() == 0.0f);
    CHECK(r.bin.back() == 0.0f);
  }
  SUBCASE("unknown slot") {
    CHECK_THROWS_AS(kb_query(kb, {{"nosuchslot", "x"}}), SchemaError);
  }
}

TEST_CASE("kb_query ranges on random constraint sets") {
  const auto& kb = bundled_kb();
  Rng rng = make_rng(11, 0);
  for (int i = 0; i < 200; ++i) {
    SlotValues c;
    for (int s = 0; s < kb.schema().num_slots(); ++s) {
      if (uniform01(rng) < 0.2) {
        const auto row = static_cast<std::size_t>(uniform_int(rng, 0, 99));
        c[kb.schema().slots[s]] = kb.value(row, s);
      }
    }
    const auto r = kb_query(kb, c);
    for (std::size_t k = 0; k < r.cnt.size(); ++k) {
      CHECK(r.cnt[k] >= 0.0f);
      CHECK(r.cnt[k] <= 1.0f);
      CHECK(r.bin[k] == (r.cnt[k] > 0.0f ? 1.0f : 0.0f));
    }
  }
}

TEST_CASE("sample_goal contracts") {
  const auto& kb = bundled_kb();
  Rng a = make_rng(0, 0), b = make_rng(0, 0);
  const Goal g = sample_goal(kb, a);
  const Goal h = sample_goal(kb, b);
  CHECK(g.constraints == h.constraints);
  CHECK(g.requests == h.requests);
  REQUIRE(g.source_row >= 0);
  for (const auto& [slot, v] : g.constraints) {
    CHECK(kb.value(g.source_row, kb.schema().slot_index(slot)) == v);
  }
  Rng rng = make_rng(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const Goal x = sample_goal(kb, rng);
    REQUIRE(x.requests.count("ticket"));
    for (const auto& [slot, v] : x.constraints) REQUIRE_FALSE(x.requests.count(slot));
    REQUIRE(goal_satisfiable(kb, x));
  }
}
