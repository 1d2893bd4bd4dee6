#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dmrl/rng.hpp"
#include "dmrl/schema.hpp"

namespace dmrl {

using SlotValues = std::map<std::string, std::string>;

// In-memory table of showings. Values are indexed by schema slot position;
// an empty string means the row has no value for that slot.
class KnowledgeBase {
 public:
  KnowledgeBase(DomainSchema schema, std::vector<std::vector<std::string>> rows);

  const DomainSchema& schema() const { return schema_; }
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }
  // Value of `slot` in row i, empty when absent.
  const std::string& value(std::size_t i, int slot) const { return rows_.at(i).at(slot); }
  SlotValues row_values(std::size_t i) const;

  // Sorted distinct values observed for a slot.
  const std::vector<std::string>& distinct_values(int slot) const {
    return distinct_.at(slot);
  }

  // First row (in file order) matching every constraint; -1 when none.
  long first_match(const SlotValues& constraints) const;

 private:
  DomainSchema schema_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::vector<std::string>> distinct_;
};

// Line format: `slot=value;slot=value;...`, one showing per line.
KnowledgeBase load_kb(const std::filesystem::path& path,
                      const DomainSchema& schema = reference_schema());
KnowledgeBase parse_kb(std::string_view text,
                       const DomainSchema& schema = reference_schema());
std::string format_kb(const KnowledgeBase& kb);

// Deterministic synthetic showings table; the bundled data/kb.txt is
// generate_kb_fixture(reference_schema(), 100, 2019).
KnowledgeBase generate_kb_fixture(const DomainSchema& schema, std::size_t rows,
                                  std::uint64_t seed);
inline constexpr std::uint64_t kFixtureSeed = 2019;
inline constexpr std::size_t kFixtureRows = 100;

// Path of the bundled fixture inside the source tree.
std::filesystem::path bundled_kb_path();
std::filesystem::path bundled_schema_path();

struct KbResult {
  // One entry per schema slot plus a trailing "all constraints" entry.
  std::vector<float> bin;
  std::vector<float> cnt;
};

// cnt[i] is the fraction of rows whose slot i equals the constrained value
// (1.0 for unconstrained slots); the last entry is the fraction matching all
// constraints at once. bin is the indicator cnt > 0.
KbResult kb_query(const KnowledgeBase& kb, const SlotValues& constraints);

struct Goal {
  SlotValues constraints;
  std::set<std::string> requests;
  // Row the goal was drawn from, -1 for hand-built goals.
  long source_row = -1;
};

// Uniform row, 2-5 of its informable slot values as constraints, and
// ticket plus 0-2 extra requests. Satisfiable by construction.
Goal sample_goal(const KnowledgeBase& kb, Rng& rng);

// True when at least one row matches every constraint.
bool goal_satisfiable(const KnowledgeBase& kb, const Goal& goal);

}  // namespace dmrl
