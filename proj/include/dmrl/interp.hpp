#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dmrl {

// One belief vector per agent turn of an evaluation dialogue.
struct HiddenRecord {
  int epoch = 0;
  int dialogue = 0;
  int turn = 0;
  bool terminal = false;
  std::vector<float> h;
  std::vector<float> current_slots;
};

// CSV: epoch,dialogue,turn,terminal,h_0..h_{H-1},cs_0..cs_{S-1}
void write_hidden_records(std::ostream& out, std::span<const HiddenRecord> records);
// Widths come from the header when `records` is empty.
void write_hidden_header(std::ostream& out, int hidden, int slots);
void append_hidden_rows(std::ostream& out, std::span<const HiddenRecord> records);
std::vector<HiddenRecord> read_hidden_records(std::istream& in);
std::vector<HiddenRecord> load_hidden_records(const std::filesystem::path& path);

struct PolicyHistogram {
  int epoch = 0;
  std::vector<double> freq;
};

// Empirical action frequencies of one epoch's evaluation turns.
PolicyHistogram policy_histogram(int epoch, std::span<const int> actions, int num_actions);

// CSV: epoch,a_0..a_{N-1}
void write_policy_histograms(std::ostream& out, std::span<const PolicyHistogram> hists);
std::vector<PolicyHistogram> read_policy_histograms(std::istream& in);
std::vector<PolicyHistogram> policy_distribution(const std::filesystem::path& run_dir);

struct Pca2d {
  std::vector<std::array<double, 2>> coords;
  std::array<std::vector<double>, 2> components;
  std::array<double, 2> eigenvalues{};
};

// Power iteration (tolerance 1e-9) on the covariance of the centred h
// vectors, with deflation for the second direction. Needs >= 3 records.
Pca2d pca_2d(std::span<const HiddenRecord> records);

// score(d, k) = max(AUC, 1 - AUC) of h_d against the label cs_k; NaN
// where class k has no positives or no negatives.
struct ImportanceMatrix {
  int dims = 0;
  int classes = 0;
  std::vector<double> scores;  // row-major dims x classes

  double operator()(int d, int k) const { return scores.at(static_cast<std::size_t>(d) * classes + k); }
  bool defined(int d, int k) const;
};

ImportanceMatrix dimension_importance(std::span<const HiddenRecord> records);

// Rank-based AUC of `score` for binary `label` (ties get average ranks);
// NaN when either class is empty.
double rank_auc(std::span<const double> score, std::span<const bool> label);

inline constexpr double kSparsityThreshold = 1e-3;
double sparsity(std::span<const HiddenRecord> records, double threshold = kSparsityThreshold);

struct InterpSummary {
  std::size_t records = 0;
  double sparsity = 0.0;
  std::size_t epochs_with_policy = 0;
};

// Reads hidden.csv / policy.csv from a run directory and writes the
// derived CSVs and SVGs next to them.
InterpSummary run_interp(const std::filesystem::path& run_dir);

}  // namespace dmrl
