#include "dmrl/interp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "dmrl/errors.hpp"
#include "dmrl/svg.hpp"

namespace dmrl {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

}  // namespace

void write_hidden_header(std::ostream& out, int hidden, int slots) {
  out << "epoch,dialogue,turn,terminal";
  for (int i = 0; i < hidden; ++i) out << ",h_" << i;
  for (int i = 0; i < slots; ++i) out << ",cs_" << i;
  out << '\n';
}

void append_hidden_rows(std::ostream& out, std::span<const HiddenRecord> records) {
  for (const auto& r : records) {
    out << r.epoch << ',' << r.dialogue << ',' << r.turn << ',' << (r.terminal ? 1 : 0);
    for (float v : r.h) out << ',' << fmt(v);
    for (float v : r.current_slots) out << ',' << fmt(v);
    out << '\n';
  }
}

void write_hidden_records(std::ostream& out, std::span<const HiddenRecord> records) {
  const int h = records.empty() ? 0 : static_cast<int>(records.front().h.size());
  const int s = records.empty() ? 0 : static_cast<int>(records.front().current_slots.size());
  write_hidden_header(out, h, s);
  append_hidden_rows(out, records);
}

std::vector<HiddenRecord> read_hidden_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("hidden records: missing header");
  const auto head = split_csv(line);
  if (head.size() < 4 || head[0] != "epoch" || head[1] != "dialogue" || head[2] != "turn" ||
      head[3] != "terminal") {
    throw ParseError("hidden records: unexpected header");
  }
  int nh = 0, ns = 0;
  for (std::size_t i = 4; i < head.size(); ++i) {
    if (head[i] == "h_" + std::to_string(nh) && ns == 0) {
      ++nh;
    } else if (head[i] == "cs_" + std::to_string(ns)) {
      ++ns;
    } else {
      throw ParseError("hidden records: unexpected column '" + head[i] + "'");
    }
  }
  std::vector<HiddenRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != head.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(head.size()) + " columns");
    }
    HiddenRecord r;
    r.epoch = static_cast<int>(to_double(cells[0], line_no));
    r.dialogue = static_cast<int>(to_double(cells[1], line_no));
    r.turn = static_cast<int>(to_double(cells[2], line_no));
    r.terminal = to_double(cells[3], line_no) != 0.0;
    for (int i = 0; i < nh; ++i) r.h.push_back(static_cast<float>(to_double(cells[4 + i], line_no)));
    for (int i = 0; i < ns; ++i) {
      r.current_slots.push_back(static_cast<float>(to_double(cells[4 + nh + i], line_no)));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<HiddenRecord> load_hidden_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_hidden_records(in);
}

PolicyHistogram policy_histogram(int epoch, std::span<const int> actions, int num_actions) {
  if (num_actions <= 0) throw UsageError("policy histogram needs at least one action");
  PolicyHistogram h{epoch, std::vector<double>(num_actions, 0.0)};
  if (actions.empty()) return h;
  for (int a : actions) {
    if (a < 0 || a >= num_actions) throw UsageError("action index out of range");
    h.freq[a] += 1.0;
  }
  for (double& f : h.freq) f /= static_cast<double>(actions.size());
  return h;
}

void write_policy_histograms(std::ostream& out, std::span<const PolicyHistogram> hists) {
  const std::size_t n = hists.empty() ? 0 : hists.front().freq.size();
  out << "epoch";
  for (std::size_t i = 0; i < n; ++i) out << ",a_" << i;
  out << '\n';
  for (const auto& h : hists) {
    out << h.epoch;
    for (double f : h.freq) out << ',' << fmt(f);
    out << '\n';
  }
}

std::vector<PolicyHistogram> read_policy_histograms(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("policy histograms: missing header");
  const auto head = split_csv(line);
  if (head.empty() || head[0] != "epoch") throw ParseError("policy histograms: unexpected header");
  std::vector<PolicyHistogram> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != head.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": column count mismatch");
    }
    PolicyHistogram h;
    h.epoch = static_cast<int>(to_double(cells[0], line_no));
    for (std::size_t i = 1; i < cells.size(); ++i) h.freq.push_back(to_double(cells[i], line_no));
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<PolicyHistogram> policy_distribution(const std::filesystem::path& run_dir) {
  const auto path = run_dir / "policy.csv";
  std::ifstream in(path);
  if (!in) return {};
  return read_policy_histograms(in);
}

namespace {

// Leading eigenpair of a symmetric PSD matrix; deterministic start vector.
std::pair<double, Eigen::VectorXd> power_iteration(const Eigen::MatrixXd& c) {
  const Eigen::Index d = c.rows();
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i);
  v.normalize();
  if (c.norm() == 0.0) return {0.0, v};
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = c * v;
    const double n = w.norm();
    if (n == 0.0) return {0.0, v};
    w /= n;
    const double delta = (w - v).norm();
    v = w;
    if (delta < 1e-9) break;
  }
  // Sign convention: largest-magnitude entry positive.
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0) v = -v;
  return {v.dot(c * v), v};
}

}  // namespace

Pca2d pca_2d(std::span<const HiddenRecord> records) {
  if (records.size() < 3) throw UsageError("pca needs at least 3 records");
  const auto n = static_cast<Eigen::Index>(records.size());
  const auto d = static_cast<Eigen::Index>(records.front().h.size());
  if (d == 0) throw UsageError("pca over empty hidden vectors");
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& h = records[static_cast<std::size_t>(i)].h;
    if (static_cast<Eigen::Index>(h.size()) != d) throw ShapeError("pca: ragged hidden vectors");
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = h[static_cast<std::size_t>(j)];
  }
  x.rowwise() -= x.colwise().mean();
  Eigen::MatrixXd cov = x.transpose() * x / static_cast<double>(n - 1);
  Pca2d out;
  auto [l1, v1] = power_iteration(cov);
  cov -= l1 * v1 * v1.transpose();
  auto [l2, v2] = power_iteration(cov);
  if (l1 == 0.0) v2.setZero();
  out.eigenvalues = {l1, l2};
  out.components[0].assign(v1.data(), v1.data() + d);
  out.components[1].assign(v2.data(), v2.data() + d);
  const Eigen::VectorXd p1 = x * v1, p2 = x * v2;
  out.coords.resize(records.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.coords[static_cast<std::size_t>(i)] = {p1(i), p2(i)};
  }
  return out;
}

bool ImportanceMatrix::defined(int d, int k) const { return !std::isnan((*this)(d, k)); }

namespace {

// Average 1-based ranks with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> score) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  std::vector<double> ranks(score.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && score[order[j + 1]] == score[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double auc_from_ranks(std::span<const double> ranks, std::span<const char> label) {
  double pos = 0, rank_sum = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (label[i]) {
      pos += 1;
      rank_sum += ranks[i];
    }
  }
  const double neg = static_cast<double>(ranks.size()) - pos;
  if (pos == 0 || neg == 0) return std::numeric_limits<double>::quiet_NaN();
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

}  // namespace

double rank_auc(std::span<const double> score, std::span<const bool> label) {
  if (score.size() != label.size()) throw ShapeError("auc: score/label length mismatch");
  const auto ranks = average_ranks(score);
  const std::vector<char> lab(label.begin(), label.end());
  return auc_from_ranks(ranks, lab);
}

ImportanceMatrix dimension_importance(std::span<const HiddenRecord> records) {
  if (records.empty()) throw UsageError("dimension importance over no records");
  ImportanceMatrix m;
  m.dims = static_cast<int>(records.front().h.size());
  m.classes = static_cast<int>(records.front().current_slots.size());
  m.scores.assign(static_cast<std::size_t>(m.dims) * m.classes, 0.0);
  std::vector<std::vector<char>> labels(m.classes, std::vector<char>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (static_cast<int>(records[i].h.size()) != m.dims ||
        static_cast<int>(records[i].current_slots.size()) != m.classes) {
      throw ShapeError("dimension importance: ragged records");
    }
    for (int k = 0; k < m.classes; ++k) labels[k][i] = records[i].current_slots[k] > 0.5f;
  }
  std::vector<double> col(records.size());
  for (int d = 0; d < m.dims; ++d) {
    for (std::size_t i = 0; i < records.size(); ++i) col[i] = records[i].h[d];
    const auto ranks = average_ranks(col);
    for (int k = 0; k < m.classes; ++k) {
      const double auc = auc_from_ranks(ranks, labels[k]);
      m.scores[static_cast<std::size_t>(d) * m.classes + k] =
          std::isnan(auc) ? auc : std::max(auc, 1.0 - auc);
    }
  }
  return m;
}

double sparsity(std::span<const HiddenRecord> records, double threshold) {
  std::size_t total = 0, small = 0;
  for (const auto& r : records) {
    for (float v : r.h) {
      ++total;
      if (std::fabs(v) < threshold) ++small;
    }
  }
  if (total == 0) throw UsageError("sparsity over no hidden components");
  return static_cast<double>(small) / static_cast<double>(total);
}

InterpSummary run_interp(const std::filesystem::path& run_dir) {
  const auto records = load_hidden_records(run_dir / "hidden.csv");
  InterpSummary s;
  s.records = records.size();
  s.sparsity = sparsity(records);

  if (records.size() >= 3) {
    const auto pca = pca_2d(records);
    auto out = open_out(run_dir / "pca.csv");
    out << "epoch,dialogue,turn,pc1,pc2\n";
    std::vector<double> xs, ys;
    std::vector<int> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
      out << records[i].epoch << ',' << records[i].dialogue << ',' << records[i].turn << ','
          << fmt(pca.coords[i][0]) << ',' << fmt(pca.coords[i][1]) << '\n';
      xs.push_back(pca.coords[i][0]);
      ys.push_back(pca.coords[i][1]);
      groups.push_back(records[i].turn);
    }
    open_out(run_dir / "pca.svg") << svg_scatter("hidden states (PCA), colour = turn", xs, ys, groups);
  }

  const auto imp = dimension_importance(records);
  {
    auto out = open_out(run_dir / "importance.csv");
    out << "dim";
    for (int k = 0; k < imp.classes; ++k) out << ",cs_" << k;
    out << '\n';
    for (int d = 0; d < imp.dims; ++d) {
      out << d;
      for (int k = 0; k < imp.classes; ++k) out << ',' << fmt(imp(d, k));
      out << '\n';
    }
    open_out(run_dir / "importance.svg")
        << svg_heatmap("one-vs-rest AUC: hidden dim x slot", imp.dims, imp.classes, imp.scores, 0.5, 1.0);
  }

  const auto hists = policy_distribution(run_dir);
  s.epochs_with_policy = hists.size();
  if (!hists.empty()) {
    std::vector<double> cells;
    for (const auto& h : hists) cells.insert(cells.end(), h.freq.begin(), h.freq.end());
    open_out(run_dir / "policy.svg")
        << svg_heatmap("policy distribution: epoch x action", static_cast<int>(hists.size()),
                       static_cast<int>(hists.front().freq.size()), cells, 0.0, 1.0);
  }

  auto out = open_out(run_dir / "interp_summary.csv");
  out << "records,sparsity,policy_epochs\n"
      << s.records << ',' << fmt(s.sparsity) << ',' << s.epochs_with_policy << '\n';
  return s;
}

}  // namespace dmrl
