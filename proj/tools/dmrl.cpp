// Command-line driver: train / evaluate / plot / interp / gen-kb.
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "dmrl/errors.hpp"
#include "dmrl/experiment.hpp"
#include "dmrl/interp.hpp"
#include "dmrl/kb.hpp"
#include "dmrl/schema.hpp"

namespace {

void print_metrics(const dmrl::EpochMetrics& m) {
  dmrl::write_metrics_header(std::cout);
  dmrl::write_metrics_row(std::cout, m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrent state tracking + hybrid SL/RL dialogue agent"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "run a training experiment");
  train->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out_dir, "run directory")->required();
  train->add_flag("-q,--quiet", quiet, "no per-epoch progress");

  std::string ckpt;
  int n = 100;
  double noise = 0.0;
  std::uint64_t seed = 1;
  auto* eval = app.add_subcommand("evaluate", "greedy evaluation of a checkpoint (or 'rule')");
  eval->add_option("--ckpt", ckpt, "checkpoint file or 'rule'")->required();
  eval->add_option("-n", n, "dialogues")->required();
  eval->add_option("--noise", noise, "slot error probability")->default_val(0.0);
  eval->add_option("--seed", seed, "seed")->default_val(1);

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "success-rate SVG for a run directory");
  plot->add_option("dir", plot_dir)->required()->check(CLI::ExistingDirectory);

  std::string interp_dir;
  auto* interp = app.add_subcommand("interp", "hidden-state analyses for a run directory");
  interp->add_option("dir", interp_dir)->required()->check(CLI::ExistingDirectory);

  std::string data_dir;
  auto* gen = app.add_subcommand("gen-kb", "write the bundled schema and KB fixture");
  gen->add_option("dir", data_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const auto cfg = dmrl::load_config(config_path);
      const auto res = dmrl::train(cfg, out_dir, quiet ? nullptr : &std::cerr);
      std::cout << "rule agent success " << res.rule_success_rate << ", final success "
                << (res.epochs.empty() ? 0.0 : res.epochs.back().success_rate) << '\n';
    } else if (*eval) {
      print_metrics(dmrl::evaluate(ckpt, n, noise, seed));
    } else if (*plot) {
      std::cout << dmrl::plot_run(plot_dir).string() << '\n';
    } else if (*interp) {
      const auto s = dmrl::run_interp(interp_dir);
      std::cout << "records " << s.records << ", sparsity " << s.sparsity << ", policy epochs "
                << s.epochs_with_policy << '\n';
    } else if (*gen) {
      std::filesystem::create_directories(data_dir);
      const auto& schema = dmrl::reference_schema();
      std::ofstream(std::filesystem::path(data_dir) / "schema.txt", std::ios::binary)
          << dmrl::format_schema(schema);
      std::ofstream(std::filesystem::path(data_dir) / "kb.txt", std::ios::binary)
          << dmrl::format_kb(dmrl::generate_kb_fixture(schema, dmrl::kFixtureRows, dmrl::kFixtureSeed));
    }
  } catch (const dmrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
