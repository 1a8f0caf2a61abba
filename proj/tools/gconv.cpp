#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gconv/commands.hpp"
#include "gconv/error.hpp"
#include "gconv/serialization.hpp"

namespace {

// Parses a kernel string while CLI11 is still validating, so a bad kernel is
// a usage error rather than a runtime one.
CLI::Validator kernel_validator() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          gconv::KernelSpec::parse(s);
          return {};
        } catch (const gconv::Error& e) {
          return e.what();
        }
      },
      "KERNEL");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gconv;

  CLI::App app{"Graph convolution kernels: SBM data, spectra, training, benchmarks and invariant checks"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate_cmd = app.add_subcommand("generate", "Sample an SBM dataset directory");
  generate_cmd->add_option("--preset", gen.preset, "smallgap or smallratio (default smallgap)");
  generate_cmd->add_option("--config", gen.config_path, "SbmConfig JSON file")->check(CLI::ExistingFile);
  generate_cmd->add_option("--seed", gen.seed, "Override the config seed");
  generate_cmd->add_option("--out", gen.out, "Output directory")->required();
  generate_cmd->add_option("--class-sizes", gen.class_sizes, "Nodes per class")->delimiter(',');
  generate_cmd->add_option("--p-intra", gen.p_intra, "Intra-class edge probability");
  generate_cmd->add_option("--q-inter", gen.q_inter, "Inter-class edge probability");
  generate_cmd->add_option("--feature-dim", gen.feature_dim, "Feature dimension");
  generate_cmd->add_option("--feature-mean-scale", gen.feature_mean_scale, "Class mean scale");
  generate_cmd->add_option("--feature-std", gen.feature_std, "Feature noise std");
  generate_cmd->get_option("--preset")->excludes("--config");

  SpectrumOptions spec;
  std::string spec_kernel = "laplacian";
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Eigenvalues of L̂ and a kernel's eigenvalue map as CSV");
  spectrum_cmd->add_option("--dataset", spec.dataset, "Dataset directory")->required();
  spectrum_cmd->add_option("--kernel", spec_kernel, "Kernel string")->check(kernel_validator());
  spectrum_cmd->add_option("--out", spec.out, "Output CSV (default stdout)");

  TrainOptions tr;
  std::string train_kernel = "poisson:r=0.5";
  std::string arch = "gcn";
  std::string model_config;
  std::optional<int> hidden, epochs, sgc_power;
  std::optional<double> lr, wd;
  std::optional<std::uint64_t> init_seed;
  std::optional<std::string> optimizer;
  auto* train_cmd = app.add_subcommand("train", "Train one model and write a JSON report");
  train_cmd->add_option("--dataset", tr.dataset, "Dataset directory")->required();
  train_cmd->add_option("--kernel", train_kernel, "Kernel string")->check(kernel_validator());
  train_cmd->add_option("--arch", arch, "gcn or sgc")->check(CLI::IsMember({"gcn", "sgc"}));
  train_cmd->add_option("--model-config", model_config, "ModelConfig JSON file")->check(CLI::ExistingFile);
  train_cmd->add_option("--hidden-dim", hidden, "GCN hidden width");
  train_cmd->add_option("--epochs", epochs, "Training epochs");
  train_cmd->add_option("--learning-rate", lr, "Learning rate");
  train_cmd->add_option("--weight-decay", wd, "L2 penalty on the first weight matrix");
  train_cmd->add_option("--sgc-power", sgc_power, "Kernel power k for SGC");
  train_cmd->add_option("--seed", init_seed, "Weight initialization seed");
  train_cmd->add_option("--optimizer", optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--report", tr.report, "TrainReport JSON path");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the dataset × kernel × model × seed grid");
  bench_cmd->add_option("--config", bench.config, "BenchConfig JSON (default grid when omitted)")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench.out, "Raw results CSV");
  bench_cmd->add_option("--summary", bench.summary, "Summary CSV (default <out>_summary.csv)");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--timing", bench.timing, "Record wall_time_s (makes the CSV non-reproducible)");

  CheckOptions check;
  bool inject = false;
  auto* check_cmd = app.add_subcommand("check", "Run the invariant suite on random instances");
  check_cmd->add_option("--seed", check.seed, "Suite seed");
  check_cmd->add_flag("--inject-fault", inject, "Drop self-loops from L̂ to show the checks fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, std::cout);
    if (*spectrum_cmd) {
      spec.kernel = KernelSpec::parse(spec_kernel);
      return cmd_spectrum(spec, std::cout);
    }
    if (*train_cmd) {
      tr.kernel = KernelSpec::parse(train_kernel);
      tr.model = ModelConfig::defaults(parse_arch(arch));
      if (!model_config.empty()) {
        std::ifstream in(model_config);
        nlohmann::json::parse(in).get_to(tr.model);
      }
      if (hidden) tr.model.hidden_dim = *hidden;
      if (epochs) tr.model.epochs = *epochs;
      if (lr) tr.model.learning_rate = *lr;
      if (wd) tr.model.weight_decay = *wd;
      if (sgc_power) tr.model.sgc_power = *sgc_power;
      if (init_seed) tr.model.init_seed = *init_seed;
      if (optimizer) tr.model.optimizer = parse_optimizer(*optimizer);
      tr.model.validate();
      return cmd_train(tr, std::cout);
    }
    if (*bench_cmd) return cmd_bench(bench, std::cout);
    if (*check_cmd) {
      if (inject) check.fault = CheckFault::kDropSelfLoops;
      return cmd_check(check, std::cout);
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
