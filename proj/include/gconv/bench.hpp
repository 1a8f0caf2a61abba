#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gconv/kernels.hpp"
#include "gconv/models.hpp"

namespace gconv {

// A benchmark dataset: a named SBM preset (re-sampled per seed) or a dataset
// directory (fixed; seeds then only vary the weight initialization).
struct BenchDataset {
  std::string name;
  std::string preset;
  std::string path;
};

struct BenchModel {
  std::string name;  // column label, defaults to the arch
  ModelConfig config;
};

struct BenchConfig {
  std::vector<BenchDataset> datasets;
  std::vector<KernelSpec> kernels;
  std::vector<BenchModel> models;
  std::vector<std::uint64_t> seeds;
  std::string output;
  bool timing = false;  // record wall_time_s; otherwise the column is 0
  int jobs = 1;

  // Throws ParameterError on empty lists or malformed entries.
  void validate() const;
};

// smallgap + smallratio × {L̂, L̂², S, Li, P(r=0.5)} × {GCN, SGC} × seeds 0..4.
BenchConfig default_bench_config();

BenchConfig bench_config_from_json(const nlohmann::json& j);
BenchConfig load_bench_config(const std::filesystem::path& path);

struct BenchRow {
  std::string dataset;
  std::string model;
  std::string kernel;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  int best_epoch = 0;
  double wall_time_s = 0.0;
  std::string error;  // empty on success
};

// Full grid in dataset → model → kernel → seed order. Cell i trains with
// init_seed = derive_seed(seed, i), so results do not depend on `jobs`.
// Failing cells keep their row and carry the message in `error`.
std::vector<BenchRow> run_bench(const BenchConfig& config);

std::string bench_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_bench_csv(const std::string& text);

struct SummaryCell {
  std::string dataset;
  std::string model;
  std::string kernel;
  int count = 0;  // successful seeds
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one seed
};

std::vector<SummaryCell> summarize(const std::vector<BenchRow>& rows);

// One row per dataset, a mean and std column per (model, kernel); empty cells
// where every seed failed.
std::string summary_csv(const std::vector<BenchRow>& rows);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);
std::vector<std::string> parse_csv_line(const std::string& line);

}  // namespace gconv
