#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gconv/check.hpp"
#include "gconv/kernels.hpp"
#include "gconv/models.hpp"

namespace gconv {

// Command bodies behind the CLI. Each returns the process exit status and
// throws on runtime failure; argument parsing stays in the tool.

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitRuntime = 3;

struct GenerateOptions {
  std::string preset;       // used when config_path is empty
  std::string config_path;  // SbmConfig JSON
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> class_sizes;
  std::optional<double> p_intra;
  std::optional<double> q_inter;
  std::optional<int> feature_dim;
  std::optional<double> feature_mean_scale;
  std::optional<double> feature_std;
};

int cmd_generate(const GenerateOptions& options, std::ostream& log);

struct SpectrumOptions {
  std::string dataset;
  KernelSpec kernel;
  std::string out;  // empty writes to the log stream
};

// CSV block,index,lambda,mapped: the "spectrum" block lists the eigenvalues of
// L̂ ascending with the kernel's scalar map applied; the "curve" block samples
// the map at 201 uniform points of [-1, 1].
int cmd_spectrum(const SpectrumOptions& options, std::ostream& log);

struct TrainOptions {
  std::string dataset;
  KernelSpec kernel;
  ModelConfig model;
  std::string report;  // empty skips the JSON file
};

int cmd_train(const TrainOptions& options, std::ostream& log);

struct BenchOptions {
  std::string config;  // empty runs the default grid
  std::string out;
  std::string summary;  // empty derives <out stem>_summary.csv
  std::optional<int> jobs;
  bool timing = false;
};

int cmd_bench(const BenchOptions& options, std::ostream& log);

int cmd_check(const CheckOptions& options, std::ostream& log);

}  // namespace gconv
