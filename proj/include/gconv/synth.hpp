#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gconv/graph.hpp"

namespace gconv {

class Rng;

// Stochastic block model. Class c owns a contiguous label block of
// class_sizes[c] nodes; pairs are linked with p_intra inside a class and
// q_inter across classes. Node features are μ·1_{block c} + σ·N(0, I) where
// block c is coordinates [c·⌊d/C⌋, (c+1)·⌊d/C⌋).
struct SbmConfig {
  std::vector<int> class_sizes;
  double p_intra = 0.0;
  double q_inter = 0.0;
  int feature_dim = 1;
  double feature_mean_scale = 1.0;
  double feature_std = 1.0;
  std::uint64_t seed = 0;

  int num_nodes() const;
  // Throws ParameterError.
  void validate() const;
  bool operator==(const SbmConfig&) const = default;
};

SbmConfig preset_smallgap();
SbmConfig preset_smallratio();
// "smallgap" or "smallratio"; throws ParameterError otherwise.
SbmConfig preset_by_name(const std::string& name);

struct DensityStats {
  double density;      // ρ = (p + q) / 2
  double density_gap;  // ε = |p - q|
  double label_ratio;  // smallest class / largest class
};

DensityStats density_stats(const SbmConfig& cfg);

struct Split {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  bool operator==(const Split&) const = default;
};

struct SplitFractions {
  double train = 0.1;
  double val = 0.2;
  double test = 0.7;
};

// Stratified, seeded split. Per class, each set receives ⌊f·n_c⌋ nodes; when
// the fractions sum to 1 the leftover nodes go to the sets with the largest
// fractional remainders. Every class keeps at least one training node.
Split make_split(const Eigen::VectorXi& labels, SplitFractions fractions, std::uint64_t seed);
Split make_split(const Eigen::VectorXi& labels, SplitFractions fractions, Rng& rng);

struct Provenance {
  std::string generator;  // "sbm" or "ingested"
  std::string rng_algorithm;
  std::optional<SbmConfig> config;
  std::string source_path;
  std::vector<std::string> warnings;
};

struct Dataset {
  Graph graph;
  Split split;
  Provenance provenance;
};

// Stream order: edges in row-major (i < j) order, then features node by node,
// then the split. Labels are assigned by class block and draw nothing.
Dataset generate(const SbmConfig& cfg);

// Dataset directory: edges.csv, features.csv, labels.csv, meta.json and
// optionally split.json. Throws ParseError (file + line) on malformed input.
Dataset ingest(const std::filesystem::path& dir);
void export_dataset(const Dataset& ds, const std::filesystem::path& dir);

}  // namespace gconv
