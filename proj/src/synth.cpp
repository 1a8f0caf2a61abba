#include "gconv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gconv/error.hpp"
#include "gconv/random.hpp"

namespace gconv {

int SbmConfig::num_nodes() const { return std::accumulate(class_sizes.begin(), class_sizes.end(), 0); }

void SbmConfig::validate() const {
  if (class_sizes.empty()) throw ParameterError("SBM needs at least one class");
  for (int s : class_sizes) {
    if (s < 1) throw ParameterError("SBM class sizes must be positive");
  }
  if (!(p_intra >= 0.0 && p_intra <= 1.0)) throw ParameterError("p_intra must lie in [0, 1]");
  if (!(q_inter >= 0.0 && q_inter <= 1.0)) throw ParameterError("q_inter must lie in [0, 1]");
  if (feature_dim < 1) throw ParameterError("feature_dim must be positive");
  if (!(feature_std > 0.0)) throw ParameterError("feature_std must be positive");
  if (!std::isfinite(feature_mean_scale)) throw ParameterError("feature_mean_scale must be finite");
}

SbmConfig preset_smallgap() {
  SbmConfig cfg;
  cfg.class_sizes = {200, 200};
  cfg.p_intra = 0.05;
  cfg.q_inter = 0.045;
  cfg.feature_dim = 32;
  cfg.feature_mean_scale = 1.5;
  cfg.feature_std = 1.0;
  return cfg;
}

SbmConfig preset_smallratio() {
  SbmConfig cfg;
  cfg.class_sizes = {80, 320};
  cfg.p_intra = 0.10;
  cfg.q_inter = 0.05;
  cfg.feature_dim = 32;
  cfg.feature_mean_scale = 0.6;
  cfg.feature_std = 1.0;
  return cfg;
}

SbmConfig preset_by_name(const std::string& name) {
  if (name == "smallgap") return preset_smallgap();
  if (name == "smallratio") return preset_smallratio();
  throw ParameterError("unknown preset '" + name + "' (expected smallgap or smallratio)");
}

DensityStats density_stats(const SbmConfig& cfg) {
  cfg.validate();
  const auto [lo, hi] = std::minmax_element(cfg.class_sizes.begin(), cfg.class_sizes.end());
  return {(cfg.p_intra + cfg.q_inter) / 2.0, std::abs(cfg.p_intra - cfg.q_inter),
          static_cast<double>(*lo) / static_cast<double>(*hi)};
}

Split make_split(const Eigen::VectorXi& labels, SplitFractions fractions, std::uint64_t seed) {
  Rng rng(seed);
  return make_split(labels, fractions, rng);
}

Split make_split(const Eigen::VectorXi& labels, SplitFractions fractions, Rng& rng) {
  const std::array<double, 3> f = {fractions.train, fractions.val, fractions.test};
  for (double v : f) {
    if (!(v >= 0.0)) throw ParameterError("split fractions must be nonnegative");
  }
  if (!(f[0] > 0.0)) throw ParameterError("train fraction must be positive");
  const double total = f[0] + f[1] + f[2];
  if (total > 1.0 + 1e-9) throw ParameterError("split fractions sum to more than 1");
  const bool exhaustive = std::abs(total - 1.0) <= 1e-9;

  const int classes = labels.size() ? labels.maxCoeff() + 1 : 0;
  std::vector<std::vector<int>> members(classes);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels(i) < 0) throw ParameterError("labels must be nonnegative");
    members[labels(i)].push_back(static_cast<int>(i));
  }

  Split split;
  std::array<std::vector<int>*, 3> sets = {&split.train, &split.val, &split.test};
  for (int c = 0; c < classes; ++c) {
    auto& nodes = members[c];
    const int size = static_cast<int>(nodes.size());
    if (size == 0) {
      throw ParameterError("class " + std::to_string(c) + " has no nodes; cannot place a training node");
    }
    for (int i = size - 1; i > 0; --i) {
      std::swap(nodes[i], nodes[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }

    std::array<int, 3> count{};
    std::array<double, 3> remainder{};
    for (int k = 0; k < 3; ++k) {
      const double exact = f[k] * size;
      count[k] = static_cast<int>(std::floor(exact + 1e-9));
      remainder[k] = exact - count[k];
    }
    if (exhaustive) {
      int leftover = size - (count[0] + count[1] + count[2]);
      std::array<int, 3> order = {0, 1, 2};
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return remainder[a] > remainder[b]; });
      for (int k = 0; leftover > 0; k = (k + 1) % 3) {
        if (f[order[k]] > 0.0) {
          ++count[order[k]];
          --leftover;
        }
      }
    }
    if (count[0] == 0) {
      if (count[0] + count[1] + count[2] < size) {
        count[0] = 1;
      } else {
        const int donor = count[2] >= count[1] ? 2 : 1;
        --count[donor];
        count[0] = 1;
      }
    }
    int offset = 0;
    for (int k = 0; k < 3; ++k) {
      sets[k]->insert(sets[k]->end(), nodes.begin() + offset, nodes.begin() + offset + count[k]);
      offset += count[k];
    }
  }
  for (auto* s : sets) std::sort(s->begin(), s->end());
  return split;
}

Dataset generate(const SbmConfig& cfg) {
  cfg.validate();
  const int n = cfg.num_nodes();
  const int classes = static_cast<int>(cfg.class_sizes.size());

  Eigen::VectorXi labels(n);
  for (int c = 0, offset = 0; c < classes; offset += cfg.class_sizes[c], ++c) {
    labels.segment(offset, cfg.class_sizes[c]).setConstant(c);
  }

  Rng rng(cfg.seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double prob = labels(i) == labels(j) ? cfg.p_intra : cfg.q_inter;
      if (rng.bernoulli(prob)) edges.emplace_back(i, j);
    }
  }

  const int d = cfg.feature_dim;
  const int block = d / classes;
  Eigen::MatrixXd features(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) features(i, k) = cfg.feature_std * rng.normal();
    if (block > 0) features.row(i).segment(labels(i) * block, block).array() += cfg.feature_mean_scale;
  }

  Split split = make_split(labels, SplitFractions{}, rng);
  Graph graph(n, std::move(edges), std::move(features), labels);

  Provenance provenance{"sbm", std::string(Rng::kAlgorithm), cfg, {}, {}};
  const auto components = connected_components(graph).size();
  if (components > 1) {
    provenance.warnings.push_back("generated graph is disconnected (" + std::to_string(components) +
                                  " connected components)");
  }
  return {std::move(graph), std::move(split), std::move(provenance)};
}

}  // namespace gconv
