#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gconv {

inline constexpr int kDefaultNodeCap = 4096;

using Edge = std::pair<int, int>;

// Undirected simple graph. Edges are stored once as (i, j) with i < j, sorted.
// Self-loops are never stored; the A + I convention is applied by the
// constructions below when asked for.
class Graph {
 public:
  // Throws ParameterError on out-of-range endpoints, self-pairs, duplicates,
  // mis-sized features/labels, or n above node_cap.
  Graph(int n, std::vector<Edge> edges, std::optional<Eigen::MatrixXd> features = std::nullopt,
        std::optional<Eigen::VectorXi> labels = std::nullopt, int node_cap = kDefaultNodeCap);

  int num_nodes() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::optional<Eigen::MatrixXd>& features() const noexcept { return features_; }
  const std::optional<Eigen::VectorXi>& labels() const noexcept { return labels_; }

  // Number of classes, max label + 1 (0 when unlabeled).
  int num_classes() const;

  bool operator==(const Graph& other) const;

 private:
  int n_;
  std::vector<Edge> edges_;
  std::optional<Eigen::MatrixXd> features_;
  std::optional<Eigen::VectorXi> labels_;
};

enum class SelfLoops { kExclude, kInclude };

// Symmetric 0/1 matrix; unit diagonal with SelfLoops::kInclude.
Eigen::MatrixXd adjacency(const Graph& g, SelfLoops loops);

struct DegreeVector {
  Eigen::VectorXd values;
  SelfLoops convention;
};

DegreeVector degrees(const Graph& g, SelfLoops loops);

// D̂^(-1/2) Â D̂^(-1/2); the GCN propagation matrix.
Eigen::MatrixXd laplacian_hat(const Graph& g);

// I - D^(-1/2) A D^(-1/2). Throws IsolatedNodeError on a zero-degree node.
Eigen::MatrixXd laplacian_sym(const Graph& g);

// laplacian_sym(g) - I.
Eigen::MatrixXd laplacian_sym_shifted(const Graph& g);

// Components sorted by smallest member; members ascending.
std::vector<std::vector<int>> connected_components(const Graph& g);

}  // namespace gconv
