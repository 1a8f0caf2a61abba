#include "gconv/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gconv/error.hpp"

namespace gconv {

Graph::Graph(int n, std::vector<Edge> edges, std::optional<Eigen::MatrixXd> features,
             std::optional<Eigen::VectorXi> labels, int node_cap)
    : n_(n), edges_(std::move(edges)), features_(std::move(features)), labels_(std::move(labels)) {
  if (n_ < 1) throw ParameterError("graph needs at least one node");
  if (n_ > node_cap) {
    throw ParameterError("graph has " + std::to_string(n_) + " nodes, above the node cap of " +
                         std::to_string(node_cap));
  }
  for (auto& [i, j] : edges_) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) {
      throw ParameterError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") has an endpoint outside [0, " + std::to_string(n_) + ")");
    }
    if (i == j) throw ParameterError("self-pair (" + std::to_string(i) + ", " + std::to_string(i) + ")");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw ParameterError("duplicate edge (" + std::to_string(dup->first) + ", " +
                         std::to_string(dup->second) + ")");
  }
  if (features_ && features_->rows() != n_) {
    throw ParameterError("feature matrix has " + std::to_string(features_->rows()) +
                         " rows, expected " + std::to_string(n_));
  }
  if (labels_) {
    if (labels_->size() != n_) {
      throw ParameterError("label vector has " + std::to_string(labels_->size()) +
                           " entries, expected " + std::to_string(n_));
    }
    if (n_ > 0 && labels_->minCoeff() < 0) throw ParameterError("labels must be nonnegative");
  }
}

int Graph::num_classes() const { return labels_ ? labels_->maxCoeff() + 1 : 0; }

bool Graph::operator==(const Graph& other) const {
  if (n_ != other.n_ || edges_ != other.edges_) return false;
  if (features_.has_value() != other.features_.has_value()) return false;
  if (features_ && (features_->cols() != other.features_->cols() || *features_ != *other.features_))
    return false;
  if (labels_.has_value() != other.labels_.has_value()) return false;
  return !labels_ || *labels_ == *other.labels_;
}

Eigen::MatrixXd adjacency(const Graph& g, SelfLoops loops) {
  const int n = g.num_nodes();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : g.edges()) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  if (loops == SelfLoops::kInclude) a.diagonal().setOnes();
  return a;
}

DegreeVector degrees(const Graph& g, SelfLoops loops) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.num_nodes());
  for (const auto& [i, j] : g.edges()) {
    d(i) += 1.0;
    d(j) += 1.0;
  }
  if (loops == SelfLoops::kInclude) d.array() += 1.0;
  return {std::move(d), loops};
}

Eigen::MatrixXd laplacian_hat(const Graph& g) {
  const Eigen::VectorXd inv_sqrt = degrees(g, SelfLoops::kInclude).values.array().rsqrt();
  return inv_sqrt.asDiagonal() * adjacency(g, SelfLoops::kInclude) * inv_sqrt.asDiagonal();
}

Eigen::MatrixXd laplacian_sym_shifted(const Graph& g) {
  const Eigen::VectorXd d = degrees(g, SelfLoops::kExclude).values;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) throw IsolatedNodeError(static_cast<int>(i));
  }
  const Eigen::VectorXd inv_sqrt = d.array().rsqrt();
  return -(inv_sqrt.asDiagonal() * adjacency(g, SelfLoops::kExclude) * inv_sqrt.asDiagonal());
}

Eigen::MatrixXd laplacian_sym(const Graph& g) {
  Eigen::MatrixXd l = laplacian_sym_shifted(g);
  l.diagonal().array() += 1.0;
  return l;
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<std::vector<int>> connected_components(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& [i, j] : g.edges()) {
    int a = find_root(parent, i);
    int b = find_root(parent, j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Roots are the smallest member of their set, so scanning nodes in order
  // visits components in order of their smallest member.
  std::vector<int> slot(n, -1);
  std::vector<std::vector<int>> out;
  for (int v = 0; v < n; ++v) {
    int root = find_root(parent, v);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[root]].push_back(v);
  }
  return out;
}

}  // namespace gconv
