#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gconv/error.hpp"
#include "gconv/random.hpp"
#include "gconv/serialization.hpp"
#include "gconv/synth.hpp"
#include "gconv/text.hpp"

namespace gconv {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const SbmConfig& cfg) {
  j = json{{"class_sizes", cfg.class_sizes},
           {"p_intra", cfg.p_intra},
           {"q_inter", cfg.q_inter},
           {"feature_dim", cfg.feature_dim},
           {"feature_mean_scale", cfg.feature_mean_scale},
           {"feature_std", cfg.feature_std},
           {"seed", cfg.seed}};
}

void from_json(const json& j, SbmConfig& cfg) {
  j.at("class_sizes").get_to(cfg.class_sizes);
  j.at("p_intra").get_to(cfg.p_intra);
  j.at("q_inter").get_to(cfg.q_inter);
  j.at("feature_dim").get_to(cfg.feature_dim);
  j.at("feature_mean_scale").get_to(cfg.feature_mean_scale);
  j.at("feature_std").get_to(cfg.feature_std);
  cfg.seed = j.value("seed", std::uint64_t{0});
}

void to_json(json& j, const Provenance& p) {
  j = json{{"generator", p.generator}, {"rng", p.rng_algorithm}, {"warnings", p.warnings}};
  j["config"] = p.config ? json(*p.config) : json(nullptr);
  if (!p.source_path.empty()) j["source"] = p.source_path;
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write to " + path.string() + " failed");
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return lines;
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::vector<int> index_list(const json& j, const char* key, const fs::path& path) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ParseError(path.string(), 0, std::string("missing array '") + key + "'");
  }
  return j.at(key).get<std::vector<int>>();
}

}  // namespace

void export_dataset(const Dataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());

  const Graph& g = ds.graph;
  {
    const auto path = dir / "edges.csv";
    auto out = open_for_write(path);
    for (const auto& [i, j] : g.edges()) out << i << ',' << j << '\n';
    finish(out, path);
  }
  if (g.features()) {
    const auto path = dir / "features.csv";
    auto out = open_for_write(path);
    const Eigen::MatrixXd& x = *g.features();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index k = 0; k < x.cols(); ++k) out << (k ? "," : "") << format_double(x(i, k));
      out << '\n';
    }
    finish(out, path);
  }
  if (g.labels()) {
    const auto path = dir / "labels.csv";
    auto out = open_for_write(path);
    for (Eigen::Index i = 0; i < g.labels()->size(); ++i) out << (*g.labels())(i) << '\n';
    finish(out, path);
  }
  {
    const auto path = dir / "split.json";
    auto out = open_for_write(path);
    out << json{{"train", ds.split.train}, {"val", ds.split.val}, {"test", ds.split.test}}.dump() << '\n';
    finish(out, path);
  }
  {
    json meta{{"n", g.num_nodes()},
              {"d", g.features() ? g.features()->cols() : 0},
              {"classes", g.num_classes()},
              {"seed", ds.provenance.config ? ds.provenance.config->seed : 0},
              {"generator", ds.provenance.generator},
              {"rng", ds.provenance.rng_algorithm},
              {"warnings", ds.provenance.warnings}};
    meta["config"] = ds.provenance.config ? json(*ds.provenance.config) : json(nullptr);
    const auto path = dir / "meta.json";
    auto out = open_for_write(path);
    out << meta.dump(2) << '\n';
    finish(out, path);
  }
}

Dataset ingest(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("dataset directory " + dir.string() + " does not exist");

  const auto meta_path = dir / "meta.json";
  const json meta = read_json(meta_path);
  int n = 0;
  try {
    n = meta.at("n").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(meta_path.string(), 0, std::string("bad or missing 'n': ") + e.what());
  }

  const auto edges_path = dir / "edges.csv";
  std::vector<Edge> edges;
  {
    const auto lines = read_lines(edges_path);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      const auto fields = split(lines[ln], ',');
      std::optional<std::int64_t> a, b;
      if (fields.size() == 2) {
        a = parse_int(fields[0]);
        b = parse_int(fields[1]);
      }
      if (!a || !b) throw ParseError(edges_path.string(), ln + 1, "expected 'i,j', got '" + lines[ln] + "'");
      if (*a < 0 || *b < 0 || *a >= n || *b >= n || *a == *b) {
        throw ParseError(edges_path.string(), ln + 1, "edge '" + lines[ln] + "' is out of range or a self-pair");
      }
      edges.emplace_back(static_cast<int>(*a), static_cast<int>(*b));
    }
  }

  const auto labels_path = dir / "labels.csv";
  if (!fs::exists(labels_path)) throw ParseError(labels_path.string(), 0, "missing labels file");
  std::vector<int> label_values;
  {
    const auto lines = read_lines(labels_path);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      auto v = parse_int(lines[ln]);
      if (!v || *v < 0) throw ParseError(labels_path.string(), ln + 1, "expected a class index, got '" + lines[ln] + "'");
      label_values.push_back(static_cast<int>(*v));
    }
  }
  if (static_cast<int>(label_values.size()) != n) {
    throw ParseError(labels_path.string(), 0,
                     "has " + std::to_string(label_values.size()) + " labels, expected n = " + std::to_string(n));
  }
  Eigen::VectorXi labels = Eigen::Map<Eigen::VectorXi>(label_values.data(), n);

  std::optional<Eigen::MatrixXd> features;
  const auto features_path = dir / "features.csv";
  if (fs::exists(features_path)) {
    const auto lines = read_lines(features_path);
    std::vector<std::vector<double>> rows;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      std::vector<double> row;
      for (auto field : split(lines[ln], ',')) {
        auto v = parse_double(field);
        if (!v) throw ParseError(features_path.string(), ln + 1, "bad real '" + std::string(field) + "'");
        row.push_back(*v);
      }
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw ParseError(features_path.string(), ln + 1,
                         "has " + std::to_string(row.size()) + " columns, expected " +
                             std::to_string(rows.front().size()));
      }
      rows.push_back(std::move(row));
    }
    if (static_cast<int>(rows.size()) != n) {
      throw ParseError(features_path.string(), 0,
                       "has " + std::to_string(rows.size()) + " rows, expected n = " + std::to_string(n));
    }
    const Eigen::Index d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    features = Eigen::MatrixXd(n, d);
    for (int i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) (*features)(i, k) = rows[i][k];
    }
  }

  Provenance provenance;
  provenance.generator = meta.value("generator", std::string("ingested"));
  provenance.rng_algorithm = meta.value("rng", std::string());
  provenance.source_path = dir.string();
  if (meta.contains("warnings")) provenance.warnings = meta.at("warnings").get<std::vector<std::string>>();
  if (meta.contains("config") && !meta.at("config").is_null()) {
    try {
      provenance.config = meta.at("config").get<SbmConfig>();
    } catch (const json::exception& e) {
      throw ParseError(meta_path.string(), 0, std::string("bad 'config': ") + e.what());
    }
  }

  Graph graph = [&] {
    try {
      return Graph(n, std::move(edges), std::move(features), labels);
    } catch (const ParameterError& e) {
      throw ParseError(dir.string(), 0, e.what());
    }
  }();

  Split split;
  const auto split_path = dir / "split.json";
  if (fs::exists(split_path)) {
    const json j = read_json(split_path);
    split = {index_list(j, "train", split_path), index_list(j, "val", split_path), index_list(j, "test", split_path)};
    for (const auto* set : {&split.train, &split.val, &split.test}) {
      for (int v : *set) {
        if (v < 0 || v >= n) throw ParseError(split_path.string(), 0, "node index " + std::to_string(v) + " out of range");
      }
    }
    std::vector<char> seen(n, 0);
    for (const auto* set : {&split.train, &split.val, &split.test}) {
      for (int v : *set) {
        if (seen[v]++) throw ParseError(split_path.string(), 0, "node " + std::to_string(v) + " listed more than once");
      }
    }
    for (auto* set : {&split.train, &split.val, &split.test}) std::sort(set->begin(), set->end());
  } else {
    split = make_split(labels, SplitFractions{}, meta.value("seed", std::uint64_t{0}));
  }
  return {std::move(graph), std::move(split), std::move(provenance)};
}

}  // namespace gconv
