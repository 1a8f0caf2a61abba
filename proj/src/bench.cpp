#include "gconv/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "gconv/error.hpp"
#include "gconv/random.hpp"
#include "gconv/serialization.hpp"
#include "gconv/text.hpp"

namespace gconv {

using nlohmann::json;

void BenchConfig::validate() const {
  if (datasets.empty()) throw ParameterError("bench config: no datasets");
  if (kernels.empty()) throw ParameterError("bench config: no kernels");
  if (models.empty()) throw ParameterError("bench config: no models");
  if (seeds.empty()) throw ParameterError("bench config: no seeds");
  if (jobs < 1) throw ParameterError("bench config: jobs must be >= 1");
  for (const auto& d : datasets) {
    if (d.name.empty()) throw ParameterError("bench config: dataset without a name");
    if (d.preset.empty() == d.path.empty()) {
      throw ParameterError("bench config: dataset '" + d.name + "' needs exactly one of preset or path");
    }
    if (!d.preset.empty()) preset_by_name(d.preset);
  }
  for (const auto& m : models) m.config.validate();
}

BenchConfig default_bench_config() {
  BenchConfig cfg;
  cfg.datasets = {{"SmallGap", "smallgap", ""}, {"SmallRatio", "smallratio", ""}};
  cfg.kernels = {KernelSpec(kernel::Laplacian{}), KernelSpec(kernel::Power{2}), KernelSpec(kernel::SmoothingLimit{}),
                 KernelSpec(kernel::Linear{}), KernelSpec(kernel::Poisson{kDefaultPoissonR})};
  cfg.models = {{"gcn", ModelConfig::defaults(Arch::kGcn)}, {"sgc", ModelConfig::defaults(Arch::kSgc)}};
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.output = "bench.csv";
  return cfg;
}

BenchConfig bench_config_from_json(const json& j) {
  BenchConfig cfg;
  try {
    for (const auto& d : j.at("datasets")) {
      BenchDataset entry;
      entry.preset = d.value("preset", std::string());
      entry.path = d.value("path", std::string());
      entry.name = d.value("name", entry.preset.empty() ? entry.path : entry.preset);
      cfg.datasets.push_back(std::move(entry));
    }
    for (const auto& k : j.at("kernels")) cfg.kernels.push_back(KernelSpec::parse(k.get<std::string>()));
    for (const auto& m : j.at("models")) {
      BenchModel entry;
      if (m.is_string()) {
        entry.config = ModelConfig::defaults(parse_arch(m.get<std::string>()));
      } else {
        entry.config = ModelConfig::defaults(parse_arch(m.at("arch").get<std::string>()));
        from_json(m, entry.config);
      }
      entry.name = m.is_object() ? m.value("name", to_string(entry.config.arch)) : to_string(entry.config.arch);
      cfg.models.push_back(std::move(entry));
    }
    j.at("seeds").get_to(cfg.seeds);
    cfg.output = j.value("output", std::string("bench.csv"));
    cfg.timing = j.value("timing", false);
    cfg.jobs = j.value("jobs", 1);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bench config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open bench config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return bench_config_from_json(j);
}

namespace {

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  config.validate();
  const std::size_t nd = config.datasets.size();
  const std::size_t nm = config.models.size();
  const std::size_t nk = config.kernels.size();
  const std::size_t ns = config.seeds.size();

  std::vector<BenchRow> rows(nd * nm * nk * ns);
  auto cell_index = [&](std::size_t d, std::size_t m, std::size_t k, std::size_t s) {
    return ((d * nm + m) * nk + k) * ns + s;
  };
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t m = 0; m < nm; ++m)
      for (std::size_t k = 0; k < nk; ++k)
        for (std::size_t s = 0; s < ns; ++s) {
          BenchRow& row = rows[cell_index(d, m, k, s)];
          row.dataset = config.datasets[d].name;
          row.model = config.models[m].name;
          row.kernel = config.kernels[k].name();
          row.seed = config.seeds[s];
        }

  // Datasets per (dataset, seed); a directory is ingested once and shared.
  std::vector<std::optional<Dataset>> data(nd * ns);
  std::vector<std::string> data_error(nd * ns);
  for (std::size_t d = 0; d < nd; ++d) {
    const BenchDataset& spec = config.datasets[d];
    std::optional<Dataset> ingested;
    std::string ingest_error;
    if (!spec.path.empty()) {
      try {
        ingested = ingest(spec.path);
      } catch (const std::exception& e) {
        ingest_error = e.what();
      }
    }
    for (std::size_t s = 0; s < ns; ++s) {
      const std::size_t slot = d * ns + s;
      if (!spec.path.empty()) {
        data[slot] = ingested;
        data_error[slot] = ingest_error;
        continue;
      }
      try {
        SbmConfig cfg = preset_by_name(spec.preset);
        cfg.seed = config.seeds[s];
        data[slot] = generate(cfg);
      } catch (const std::exception& e) {
        data_error[slot] = e.what();
      }
    }
  }

  // One task per (dataset, seed, kernel): materialize the kernel once and
  // train every model on it.
  parallel_for(nd * ns * nk, config.jobs, [&](std::size_t task) {
    const std::size_t k = task % nk;
    const std::size_t slot = task / nk;
    const std::size_t d = slot / ns;
    const std::size_t s = slot % ns;
    auto fail_all = [&](const std::string& message) {
      for (std::size_t m = 0; m < nm; ++m) rows[cell_index(d, m, k, s)].error = message;
    };
    if (!data[slot]) {
      fail_all(data_error[slot]);
      return;
    }
    Eigen::MatrixXd kernel;
    try {
      kernel = build_kernel(data[slot]->graph, config.kernels[k]);
    } catch (const std::exception& e) {
      fail_all(e.what());
      return;
    }
    for (std::size_t m = 0; m < nm; ++m) {
      const std::size_t index = cell_index(d, m, k, s);
      BenchRow& row = rows[index];
      ModelConfig model = config.models[m].config;
      model.init_seed = derive_seed(config.seeds[s], index);
      try {
        const auto start = std::chrono::steady_clock::now();
        const TrainReport report = train_with_kernel(*data[slot], config.kernels[k], kernel, model);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        row.test_accuracy = report.accuracy.test;
        row.val_accuracy = report.accuracy.val;
        row.best_epoch = report.best_epoch;
        row.wall_time_s = config.timing ? elapsed.count() : 0.0;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  });
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

namespace {

constexpr const char* kRawHeader =
    "dataset,model,kernel,seed,test_accuracy,val_accuracy,best_epoch,wall_time_s,error";

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << kRawHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.dataset) << ',' << csv_field(r.model) << ',' << csv_field(r.kernel) << ',' << r.seed << ','
        << format_double(r.test_accuracy) << ',' << format_double(r.val_accuracy) << ',' << r.best_epoch << ','
        << format_double(r.wall_time_s) << ',' << csv_field(single_line(r.error)) << '\n';
  }
  return out.str();
}

std::vector<BenchRow> parse_bench_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t ln = 0;
  if (!std::getline(in, line) || trim(line) != kRawHeader) throw ParseError("bench csv", 1, "unexpected header");
  ++ln;
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    ++ln;
    if (trim(line).empty()) continue;
    const auto f = parse_csv_line(line);
    if (f.size() != 9) throw ParseError("bench csv", ln, "expected 9 fields, got " + std::to_string(f.size()));
    BenchRow r;
    r.dataset = f[0];
    r.model = f[1];
    r.kernel = f[2];
    auto seed = parse_int(f[3]);
    auto test = parse_double(f[4]);
    auto val = parse_double(f[5]);
    auto best = parse_int(f[6]);
    auto wall = parse_double(f[7]);
    if (!seed || !test || !val || !best || !wall) throw ParseError("bench csv", ln, "malformed numeric field");
    r.seed = static_cast<std::uint64_t>(*seed);
    r.test_accuracy = *test;
    r.val_accuracy = *val;
    r.best_epoch = static_cast<int>(*best);
    r.wall_time_s = *wall;
    r.error = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryCell> summarize(const std::vector<BenchRow>& rows) {
  // Preserve first-appearance order of (dataset, model, kernel).
  std::vector<SummaryCell> cells;
  std::vector<std::vector<double>> values;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> slot;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.dataset, r.model, r.kernel);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, cells.size()).first;
      cells.push_back({r.dataset, r.model, r.kernel});
      values.emplace_back();
    }
    if (r.error.empty()) values[it->second].push_back(r.test_accuracy);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& v = values[i];
    cells[i].count = static_cast<int>(v.size());
    if (v.empty()) continue;
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    cells[i].mean = mean;
    cells[i].stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return cells;
}

std::string summary_csv(const std::vector<BenchRow>& rows) {
  const auto cells = summarize(rows);
  std::vector<std::string> datasets;
  std::vector<std::pair<std::string, std::string>> columns;
  for (const auto& c : cells) {
    if (std::find(datasets.begin(), datasets.end(), c.dataset) == datasets.end()) datasets.push_back(c.dataset);
    const auto col = std::make_pair(c.model, c.kernel);
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
  }
  std::ostringstream out;
  out << "dataset";
  for (const auto& [model, kernel] : columns) {
    out << ',' << csv_field(model + " " + kernel + " mean") << ',' << csv_field(model + " " + kernel + " std");
  }
  out << '\n';
  for (const auto& ds : datasets) {
    out << csv_field(ds);
    for (const auto& [model, kernel] : columns) {
      auto it = std::find_if(cells.begin(), cells.end(), [&](const SummaryCell& c) {
        return c.dataset == ds && c.model == model && c.kernel == kernel;
      });
      if (it == cells.end() || it->count == 0) {
        out << ",,";
      } else {
        out << ',' << format_double(it->mean) << ',' << format_double(it->stddev);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gconv
