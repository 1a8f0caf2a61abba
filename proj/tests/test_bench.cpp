#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "gconv/bench.hpp"
#include "gconv/commands.hpp"
#include "gconv/error.hpp"
#include "gconv/synth.hpp"
#include "gconv/text.hpp"

using namespace gconv;
namespace fs = std::filesystem;

namespace {

BenchConfig small_grid() {
  return bench_config_from_json(nlohmann::json::parse(R"({
    "datasets": [{"name": "gap", "preset": "smallgap"}, {"name": "ratio", "preset": "smallratio"}],
    "kernels": ["laplacian", "poisson:r=0.5", "limit"],
    "models": [{"arch": "gcn", "epochs": 5}, {"arch": "sgc", "epochs": 4, "name": "sgc-k2"}],
    "seeds": [3, 11],
    "output": "unused.csv"
  })"));
}

}  // namespace

TEST_CASE("default grid shape") {
  const BenchConfig cfg = default_bench_config();
  CHECK(cfg.datasets.size() * cfg.kernels.size() * cfg.models.size() * cfg.seeds.size() == 100);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("bench config validation") {
  auto parse = [](const char* text) { return bench_config_from_json(nlohmann::json::parse(text)); };
  CHECK_THROWS_AS(parse(R"({"datasets": [], "kernels": ["limit"], "models": ["gcn"], "seeds": [0]})"), ParameterError);
  CHECK_THROWS_AS(parse(R"({"datasets": [{"preset": "smallgap"}], "kernels": ["heat"], "models": ["gcn"], "seeds": [0]})"),
                  ParameterError);
  CHECK_THROWS_AS(parse(R"({"datasets": [{"preset": "nope"}], "kernels": ["limit"], "models": ["gcn"], "seeds": [0]})"),
                  ParameterError);
  CHECK_THROWS_AS(parse(R"({"datasets": [{"preset": "smallgap"}], "kernels": ["limit"], "models": ["gcn"], "seeds": []})"),
                  ParameterError);
  CHECK_THROWS_AS(parse(R"({"datasets": [{"preset": "smallgap"}], "kernels": ["limit"], "models": ["gcn"]})"),
                  ParameterError);
  const BenchConfig ok = small_grid();
  CHECK(ok.models[0].name == "gcn");
  CHECK(ok.models[0].config.epochs == 5);
  CHECK(ok.models[0].config.learning_rate == 0.01);
  CHECK(ok.models[1].name == "sgc-k2");
  CHECK(ok.models[1].config.learning_rate == 0.2);
}

TEST_CASE("run_bench: full grid in order, independent of jobs, CSV round-trips") {
  BenchConfig cfg = small_grid();
  const auto rows = run_bench(cfg);
  REQUIRE(rows.size() == 2 * 3 * 2 * 2);
  CHECK(rows[0].dataset == "gap");
  CHECK(rows[0].model == "gcn");
  CHECK(rows[0].kernel == "laplacian");
  CHECK(rows[0].seed == 3);
  CHECK(rows[1].seed == 11);
  CHECK(rows.back().dataset == "ratio");
  CHECK(rows.back().model == "sgc-k2");
  CHECK(rows.back().kernel == "limit");
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.wall_time_s == 0.0);
  }

  cfg.jobs = 3;
  const std::string serial = bench_csv(rows);
  CHECK(bench_csv(run_bench(cfg)) == serial);

  const auto parsed = parse_bench_csv(serial);
  CHECK(parsed.size() == rows.size());
  CHECK(bench_csv(parsed) == serial);
}

TEST_CASE("summary means recomputed from the raw CSV agree") {
  const auto rows = parse_bench_csv(bench_csv(run_bench(small_grid())));
  std::istringstream summary(summary_csv(rows));
  std::string header, line;
  std::getline(summary, header);
  const auto columns = parse_csv_line(header);
  CHECK(columns.size() == 1 + 2 * 3 * 2);
  int checked = 0;
  while (std::getline(summary, line)) {
    const auto f = parse_csv_line(line);
    for (std::size_t c = 1; c < f.size(); c += 2) {
      const std::string label = columns[c].substr(0, columns[c].size() - std::string(" mean").size());
      double sum = 0.0;
      int count = 0;
      for (const auto& r : rows) {
        if (r.dataset == f[0] && r.model + " " + r.kernel == label) {
          sum += r.test_accuracy;
          ++count;
        }
      }
      REQUIRE(count == 2);
      CHECK(std::abs(*parse_double(f[c]) - sum / count) <= 1e-12);
      ++checked;
    }
  }
  CHECK(checked == 12);
}

TEST_CASE("summarize: constant column and sample std") {
  std::vector<BenchRow> rows;
  for (std::uint64_t s = 0; s < 4; ++s) rows.push_back({"d", "m", "k", s, 0.75, 0.5, 1, 0.0, ""});
  for (std::uint64_t s = 0; s < 3; ++s) rows.push_back({"d", "m", "k2", s, double(s), 0.0, 0, 0.0, ""});
  rows.push_back({"d", "m", "k2", 9, 0.0, 0.0, 0, 0.0, "boom"});
  const auto cells = summarize(rows);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].mean == 0.75);
  CHECK(cells[0].stddev == 0.0);
  CHECK(cells[1].count == 3);
  CHECK(cells[1].mean == doctest::Approx(1.0));
  CHECK(cells[1].stddev == doctest::Approx(1.0));
}

TEST_CASE("failing cells keep their rows") {
  BenchConfig cfg = small_grid();
  cfg.datasets.push_back({"missing", "", (fs::temp_directory_path() / "gconv_no_such_dataset").string()});
  const auto rows = run_bench(cfg);
  CHECK(rows.size() == 3 * 3 * 2 * 2);
  int failed = 0;
  for (const auto& r : rows) {
    if (r.dataset == "missing") {
      CHECK_FALSE(r.error.empty());
      ++failed;
    } else {
      CHECK(r.error.empty());
    }
  }
  CHECK(failed == 12);
  const std::string summary = summary_csv(rows);
  CHECK(summary.find("missing,,,") != std::string::npos);
  CHECK(parse_bench_csv(bench_csv(rows)).size() == rows.size());
}

TEST_CASE("path datasets are ingested and seeds vary only the initialization") {
  const fs::path dir = fs::temp_directory_path() / "gconv_test_bench_ds";
  fs::remove_all(dir);
  export_dataset(generate(preset_smallratio()), dir);
  BenchConfig cfg = small_grid();
  cfg.datasets = {{"file", "", dir.string()}};
  cfg.kernels = {KernelSpec::parse("linear")};
  cfg.models.resize(1);
  const auto rows = run_bench(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].error.empty());
  CHECK(rows[1].error.empty());
  fs::remove_all(dir);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(parse_csv_line("\"a,b\",c,\"d\"\"e\"") == std::vector<std::string>{"a,b", "c", "d\"e"});
  CHECK(parse_csv_line("x,,y") == std::vector<std::string>{"x", "", "y"});
}

TEST_CASE("cmd_generate and cmd_spectrum") {
  const fs::path dir = fs::temp_directory_path() / "gconv_test_cmd";
  fs::remove_all(dir);
  GenerateOptions gen;
  gen.preset = "smallgap";
  gen.seed = 7;
  gen.out = (dir / "ds").string();
  std::ostringstream log;
  CHECK(cmd_generate(gen, log) == kExitOk);
  CHECK(log.str().find("components=") != std::string::npos);
  CHECK(ingest(dir / "ds").graph.num_nodes() == 400);
  CHECK(ingest(dir / "ds").provenance.config->seed == 7);

  SpectrumOptions sp;
  sp.dataset = gen.out;
  sp.kernel = KernelSpec::parse("poisson:r=0.5");
  std::ostringstream csv;
  CHECK(cmd_spectrum(sp, csv) == kExitOk);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "block,index,lambda,mapped");
  double last = -2.0, max_lambda = -2.0;
  int spectrum_rows = 0, curve_rows = 0;
  while (std::getline(in, line)) {
    const auto f = parse_csv_line(line);
    const double lambda = *parse_double(f[2]);
    const double mapped = *parse_double(f[3]);
    if (f[0] == "spectrum") {
      ++spectrum_rows;
      CHECK(lambda >= last);
      last = lambda;
      max_lambda = std::max(max_lambda, lambda);
    } else {
      ++curve_rows;
    }
    CHECK(mapped >= 1.0 / 3.0 - 1e-12);
    CHECK(mapped <= 3.0 + 1e-12);
  }
  CHECK(spectrum_rows == 400);
  CHECK(curve_rows == 201);
  CHECK(std::abs(max_lambda - 1.0) <= 1e-9);

  gen.out = "/proc/gconv_cannot_write_here";
  CHECK_THROWS(cmd_generate(gen, log));
  fs::remove_all(dir);
}
