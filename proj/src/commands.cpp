#include "gconv/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "gconv/bench.hpp"
#include "gconv/error.hpp"
#include "gconv/serialization.hpp"
#include "gconv/synth.hpp"
#include "gconv/text.hpp"

namespace gconv {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw Error("write failed: " + path.string());
}

SbmConfig resolve_config(const GenerateOptions& o) {
  SbmConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw Error("cannot open " + o.config_path);
    try {
      cfg = nlohmann::json::parse(in).get<SbmConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(o.config_path + ": " + e.what());
    }
  } else {
    cfg = preset_by_name(o.preset.empty() ? "smallgap" : o.preset);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.class_sizes) cfg.class_sizes = *o.class_sizes;
  if (o.p_intra) cfg.p_intra = *o.p_intra;
  if (o.q_inter) cfg.q_inter = *o.q_inter;
  if (o.feature_dim) cfg.feature_dim = *o.feature_dim;
  if (o.feature_mean_scale) cfg.feature_mean_scale = *o.feature_mean_scale;
  if (o.feature_std) cfg.feature_std = *o.feature_std;
  cfg.validate();
  return cfg;
}

}  // namespace

int cmd_generate(const GenerateOptions& options, std::ostream& log) {
  if (options.out.empty()) throw ParameterError("generate: --out is required");
  const SbmConfig cfg = resolve_config(options);
  const Dataset ds = generate(cfg);
  export_dataset(ds, options.out);

  const DensityStats stats = density_stats(cfg);
  log << "wrote " << options.out << " (n=" << ds.graph.num_nodes() << ", edges=" << ds.graph.edges().size()
      << ")\n"
      << "rho=" << format_double(stats.density) << " epsilon=" << format_double(stats.density_gap)
      << " label_ratio=" << format_double(stats.label_ratio)
      << " components=" << connected_components(ds.graph).size() << '\n';
  for (const auto& w : ds.provenance.warnings) log << "warning: " << w << '\n';
  return kExitOk;
}

int cmd_spectrum(const SpectrumOptions& options, std::ostream& log) {
  const Dataset ds = ingest(options.dataset);
  const Eigen::VectorXd lambda = eigvalsh(laplacian_hat(ds.graph));

  std::ostringstream csv;
  csv << "block,index,lambda,mapped\n";
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    csv << "spectrum," << i << ',' << format_double(lambda(i)) << ','
        << format_double(kernel_eigenvalue_map(options.kernel, lambda(i))) << '\n';
  }
  constexpr int kCurvePoints = 201;
  for (int i = 0; i < kCurvePoints; ++i) {
    const double x = -1.0 + 2.0 * i / (kCurvePoints - 1);
    csv << "curve," << i << ',' << format_double(x) << ','
        << format_double(kernel_eigenvalue_map(options.kernel, x)) << '\n';
  }

  if (options.out.empty()) {
    log << csv.str();
  } else {
    write_text(options.out, csv.str());
    log << "wrote " << lambda.size() << " eigenvalues of " << options.kernel.name() << " to " << options.out
        << '\n';
  }
  return kExitOk;
}

int cmd_train(const TrainOptions& options, std::ostream& log) {
  const Dataset ds = ingest(options.dataset);
  const TrainReport report = train(ds, options.kernel, options.model);
  if (!options.report.empty()) write_text(options.report, nlohmann::json(report).dump(2) + "\n");
  log << "kernel=" << report.kernel << " model=" << to_string(report.model.arch)
      << " best_epoch=" << report.best_epoch << " val_accuracy=" << format_double(report.accuracy.val)
      << " test_accuracy=" << format_double(report.accuracy.test) << '\n';
  return kExitOk;
}

int cmd_bench(const BenchOptions& options, std::ostream& log) {
  BenchConfig cfg = options.config.empty() ? default_bench_config() : load_bench_config(options.config);
  if (!options.out.empty()) cfg.output = options.out;
  if (options.jobs) cfg.jobs = *options.jobs;
  if (options.timing) cfg.timing = true;
  if (cfg.output.empty()) throw ParameterError("bench: no output path (--out or \"output\" in the config)");
  cfg.validate();

  const std::vector<BenchRow> rows = run_bench(cfg);
  const fs::path raw = cfg.output;
  fs::path summary = options.summary;
  if (summary.empty()) summary = raw.parent_path() / (raw.stem().string() + "_summary.csv");
  write_text(raw, bench_csv(rows));
  write_text(summary, summary_csv(rows));

  std::size_t failed = 0;
  for (const auto& r : rows) failed += !r.error.empty();
  log << "wrote " << rows.size() << " rows to " << raw.string() << " and the summary to " << summary.string()
      << '\n';
  if (failed) log << failed << " cell(s) failed; see the error column\n";
  return kExitOk;
}

int cmd_check(const CheckOptions& options, std::ostream& log) {
  log << "check suite seed: " << options.seed << '\n';
  if (options.fault != CheckFault::kNone) log << "injected fault: drop self-loops in L̂\n";
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_check_suite(options);
  int failures = 0;
  for (const auto& r : results) {
    failures += !r.passed;
    log << (r.passed ? "PASS " : "FAIL ") << r.name << " [" << r.property << "]: observed "
        << std::setprecision(3) << std::scientific << r.observed << " bound " << r.bound << std::defaultfloat
        << " -- " << r.detail << '\n';
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << results.size() - failures << '/' << results.size() << " checks passed in " << std::fixed
      << std::setprecision(1) << secs << std::defaultfloat << " s\n";
  return failures ? kExitCheckFailed : kExitOk;
}

}  // namespace gconv
