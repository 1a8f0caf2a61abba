// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include "gconv/bench.hpp"
#include "gconv/check.hpp"
#include "gconv/kernels.hpp"
#include "gconv/models.hpp"
#include "gconv/random.hpp"
#include "gconv/synth.hpp"

using namespace gconv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const std::string& id, bool passed, const std::string& what) {
  failures += !passed;
  std::cout << id << ' ' << (passed ? "PASS" : "FAIL") << "  " << what << std::endl;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Eigen::MatrixXd gaussian(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

void invariant_suite() {
  const auto t0 = Clock::now();
  const auto results = run_check_suite({20240601, CheckFault::kNone});
  const double secs = seconds_since(t0);
  std::string failed;
  for (const auto& r : results) {
    if (!r.passed) failed += " [" + r.name + ": " + fmt(r.observed) + " vs " + fmt(r.bound) + "]";
  }
  report("AC1", failed.empty() && secs <= 120.0,
         "invariant suite: " + std::to_string(results.size()) + " checks, " + fmt(secs) + " s (limit 120)" + failed);
}

void closed_form_spectrum() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  auto compare = [&](int n1, int n2, double p, double q, std::vector<double> expected) {
    const Eigen::MatrixXd a = expected_adjacency(n1, n2, p, q);
    const Eigen::VectorXd s = a.rowwise().sum().array().rsqrt();
    const Eigen::VectorXd numeric = eigvalsh(Eigen::MatrixXd(s.asDiagonal() * a * s.asDiagonal()));
    std::vector<double> closed;
    for (const auto& [value, mult] : smallgap_spectrum_closed_form(n1, n2, p, q)) closed.insert(closed.end(), mult, value);
    std::sort(closed.begin(), closed.end());
    if (closed.size() != static_cast<std::size_t>(numeric.size())) {
      worst = INFINITY;
      return;
    }
    for (std::size_t i = 0; i < closed.size(); ++i) {
      worst = std::max(worst, std::abs(closed[i] - numeric(static_cast<Eigen::Index>(i))));
      if (!expected.empty()) worst = std::max(worst, std::abs(closed[i] - expected[i]));
    }
  };

  Rng rng(8128);
  for (int t = 0; t < 18; ++t) {
    compare(1 + static_cast<int>(rng.below(40)), 1 + static_cast<int>(rng.below(40)), rng.uniform(0.01, 1.0),
            rng.uniform(0.01, 1.0), {});
  }
  // Fully connected: {0 ×(N-1), 1}.
  std::vector<double> full(23, 0.0);
  full.push_back(1.0);
  compare(12, 12, 1.0, 1.0, full);
  // p = q = ρ: {(1-ρ)/(1+(N-1)ρ) ×(N-1), 1}.
  const double rho = 0.21;
  const int n = 35;
  std::vector<double> flat(n - 1, (1 - rho) / (1 + (n - 1) * rho));
  flat.push_back(1.0);
  compare(15, 20, rho, rho, flat);

  const double secs = seconds_since(t0);
  report("AC2", worst <= 1e-8 && secs <= 10.0,
         "closed-form two-block spectrum: 20 tuples, max multiset error " + fmt(worst) + " (tol 1e-08), " +
             fmt(secs) + " s");
}

void gradient_check() {
  const auto t0 = Clock::now();
  Rng rng(31337);
  double worst = 0.0;
  int done = 0;
  while (done < 20) {
    const int n = 2 + static_cast<int>(rng.below(11));
    const int d = 1 + static_cast<int>(rng.below(5));
    const int h = 1 + static_cast<int>(rng.below(4));
    const int c = 2 + static_cast<int>(rng.below(2));
    const Eigen::MatrixXd f = laplacian_hat(random_graph(rng, n, 0.4));
    const Eigen::MatrixXd x = gaussian(rng, n, d);
    Eigen::MatrixXd w0 = gaussian(rng, d, h);
    Eigen::MatrixXd w1 = gaussian(rng, h, c);
    if ((f * x * w0).cwiseAbs().minCoeff() < 1e-4) continue;  // ReLU kink
    Eigen::VectorXi y(n);
    for (int i = 0; i < n; ++i) y(i) = static_cast<int>(rng.below(c));
    std::vector<int> mask;
    for (int i = 0; i < n; ++i)
      if (i == 0 || rng.bernoulli(0.5)) mask.push_back(i);
    ++done;

    const auto cache = gcn_forward(f, x, w0, w1);
    const auto g = backward(cache, f, w1, masked_cross_entropy(cache.logits, y, mask).gradient);
    auto loss = [&] { return masked_cross_entropy(gcn_forward(f, x, w0, w1).logits, y, mask).loss; };
    for (auto [param, analytic] : {std::pair{&w0, &g.w0}, std::pair{&w1, &g.w1}}) {
      Eigen::MatrixXd numeric(param->rows(), param->cols());
      for (Eigen::Index i = 0; i < param->size(); ++i) {
        const double keep = (*param)(i);
        (*param)(i) = keep + 1e-5;
        const double up = loss();
        (*param)(i) = keep - 1e-5;
        const double down = loss();
        (*param)(i) = keep;
        numeric(i) = (up - down) / 2e-5;
      }
      const double scale = std::max({analytic->norm(), numeric.norm(), 1e-12});
      worst = std::max(worst, (*analytic - numeric).norm() / scale);
    }
  }
  const double secs = seconds_since(t0);
  report("AC3", worst <= 1e-5 && secs <= 10.0,
         "gradients vs central differences: 20 instances, max relative error " + fmt(worst) + " (tol 1e-05), " +
             fmt(secs) + " s");
}

struct GridResult {
  std::string csv;
  std::map<std::string, double> mean;  // "dataset|model|kernel"
  double seconds = 0.0;
  int errors = 0;
};

GridResult run_default_grid(int jobs) {
  BenchConfig cfg = default_bench_config();
  cfg.jobs = jobs;
  const auto t0 = Clock::now();
  const auto rows = run_bench(cfg);
  GridResult out;
  out.seconds = seconds_since(t0);
  out.csv = bench_csv(rows);
  for (const auto& r : rows) out.errors += !r.error.empty();
  for (const auto& c : summarize(rows)) out.mean[c.dataset + "|" + c.model + "|" + c.kernel] = c.mean;
  return out;
}

void directional(const GridResult& grid) {
  bool ok = grid.errors == 0 && grid.seconds <= 300.0;
  std::string detail;
  for (const char* model : {"gcn", "sgc"}) {
    auto m = [&](const char* kernel) { return grid.mean.at(std::string("SmallGap|") + model + "|" + kernel); };
    const double p = m("poisson:r=0.5"), li = m("linear"), s = m("limit"), l = m("laplacian");
    ok = ok && p >= 0.95 && li >= 0.95 && s <= 0.60 && p >= l;
    detail += std::string(" ") + model + ": P " + fmt(p) + " Li " + fmt(li) + " S " + fmt(s) + " L " + fmt(l) + ";";
  }
  report("AC4", ok,
         "SmallGap ordering over 5 seeds (P >= 0.95, Li >= 0.95, S <= 0.60, P >= L):" + detail + " grid " +
             fmt(grid.seconds) + " s");
}

void small_ratio(const GridResult& grid) {
  const double p = grid.mean.at("SmallRatio|gcn|poisson:r=0.5");
  const double s = grid.mean.at("SmallRatio|gcn|limit");
  report("AC5", p > 0.80 && p > s,
         "SmallRatio GCN over 5 seeds: P " + fmt(p) + " > majority 0.80 and > S " + fmt(s));
}

void collapse() {
  const auto t0 = Clock::now();
  Rng rng(2020);
  const Dataset ds = generate(preset_smallgap());
  const Eigen::MatrixXd s = kernel_smoothing_limit(ds.graph);
  const Eigen::Index rank_s = numeric_rank(s);
  const auto components = static_cast<Eigen::Index>(connected_components(ds.graph).size());
  const Eigen::MatrixXd& x = *ds.graph.features();
  const Eigen::MatrixXd propagated = s * x;
  Eigen::Index worst = 0;
  for (int t = 0; t < 10; ++t) {
    const auto fwd = gcn_forward_propagated(s, propagated, glorot_uniform(static_cast<int>(x.cols()), 16, rng),
                                            glorot_uniform(16, 2, rng));
    worst = std::max(worst, numeric_rank_rect(fwd.logits));
  }
  const double secs = seconds_since(t0);
  report("AC6", worst <= rank_s && rank_s == components && secs <= 5.0,
         "collapse under S: max logits rank " + std::to_string(worst) + " <= rank(S) " + std::to_string(rank_s) +
             " = components " + std::to_string(components) + ", 10 draws, " + fmt(secs) + " s");
}

void optional_cora() {
  const char* dir = std::getenv("GCONV_CORA_DIR");
  if (!dir || !*dir) {
    std::cout << "AC8 SKIP  set GCONV_CORA_DIR to a dataset directory to run the GCN + L̂ check" << std::endl;
    return;
  }
  const Dataset ds = ingest(dir);
  const TrainReport r = train(ds, KernelSpec::parse("laplacian"), ModelConfig{});
  // Informational only; never counted as a failure.
  std::cout << "AC8 " << (r.accuracy.test >= 0.78 && r.accuracy.test <= 0.83 ? "PASS" : "FAIL")
            << "  (not gating) GCN + L̂ test accuracy " << fmt(r.accuracy.test) << " in [0.78, 0.83]" << std::endl;
}

}  // namespace

int main() {
  try {
    invariant_suite();
    closed_form_spectrum();
    gradient_check();
    const GridResult first = run_default_grid(1);
    directional(first);
    small_ratio(first);
    collapse();
    const int jobs = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));
    const GridResult second = run_default_grid(jobs);
    report("AC7", first.csv == second.csv,
           "default grid twice (jobs 1 and " + std::to_string(jobs) + "): raw CSVs " +
               (first.csv == second.csv ? "byte-identical" : "differ") + ", " + std::to_string(first.csv.size()) +
               " bytes");
    optional_cora();
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures ? "acceptance: FAILED" : "acceptance: all gating criteria passed") << std::endl;
  return failures ? 1 : 0;
}
