#include "gconv/check.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "gconv/kernels.hpp"
#include "gconv/models.hpp"
#include "gconv/numerics.hpp"
#include "gconv/random.hpp"
#include "gconv/synth.hpp"

namespace gconv {

Graph random_graph(Rng& rng, int n, double p) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
    }
  }
  return Graph(n, std::move(edges));
}

Eigen::MatrixXd random_symmetric(Rng& rng, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

// Worst-case tracker: the check passes while every observation stays at or
// below the bound.
struct Worst {
  double value = 0.0;
  void observe(double v) { value = std::max(value, std::isnan(v) ? INFINITY : v); }
};

CheckResult upper(std::string name, std::string property, double observed, double bound, std::string detail) {
  return {std::move(name), std::move(property), observed <= bound, observed, bound, std::move(detail)};
}

class Suite {
 public:
  explicit Suite(const CheckOptions& options) : options_(options), rng_(options.seed) {
    for (int t = 0; t < 100; ++t) {
      const int n = 2 + static_cast<int>(rng_.below(99));
      graphs_.push_back(random_graph(rng_, n, rng_.uniform(0.02, 0.5)));
    }
    while (connected_sbm_.size() < 20) {
      SbmConfig cfg;
      cfg.class_sizes = {10 + static_cast<int>(rng_.below(41)), 10 + static_cast<int>(rng_.below(41))};
      const double rho = rng_.uniform(0.3, 0.6);
      const double eps = rng_.uniform(0.0, 0.5 * rho);
      cfg.p_intra = rho + eps / 2.0;
      cfg.q_inter = rho - eps / 2.0;
      cfg.feature_dim = 1;
      cfg.seed = rng_.next_u64();
      Dataset ds = generate(cfg);
      if (connected_components(ds.graph).size() == 1) connected_sbm_.push_back(std::move(ds.graph));
    }
  }

  std::vector<CheckResult> run() {
    std::vector<CheckResult> out;
    for (auto check : {&Suite::fixed_point, &Suite::spectrum_range, &Suite::top_eigenvalue, &Suite::limit_convergence,
                       &Suite::limit_idempotent, &Suite::limit_trace_rank, &Suite::projection,
                       &Suite::chebyshev_tail, &Suite::poisson_range, &Suite::poisson_multiset,
                       &Suite::poisson_commutes, &Suite::eigh_invariants, &Suite::spd_solve,
                       &Suite::power_vs_spectral, &Suite::closed_form, &Suite::gradients, &Suite::collapse,
                       &Suite::sgc_invariance, &Suite::bernoulli_marginals, &Suite::split_stratified}) {
      out.push_back((this->*check)());
    }
    return out;
  }

 private:
  Eigen::MatrixXd l_hat(const Graph& g) const {
    if (options_.fault == CheckFault::kDropSelfLoops) {
      const Eigen::VectorXd inv_sqrt = degrees(g, SelfLoops::kInclude).values.array().rsqrt();
      return inv_sqrt.asDiagonal() * adjacency(g, SelfLoops::kExclude) * inv_sqrt.asDiagonal();
    }
    return laplacian_hat(g);
  }

  CheckResult fixed_point() {
    Worst w;
    for (const auto& g : graphs_) {
      const Eigen::VectorXd u = degrees(g, SelfLoops::kInclude).values.array().sqrt();
      w.observe(max_abs(l_hat(g) * u - u));
    }
    return upper("sqrt-degree eigenvector", "sqrt(d) is a fixed point of L̂", w.value, 1e-10, "max |L̂u - u|, u = sqrt(d), 100 graphs");
  }

  CheckResult spectrum_range() {
    double lowest = INFINITY;
    double highest = -INFINITY;
    for (const auto& g : graphs_) {
      const Eigen::VectorXd ev = eigvalsh(l_hat(g));
      lowest = std::min(lowest, ev(0));
      highest = std::max(highest, ev(ev.size() - 1));
    }
    const bool ok = lowest > -1.0 + 1e-9 && highest <= 1.0 + 1e-9;
    return {"spectrum inside (-1, 1]", "self-loop spectrum bounds", ok, lowest, -1.0 + 1e-9,
            "min eigenvalue over 100 graphs must exceed the bound; max = " + std::to_string(highest)};
  }

  CheckResult top_eigenvalue() {
    Worst w;
    for (const auto& g : graphs_) {
      const Eigen::VectorXd ev = eigvalsh(l_hat(g));
      w.observe(std::abs(ev(ev.size() - 1) - 1.0));
    }
    return upper("largest eigenvalue is 1", "self-loop spectrum bounds", w.value, 1e-9, "max |λ_max - 1|, 100 graphs");
  }

  CheckResult limit_convergence() {
    Worst w;
    for (const auto& g : connected_sbm_) w.observe(max_abs(matrix_power(l_hat(g), 512) - kernel_smoothing_limit(g)));
    return upper("L̂^512 reaches S", "over-smoothing limit", w.value, 1e-8,
                 "max |L̂^512 - S| on 20 connected SBM graphs, rho >= 0.3");
  }

  CheckResult limit_idempotent() {
    Worst w;
    for (const auto& g : graphs_) w.observe(idempotency_defect(kernel_smoothing_limit(g)));
    return upper("S is idempotent", "limit is a projection", w.value, 1e-10, "max |S^2 - S|, 100 graphs");
  }

  CheckResult limit_trace_rank() {
    int mismatches = 0;
    double worst_gap = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int n = 2 + static_cast<int>(rng_.below(59));
      const Graph g = random_graph(rng_, n, rng_.uniform(0.005, 0.15));
      const auto report = detect_self_smoothing(kernel_smoothing_limit(g));
      const auto components = static_cast<Eigen::Index>(connected_components(g).size());
      worst_gap = std::max(worst_gap, std::abs(report.trace - static_cast<double>(report.rank)));
      if (!report.self_smoothing || std::llround(report.trace) != report.rank || report.rank != components) {
        ++mismatches;
      }
    }
    return {"trace = rank = components for S", "self-smoothing collapse", mismatches == 0, static_cast<double>(mismatches), 0.0,
            "graphs (of 50, many disconnected) where round(tr S), rank S and the component count disagree; "
            "max |tr - rank| = " + std::to_string(worst_gap)};
  }

  CheckResult projection() {
    double worst_cos = 1.0;
    Worst w;
    for (const auto& g : connected_sbm_) {
      const Eigen::MatrixXd s = kernel_smoothing_limit(g);
      const Eigen::VectorXd u = degrees(g, SelfLoops::kInclude).values.array().sqrt();
      const Eigen::MatrixXd x = random_matrix(rng_, g.num_nodes(), 3);
      const Eigen::MatrixXd sx = s * x;
      for (Eigen::Index c = 0; c < sx.cols(); ++c) {
        worst_cos = std::min(worst_cos, std::abs(sx.col(c).dot(u)) / (sx.col(c).norm() * u.norm()));
      }
      w.observe(max_abs(sx - s * sx));
    }
    const bool ok = worst_cos >= 1.0 - 1e-10 && w.value <= 1e-10;
    return {"S X parallel to sqrt(d)", "limit projects onto sqrt(d)", ok, 1.0 - worst_cos, 1e-10,
            "1 - min cosine(SX, sqrt d); max |SX - S^2 X| = " + std::to_string(w.value)};
  }

  static constexpr std::array<double, 5> kRadii = {-0.5, -0.3, 0.3, 0.5, 0.9};

  CheckResult chebyshev_tail() {
    constexpr std::array<int, 6> orders = {1, 2, 4, 8, 16, 32};
    double worst_excess = -INFINITY;
    for (std::size_t t = 0; t < 50; ++t) {
      const Eigen::MatrixXd l = l_hat(graphs_[t]);
      for (double r : kRadii) {
        const Eigen::MatrixXd p = kernel_poisson(l, r);
        for (int k : orders) {
          const double tail = 2.0 * std::pow(std::abs(r), k + 1) / (1.0 - std::abs(r));
          const double gap = spectral_norm_sym(Eigen::MatrixXd(cheb_partial(l, r, k) - p));
          worst_excess = std::max(worst_excess, gap - tail * (1.0 + 1e-9));
        }
      }
    }
    return upper("Chebyshev partial sums converge to P", "Chebyshev tail bound", worst_excess, 1e-10,
                 "max of ||cheb_K - P||_2 - 2|r|^(K+1)/(1-|r|), r in {±0.3, ±0.5, 0.9}, K in {1..32}, 50 graphs");
  }

  CheckResult poisson_range() {
    Worst w;
    double closest_to_zero = INFINITY;
    for (std::size_t t = 0; t < 50; ++t) {
      const Eigen::MatrixXd l = l_hat(graphs_[t]);
      for (double r : kRadii) {
        const double a = std::abs(r);
        const Eigen::VectorXd ev = eigvalsh(kernel_poisson(l, r));
        const double lo = (1.0 - a) / (1.0 + a) - 1e-8;
        const double hi = (1.0 + a) / (1.0 - a) + 1e-8;
        for (double e : ev) {
          w.observe(std::max({0.0, lo - e, e - hi}));
          closest_to_zero = std::min(closest_to_zero, std::abs(e));
        }
      }
    }
    const bool ok = w.value == 0.0 && closest_to_zero > 1e-6;
    return {"P spectrum in [(1-|r|)/(1+|r|), (1+|r|)/(1-|r|)]", "Poisson eigenvalue range", ok, w.value, 0.0,
            "max distance outside the range; min |eigenvalue| = " + std::to_string(closest_to_zero)};
  }

  CheckResult poisson_multiset() {
    Worst w;
    for (std::size_t t = 0; t < 50; ++t) {
      const Eigen::MatrixXd l = l_hat(graphs_[t]);
      const Eigen::VectorXd base = eigvalsh(l);
      for (double r : kRadii) {
        std::vector<double> mapped(base.size());
        for (Eigen::Index i = 0; i < base.size(); ++i) mapped[i] = eigenvalue_map_poisson(base(i), r);
        std::sort(mapped.begin(), mapped.end());
        const Eigen::VectorXd ev = eigvalsh(kernel_poisson(l, r));
        for (Eigen::Index i = 0; i < ev.size(); ++i) w.observe(std::abs(ev(i) - mapped[i]));
      }
    }
    return upper("eig(P) = f(eig(L̂))", "Poisson eigenvalue map", w.value, 1e-8,
                 "max sorted-multiset difference, 50 graphs x 5 radii");
  }

  CheckResult poisson_commutes() {
    Worst w;
    for (std::size_t t = 0; t < 50; ++t) {
      const Eigen::MatrixXd l = l_hat(graphs_[t]);
      const Eigen::MatrixXd p = kernel_poisson(l, 0.5);
      w.observe(max_abs(p * l - l * p));
    }
    return upper("P commutes with L̂", "Poisson shares eigenvectors with L̂", w.value, 1e-8, "max |PL̂ - L̂P|, r = 0.5");
  }

  CheckResult eigh_invariants() {
    Worst w;
    for (int t = 0; t < 50; ++t) {
      const Eigen::MatrixXd m = random_symmetric(rng_, 1 + static_cast<int>(rng_.below(64)));
      const auto s = eigh(m);
      const auto n = m.rows();
      w.observe(max_abs(s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(n, n)));
      w.observe(max_abs(s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose() - m) /
                max_abs(m));
    }
    return upper("eigh orthonormality and reconstruction", "symmetric eigendecomposition", w.value, 1e-8,
                 "max of |U^T U - I| and |M - U Λ U^T| / |M|, 50 random symmetric matrices");
  }

  CheckResult spd_solve() {
    Worst w;
    for (int t = 0; t < 50; ++t) {
      const int n = 1 + static_cast<int>(rng_.below(64));
      const Eigen::MatrixXd r = random_matrix(rng_, n, n);
      const Eigen::MatrixXd m = r.transpose() * r + 0.1 * Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd b = random_matrix(rng_, n, 3);
      w.observe(max_abs(m * solve_spd(m, b) - b) / max_abs(b));
    }
    return upper("SPD solve residual", "SPD solve", w.value, 1e-8, "max |MX - B| / |B|, 50 systems");
  }

  CheckResult power_vs_spectral() {
    Worst w;
    for (int t = 0; t < 30; ++t) {
      const Eigen::MatrixXd m = random_symmetric(rng_, 1 + static_cast<int>(rng_.below(64)));
      const auto s = eigh(m);
      for (int k = 0; k <= 16; ++k) {
        const Eigen::MatrixXd spectral = apply_spectral_function(s, [k](double x) { return std::pow(x, k); });
        w.observe(max_abs(matrix_power(m, k) - spectral) / std::max(1.0, max_abs(spectral)));
      }
    }
    return upper("M^k by squaring = U Λ^k U^T", "matrix powers", w.value, 1e-7,
                 "max relative difference, k <= 16, 30 matrices");
  }

  CheckResult closed_form() {
    Worst w;
    auto compare = [&](int n1, int n2, double p, double q) {
      const Eigen::MatrixXd a = expected_adjacency(n1, n2, p, q);
      const Eigen::VectorXd inv_sqrt = a.rowwise().sum().array().rsqrt();
      const Eigen::VectorXd numeric = eigvalsh(Eigen::MatrixXd(inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal()));
      std::vector<double> closed;
      for (const auto& [value, mult] : smallgap_spectrum_closed_form(n1, n2, p, q)) closed.insert(closed.end(), mult, value);
      std::sort(closed.begin(), closed.end());
      if (closed.size() != static_cast<std::size_t>(numeric.size())) {
        w.observe(INFINITY);
        return;
      }
      for (Eigen::Index i = 0; i < numeric.size(); ++i) w.observe(std::abs(numeric(i) - closed[i]));
    };
    for (int t = 0; t < 20; ++t) {
      compare(1 + static_cast<int>(rng_.below(30)), 1 + static_cast<int>(rng_.below(30)), rng_.uniform(0.01, 1.0),
              rng_.uniform(0.01, 1.0));
    }
    compare(10, 10, 1.0, 1.0);
    compare(15, 25, 0.3, 0.3);
    return upper("two-block expected spectrum", "two-block expected spectrum", w.value, 1e-8,
                 "max multiset difference vs numeric eigh, 20 random tuples + p=q=1 + p=q");
  }

  CheckResult gradients() {
    Worst w;
    for (int t = 0; t < 20; ++t) {
      const int n = 2 + static_cast<int>(rng_.below(11));
      const int d = 1 + static_cast<int>(rng_.below(5));
      const int h = 1 + static_cast<int>(rng_.below(4));
      const int c = 2 + static_cast<int>(rng_.below(2));
      const Graph g = random_graph(rng_, n, 0.4);
      const Eigen::MatrixXd f = t % 2 ? kernel_poisson(laplacian_hat(g), 0.5) : laplacian_hat(g);
      const Eigen::MatrixXd x = random_matrix(rng_, n, d);
      Eigen::VectorXi y(n);
      for (int i = 0; i < n; ++i) y(i) = static_cast<int>(rng_.below(c));
      std::vector<int> mask;
      for (int i = 0; i < n; ++i) {
        if (rng_.bernoulli(0.6) || (i == n - 1 && mask.empty())) mask.push_back(i);
      }
      Eigen::MatrixXd w0, w1;
      do {
        w0 = random_matrix(rng_, d, h);
        w1 = random_matrix(rng_, h, c);
      } while ((f * x * w0).cwiseAbs().minCoeff() < 1e-4);

      auto loss = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return masked_cross_entropy(gcn_forward(f, x, a, b).logits, y, mask).loss;
      };
      const auto cache = gcn_forward(f, x, w0, w1);
      const auto grads = backward(cache, f, w1, masked_cross_entropy(cache.logits, y, mask).gradient);

      constexpr double step = 1e-5;
      double diff2 = 0.0, analytic2 = 0.0, numeric2 = 0.0;
      auto probe = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& analytic, bool first) {
        for (Eigen::Index i = 0; i < param.size(); ++i) {
          const double keep = param(i);
          param(i) = keep + step;
          const double up = first ? loss(param, w1) : loss(w0, param);
          param(i) = keep - step;
          const double down = first ? loss(param, w1) : loss(w0, param);
          param(i) = keep;
          const double fd = (up - down) / (2.0 * step);
          diff2 += (fd - analytic(i)) * (fd - analytic(i));
          analytic2 += analytic(i) * analytic(i);
          numeric2 += fd * fd;
        }
      };
      probe(w0, grads.w0, true);
      probe(w1, grads.w1, false);
      const double scale = std::max({std::sqrt(analytic2), std::sqrt(numeric2), 1e-12});
      w.observe(std::sqrt(diff2) / scale);
    }
    return upper("GCN backward vs central differences", "GCN gradients", w.value, 1e-5,
                 "max relative error ||g - g_fd|| / max(||g||, ||g_fd||), 20 instances, step 1e-5");
  }

  CheckResult collapse() {
    int violations = 0;
    for (int t = 0; t < 10; ++t) {
      const Graph g = random_graph(rng_, 8 + static_cast<int>(rng_.below(40)), rng_.uniform(0.02, 0.3));
      const Eigen::MatrixXd s = kernel_smoothing_limit(g);
      const auto rank_s = numeric_rank(s);
      const Eigen::MatrixXd x = random_matrix(rng_, g.num_nodes(), 6);
      const auto fwd = gcn_forward(s, x, random_matrix(rng_, 6, 5), random_matrix(rng_, 5, 3));
      if (numeric_rank_rect(fwd.hidden_propagated) > rank_s || numeric_rank_rect(fwd.logits) > rank_s) ++violations;
    }
    return {"GCN features collapse under S", "self-smoothing collapse", violations == 0, static_cast<double>(violations), 0.0,
            "draws (of 10) where rank(S·ReLU(S X W0)) or rank(logits) exceeds rank(S)"};
  }

  CheckResult sgc_invariance() {
    Worst w;
    for (int t = 0; t < 10; ++t) {
      const Graph g = random_graph(rng_, 4 + static_cast<int>(rng_.below(40)), rng_.uniform(0.05, 0.4));
      const Eigen::MatrixXd s = kernel_smoothing_limit(g);
      const Eigen::MatrixXd x = random_matrix(rng_, g.num_nodes(), 4);
      const Eigen::MatrixXd wt = random_matrix(rng_, 4, 3);
      const Eigen::MatrixXd base = sgc_forward(s, 1, x, wt);
      for (int k : {2, 5}) w.observe(max_abs(sgc_forward(s, k, x, wt) - base));
    }
    return upper("SGC logits independent of k under S", "idempotent kernel", w.value, 1e-10,
                 "max |S^k X W - S X W|, k in {2, 5}");
  }

  CheckResult bernoulli_marginals() {
    constexpr int trials = 2000;
    SbmConfig cfg;
    cfg.class_sizes = {3, 3};
    cfg.p_intra = 0.7;
    cfg.q_inter = 0.2;
    cfg.feature_dim = 1;
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(6, 6);
    for (int t = 0; t < trials; ++t) {
      cfg.seed = rng_.next_u64();
      mean += adjacency(generate(cfg).graph, SelfLoops::kInclude);
    }
    mean /= trials;
    const double worst = max_abs(mean - expected_adjacency(3, 3, cfg.p_intra, cfg.q_inter));
    return upper("SBM edge marginals", "Bernoulli edge model", worst, 0.05,
                 "max |empirical - expected| adjacency over 2000 seeds, p=0.7, q=0.2");
  }

  CheckResult split_stratified() {
    int violations = 0;
    for (int t = 0; t < 20; ++t) {
      const int classes = 2 + static_cast<int>(rng_.below(3));
      const int n = 20 + static_cast<int>(rng_.below(200));
      Eigen::VectorXi y(n);
      for (int i = 0; i < n; ++i) y(i) = i < classes ? i : static_cast<int>(rng_.below(classes));
      const SplitFractions fr{rng_.uniform(0.05, 0.4), rng_.uniform(0.05, 0.3), 0.0};
      const SplitFractions full{fr.train, fr.val, 1.0 - fr.train - fr.val};
      const Split sp = make_split(y, full, rng_.next_u64());
      for (int c = 0; c < classes; ++c) {
        const int size = static_cast<int>((y.array() == c).count());
        auto count = [&](const std::vector<int>& set) {
          return static_cast<int>(std::count_if(set.begin(), set.end(), [&](int i) { return y(i) == c; }));
        };
        if (std::abs(count(sp.train) - full.train * size) > 1.0 + 1e-9 && count(sp.train) != 1) ++violations;
        if (std::abs(count(sp.val) - full.val * size) > 1.0 + 1e-9) ++violations;
        if (std::abs(count(sp.test) - full.test * size) > 1.0 + 1e-9) ++violations;
      }
    }
    return {"stratified split proportions", "split stratification", violations == 0, static_cast<double>(violations),
            0.0, "class/set pairs off by more than one node, 20 random labelings"};
  }

  CheckOptions options_;
  Rng rng_;
  std::vector<Graph> graphs_;
  std::vector<Graph> connected_sbm_;
};

}  // namespace

std::vector<CheckResult> run_check_suite(const CheckOptions& options) { return Suite(options).run(); }

}  // namespace gconv
