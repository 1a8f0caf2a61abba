#include "gconv/kernels.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "gconv/text.hpp"

namespace gconv {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const KernelSpec::Family& family) {
  std::visit(Overloaded{
                 [](const kernel::Power& p) {
                   if (p.k < 1) throw ParameterError("power:k must be >= 1 (got " + std::to_string(p.k) + ")");
                 },
                 [](const kernel::Poisson& p) { require_radius(p.r); },
                 [](const kernel::ChebyshevPartial& c) {
                   require_radius(c.r);
                   if (c.order < 0) throw ParameterError("cheb:K must be >= 0 (got " + std::to_string(c.order) + ")");
                 },
                 [](const auto&) {},
             },
             family);
}

using Params = std::map<std::string, std::string, std::less<>>;

Params parse_params(std::string_view body, std::string_view kernel_text) {
  Params out;
  if (body.empty()) return out;
  for (std::string_view item : split(body, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw ParameterError("kernel '" + std::string(kernel_text) + "': bad parameter token '" +
                           std::string(item) + "' (expected key=value)");
    }
    std::string key(item.substr(0, eq));
    if (out.count(key)) {
      throw ParameterError("kernel '" + std::string(kernel_text) + "': repeated parameter '" + key + "'");
    }
    out.emplace(std::move(key), std::string(item.substr(eq + 1)));
  }
  return out;
}

double take_double(Params& params, std::string_view key, double fallback, std::string_view kernel_text) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  auto value = parse_double(it->second);
  if (!value) {
    throw ParameterError("kernel '" + std::string(kernel_text) + "': bad value token '" + it->second +
                         "' for " + std::string(key));
  }
  params.erase(it);
  return *value;
}

int take_int(Params& params, std::string_view key, std::optional<int> fallback, std::string_view kernel_text) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (!fallback) {
      throw ParameterError("kernel '" + std::string(kernel_text) + "': missing parameter " + std::string(key));
    }
    return *fallback;
  }
  auto value = parse_int(it->second);
  if (!value) {
    throw ParameterError("kernel '" + std::string(kernel_text) + "': bad value token '" + it->second +
                         "' for " + std::string(key));
  }
  params.erase(it);
  return static_cast<int>(*value);
}

void require_consumed(const Params& params, std::string_view kernel_text) {
  if (!params.empty()) {
    throw ParameterError("kernel '" + std::string(kernel_text) + "': unknown parameter token '" +
                         params.begin()->first + "'");
  }
}

}  // namespace

KernelSpec::KernelSpec(Family family) : family_(std::move(family)) { validate(family_); }

KernelSpec KernelSpec::parse(std::string_view text) {
  const std::string_view trimmed = trim(text);
  const auto colon = trimmed.find(':');
  const std::string_view head = trimmed.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : trimmed.substr(colon + 1);
  Params params = parse_params(body, trimmed);

  Family family;
  if (head == "laplacian") {
    family = kernel::Laplacian{};
  } else if (head == "power") {
    family = kernel::Power{take_int(params, "k", std::nullopt, trimmed)};
  } else if (head == "limit") {
    family = kernel::SmoothingLimit{};
  } else if (head == "linear") {
    family = kernel::Linear{};
  } else if (head == "poisson") {
    family = kernel::Poisson{take_double(params, "r", kDefaultPoissonR, trimmed)};
  } else if (head == "cheb") {
    const double r = take_double(params, "r", kDefaultPoissonR, trimmed);
    family = kernel::ChebyshevPartial{r, take_int(params, "K", std::nullopt, trimmed)};
  } else {
    throw ParameterError("unknown kernel token '" + std::string(head) +
                         "' (expected laplacian, power, limit, linear, poisson or cheb)");
  }
  require_consumed(params, trimmed);
  return KernelSpec(std::move(family));
}

std::string KernelSpec::name() const {
  return std::visit(Overloaded{
                        [](const kernel::Laplacian&) { return std::string("laplacian"); },
                        [](const kernel::Power& p) { return "power:k=" + std::to_string(p.k); },
                        [](const kernel::SmoothingLimit&) { return std::string("limit"); },
                        [](const kernel::Linear&) { return std::string("linear"); },
                        [](const kernel::Poisson& p) { return "poisson:r=" + format_double(p.r); },
                        [](const kernel::ChebyshevPartial& c) {
                          return "cheb:r=" + format_double(c.r) + ",K=" + std::to_string(c.order);
                        },
                    },
                    family_);
}

Eigen::MatrixXd kernel_smoothing_limit(const Graph& g) {
  const Eigen::VectorXd d = degrees(g, SelfLoops::kInclude).values;
  const Eigen::VectorXd root = d.array().sqrt();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& component : connected_components(g)) {
    double volume = 0.0;
    for (int v : component) volume += d(v);
    for (int i : component) {
      for (int j : component) s(i, j) = root(i) * root(j) / volume;
    }
  }
  return s;
}

Eigen::MatrixXd build_kernel(const Graph& g, const KernelSpec& spec) {
  return std::visit(Overloaded{
                        [&](const kernel::Laplacian&) -> Eigen::MatrixXd { return laplacian_hat(g); },
                        [&](const kernel::Power& p) -> Eigen::MatrixXd { return kernel_power(laplacian_hat(g), p.k); },
                        [&](const kernel::SmoothingLimit&) -> Eigen::MatrixXd { return kernel_smoothing_limit(g); },
                        [&](const kernel::Linear&) -> Eigen::MatrixXd { return kernel_linear(laplacian_hat(g)); },
                        [&](const kernel::Poisson& p) -> Eigen::MatrixXd { return kernel_poisson(laplacian_hat(g), p.r); },
                        [&](const kernel::ChebyshevPartial& c) -> Eigen::MatrixXd {
                          return cheb_partial(laplacian_hat(g), c.r, c.order);
                        },
                    },
                    spec.family());
}

double kernel_eigenvalue_map(const KernelSpec& spec, double lambda) {
  return std::visit(Overloaded{
                        [&](const kernel::Laplacian&) { return lambda; },
                        [&](const kernel::Power& p) { return std::pow(lambda, p.k); },
                        [&](const kernel::SmoothingLimit&) { return std::abs(lambda - 1.0) <= 1e-9 ? 1.0 : 0.0; },
                        [&](const kernel::Linear&) { return 0.5 * (1.0 + lambda); },
                        [&](const kernel::Poisson& p) { return eigenvalue_map_poisson(lambda, p.r); },
                        [&](const kernel::ChebyshevPartial& c) { return chebyshev_partial_map(lambda, c.r, c.order); },
                    },
                    spec.family());
}

SelfSmoothingReport detect_self_smoothing(const Eigen::MatrixXd& m, double tol) {
  if (tol < 0.0) tol = default_idempotency_tolerance(m.rows());
  SelfSmoothingReport report;
  report.idempotency_defect = idempotency_defect(m);
  report.trace = trace(m);
  report.rank = numeric_rank(m);
  report.subspace_dim = report.rank;
  report.self_smoothing = report.idempotency_defect <= tol;
  return report;
}

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParameterError(std::string(name) + " must be a probability in [0, 1] (got " + std::to_string(v) + ")");
  }
}

void require_blocks(int n1, int n2, double p, double q) {
  if (n1 < 1 || n2 < 1) throw ParameterError("block sizes must be >= 1");
  require_probability(p, "p");
  require_probability(q, "q");
}

}  // namespace

Eigen::MatrixXd expected_adjacency(int n1, int n2, double p, double q) {
  require_blocks(n1, n2, p, q);
  const int n = n1 + n2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, q);
  a.topLeftCorner(n1, n1).setConstant(p);
  a.bottomRightCorner(n2, n2).setConstant(p);
  a.diagonal().setOnes();
  return a;
}

std::vector<EigenvalueMultiplicity> smallgap_spectrum_closed_form(int n1, int n2, double p, double q) {
  require_blocks(n1, n2, p, q);
  const double d1 = 1.0 + (n1 - 1) * p + n2 * q;
  const double d2 = 1.0 + (n2 - 1) * p + n1 * q;
  std::vector<EigenvalueMultiplicity> out;
  if (n1 > 1) out.push_back({(1.0 - p) / d1, n1 - 1});
  if (n2 > 1) out.push_back({(1.0 - p) / d2, n2 - 1});
  out.push_back({1.0 - (n2 / d1 + n1 / d2) * q, 1});
  out.push_back({1.0, 1});
  return out;
}

}  // namespace gconv
