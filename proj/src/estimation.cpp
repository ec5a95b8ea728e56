#include "pacekit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include "pacekit/errors.hpp"

namespace pacekit {
namespace {

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  return out;
}

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    require(std::isfinite(x), ErrorCode::invalid_argument, std::string(what) + " must be finite");
  }
}

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  require(!sorted_.empty(), ErrorCode::empty_sample, "empirical cdf needs at least one sample");
  require_finite(sorted_, "samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto below = std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(below) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::sup_distance(const std::function<double(double)>& cdf) const {
  const double n = static_cast<double>(sorted_.size());
  double worst = 0.0;
  std::size_t i = 0;
  while (i < sorted_.size()) {
    std::size_t j = i;
    while (j < sorted_.size() && sorted_[j] == sorted_[i]) ++j;
    // Just left of the atom the estimate is i/n, just right of it j/n.
    const double f = cdf(sorted_[i]);
    worst = std::max({worst, std::abs(static_cast<double>(i) / n - f),
                      std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return worst;
}

EmpiricalCdf fit_ecdf(std::vector<double> samples) { return EmpiricalCdf(std::move(samples)); }

double dkw_bound(std::size_t n, double delta) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be positive");
  require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

std::string_view kernel_name(Kernel kernel) noexcept {
  switch (kernel) {
    case Kernel::gaussian: return "gaussian";
    case Kernel::exponential: return "exponential";
    case Kernel::uniform: return "uniform";
  }
  return "unknown";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "gaussian") return Kernel::gaussian;
  if (name == "exponential") return Kernel::exponential;
  if (name == "uniform") return Kernel::uniform;
  fail(ErrorCode::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

double kernel_value(Kernel kernel, double u) noexcept {
  switch (kernel) {
    case Kernel::gaussian:
      return std::exp(-0.5 * u * u) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
    case Kernel::exponential:
      return 0.5 * std::exp(-std::abs(u));
    case Kernel::uniform:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
  }
  return 0.0;
}

double kernel_support(Kernel kernel) noexcept {
  switch (kernel) {
    case Kernel::gaussian: return 9.0;
    case Kernel::exponential: return 40.0;
    case Kernel::uniform: return 1.0;
  }
  return 1.0;
}

KdeEstimate::KdeEstimate(std::vector<double> samples, Kernel kernel, double bandwidth)
    : sorted_(std::move(samples)), kernel_(kernel), bandwidth_(bandwidth) {
  require(!sorted_.empty(), ErrorCode::empty_sample, "KDE needs at least one sample");
  require(bandwidth > 0.0 && std::isfinite(bandwidth), ErrorCode::nonpositive_bandwidth,
          "KDE bandwidth must be positive");
  require_finite(sorted_, "samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double KdeEstimate::operator()(double x) const {
  const double reach = kernel_support(kernel_) * bandwidth_;
  const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), x - reach);
  const auto last = std::upper_bound(first, sorted_.end(), x + reach);
  double total = 0.0;
  for (auto it = first; it != last; ++it) total += kernel_value(kernel_, (x - *it) / bandwidth_);
  return total / (static_cast<double>(sorted_.size()) * bandwidth_);
}

KdeEstimate fit_kde(std::vector<double> samples, Kernel kernel, double bandwidth) {
  return KdeEstimate(std::move(samples), kernel, bandwidth);
}

double default_bandwidth(std::span<const double> samples, BandwidthRule rule) {
  require(samples.size() >= 2, ErrorCode::invalid_argument,
          "bandwidth rule needs at least two samples");
  const double n = static_cast<double>(samples.size());
  const double rate = std::pow(n, -1.0 / 3.0);
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  require(sd > 0.0, ErrorCode::degenerate_sample,
          "sample standard deviation is zero; use the fixed-price estimator");
  return rule == BandwidthRule::unit ? rate : sd * rate;
}

std::string_view provenance_name(SpendFunctionEstimate::Provenance p) noexcept {
  return p == SpendFunctionEstimate::Provenance::fixed_price ? "fp" : "sp";
}

double SpendFunctionEstimate::operator()(double mu) const {
  require(mu >= 0.0, ErrorCode::invalid_argument, "mu must be >= 0");
  if (ecdf_) {
    const double p = *price_;
    return p * (1.0 - (*ecdf_)((1.0 + mu) * p));
  }
  if (mu >= mu_grid_.back()) return values_.back();
  const auto hi = std::upper_bound(mu_grid_.begin(), mu_grid_.end(), mu);
  const std::size_t j = static_cast<std::size_t>(hi - mu_grid_.begin());
  const double w = (mu - mu_grid_[j - 1]) / (mu_grid_[j] - mu_grid_[j - 1]);
  return values_[j - 1] + w * (values_[j] - values_[j - 1]);
}

SpendFunctionEstimate approx_spend_fp(std::span<const double> values, double price) {
  require(!values.empty(), ErrorCode::empty_sample, "fixed-price estimate needs value samples");
  require(price > 0.0 && std::isfinite(price), ErrorCode::invalid_argument,
          "fixed price must be positive");
  SpendFunctionEstimate est;
  est.provenance_ = SpendFunctionEstimate::Provenance::fixed_price;
  est.ecdf_.emplace(std::vector<double>(values.begin(), values.end()));
  est.price_ = price;

  // The estimate is a step function whose jumps sit at mu_i = V_i / p - 1.
  est.mu_grid_.push_back(0.0);
  for (double v : est.ecdf_->sorted()) {
    const double mu = v / price - 1.0;
    if (mu > est.mu_grid_.back()) est.mu_grid_.push_back(mu);
  }
  est.values_.reserve(est.mu_grid_.size());
  for (double mu : est.mu_grid_) est.values_.push_back(est(mu));
  return est;
}

namespace {

// Piecewise-linear table of M(c) = integral_0^c p d_hat(p) dp on nodes
// x_k = (first + k) * step.
struct MomentTable {
  double step = 0.0;
  long first = 0;
  std::vector<double> cumulative;

  double node(std::size_t k) const { return static_cast<double>(first + static_cast<long>(k)) * step; }
};

// Binned KDE: prices are linearly binned onto the grid and convolved with
// the sampled kernel, whose taps are renormalized to unit mass.
MomentTable build_moment_table(std::span<const double> sorted_prices, Kernel kernel,
                               double bandwidth, double step, std::size_t max_cells,
                               double* coarse_gap) {
  const double reach = kernel_support(kernel) * bandwidth;
  const long taps = static_cast<long>(std::ceil(reach / step));
  const long lo = static_cast<long>(std::floor(sorted_prices.front() / step)) - taps - 1;
  const long hi = static_cast<long>(std::ceil(sorted_prices.back() / step)) + taps + 1;
  const long first = std::max(lo, 0L);
  require(hi - lo <= static_cast<long>(max_cells) + 2 * taps + 4,
          ErrorCode::quadrature_non_convergence, "price table exceeds max_cells");

  const std::size_t nodes = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> bins(nodes, 0.0);
  for (double p : sorted_prices) {
    const double pos = p / step - static_cast<double>(lo);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    bins[i] += 1.0 - frac;
    if (i + 1 < nodes) bins[i + 1] += frac;
  }

  std::vector<double> kernel_taps(static_cast<std::size_t>(2 * taps + 1));
  double tap_mass = 0.0;
  for (long j = -taps; j <= taps; ++j) {
    const double w = kernel_value(kernel, static_cast<double>(j) * step / bandwidth);
    kernel_taps[static_cast<std::size_t>(j + taps)] = w;
    tap_mass += w * step;
  }
  for (double& w : kernel_taps) w /= tap_mass;

  const double inv_n = 1.0 / static_cast<double>(sorted_prices.size());
  std::vector<double> density(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    if (bins[i] == 0.0) continue;
    const long base = static_cast<long>(i);
    for (long j = -taps; j <= taps; ++j) {
      const long k = base + j;
      if (k < 0 || k >= static_cast<long>(nodes)) continue;
      density[static_cast<std::size_t>(k)] +=
          bins[i] * kernel_taps[static_cast<std::size_t>(j + taps)] * inv_n;
    }
  }

  MomentTable table;
  table.step = step;
  table.first = first;
  const std::size_t offset = static_cast<std::size_t>(first - lo);
  table.cumulative.assign(nodes - offset, 0.0);
  double fine = 0.0;
  double coarse = 0.0;
  for (std::size_t k = offset + 1; k < nodes; ++k) {
    const double x0 = static_cast<double>(lo + static_cast<long>(k) - 1) * step;
    const double x1 = x0 + step;
    fine += 0.5 * step * (x0 * density[k - 1] + x1 * density[k]);
    table.cumulative[k - offset] = fine;
    if ((k - offset) % 2 == 0) {
      const double xa = x1 - 2.0 * step;
      coarse += step * (xa * density[k - 2] + x1 * density[k]);
    }
  }
  if ((nodes - offset - 1) % 2 == 1) {
    // Odd panel count: finish the coarse sum with the last fine panel.
    coarse += fine - table.cumulative[nodes - offset - 2];
  }
  *coarse_gap = std::abs(fine - coarse);
  return table;
}

std::vector<double> make_mu_grid(double mu_max, const SpGridOptions& options) {
  const std::size_t n = std::max<std::size_t>(options.mu_points, 4);
  std::vector<double> grid;
  grid.reserve(n);
  if (mu_max <= options.linear_mu_span) {
    for (std::size_t i = 0; i < n; ++i) {
      grid.push_back(mu_max * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return grid;
  }
  const auto n_lin = static_cast<std::size_t>(std::round(options.linear_fraction * static_cast<double>(n)));
  const std::size_t n_geo = n - n_lin;
  for (std::size_t i = 0; i < n_lin; ++i) {
    grid.push_back(options.linear_mu_span * static_cast<double>(i) /
                   static_cast<double>(n_lin - 1));
  }
  const double ratio = std::pow(mu_max / options.linear_mu_span, 1.0 / static_cast<double>(n_geo));
  double x = options.linear_mu_span;
  for (std::size_t i = 0; i < n_geo; ++i) {
    x *= ratio;
    grid.push_back(i + 1 == n_geo ? mu_max : x);
  }
  return grid;
}

}  // namespace

SpendFunctionEstimate approx_spend_sp(std::span<const double> values,
                                      std::span<const double> prices, Kernel kernel,
                                      double bandwidth, const SpGridOptions& options) {
  require(!values.empty() && !prices.empty(), ErrorCode::empty_sample,
          "stochastic-price estimate needs value and price samples");
  require(bandwidth > 0.0 && std::isfinite(bandwidth), ErrorCode::nonpositive_bandwidth,
          "KDE bandwidth must be positive");
  require_finite(values, "values");
  require_finite(prices, "prices");

  SpendFunctionEstimate est;
  est.provenance_ = SpendFunctionEstimate::Provenance::stochastic_price;
  est.bandwidth_ = bandwidth;

  const std::vector<double> v = sorted_copy(values);
  const std::vector<double> p = sorted_copy(prices);
  require(v.front() >= 0.0 && p.front() >= 0.0, ErrorCode::invalid_argument,
          "values and prices must be nonnegative");

  // Refine the table until its first moment is stable.
  const double price_scale = std::max(std::abs(p.back()), 1e-12);
  double step = bandwidth / options.cells_per_bandwidth;
  const double span = p.back() - p.front() + 2.0 * kernel_support(kernel) * bandwidth;
  if (span / step > static_cast<double>(options.max_cells)) {
    step = span / static_cast<double>(options.max_cells);
  }
  MomentTable table;
  for (;;) {
    double gap = 0.0;
    table = build_moment_table(p, kernel, bandwidth, step, options.max_cells, &gap);
    if (gap <= options.moment_tol * price_scale) break;
    step *= 0.5;
    require(span / step <= static_cast<double>(options.max_cells),
            ErrorCode::quadrature_non_convergence,
            "price-moment table did not converge within max_cells");
  }

  // Smallest price carrying estimated density; beyond mu_max every shaded
  // value falls below it and the estimate is zero.
  const double reach = kernel_support(kernel) * bandwidth;
  const double min_price = std::max(p.front() - reach, table.step);
  double mu_max = v.back() / min_price - 1.0;
  if (!(mu_max > 0.0)) mu_max = 1.0;
  mu_max = std::min(mu_max, options.mu_cap);
  est.mu_grid_ = make_mu_grid(mu_max, options);

  // G_hat(mu) = (1/n) sum_i M(V_i / (1 + mu)). M is piecewise linear on the
  // table nodes, so each node interval needs only the count and the sum of
  // the values that land in it.
  std::vector<double> prefix(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i];
  const std::size_t nodes = table.cumulative.size();
  const double total_moment = table.cumulative.back();
  const double inv_n = 1.0 / static_cast<double>(v.size());

  est.values_.reserve(est.mu_grid_.size());
  for (double mu : est.mu_grid_) {
    const double scale = 1.0 + mu;
    double acc = 0.0;
    std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(v.begin(), v.end(), table.node(0) * scale) - v.begin());
    for (std::size_t k = 0; k + 1 < nodes && idx < v.size(); ++k) {
      const double right = table.node(k + 1) * scale;
      const std::size_t next = static_cast<std::size_t>(
          std::lower_bound(v.begin() + static_cast<long>(idx), v.end(), right) - v.begin());
      if (next > idx) {
        const double slope = (table.cumulative[k + 1] - table.cumulative[k]) / table.step;
        const double count = static_cast<double>(next - idx);
        const double sum = prefix[next] - prefix[idx];
        acc += (table.cumulative[k] - slope * table.node(k)) * count + slope * sum / scale;
      }
      idx = next;
    }
    acc += total_moment * static_cast<double>(v.size() - idx);
    est.values_.push_back(std::max(acc * inv_n, 0.0));
  }
  for (std::size_t i = 1; i < est.values_.size(); ++i) {
    est.values_[i] = std::min(est.values_[i], est.values_[i - 1]);
  }
  return est;
}

void write_estimates_csv(std::ostream& out, std::span<const SpendFunctionEstimate> estimates) {
  out << "episode,mu,value\n";
  const auto old_precision = out.precision(17);
  for (std::size_t e = 0; e < estimates.size(); ++e) {
    const auto& grid = estimates[e].mu_grid();
    const auto& vals = estimates[e].values();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << e + 1 << ',' << grid[i] << ',' << vals[i] << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace pacekit
