#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pacekit {

// Empirical cdf with the strict-inequality convention F(x) = #{X_i < x} / n,
// so the estimate is left-continuous.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double x) const;
  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

  // sup_x |F_hat(x) - F(x)| against a continuous reference cdf.
  double sup_distance(const std::function<double(double)>& cdf) const;

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf fit_ecdf(std::vector<double> samples);

// sqrt(log(2 / delta) / (2 n)).
double dkw_bound(std::size_t n, double delta);

enum class Kernel { gaussian, exponential, uniform };

std::string_view kernel_name(Kernel kernel) noexcept;
Kernel parse_kernel(std::string_view name);
// Unit-scale kernel profile K(u); each integrates to one.
double kernel_value(Kernel kernel, double u) noexcept;
// Half-width, in bandwidths, beyond which the kernel is treated as zero.
double kernel_support(Kernel kernel) noexcept;

class KdeEstimate {
 public:
  KdeEstimate(std::vector<double> samples, Kernel kernel, double bandwidth);

  double operator()(double x) const;
  double bandwidth() const noexcept { return bandwidth_; }
  Kernel kernel() const noexcept { return kernel_; }
  std::span<const double> sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
  Kernel kernel_;
  double bandwidth_;
};

KdeEstimate fit_kde(std::vector<double> samples, Kernel kernel, double bandwidth);

enum class BandwidthRule {
  scaled,  // sigma_hat * n^(-1/3)
  unit,    // n^(-1/3)
};

double default_bandwidth(std::span<const double> samples,
                         BandwidthRule rule = BandwidthRule::scaled);

struct SpGridOptions {
  std::size_t mu_points = 512;
  // Linear spacing on [0, linear_mu_span], geometric beyond it.
  double linear_mu_span = 4.0;
  double linear_fraction = 0.75;
  double mu_cap = 1e4;
  // Resolution of the price-side table, in grid cells per bandwidth.
  double cells_per_bandwidth = 8.0;
  std::size_t max_cells = std::size_t{1} << 17;
  // Relative agreement required between the step-h and step-2h integrals of
  // the first price moment before the table is accepted.
  double moment_tol = 1e-4;
};

// Estimated per-round expected spend as a function of the shading
// multiplier. Nonnegative and nonincreasing in mu.
class SpendFunctionEstimate {
 public:
  enum class Provenance { fixed_price, stochastic_price };

  double operator()(double mu) const;

  Provenance provenance() const noexcept { return provenance_; }
  const std::vector<double>& mu_grid() const noexcept { return mu_grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double mu_max() const noexcept { return mu_grid_.back(); }
  std::optional<double> fixed_price() const noexcept { return price_; }
  std::optional<double> bandwidth() const noexcept { return bandwidth_; }

 private:
  friend SpendFunctionEstimate approx_spend_fp(std::span<const double> values, double price);
  friend SpendFunctionEstimate approx_spend_sp(std::span<const double> values,
                                               std::span<const double> prices, Kernel kernel,
                                               double bandwidth, const SpGridOptions& options);

  SpendFunctionEstimate() = default;

  Provenance provenance_ = Provenance::stochastic_price;
  std::vector<double> mu_grid_;
  std::vector<double> values_;
  std::optional<EmpiricalCdf> ecdf_;
  std::optional<double> price_;
  std::optional<double> bandwidth_;
};

std::string_view provenance_name(SpendFunctionEstimate::Provenance p) noexcept;

// Constant price p: G_hat(mu) = p * (1 - F_hat((1 + mu) p)), evaluated exactly.
SpendFunctionEstimate approx_spend_fp(std::span<const double> values, double price);

// Stochastic prices: G_hat(mu) = integral of p (1 - F_hat((1 + mu) p)) d_hat(p)
// over p >= 0, with F_hat the empirical value cdf and d_hat a KDE of the
// prices. Tabulated on a monotone mu grid and clamped to be nonincreasing.
SpendFunctionEstimate approx_spend_sp(std::span<const double> values,
                                      std::span<const double> prices, Kernel kernel,
                                      double bandwidth, const SpGridOptions& options = {});

// Long-format CSV: episode,mu,value.
void write_estimates_csv(std::ostream& out, std::span<const SpendFunctionEstimate> estimates);

}  // namespace pacekit
