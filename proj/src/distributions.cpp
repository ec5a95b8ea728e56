#include "pacekit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pacekit/errors.hpp"

namespace pacekit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kUpperTail = 1e-9;

bool finite(double x) { return std::isfinite(x); }

double lognormal_cdf(const dist::LogNormal& d, double x) {
  if (x <= 0.0) return 0.0;
  return 0.5 * std::erfc(-(std::log(x) - d.mu) / (d.sigma * std::numbers::sqrt2));
}

double lognormal_survival(const dist::LogNormal& d, double x) {
  if (x <= 0.0) return 1.0;
  return 0.5 * std::erfc((std::log(x) - d.mu) / (d.sigma * std::numbers::sqrt2));
}

double lognormal_pdf(const dist::LogNormal& d, double x) {
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - d.mu) / d.sigma;
  return standard_normal_pdf(z) / (x * d.sigma);
}

// Untruncated normal upper tail P(N >= x).
double normal_tail(const dist::Normal& d, double x) {
  return 0.5 * std::erfc((x - d.mean) / (d.stddev * std::numbers::sqrt2));
}

void validate(const Distribution::Params& params) {
  std::visit(
      overloaded{
          [](const dist::Uniform& d) {
            require(finite(d.lo) && finite(d.hi) && d.lo >= 0.0 && d.lo <= d.hi,
                    ErrorCode::invalid_argument, "Uniform requires 0 <= lo <= hi");
          },
          [](const dist::Normal& d) {
            require(finite(d.mean) && finite(d.stddev) && d.stddev > 0.0,
                    ErrorCode::invalid_argument, "Normal requires stddev > 0");
          },
          [](const dist::LogNormal& d) {
            require(finite(d.mu) && finite(d.sigma) && d.sigma > 0.0,
                    ErrorCode::invalid_argument, "LogNormal requires sigma > 0");
          },
          [](const dist::Atom& d) {
            require(finite(d.value) && d.value >= 0.0, ErrorCode::invalid_argument,
                    "Atom requires a nonnegative value");
          },
          [](const dist::MaxOfLogNormals& d) {
            require(!d.components.empty(), ErrorCode::invalid_argument,
                    "MaxOfLogNormals requires k >= 1");
            for (const auto& c : d.components) {
              require(finite(c.mu) && finite(c.sigma) && c.sigma > 0.0,
                      ErrorCode::invalid_argument, "MaxOfLogNormals component requires sigma > 0");
            }
          },
          [](const dist::DiscreteAtoms& d) {
            require(!d.points.empty() && d.points.size() == d.weights.size(),
                    ErrorCode::invalid_argument,
                    "DiscreteAtoms requires matching, nonempty points and weights");
            double total = 0.0;
            for (std::size_t i = 0; i < d.points.size(); ++i) {
              require(finite(d.points[i]) && d.points[i] >= 0.0, ErrorCode::invalid_argument,
                      "DiscreteAtoms points must be nonnegative");
              require(finite(d.weights[i]) && d.weights[i] >= 0.0, ErrorCode::invalid_argument,
                      "DiscreteAtoms weights must be nonnegative");
              total += d.weights[i];
            }
            require(std::abs(total - 1.0) <= 1e-12, ErrorCode::invalid_argument,
                    "DiscreteAtoms weights must sum to 1");
          },
      },
      params);
}

}  // namespace

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::uniform: return "uniform";
    case Family::normal: return "normal";
    case Family::lognormal: return "lognormal";
    case Family::atom: return "atom";
    case Family::max_of_lognormals: return "max_of_lognormals";
    case Family::discrete_atoms: return "discrete_atoms";
  }
  return "unknown";
}

double standard_normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double standard_normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

Distribution::Distribution(Params params) : params_(std::move(params)) {
  validate(params_);
  if (auto* d = std::get_if<dist::DiscreteAtoms>(&params_)) {
    std::vector<std::size_t> order(d->points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return d->points[a] < d->points[b]; });
    dist::DiscreteAtoms sorted;
    for (std::size_t i : order) {
      sorted.points.push_back(d->points[i]);
      sorted.weights.push_back(d->weights[i]);
    }
    *d = std::move(sorted);
  }
  if (const auto* d = std::get_if<dist::Normal>(&params_)) {
    truncation_mass_ = normal_tail(*d, 0.0);
    require(truncation_mass_ > 1e-300, ErrorCode::invalid_argument,
            "Normal has no mass above zero");
  }
  upper_ = std::visit(overloaded{
                          [](const dist::Uniform& d) { return d.hi; },
                          [](const dist::Atom& d) { return d.value; },
                          [](const dist::DiscreteAtoms& d) { return d.points.back(); },
                          [this](const auto&) { return quantile(1.0 - kUpperTail); },
                      },
                      params_);
}

bool Distribution::is_atomic() const noexcept {
  return std::holds_alternative<dist::Atom>(params_) ||
         std::holds_alternative<dist::DiscreteAtoms>(params_);
}

double Distribution::sample(RandomStream& rng) const {
  return std::visit(
      overloaded{
          [&](const dist::Uniform& d) { return rng.uniform(d.lo, d.hi); },
          [&](const dist::Normal& d) {
            if (truncation_mass_ >= 0.05) {
              for (;;) {
                const double x = d.mean + d.stddev * rng.normal();
                if (x >= 0.0) return x;
              }
            }
            return quantile(rng.uniform());
          },
          [&](const dist::LogNormal& d) { return std::exp(d.mu + d.sigma * rng.normal()); },
          [&](const dist::Atom& d) { return d.value; },
          [&](const dist::MaxOfLogNormals& d) {
            double best = 0.0;
            for (const auto& c : d.components) {
              best = std::max(best, std::exp(c.mu + c.sigma * rng.normal()));
            }
            return best;
          },
          [&](const dist::DiscreteAtoms& d) {
            const double u = rng.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i < d.points.size(); ++i) {
              acc += d.weights[i];
              if (u < acc) return d.points[i];
            }
            return d.points.back();
          },
      },
      params_);
}

double Distribution::cdf(double x) const {
  return std::visit(
      overloaded{
          [&](const dist::Uniform& d) {
            if (x < d.lo) return 0.0;
            if (x >= d.hi) return 1.0;
            return (x - d.lo) / (d.hi - d.lo);
          },
          [&](const dist::Normal& d) {
            if (x < 0.0) return 0.0;
            return 1.0 - normal_tail(d, x) / truncation_mass_;
          },
          [&](const dist::LogNormal& d) { return lognormal_cdf(d, x); },
          [&](const dist::Atom& d) { return x >= d.value ? 1.0 : 0.0; },
          [&](const dist::MaxOfLogNormals& d) {
            double product = 1.0;
            for (const auto& c : d.components) product *= lognormal_cdf(c, x);
            return product;
          },
          [&](const dist::DiscreteAtoms& d) {
            double acc = 0.0;
            for (std::size_t i = 0; i < d.points.size() && d.points[i] <= x; ++i) {
              acc += d.weights[i];
            }
            return std::min(acc, 1.0);
          },
      },
      params_);
}

double Distribution::survival_at_least(double x) const {
  return std::visit(
      overloaded{
          [&](const dist::Uniform& d) {
            if (x <= d.lo) return 1.0;
            if (x > d.hi) return 0.0;
            if (d.hi == d.lo) return 1.0;
            return (d.hi - x) / (d.hi - d.lo);
          },
          [&](const dist::Normal& d) {
            if (x <= 0.0) return 1.0;
            return normal_tail(d, x) / truncation_mass_;
          },
          [&](const dist::LogNormal& d) { return lognormal_survival(d, x); },
          [&](const dist::Atom& d) { return x <= d.value ? 1.0 : 0.0; },
          [&](const dist::MaxOfLogNormals&) { return 1.0 - cdf(x); },
          [&](const dist::DiscreteAtoms& d) {
            double acc = 0.0;
            for (std::size_t i = 0; i < d.points.size(); ++i) {
              if (d.points[i] >= x) acc += d.weights[i];
            }
            return std::min(acc, 1.0);
          },
      },
      params_);
}

double Distribution::pdf(double x) const {
  return std::visit(
      overloaded{
          [&](const dist::Uniform& d) {
            require(d.hi > d.lo, ErrorCode::atom_has_no_density,
                    "degenerate Uniform has no density");
            return (x >= d.lo && x <= d.hi) ? 1.0 / (d.hi - d.lo) : 0.0;
          },
          [&](const dist::Normal& d) {
            if (x < 0.0) return 0.0;
            return standard_normal_pdf((x - d.mean) / d.stddev) / (d.stddev * truncation_mass_);
          },
          [&](const dist::LogNormal& d) { return lognormal_pdf(d, x); },
          [&](const dist::Atom&) -> double {
            fail(ErrorCode::atom_has_no_density, "Atom has no density");
          },
          [&](const dist::MaxOfLogNormals& d) {
            double total = 0.0;
            for (std::size_t k = 0; k < d.components.size(); ++k) {
              double term = lognormal_pdf(d.components[k], x);
              for (std::size_t j = 0; j < d.components.size(); ++j) {
                if (j != k) term *= lognormal_cdf(d.components[j], x);
              }
              total += term;
            }
            return total;
          },
          [&](const dist::DiscreteAtoms&) -> double {
            fail(ErrorCode::atom_has_no_density, "DiscreteAtoms has no density");
          },
      },
      params_);
}

double Distribution::quantile(double q) const {
  require(q >= 0.0 && q <= 1.0, ErrorCode::invalid_argument, "quantile level must lie in [0, 1]");
  if (const auto* d = std::get_if<dist::Uniform>(&params_)) return d->lo + q * (d->hi - d->lo);
  if (const auto* d = std::get_if<dist::Atom>(&params_)) return d->value;
  if (const auto* d = std::get_if<dist::DiscreteAtoms>(&params_)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d->points.size(); ++i) {
      acc += d->weights[i];
      if (acc >= q - 1e-15) return d->points[i];
    }
    return d->points.back();
  }
  if (q <= 0.0) return 0.0;
  require(q < 1.0, ErrorCode::invalid_argument, "quantile(1) is unbounded for this family");
  double lo = 0.0;
  double hi = 1.0;
  while (cdf(hi) < q) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e300, ErrorCode::invalid_argument, "quantile search diverged");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double Distribution::mean() const {
  return std::visit(
      overloaded{
          [](const dist::Uniform& d) { return 0.5 * (d.lo + d.hi); },
          [this](const dist::Normal& d) {
            const double alpha = -d.mean / d.stddev;
            return d.mean + d.stddev * standard_normal_pdf(alpha) / truncation_mass_;
          },
          [](const dist::LogNormal& d) { return std::exp(d.mu + 0.5 * d.sigma * d.sigma); },
          [](const dist::Atom& d) { return d.value; },
          [this](const dist::MaxOfLogNormals&) {
            // E[X] = integral of the survival function.
            return integrate([this](double x) { return 1.0 - cdf(x); }, 0.0, upper_,
                             QuadratureConfig{1e-10, 40});
          },
          [](const dist::DiscreteAtoms& d) {
            double total = 0.0;
            for (std::size_t i = 0; i < d.points.size(); ++i) total += d.points[i] * d.weights[i];
            return total;
          },
      },
      params_);
}

double Distribution::upper_bound() const { return upper_; }

double Distribution::lower_bound() const {
  return std::visit(overloaded{
                        [](const dist::Uniform& d) { return d.lo; },
                        [](const dist::Atom& d) { return d.value; },
                        [](const dist::DiscreteAtoms& d) { return d.points.front(); },
                        [](const auto&) { return 0.0; },
                    },
                    params_);
}

EpisodicModel::EpisodicModel(std::size_t tau, std::vector<EpisodeDists> episodes,
                             std::string name)
    : tau_(tau), episodes_(std::move(episodes)), name_(std::move(name)) {
  require(tau_ >= 1, ErrorCode::invalid_argument, "episodes need at least one round");
  require(!episodes_.empty(), ErrorCode::invalid_argument, "model needs at least one episode");
}

double EpisodicModel::value_bound() const {
  double h = 0.0;
  for (const auto& ep : episodes_) h = std::max(h, ep.value.upper_bound());
  return h;
}

bool EpisodicModel::fixed_prices() const {
  return std::all_of(episodes_.begin(), episodes_.end(), [](const EpisodeDists& ep) {
    return std::holds_alternative<dist::Atom>(ep.price.params());
  });
}

SlowMovingModel::SlowMovingModel(std::vector<EpisodeDists> rounds, double declared_zeta,
                                 double declared_theta, std::string name)
    : rounds_(std::move(rounds)), zeta_(declared_zeta), theta_(declared_theta),
      name_(std::move(name)) {
  require(!rounds_.empty(), ErrorCode::invalid_argument, "slow-moving model needs rounds");
  require(declared_zeta >= 0.0 && declared_theta >= 0.0, ErrorCode::invalid_argument,
          "declared drift bounds must be nonnegative");
}

double SlowMovingModel::value_bound() const {
  double h = 0.0;
  for (const auto& r : rounds_) h = std::max(h, r.value.upper_bound());
  return h;
}

EpisodicModel SlowMovingModel::as_single_round_episodes() const {
  return EpisodicModel(1, rounds_, name_);
}

double true_spend_function(const Distribution& value, const Distribution& price, double mu,
                           const QuadratureConfig& quad) {
  require(mu >= 0.0 && std::isfinite(mu), ErrorCode::invalid_argument, "mu must be >= 0");
  const double scale = 1.0 + mu;
  if (const auto* a = std::get_if<dist::Atom>(&price.params())) {
    return a->value * value.survival_at_least(scale * a->value);
  }
  if (const auto* d = std::get_if<dist::DiscreteAtoms>(&price.params())) {
    double total = 0.0;
    for (std::size_t i = 0; i < d->points.size(); ++i) {
      total += d->weights[i] * d->points[i] * value.survival_at_least(scale * d->points[i]);
    }
    return total;
  }

  const double lo = price.lower_bound();
  const double hi = std::min(price.upper_bound(), value.upper_bound() / scale);
  if (hi <= lo) return 0.0;

  // Split at points where the integrand has kinks or jumps so that each
  // piece is smooth for the adaptive rule.
  std::vector<double> cuts{lo, hi};
  auto add_cut = [&](double x) {
    if (x > lo && x < hi) cuts.push_back(x);
  };
  if (const auto* u = std::get_if<dist::Uniform>(&value.params())) {
    add_cut(u->lo / scale);
    add_cut(u->hi / scale);
  }
  if (const auto* a = std::get_if<dist::Atom>(&value.params())) add_cut(a->value / scale);
  if (const auto* d = std::get_if<dist::DiscreteAtoms>(&value.params())) {
    for (double p : d->points) add_cut(p / scale);
  }
  if (const auto* u = std::get_if<dist::Uniform>(&price.params())) {
    add_cut(u->lo);
    add_cut(u->hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto integrand = [&](double p) {
    return p * value.survival_at_least(scale * p) * price.pdf(p);
  };
  QuadratureConfig piece = quad;
  piece.abs_tol = quad.abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // Open the interval slightly so jump points are evaluated on their
    // smooth side.
    const double width = cuts[i + 1] - cuts[i];
    const double eps = width * 1e-12;
    total += integrate(integrand, cuts[i] + eps, cuts[i + 1] - eps, piece);
  }
  return std::max(total, 0.0);
}

const std::vector<std::string>& table1_dataset_names() {
  static const std::vector<std::string> names{
      "uniform_v_fix_p",     "normal_v_fix_p",    "lognorm_v_fix_p",
      "uniform_v_normal_p",  "normal_v_normal_p", "lognorn_v_maxlognorm_p",
  };
  return names;
}

EpisodicModel make_table1_dataset(std::string_view name, std::uint64_t seed,
                                  std::size_t episodes, std::size_t horizon,
                                  const Table1Ranges& ranges) {
  const auto& names = table1_dataset_names();
  require(std::find(names.begin(), names.end(), name) != names.end(),
          ErrorCode::unknown_dataset, "unknown dataset '" + std::string(name) + "'");
  require(episodes >= 1 && horizon >= episodes, ErrorCode::invalid_argument,
          "need 1 <= E <= T");
  require(horizon % episodes == 0, ErrorCode::indivisible_horizon,
          "T must be a multiple of E");

  RandomStream rng(seed, streams::dataset);
  auto draw = [&](const ParamRange& r) { return rng.uniform(r.lo, r.hi); };

  const std::string value_kind = std::string(name.substr(0, name.find('_')));
  const std::string price_kind(name.substr(name.find("_v_") + 3));

  std::vector<EpisodeDists> eps;
  eps.reserve(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    // Draw order is fixed (value parameters, then price parameters) so that
    // the same seed always yields the same model.
    Distribution value = [&] {
      if (value_kind == "uniform") {
        const double lo = draw(ranges.uniform_lo);
        const double hi = draw(ranges.uniform_hi);
        return Distribution::uniform(std::min(lo, hi), std::max(lo, hi));
      }
      if (value_kind == "normal") {
        const double m = draw(ranges.normal_value_mean);
        return Distribution::normal(m, draw(ranges.normal_value_sd));
      }
      const double m = draw(ranges.lognormal_value_mu);
      return Distribution::lognormal(m, draw(ranges.lognormal_value_sigma));
    }();
    Distribution price = [&] {
      if (price_kind == "fix_p") return Distribution::atom(ranges.fixed_price);
      if (price_kind == "normal_p") {
        const double m = draw(ranges.normal_price_mean);
        return Distribution::normal(m, draw(ranges.normal_price_sd));
      }
      std::vector<dist::LogNormal> parts;
      for (int k = 0; k < ranges.maxlog_k; ++k) {
        const double m = draw(ranges.maxlog_mu);
        parts.push_back({m, draw(ranges.maxlog_sigma)});
      }
      return Distribution::max_of_lognormals(std::move(parts));
    }();
    eps.push_back({std::move(value), std::move(price)});
  }
  return EpisodicModel(horizon / episodes, std::move(eps), std::string(name));
}

Example1Instances make_example1_instance(std::size_t horizon) {
  require(horizon >= 2 && horizon % 2 == 0, ErrorCode::invalid_argument, "T must be even");
  const std::size_t tau = horizon / 2;
  const auto price = Distribution::atom(1.0);
  EpisodicModel low(tau,
                    {{Distribution::atom(2.0), price}, {Distribution::atom(1.0), price}},
                    "example1_I");
  EpisodicModel high(tau,
                     {{Distribution::atom(2.0), price}, {Distribution::atom(3.0), price}},
                     "example1_I_prime");
  return {std::move(low), std::move(high), 0.5 * static_cast<double>(horizon)};
}

Lemma2Instance make_lemma2_instance(std::size_t tau, double p_high, double v_low,
                                    double v_high) {
  require(tau >= 3, ErrorCode::invalid_argument, "tau must be >= 3");
  require(v_low > 0.0 && v_high > v_low, ErrorCode::invalid_argument,
          "need v_high > v_low > 0");
  require(p_high > 0.0, ErrorCode::invalid_argument, "p_high must be positive");
  const double t = static_cast<double>(tau);
  const double p_low = p_high / t;
  EpisodicModel model(
      tau,
      {
          {Distribution::discrete({0.0, p_high + v_low}, {(t - 1.0) / t, 1.0 / t}),
           Distribution::atom(p_high)},
          {Distribution::atom(p_low + v_high), Distribution::atom(p_low)},
      },
      "lemma2");
  return {std::move(model), 2.0 * p_high, p_high / (p_high + v_low), p_low};
}

double lemma2_collision_probability(std::size_t tau) {
  const double t = static_cast<double>(tau);
  const double miss = (t - 1.0) / t;
  return 1.0 - std::pow(miss, t) - std::pow(miss, t - 1.0);
}

double lemma2_collision_lower_bound(std::size_t tau) {
  const double t = static_cast<double>(tau);
  return 1.0 - 2.0 * std::pow((t - 1.0) / t, t - 1.0);
}

namespace {

double lerp(double a, double b, double w) { return a + (b - a) * w; }

Distribution interpolate(const Distribution& a, const Distribution& b, double w) {
  require(a.family() == b.family(), ErrorCode::mixed_families,
          "interpolation endpoints must share a family");
  return std::visit(
      overloaded{
          [&](const dist::Uniform& x) {
            const auto& y = std::get<dist::Uniform>(b.params());
            return Distribution::uniform(lerp(x.lo, y.lo, w), lerp(x.hi, y.hi, w));
          },
          [&](const dist::Normal& x) {
            const auto& y = std::get<dist::Normal>(b.params());
            return Distribution::normal(lerp(x.mean, y.mean, w), lerp(x.stddev, y.stddev, w));
          },
          [&](const dist::LogNormal& x) {
            const auto& y = std::get<dist::LogNormal>(b.params());
            return Distribution::lognormal(lerp(x.mu, y.mu, w), lerp(x.sigma, y.sigma, w));
          },
          [&](const dist::Atom& x) {
            const auto& y = std::get<dist::Atom>(b.params());
            return Distribution::atom(lerp(x.value, y.value, w));
          },
          [&](const dist::MaxOfLogNormals& x) {
            const auto& y = std::get<dist::MaxOfLogNormals>(b.params());
            require(x.components.size() == y.components.size(), ErrorCode::mixed_families,
                    "MaxOfLogNormals endpoints need the same k");
            std::vector<dist::LogNormal> parts;
            for (std::size_t k = 0; k < x.components.size(); ++k) {
              parts.push_back({lerp(x.components[k].mu, y.components[k].mu, w),
                               lerp(x.components[k].sigma, y.components[k].sigma, w)});
            }
            return Distribution::max_of_lognormals(std::move(parts));
          },
          [&](const dist::DiscreteAtoms& x) {
            const auto& y = std::get<dist::DiscreteAtoms>(b.params());
            require(x.points.size() == y.points.size(), ErrorCode::mixed_families,
                    "DiscreteAtoms endpoints need the same number of points");
            std::vector<double> points;
            std::vector<double> weights;
            for (std::size_t i = 0; i < x.points.size(); ++i) {
              points.push_back(lerp(x.points[i], y.points[i], w));
              weights.push_back(lerp(x.weights[i], y.weights[i], w));
            }
            return Distribution::discrete(std::move(points), std::move(weights));
          },
      },
      a.params());
}

// Largest sup-norm gap between consecutive rounds, measured on a fixed grid.
template <class Eval>
double max_consecutive_gap(const std::vector<EpisodeDists>& rounds, double grid_hi, Eval eval) {
  constexpr std::size_t kGrid = 4096;
  std::vector<double> prev(kGrid);
  std::vector<double> cur(kGrid);
  auto fill = [&](const EpisodeDists& r, std::vector<double>& out) {
    for (std::size_t i = 0; i < kGrid; ++i) {
      out[i] = eval(r, grid_hi * static_cast<double>(i) / static_cast<double>(kGrid - 1));
    }
  };
  double gap = 0.0;
  fill(rounds.front(), prev);
  for (std::size_t t = 1; t < rounds.size(); ++t) {
    fill(rounds[t], cur);
    for (std::size_t i = 0; i < kGrid; ++i) gap = std::max(gap, std::abs(cur[i] - prev[i]));
    std::swap(prev, cur);
  }
  return gap;
}

}  // namespace

SlowMovingModel make_slow_moving_interpolation(const EpisodeDists& start, const EpisodeDists& end,
                                               std::size_t horizon) {
  require(horizon >= 1, ErrorCode::invalid_argument, "T must be positive");
  require(start.value.family() == end.value.family() &&
              start.price.family() == end.price.family(),
          ErrorCode::mixed_families, "start and end must share families");

  std::vector<EpisodeDists> rounds;
  rounds.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double w =
        horizon == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(horizon - 1);
    rounds.push_back({interpolate(start.value, end.value, w),
                      interpolate(start.price, end.price, w)});
  }
  if (horizon == 1) return SlowMovingModel(std::move(rounds), 0.0, 0.0, "interpolated");

  const double value_hi = std::max(start.value.upper_bound(), end.value.upper_bound());
  const double price_hi = std::max(start.price.upper_bound(), end.price.upper_bound());
  const double zeta = max_consecutive_gap(
      rounds, value_hi, [](const EpisodeDists& r, double x) { return r.value.cdf(x); });
  // Atomic prices have no density; their drift is measured on the cdf.
  const bool atomic_price = start.price.is_atomic();
  const double theta = max_consecutive_gap(rounds, price_hi, [&](const EpisodeDists& r, double x) {
    return atomic_price ? r.price.cdf(x) : r.price.pdf(x);
  });
  return SlowMovingModel(std::move(rounds), zeta, theta, "interpolated");
}

}  // namespace pacekit
