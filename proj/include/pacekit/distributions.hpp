#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pacekit/quadrature.hpp"
#include "pacekit/rng.hpp"

namespace pacekit {

namespace dist {
struct Uniform {
  double lo;
  double hi;
  bool operator==(const Uniform&) const = default;
};
// Truncated at zero and renormalized.
struct Normal {
  double mean;
  double stddev;
  bool operator==(const Normal&) const = default;
};
struct LogNormal {
  double mu;
  double sigma;
  bool operator==(const LogNormal&) const = default;
};
struct Atom {
  double value;
  bool operator==(const Atom&) const = default;
};
// Maximum of independent lognormal draws, one per component.
struct MaxOfLogNormals {
  std::vector<LogNormal> components;
  bool operator==(const MaxOfLogNormals&) const = default;
};
struct DiscreteAtoms {
  std::vector<double> points;
  std::vector<double> weights;
  bool operator==(const DiscreteAtoms&) const = default;
};
}  // namespace dist

enum class Family { uniform, normal, lognormal, atom, max_of_lognormals, discrete_atoms };

std::string_view family_name(Family family) noexcept;

// Nonnegative scalar distribution used for values and for highest competing
// bids. Parameters are validated at construction; every member is const and
// the object is safe to share between threads.
class Distribution {
 public:
  using Params = std::variant<dist::Uniform, dist::Normal, dist::LogNormal, dist::Atom,
                              dist::MaxOfLogNormals, dist::DiscreteAtoms>;

  explicit Distribution(Params params);

  static Distribution uniform(double lo, double hi) { return Distribution(dist::Uniform{lo, hi}); }
  static Distribution normal(double mean, double stddev) {
    return Distribution(dist::Normal{mean, stddev});
  }
  static Distribution lognormal(double mu, double sigma) {
    return Distribution(dist::LogNormal{mu, sigma});
  }
  static Distribution atom(double value) { return Distribution(dist::Atom{value}); }
  static Distribution max_of_lognormals(std::vector<dist::LogNormal> components) {
    return Distribution(dist::MaxOfLogNormals{std::move(components)});
  }
  static Distribution discrete(std::vector<double> points, std::vector<double> weights) {
    return Distribution(dist::DiscreteAtoms{std::move(points), std::move(weights)});
  }

  const Params& params() const noexcept { return params_; }
  Family family() const noexcept { return static_cast<Family>(params_.index()); }

  // True for Atom and DiscreteAtoms, which have no density.
  bool is_atomic() const noexcept;

  double sample(RandomStream& rng) const;

  // P(X <= x); right-continuous at atoms.
  double cdf(double x) const;
  // P(X >= x); the win probability of a threshold bid.
  double survival_at_least(double x) const;
  // Throws atom_has_no_density for atomic families.
  double pdf(double x) const;
  // Smallest x with cdf(x) >= q.
  double quantile(double q) const;

  double mean() const;
  // Upper end of the support; the 1 - 1e-9 quantile for unbounded families.
  double upper_bound() const;
  double lower_bound() const;

  bool operator==(const Distribution& other) const { return params_ == other.params_; }

 private:
  Params params_;
  double truncation_mass_ = 1.0;  // P(N >= 0) for the untruncated normal
  double upper_ = 0.0;
};

// Standard normal density and cdf.
double standard_normal_pdf(double z) noexcept;
double standard_normal_cdf(double z) noexcept;

struct EpisodeDists {
  Distribution value;
  Distribution price;
};

class EpisodicModel {
 public:
  EpisodicModel(std::size_t tau, std::vector<EpisodeDists> episodes, std::string name = {});

  std::size_t episodes() const noexcept { return episodes_.size(); }
  std::size_t tau() const noexcept { return tau_; }
  std::size_t horizon() const noexcept { return tau_ * episodes_.size(); }
  const EpisodeDists& episode(std::size_t e) const { return episodes_.at(e); }
  const std::vector<EpisodeDists>& all_episodes() const noexcept { return episodes_; }
  const std::string& name() const noexcept { return name_; }

  // Largest value upper bound over episodes (h).
  double value_bound() const;
  bool fixed_prices() const;

 private:
  std::size_t tau_;
  std::vector<EpisodeDists> episodes_;
  std::string name_;
};

class SlowMovingModel {
 public:
  SlowMovingModel(std::vector<EpisodeDists> rounds, double declared_zeta, double declared_theta,
                  std::string name = {});

  std::size_t horizon() const noexcept { return rounds_.size(); }
  const EpisodeDists& round(std::size_t t) const { return rounds_.at(t); }
  const std::vector<EpisodeDists>& all_rounds() const noexcept { return rounds_; }
  double declared_zeta() const noexcept { return zeta_; }
  double declared_theta() const noexcept { return theta_; }
  const std::string& name() const noexcept { return name_; }
  double value_bound() const;

  // Episodic model with T rounds of one round's distributions each; used to
  // compare a drift-free slow-moving model with its stationary twin.
  EpisodicModel as_single_round_episodes() const;

 private:
  std::vector<EpisodeDists> rounds_;
  double zeta_;
  double theta_;
  std::string name_;
};

// G(mu) = E[p * 1{v >= (1 + mu) p}]: expected per-round spend of the
// unbudgeted bidder that shades values by 1 / (1 + mu).
double true_spend_function(const Distribution& value, const Distribution& price, double mu,
                           const QuadratureConfig& quad = {});

// Meta-ranges from which per-episode parameters of the synthetic datasets
// are drawn. Loadable from a key-value file; see config/table1_ranges.ini.
struct ParamRange {
  double lo;
  double hi;
};

struct Table1Ranges {
  int version = 1;
  double fixed_price = 1.0;
  ParamRange uniform_lo{0.0, 1.0};
  ParamRange uniform_hi{1.0, 2.0};
  ParamRange normal_value_mean{0.5, 1.5};
  ParamRange normal_value_sd{0.1, 0.6};
  ParamRange lognormal_value_mu{-0.5, 0.5};
  ParamRange lognormal_value_sigma{0.3, 1.0};
  ParamRange normal_price_mean{0.5, 1.0};
  ParamRange normal_price_sd{0.05, 0.3};
  int maxlog_k = 5;
  ParamRange maxlog_mu{-1.5, -0.5};
  ParamRange maxlog_sigma{0.3, 0.8};
};

const std::vector<std::string>& table1_dataset_names();

EpisodicModel make_table1_dataset(std::string_view name, std::uint64_t seed,
                                  std::size_t episodes = 10, std::size_t horizon = 1000,
                                  const Table1Ranges& ranges = {});

struct Example1Instances {
  EpisodicModel low;   // second-episode value 1
  EpisodicModel high;  // second-episode value 3
  double budget;
};
Example1Instances make_example1_instance(std::size_t horizon);

struct Lemma2Instance {
  EpisodicModel model;
  double budget;
  double beta_star;
  double p_low;
};
Lemma2Instance make_lemma2_instance(std::size_t tau, double p_high, double v_low, double v_high);

// P(at least two valuable first-episode impressions) for the instance above,
// exact binomial value and the closed-form lower bound used in the argument.
double lemma2_collision_probability(std::size_t tau);
double lemma2_collision_lower_bound(std::size_t tau);

SlowMovingModel make_slow_moving_interpolation(const EpisodeDists& start, const EpisodeDists& end,
                                               std::size_t horizon);

}  // namespace pacekit
