#include "pacekit/io.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pacekit/errors.hpp"

namespace pacekit {
namespace {

using nlohmann::json;
namespace pt = boost::property_tree;

constexpr int kModelVersion = 1;
constexpr int kPlanVersion = 1;

json dist_to_json(const Distribution& d) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Uniform>) {
          return {{"family", "uniform"}, {"lo", p.lo}, {"hi", p.hi}};
        } else if constexpr (std::is_same_v<T, dist::Normal>) {
          return {{"family", "normal"}, {"mean", p.mean}, {"stddev", p.stddev}};
        } else if constexpr (std::is_same_v<T, dist::LogNormal>) {
          return {{"family", "lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}};
        } else if constexpr (std::is_same_v<T, dist::Atom>) {
          return {{"family", "atom"}, {"value", p.value}};
        } else if constexpr (std::is_same_v<T, dist::MaxOfLogNormals>) {
          json parts = json::array();
          for (const auto& c : p.components) parts.push_back({{"mu", c.mu}, {"sigma", c.sigma}});
          return {{"family", "max_of_lognormals"}, {"components", parts}};
        } else {
          return {{"family", "discrete_atoms"}, {"points", p.points}, {"weights", p.weights}};
        }
      },
      d.params());
}

Distribution dist_from_json(const json& j) {
  const auto family = j.at("family").get<std::string>();
  if (family == "uniform") return Distribution::uniform(j.at("lo"), j.at("hi"));
  if (family == "normal") return Distribution::normal(j.at("mean"), j.at("stddev"));
  if (family == "lognormal") return Distribution::lognormal(j.at("mu"), j.at("sigma"));
  if (family == "atom") return Distribution::atom(j.at("value"));
  if (family == "max_of_lognormals") {
    std::vector<dist::LogNormal> parts;
    for (const auto& c : j.at("components")) parts.push_back({c.at("mu"), c.at("sigma")});
    return Distribution::max_of_lognormals(std::move(parts));
  }
  if (family == "discrete_atoms") {
    return Distribution::discrete(j.at("points").get<std::vector<double>>(),
                                  j.at("weights").get<std::vector<double>>());
  }
  fail(ErrorCode::parse_error, "unknown distribution family '" + family + "'");
}

json pairs_to_json(const std::vector<EpisodeDists>& pairs) {
  json out = json::array();
  for (const auto& d : pairs) out.push_back({{"value", dist_to_json(d.value)}, {"price", dist_to_json(d.price)}});
  return out;
}

std::vector<EpisodeDists> pairs_from_json(const json& j) {
  std::vector<EpisodeDists> out;
  for (const auto& d : j) out.push_back({dist_from_json(d.at("value")), dist_from_json(d.at("price"))});
  return out;
}

// Wraps nlohmann and library errors raised while decoding a document.
template <typename F>
auto decode(std::string_view text, std::string_view what, F&& body) {
  try {
    return body(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string(what) + ": " + e.what());
  }
}

void check_header(const json& j, std::string_view kind, int version) {
  require(j.value("format", std::string{}) == kind, ErrorCode::parse_error,
          "expected a '" + std::string(kind) + "' document");
  require(j.value("version", 0) == version, ErrorCode::parse_error,
          "unsupported " + std::string(kind) + " version");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  require(ec == std::errc{} && ptr == s.data() + s.size() && !s.empty(), ErrorCode::invalid_config,
          "'" + std::string(key) + "' expects a number, got '" + s + "'");
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  require(ec == std::errc{} && ptr == s.data() + s.size() && !s.empty(), ErrorCode::invalid_config,
          "'" + std::string(key) + "' expects a nonnegative integer, got '" + s + "'");
  return out;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                                : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

pt::ptree parse_ini(std::string_view text) {
  std::istringstream in{std::string(text)};
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::invalid_config, std::string("malformed INI: ") + e.what());
  }
  return tree;
}

struct RangeSlot {
  const char* name;
  ParamRange Table1Ranges::*member;
};

constexpr RangeSlot kRangeSlots[] = {
    {"uniform_lo", &Table1Ranges::uniform_lo},
    {"uniform_hi", &Table1Ranges::uniform_hi},
    {"normal_value_mean", &Table1Ranges::normal_value_mean},
    {"normal_value_sd", &Table1Ranges::normal_value_sd},
    {"lognormal_value_mu", &Table1Ranges::lognormal_value_mu},
    {"lognormal_value_sigma", &Table1Ranges::lognormal_value_sigma},
    {"normal_price_mean", &Table1Ranges::normal_price_mean},
    {"normal_price_sd", &Table1Ranges::normal_price_sd},
    {"maxlog_mu", &Table1Ranges::maxlog_mu},
    {"maxlog_sigma", &Table1Ranges::maxlog_sigma},
};

}  // namespace

std::string model_to_json(const EpisodicModel& model) {
  const json j{{"format", "pacekit.episodic_model"},
               {"version", kModelVersion},
               {"name", model.name()},
               {"tau", model.tau()},
               {"episodes", pairs_to_json(model.all_episodes())}};
  return j.dump(2);
}

EpisodicModel model_from_json(std::string_view text) {
  return decode(text, "episodic model", [](const json& j) {
    check_header(j, "pacekit.episodic_model", kModelVersion);
    return EpisodicModel(j.at("tau").get<std::size_t>(), pairs_from_json(j.at("episodes")),
                         j.value("name", std::string{}));
  });
}

std::string slow_model_to_json(const SlowMovingModel& model) {
  const json j{{"format", "pacekit.slow_moving_model"},
               {"version", kModelVersion},
               {"name", model.name()},
               {"declared_zeta", model.declared_zeta()},
               {"declared_theta", model.declared_theta()},
               {"rounds", pairs_to_json(model.all_rounds())}};
  return j.dump(2);
}

SlowMovingModel slow_model_from_json(std::string_view text) {
  return decode(text, "slow-moving model", [](const json& j) {
    check_header(j, "pacekit.slow_moving_model", kModelVersion);
    return SlowMovingModel(pairs_from_json(j.at("rounds")), j.at("declared_zeta"),
                           j.at("declared_theta"), j.value("name", std::string{}));
  });
}

std::string plan_to_json(const SpendPlan& plan) {
  const json j{{"format", "pacekit.spend_plan"},
               {"version", kPlanVersion},
               {"rho", plan.rho},
               {"mu_hat", plan.mu_hat},
               {"budget", plan.budget},
               {"horizon", plan.horizon},
               {"normalized", plan.normalized},
               {"delta_used", plan.delta_used},
               {"provenance", plan.provenance},
               {"bracket_failure", plan.bracket_failure}};
  return j.dump(2);
}

SpendPlan plan_from_json(std::string_view text) {
  return decode(text, "spend plan", [](const json& j) {
    check_header(j, "pacekit.spend_plan", kPlanVersion);
    SpendPlan plan;
    plan.rho = j.at("rho").get<std::vector<double>>();
    plan.mu_hat = j.at("mu_hat");
    plan.budget = j.at("budget");
    plan.horizon = j.at("horizon");
    plan.normalized = j.value("normalized", false);
    plan.delta_used = j.value("delta_used", 0.0);
    plan.provenance = j.value("provenance", std::string{});
    plan.bracket_failure = j.value("bracket_failure", false);
    require(!plan.rho.empty() && plan.horizon % plan.rho.size() == 0, ErrorCode::parse_error,
            "plan episode count must divide the horizon");
    return plan;
  });
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io_error, "cannot write '" + path + "'");
  out << text;
  require(static_cast<bool>(out), ErrorCode::io_error, "write to '" + path + "' failed");
}

Table1Ranges ranges_from_ini(std::string_view text) {
  const pt::ptree tree = parse_ini(text);
  Table1Ranges r;
  for (const auto& [key, node] : tree) {
    const std::string value = node.data();
    if (node.empty()) {
      if (key == "version") {
        r.version = static_cast<int>(to_unsigned(key, value));
        require(r.version == 1, ErrorCode::invalid_config, "unsupported ranges version");
      } else if (key == "fixed_price") {
        r.fixed_price = to_double(key, value);
      } else if (key == "maxlog_k") {
        r.maxlog_k = static_cast<int>(to_unsigned(key, value));
      } else {
        fail(ErrorCode::invalid_config, "unknown ranges key '" + key + "'");
      }
      continue;
    }
    const auto slot = std::find_if(std::begin(kRangeSlots), std::end(kRangeSlots),
                                   [&](const RangeSlot& s) { return key == s.name; });
    require(slot != std::end(kRangeSlots), ErrorCode::invalid_config,
            "unknown ranges section '" + key + "'");
    ParamRange& range = r.*(slot->member);
    for (const auto& [field, leaf] : node) {
      if (field == "lo") {
        range.lo = to_double(key + ".lo", leaf.data());
      } else if (field == "hi") {
        range.hi = to_double(key + ".hi", leaf.data());
      } else {
        fail(ErrorCode::invalid_config, "unknown field '" + field + "' in [" + key + "]");
      }
    }
    require(range.lo <= range.hi, ErrorCode::invalid_config, "[" + key + "] needs lo <= hi");
  }
  require(r.fixed_price > 0.0, ErrorCode::invalid_config, "fixed_price must be positive");
  require(r.maxlog_k >= 1, ErrorCode::invalid_config, "maxlog_k must be at least 1");
  return r;
}

std::string ranges_to_ini(const Table1Ranges& ranges) {
  std::ostringstream out;
  out << "version = " << ranges.version << '\n'
      << "fixed_price = " << format_double(ranges.fixed_price) << '\n'
      << "maxlog_k = " << ranges.maxlog_k << '\n';
  for (const auto& slot : kRangeSlots) {
    const ParamRange& r = ranges.*(slot.member);
    out << '\n' << '[' << slot.name << "]\nlo = " << format_double(r.lo)
        << "\nhi = " << format_double(r.hi) << '\n';
  }
  return out.str();
}

void apply_setting(ExperimentConfig& c, std::string_view key_view, std::string_view raw) {
  const std::string key(key_view);
  const std::string value = trim(raw);
  auto size = [&] { return static_cast<std::size_t>(to_unsigned(key, value)); };
  auto real = [&] { return to_double(key, value); };

  if (key == "schema_version") {
    c.schema_version = static_cast<int>(to_unsigned(key, value));
    require(c.schema_version == 1, ErrorCode::invalid_config, "unsupported schema_version");
  } else if (key == "dataset") {
    c.dataset = value;
  } else if (key == "model_file") {
    c.model_file = value;
  } else if (key == "ranges_file") {
    c.ranges = ranges_from_ini(read_text_file(value));
  } else if (key == "seed") {
    c.seed = to_unsigned(key, value);
  } else if (key == "horizon" || key == "T") {
    c.horizon = size();
  } else if (key == "episodes" || key == "E") {
    c.episodes = size();
  } else if (key == "samples" || key == "n") {
    c.samples = size();
  } else if (key == "budget_frac") {
    c.budget_frac_lo = c.budget_frac_hi = real();
  } else if (key == "budget_frac_lo") {
    c.budget_frac_lo = real();
  } else if (key == "budget_frac_hi") {
    c.budget_frac_hi = real();
  } else if (key == "budget") {
    if (value.empty() || value == "none") {
      c.budget.reset();
    } else {
      c.budget = real();
    }
  } else if (key == "algorithms") {
    c.algorithms.clear();
    for (const auto& name : split_list(value)) {
      try {
        c.algorithms.push_back(parse_algorithm(name));
      } catch (const Error& e) {
        fail(ErrorCode::invalid_config, e.what());
      }
    }
  } else if (key == "repetitions") {
    c.repetitions = size();
  } else if (key == "kernel") {
    try {
      c.kernel = parse_kernel(value);
    } catch (const Error& e) {
      fail(ErrorCode::invalid_config, e.what());
    }
  } else if (key == "bandwidth_rule") {
    if (value == "scaled") {
      c.bandwidth_rule = BandwidthRule::scaled;
    } else if (value == "unit") {
      c.bandwidth_rule = BandwidthRule::unit;
    } else {
      fail(ErrorCode::invalid_config, "bandwidth_rule must be 'scaled' or 'unit'");
    }
  } else if (key == "bandwidth") {
    if (value.empty() || value == "auto") {
      c.bandwidth.reset();
    } else {
      c.bandwidth = real();
    }
  } else if (key == "eta") {
    c.eta = real();
  } else if (key == "mu_bar") {
    c.mu_bar = real();
  } else if (key == "beta") {
    c.beta = real();
  } else if (key == "drift") {
    require(value == "declining" || value == "dataset", ErrorCode::invalid_config,
            "drift must be 'declining' or 'dataset'");
    c.drift = value;
  } else if (key == "warm_start") {
    if (value == "true" || value == "1") {
      c.warm_start = true;
    } else if (value == "false" || value == "0") {
      c.warm_start = false;
    } else {
      fail(ErrorCode::invalid_config, "warm_start must be true or false");
    }
  } else if (key == "delta_mode") {
    try {
      c.delta_mode = parse_delta_mode(value);
    } catch (const Error& e) {
      fail(ErrorCode::invalid_config, e.what());
    }
  } else if (key == "delta") {
    c.delta_value = real();
  } else if (key == "delta_c") {
    c.delta_c = real();
  } else if (key == "confidence") {
    c.confidence = real();
  } else if (key == "buy_all_seeds") {
    c.buy_all_seeds = size();
  } else if (key == "n_grid") {
    c.n_grid.clear();
    for (const auto& piece : split_list(value)) {
      c.n_grid.push_back(static_cast<std::size_t>(to_unsigned(key, piece)));
    }
  } else if (key == "budget_fracs") {
    c.budget_fracs.clear();
    for (const auto& piece : split_list(value)) c.budget_fracs.push_back(to_double(key, piece));
  } else if (key == "bucket_episodes") {
    c.bucket_episodes = size();
  } else if (key == "output") {
    c.output = value;
  } else if (key == "threads") {
    c.threads = size();
  } else {
    fail(ErrorCode::invalid_config, "unknown setting '" + key + "'");
  }
}

ExperimentConfig experiment_from_ini(std::string_view text) {
  const pt::ptree tree = parse_ini(text);
  ExperimentConfig config;
  for (const auto& [key, node] : tree) {
    require(node.empty(), ErrorCode::invalid_config,
            "experiment files take top-level keys only, found section [" + key + "]");
    apply_setting(config, key, node.data());
  }
  config.validate();
  return config;
}

std::string experiment_to_ini(const ExperimentConfig& c) {
  std::ostringstream out;
  auto join = [](const auto& xs, auto fmt) {
    std::string s;
    for (const auto& x : xs) {
      if (!s.empty()) s += ", ";
      s += fmt(x);
    }
    return s;
  };
  out << "schema_version = " << c.schema_version << '\n'
      << "dataset = " << c.dataset << '\n';
  if (!c.model_file.empty()) out << "model_file = " << c.model_file << '\n';
  out << "seed = " << c.seed << '\n'
      << "horizon = " << c.horizon << '\n'
      << "episodes = " << c.episodes << '\n'
      << "samples = " << c.samples << '\n'
      << "budget_frac_lo = " << format_double(c.budget_frac_lo) << '\n'
      << "budget_frac_hi = " << format_double(c.budget_frac_hi) << '\n';
  if (c.budget) out << "budget = " << format_double(*c.budget) << '\n';
  out << "algorithms = "
      << join(c.algorithms, [](Algorithm a) { return std::string(algorithm_name(a)); }) << '\n'
      << "repetitions = " << c.repetitions << '\n'
      << "kernel = " << kernel_name(c.kernel) << '\n'
      << "bandwidth_rule = " << (c.bandwidth_rule == BandwidthRule::scaled ? "scaled" : "unit")
      << '\n';
  if (c.bandwidth) out << "bandwidth = " << format_double(*c.bandwidth) << '\n';
  out << "eta = " << format_double(c.eta) << '\n'
      << "mu_bar = " << format_double(c.mu_bar) << '\n'
      << "beta = " << format_double(c.beta) << '\n'
      << "warm_start = " << (c.warm_start ? "true" : "false") << '\n'
      << "drift = " << c.drift << '\n'
      << "delta_mode = " << delta_mode_name(c.delta_mode) << '\n'
      << "delta = " << format_double(c.delta_value) << '\n'
      << "delta_c = " << format_double(c.delta_c) << '\n'
      << "confidence = " << format_double(c.confidence) << '\n'
      << "buy_all_seeds = " << c.buy_all_seeds << '\n'
      << "n_grid = " << join(c.n_grid, [](std::size_t n) { return std::to_string(n); }) << '\n'
      << "budget_fracs = " << join(c.budget_fracs, format_double) << '\n'
      << "bucket_episodes = " << c.bucket_episodes << '\n';
  if (!c.output.empty()) out << "output = " << c.output << '\n';
  out << "threads = " << c.threads << '\n';
  return out.str();
}

}  // namespace pacekit
