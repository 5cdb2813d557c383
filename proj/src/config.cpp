#include "mactl/config.hpp"

#include <charconv>
#include <sstream>

namespace mactl {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty())
    throw ConfigError("config: malformed value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: malformed boolean '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "scenario", "T",       "seed",    "profile", "controller", "lr_num",    "lr_schedule", "h",     "m",
      "Tb",       "failure_agent", "failure_t", "Q_scale", "R_scale", "radius", "gamma_max", "regret"};
  return keys;
}

void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "scenario") {
    if (value != "admire" && value != "two_agent" && value != "random")
      throw ConfigError("config: unknown scenario '" + std::string(value) + "'");
    cfg.scenario = std::string(value);
  } else if (key == "T") {
    cfg.T = parse_number<long>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "profile") {
    try {
      cfg.profile = parse_profile(value);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else if (key == "controller") {
    try {
      cfg.controller = parse_controller(value);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else if (key == "lr_num") {
    cfg.lr_num = parse_number<double>(key, value);
  } else if (key == "lr_schedule") {
    if (value != "inv_t" && value != "inv_sqrt_t" && value != "constant" && value != "anytime")
      throw ConfigError("config: unknown lr_schedule '" + std::string(value) + "'");
    cfg.lr_schedule = std::string(value);
  } else if (key == "h") {
    cfg.h = parse_number<int>(key, value);
  } else if (key == "m") {
    cfg.m = parse_number<int>(key, value);
  } else if (key == "Tb") {
    cfg.Tb = parse_number<long>(key, value);
  } else if (key == "failure_agent") {
    cfg.failure_agent = parse_number<int>(key, value);
  } else if (key == "failure_t") {
    cfg.failure_t = parse_number<long>(key, value);
  } else if (key == "Q_scale") {
    cfg.Q_scale = parse_number<double>(key, value);
  } else if (key == "R_scale") {
    cfg.R_scale = parse_number<double>(key, value);
  } else if (key == "radius") {
    cfg.radius = parse_number<double>(key, value);
  } else if (key == "gamma_max") {
    cfg.gamma_max = parse_number<double>(key, value);
  } else if (key == "regret") {
    cfg.regret = parse_bool(key, value);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, std::string_view default_scenario) {
  ExperimentConfig cfg;
  bool have_scenario = false;
  if (!default_scenario.empty()) {
    apply_config_value(cfg, "scenario", default_scenario);
    have_scenario = true;
  }
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not of the form key = value");
    const auto key = trim(line.substr(0, eq));
    apply_config_value(cfg, key, line.substr(eq + 1));
    if (key == "scenario") have_scenario = true;
  }
  if (!have_scenario) throw ConfigError("config: missing scenario");
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  check(cfg.T > 0, "T must be positive");
  check(cfg.h >= 1 && cfg.h <= 1000, "h must be in [1, 1000]");
  check(cfg.m >= 1 && cfg.m <= 1000, "m must be in [1, 1000]");
  check(cfg.Tb >= -1, "Tb must be nonnegative (or -1 for m + h)");
  check(cfg.failure_agent >= 0, "failure_agent must be nonnegative (0 disables failures)");
  check(cfg.failure_t >= 0, "failure_t must be nonnegative");
  check(cfg.lr_num >= 0.0, "lr_num must be nonnegative");
  check(cfg.Q_scale > 0.0 && cfg.R_scale > 0.0, "Q_scale and R_scale must be positive");
  check(cfg.radius > 0.0, "radius must be positive");
  check(cfg.profile != DisturbanceProfile::custom, "the custom profile cannot be generated from a config");
  check(cfg.gamma_max > 0.0, "gamma_max must be positive");
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "scenario = " << cfg.scenario << '\n'
     << "T = " << cfg.T << '\n'
     << "seed = " << cfg.seed << '\n'
     << "profile = " << profile_name(cfg.profile) << '\n'
     << "controller = " << controller_name(cfg.controller) << '\n'
     << "lr_num = " << format_double(cfg.lr_num) << '\n'
     << "lr_schedule = " << cfg.lr_schedule << '\n'
     << "h = " << cfg.h << '\n'
     << "m = " << cfg.m << '\n'
     << "Tb = " << cfg.Tb << '\n'
     << "failure_agent = " << cfg.failure_agent << '\n'
     << "failure_t = " << cfg.failure_t << '\n'
     << "Q_scale = " << format_double(cfg.Q_scale) << '\n'
     << "R_scale = " << format_double(cfg.R_scale) << '\n'
     << "radius = " << format_double(cfg.radius) << '\n'
     << "gamma_max = " << format_double(cfg.gamma_max) << '\n'
     << "regret = " << (cfg.regret ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace mactl
