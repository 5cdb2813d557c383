// mactl: command-line entry point for the multi-agent control experiments.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mactl/config.hpp"
#include "mactl/harness.hpp"

namespace fs = std::filesystem;
using namespace mactl;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int replicas = 1;
};

fs::path output_dir(const Options& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("MACTL_OUT_DIR"); env && *env) return env;
  return "out";
}

std::ofstream open_out(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot open " + p.string() + " for writing");
  return os;
}

void close_out(std::ofstream& os, const fs::path& p) {
  os.close();
  if (!os) throw IoError("write failed for " + p.string());
}

std::pair<std::string, std::string> split_set(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

ExperimentConfig load_config(const Options& o, std::string_view default_scenario, bool require_file) {
  std::string text;
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path);
    if (!is) throw ConfigError("cannot read config file " + o.config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  } else if (require_file) {
    throw ConfigError("run requires --config");
  }
  // --set may supply the scenario, so it is applied before the missing-scenario check.
  std::string scenario(default_scenario);
  for (const auto& s : o.sets)
    if (auto [k, v] = split_set(s); k == "scenario") scenario = v;
  ExperimentConfig cfg = parse_config(text, scenario);
  for (const auto& s : o.sets) {
    auto [k, v] = split_set(s);
    apply_config_value(cfg, k, v);
  }
  if (o.seed) cfg.seed = *o.seed;
  validate_config(cfg);
  return cfg;
}

long demo_length(const Options& o, long fallback) {
  long T = fallback;
  for (const auto& s : o.sets) {
    auto [k, v] = split_set(s);
    if (k != "T") throw ConfigError("config: unknown key '" + k + "' for this demo (only T is accepted)");
    ExperimentConfig scratch;
    apply_config_value(scratch, k, v);
    T = scratch.T;
  }
  if (T <= 0) throw ConfigError("config: T must be positive");
  return T;
}

std::string run_stem(const std::string& command, const ExperimentConfig& c) {
  return command + "_" + c.scenario + "_" + std::string(controller_name(c.controller)) + "_seed" + std::to_string(c.seed);
}

int run_experiments(const std::string& command, const ExperimentConfig& cfg, const Options& o) {
  const auto logs = run_replicas(cfg, o.replicas);
  const fs::path dir = output_dir(o);
  for (const auto& log : logs) {
    const std::string stem = run_stem(command, log.config);
    const fs::path csv = dir / (stem + ".csv"), summary = dir / (stem + ".summary");
    auto os = open_out(csv);
    write_csv(os, log);
    close_out(os, csv);
    auto ss = open_out(summary);
    write_summary(ss, log);
    close_out(ss, summary);
    if (log.diverged_at) std::cerr << "warning: seed " << log.config.seed << " diverged at t=" << *log.diverged_at << '\n';
  }
  for (const auto& log : logs) {
    std::cout << command << " scenario=" << log.config.scenario << " controller=" << controller_name(log.config.controller)
              << " seed=" << log.config.seed << " T=" << log.config.T << " avg_cost=" << format_double(log.average_cost);
    if (log.regret) std::cout << " regret=" << format_double(log.regret->total);
    std::cout << " wall_clock_s=" << log.wall_clock_s << " out=" << (dir / run_stem(command, log.config)).string() << '\n';
  }
  return kOk;
}

int demo_oco(const Options& o) {
  const long T = demo_length(o, 1000);
  if (T % 2 != 0) throw ConfigError("config: demo-oco needs an even T");
  const auto rep = demo_oco_counterexample(T);
  const fs::path dir = output_dir(o);
  const fs::path csv = dir / ("demo_oco_T" + std::to_string(T) + ".csv");
  const fs::path summary = dir / ("demo_oco_T" + std::to_string(T) + ".summary");
  auto os = open_out(csv);
  os << "t,scripted_joint_loss,ogd_avg_regret\n";
  for (long t = 0; t < T; ++t)
    os << t + 1 << ',' << format_double(rep.scripted_joint_loss[static_cast<std::size_t>(t)]) << ','
       << format_double(rep.ogd_regret_curve[static_cast<std::size_t>(t)]) << '\n';
  close_out(os, csv);
  auto ss = open_out(summary);
  ss << "T = " << T << '\n'
     << "scripted_player_loss = " << format_double(rep.scripted_player_loss) << '\n'
     << "scripted_player_best = " << format_double(rep.scripted_player_best) << '\n'
     << "scripted_player_regret = " << format_double(rep.scripted_player_regret) << '\n'
     << "scripted_multiagent_regret = " << format_double(rep.scripted_multiagent_regret) << '\n'
     << "ogd_multiagent_regret = " << format_double(rep.ogd_multiagent_regret) << '\n';
  close_out(ss, summary);
  std::cout << "demo-oco T=" << T << " scripted_player_regret=" << format_double(rep.scripted_player_regret)
            << " scripted_multiagent_regret=" << format_double(rep.scripted_multiagent_regret)
            << " ogd_multiagent_regret=" << format_double(rep.ogd_multiagent_regret) << " out=" << csv.string() << '\n';
  return kOk;
}

int demo_shared(const Options& o) {
  const long T = demo_length(o, 1000);
  const std::vector<std::pair<std::string, SharedControlsStrategy>> strategies = {
      {"zero", [](long, const auto&, const auto&) { return 0.0; }},
      {"one", [](long, const auto&, const auto&) { return 1.0; }},
      {"half", [](long, const auto&, const auto&) { return 0.5; }},
      {"ogd", ogd_shared_controls_strategy()},
  };
  const fs::path dir = output_dir(o);
  const fs::path summary = dir / ("demo_shared_controls_T" + std::to_string(T) + ".summary");
  auto ss = open_out(summary);
  ss << "T = " << T << '\n';
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [name, strategy] : strategies) {
    const auto rep = demo_shared_controls(strategy, T);
    ss << name << "_regret_first = " << format_double(rep.regret_first) << '\n'
       << name << "_regret_second = " << format_double(rep.regret_second) << '\n'
       << name << "_max_regret = " << format_double(rep.max_regret) << '\n';
    worst = std::min(worst, rep.max_regret);
  }
  ss << "min_over_strategies_max_regret = " << format_double(worst) << '\n';
  close_out(ss, summary);
  std::cout << "demo-shared-controls T=" << T << " min_max_regret=" << format_double(worst) << " out=" << summary.string()
            << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent online control experiments"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub, bool experiment) {
    sub->add_option("--set", o.sets, "Override a config key (key=value); repeatable");
    sub->add_option("--out", o.out_dir, "Output directory (default $MACTL_OUT_DIR or ./out)");
    if (experiment) {
      sub->add_option("--config", o.config_path, "Flat key = value config file");
      sub->add_option("--seed", o.seed, "Seed override");
      sub->add_option("--replicas", o.replicas, "Seed-varied replicas run in parallel")->check(CLI::PositiveNumber);
    }
  };
  auto* run = app.add_subcommand("run", "Run the experiment described by --config");
  auto* admire = app.add_subcommand("admire", "ADMIRE aircraft scenario with the default learner settings");
  auto* regret = app.add_subcommand("regret-report", "Run with the offline comparator and regret decomposition");
  auto* oco = app.add_subcommand("demo-oco", "Two-player game where individual regret says nothing about joint regret");
  auto* shared = app.add_subcommand("demo-shared-controls", "Unshared-controls lower-bound construction");
  for (auto* s : {run, admire, regret}) add_common(s, true);
  for (auto* s : {oco, shared}) add_common(s, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return run_experiments("run", load_config(o, {}, true), o);
    if (admire->parsed()) return run_experiments("admire", load_config(o, "admire", false), o);
    if (regret->parsed()) {
      Options with_regret = o;
      with_regret.sets.insert(with_regret.sets.begin(), "regret=true");
      return run_experiments("regret-report", load_config(with_regret, "two_agent", false), o);
    }
    if (oco->parsed()) return demo_oco(o);
    if (shared->parsed()) return demo_shared(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
