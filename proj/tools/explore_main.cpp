#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "explore/explore.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitSafety = 2;
constexpr int kExitTimeout = 3;

int Report(explore_status status, const char *what) {
  std::fprintf(stderr, "explore: %s: %s: %s\n", what,
               explore_status_name(status), explore_last_error());
  return kExitError;
}

std::string ConfigValue(const explore_config *config, const char *key) {
  size_t needed = 0;
  if (explore_config_get(config, key, nullptr, 0, &needed) != EXPLORE_OK) {
    return {};
  }
  std::string out(needed, '\0');
  explore_config_get(config, key, out.data(), out.size(), nullptr);
  out.resize(needed - 1);
  return out;
}

void PrintRun(const explore_report *report, size_t run) {
  explore_run_summary s;
  explore_report_run(report, run, &s);
  const char *status = s.status == EXPLORE_RUN_COMPLETE    ? "complete"
                       : s.status == EXPLORE_RUN_TIMEOUT ? "timeout"
                                                         : "safety_violation";
  char safety[32] = "-";
  if (s.has_safety_ratio) {
    std::snprintf(safety, sizeof(safety), "%.3f", s.safety_ratio);
  }
  std::printf("seed %" PRIu64 " agents %d: %s, exploration time %.1f s, "
              "safety ratio %s, unknown reachable %" PRId64 "\n",
              s.seed, s.agents, status, s.exploration_time, safety,
              s.unknown_reachable);
  for (int a = 0; a < s.agents; ++a) {
    explore_agent_summary m;
    if (explore_report_agent(report, run, a, &m) != EXPLORE_OK) break;
    std::printf("  agent %d: %.1f m at %.2f m/s, %d plans, solve %.1f ms "
                "mean %.1f ms max, %d fallbacks, %d overruns\n",
                m.id, m.flight_distance, m.mean_velocity, m.plans,
                m.solve_ms_mean, m.solve_ms_max, m.fallbacks, m.overruns);
  }
  if (s.status != EXPLORE_RUN_COMPLETE) {
    size_t needed = 0;
    explore_report_run_message(report, run, nullptr, 0, &needed);
    std::string msg(needed, '\0');
    explore_report_run_message(report, run, msg.data(), msg.size(), nullptr);
    std::printf("  %s\n", msg.c_str());
  }
}

// 2 if any run broke the safety invariant, else 3 if any timed out
int ExitCode(const explore_report *report) {
  bool timeout = false;
  for (size_t i = 0; i < explore_report_run_count(report); ++i) {
    explore_run_summary s;
    explore_report_run(report, i, &s);
    if (s.status == EXPLORE_RUN_SAFETY_VIOLATION) return kExitSafety;
    timeout |= s.status == EXPLORE_RUN_TIMEOUT;
  }
  return timeout ? kExitTimeout : 0;
}

int Run(const std::string &config_path, const std::vector<uint64_t> &seed,
        const std::vector<int> &agents, const std::string &out) {
  explore_config *config = nullptr;
  explore_status st = explore_config_load(config_path.c_str(), &config);
  if (st != EXPLORE_OK) return Report(st, "loading the config");
  st = explore_config_validate(config);
  if (st != EXPLORE_OK) {
    explore_config_destroy(config);
    return Report(st, "checking the config");
  }
  const std::string out_dir =
      out.empty() ? ConfigValue(config, "experiment.output_dir") : out;

  explore_report *report = nullptr;
  if (!seed.empty()) {
    const std::string run_dir =
        out.empty() ? out_dir + "/seed_" + std::to_string(seed[0]) +
                          "_agents_" + std::to_string(agents[0])
                    : out;
    st = explore_run(config, seed[0], agents[0], run_dir.c_str(), &report);
    if (st == EXPLORE_OK) {
      PrintRun(report, 0);
      std::printf("artifacts in %s\n", run_dir.c_str());
    }
  } else {
    st = explore_run_experiment(config, out_dir.c_str(), 1, &report);
    if (st == EXPLORE_OK) {
      size_t needed = 0;
      explore_report_table_text(report, nullptr, 0, &needed);
      std::string table(needed, '\0');
      explore_report_table_text(report, table.data(), table.size(), nullptr);
      std::printf("%s", table.c_str());
      std::printf("artifacts in %s\n", out_dir.c_str());
    }
  }
  explore_config_destroy(config);
  if (st != EXPLORE_OK) return Report(st, "running");
  const int code = ExitCode(report);
  explore_report_destroy(report);
  return code;
}

int Plot(const std::string &run_dir) {
  size_t files = 0;
  const explore_status st = explore_emit_plots(run_dir.c_str(), &files);
  if (st != EXPLORE_OK) return Report(st, "plotting");
  std::printf("wrote %zu files to %s/plots\n", files, run_dir.c_str());
  return 0;
}

int Verify(const std::string &suite) {
  int failures = 0;
  auto print = [](const char *name, int pass, const char *detail, void *) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail);
    std::fflush(stdout);
  };
  const explore_status st =
      explore_verify(suite.c_str(), print, nullptr, &failures);
  if (st != EXPLORE_OK) return Report(st, "verifying");
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : kExitError;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"multi-agent exploration simulator"};
  app.require_subcommand(1);

  std::string config_path, out, run_dir, suite;
  std::vector<uint64_t> seed;
  std::vector<int> agents;

  CLI::App *run = app.add_subcommand(
      "run", "run one (seed, agents) pair or the whole experiment");
  run->add_option("--config", config_path, "config file")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option *seed_opt =
      run->add_option("--seed", seed, "world seed")->expected(1);
  CLI::Option *agents_opt = run->add_option("--agents", agents, "agent count")
                                ->expected(1)
                                ->check(CLI::PositiveNumber);
  seed_opt->needs(agents_opt);
  agents_opt->needs(seed_opt);
  run->add_option("--out", out, "output directory");

  CLI::App *plot =
      app.add_subcommand("plot", "write plot data for a run directory");
  plot->add_option("--run", run_dir, "run directory")->required();

  CLI::App *verify = app.add_subcommand("verify", "run a check battery");
  verify->add_option("--suite", suite, "oracles or invariants")
      ->required()
      ->check(CLI::IsMember({"oracles", "invariants"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (*run) return Run(config_path, seed, agents, out);
  if (*plot) return Plot(run_dir);
  return Verify(suite);
}
