// Command-line runner. Links only the C interface.
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cmaes/cmaes.h"

namespace {

constexpr int kExitConfig = 2;

struct Flag {
  const char* key;
  const char* help;
  std::string value;
  CLI::Option* option = nullptr;
};

int fail(cmaes_status status, const char* context) {
  std::fprintf(stderr, "cmaes: %s: %s (%s)\n", context, cmaes_last_error(), cmaes_status_name(status));
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMA-ES benchmark runner"};
  app.set_version_flag("--version", "cmaes 1.0");

  std::vector<Flag> flags = {
      {"objective", "Objective name (sphere, elli, cigar, tablet, rosenbrock)", {}},
      {"dim", "Search space dimension", {}},
      {"seed", "Random seed", {}},
      {"sigma0", "Initial step-size", {}},
      {"mean", "Initial mean: comma-separated values or uniform:a,b", {}},
      {"lambda", "Population size of the first leg", {}},
      {"max-evals", "Evaluation budget (default 1e3*n^2)", {}},
      {"stop-fitness", "Target fitness, or 'none'", {}},
      {"restarts", "Maximum number of IPOP restarts", {}},
      {"restart-mult", "Population multiplier per restart", {}},
      {"log", "Log file, or '-' for stdout", {}},
      {"log-format", "csv or jsonl", {}},
      {"log-every", "Log every k-th generation", {}},
      {"checkpoint", "Checkpoint file", {}},
      {"checkpoint-every", "Checkpoint every k-th generation", {}},
      {"resume", "Resume from a checkpoint file", {}},
      {"threads", "Worker threads for fitness evaluation", {}},
      {"bounds", "Box constraint a,b applied to every coordinate", {}},
      {"disable", "Comma-separated termination criteria to switch off", {}},
      {"tol-fun", "TolFun threshold", {}},
      {"tol-x", "TolX threshold relative to sigma0", {}},
      {"eager-eigen", "Decompose C after every generation (true/false)", {}},
      {"active", "Use negative recombination weights (true/false)", {}},
  };
  for (Flag& f : flags) f.option = app.add_option(std::string("--") + f.key, f.value, f.help);

  std::string config_path;
  std::string result_path;
  app.add_option("--config", config_path, "File of key = value lines; flags override it");
  app.add_option("--result", result_path, "Write a JSON result summary to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  cmaes_config* config = nullptr;
  if (cmaes_status s = cmaes_config_create(&config); s != CMAES_OK) return fail(s, "config");
  std::unique_ptr<cmaes_config, void (*)(cmaes_config*)> config_guard(config, cmaes_config_destroy);

  if (!config_path.empty()) {
    if (cmaes_status s = cmaes_config_load_file(config, config_path.c_str()); s != CMAES_OK)
      return fail(s, "config");
  }
  for (const Flag& f : flags) {
    if (f.option->count() == 0) continue;
    if (cmaes_status s = cmaes_config_set(config, f.key, f.value.c_str()); s != CMAES_OK)
      return fail(s, "config");
  }
  if (cmaes_status s = cmaes_config_validate(config); s != CMAES_OK) return fail(s, "config");

  cmaes_result* result = nullptr;
  if (cmaes_status s = cmaes_run(config, &result); s != CMAES_OK) {
    std::fprintf(stderr, "cmaes: run failed: %s (%s)\n", cmaes_last_error(), cmaes_status_name(s));
    return s == CMAES_ERR_CONDITION || s == CMAES_ERR_STEP_SIZE_OVERFLOW ? 3 : kExitConfig;
  }
  std::unique_ptr<cmaes_result, void (*)(cmaes_result*)> result_guard(result, cmaes_result_destroy);

  std::size_t size = 0;
  cmaes_result_json(result, nullptr, 0, &size);
  std::string summary(size, '\0');
  cmaes_result_json(result, summary.data(), summary.size(), &size);
  summary.resize(size - 1);

  if (!result_path.empty()) {
    std::FILE* out = std::fopen(result_path.c_str(), "w");
    if (!out) {
      std::fprintf(stderr, "cmaes: cannot write result file '%s'\n", result_path.c_str());
      return kExitConfig;
    }
    std::fprintf(out, "%s\n", summary.c_str());
    std::fclose(out);
  }
  std::fprintf(stderr, "%s\n", summary.c_str());
  return cmaes_result_exit_code(result);
}
