#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmaes/engine.hpp"
#include "cmaes/objectives.hpp"
#include "cmaes/termination.hpp"

namespace cmaes {

enum class LogFormat { Csv, Jsonl };

/// Initial mean: an explicit vector, or uniform in [lo, hi]^n per restart leg.
struct MeanSpec {
  std::optional<Vector> values;
  double uniform_lo = 0.0;
  double uniform_hi = 1.0;
};

struct RestartPolicy {
  bool ipop = false;
  double multiplier = 2.0;
  std::size_t max_restarts = 0;
};

struct RunConfig {
  std::string objective = "sphere";
  std::size_t dim = 10;
  std::uint64_t seed = 1;
  double sigma0 = 0.5;
  MeanSpec mean;
  std::optional<std::size_t> lambda;
  /// Defaults to 1e3 n^2.
  std::optional<std::uint64_t> max_evals;
  std::optional<double> stop_fitness = 1e-10;
  RestartPolicy restart;
  TerminationConfig termination;

  // Strategy overrides beyond lambda.
  std::optional<double> alpha_cov;
  std::optional<double> c_m;
  bool active_weights = true;
  bool eager_eigen = false;

  // Box constraints applied through the repair penalty.
  std::optional<std::pair<double, double>> bounds;
  double penalty_alpha = 1.0;

  std::string log_path;  // empty: no log, "-": stdout
  LogFormat log_format = LogFormat::Csv;
  std::size_t log_every = 1;
  std::string checkpoint_path;
  std::size_t checkpoint_every = 1;
  std::string resume_path;
  unsigned threads = 1;

  std::uint64_t effective_max_evals() const;
};

/// Applies one `key=value` setting. Keys mirror the long CLI flags with '_'
/// in place of '-'. Throws Error{ConfigError} naming the field.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Reads `key = value` lines; '#' starts a comment.
void apply_config_file(RunConfig& cfg, const std::string& path);
void apply_config_text(RunConfig& cfg, std::string_view text);

/// Throws Error{ConfigError} on the first invalid field.
void validate(const RunConfig& cfg);

/// One generation of telemetry.
struct LogRecord {
  std::uint64_t leg = 0;
  std::uint64_t generation = 0;
  std::uint64_t evals = 0;
  double best_f = 0.0;
  double median_f = 0.0;
  double sigma = 0.0;
  double cond = 1.0;
  double min_axis = 0.0;
  double max_axis = 0.0;
  std::string stop_flags;

  bool operator==(const LogRecord&) const = default;
};

/// Streams the per-generation log. CSV rows follow
/// generation,evals,best_f,median_f,sigma,cond,min_axis,max_axis,stop_flags
/// after a '#' params line per restart leg; JSONL writes one object per line.
class LogWriter {
 public:
  LogWriter(std::ostream& out, LogFormat format) : out_(&out), format_(format) {}

  void write_header(std::uint64_t leg, const StrategyParams& params);
  void emit_log(const LogRecord& record);

 private:
  std::ostream* out_;
  LogFormat format_;
};

/// Parses rows written by LogWriter in CSV form; '#' lines and the column
/// header are skipped. The leg field counts '#' params lines seen.
std::vector<LogRecord> parse_csv_log(std::string_view text);

/// "%.17g"; inf/nan spelled "inf", "-inf", "nan".
std::string format_double(double v);

enum class RunStatus { Success, BudgetExhausted, NumericalFailure };

struct LegSummary {
  std::size_t index = 0;
  std::size_t lambda = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> stop_reasons;
  double best_fitness = 0.0;
  std::uint64_t evals = 0;
};

struct RunResult {
  Vector best_x;
  double best_fitness = 0.0;
  std::uint64_t evals = 0;
  std::vector<LegSummary> legs;
  std::vector<LogRecord> records;
  RunStatus status = RunStatus::BudgetExhausted;

  /// 0 success, 1 budget exhausted or no restart left, 3 numerical failure.
  int exit_code() const;
};

/// Runs ask -> evaluate -> tell until stop-fitness, budget, or termination
/// with no restarts left. Writes the log to `log` when given, else to
/// cfg.log_path. Throws Error{ConfigError} for invalid configurations.
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);

/// Population size of restart leg `leg`: round(lambda_0 * multiplier^leg).
std::size_t leg_lambda(std::size_t lambda0, double multiplier, std::size_t leg);

}  // namespace cmaes
