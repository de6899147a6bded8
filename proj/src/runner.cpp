#include "cmaes/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "cmaes/errors.hpp"
#include "cmaes/rng.hpp"
#include "cmaes/state_io.hpp"
#include "json.hpp"

namespace cmaes {

namespace {

using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::string_view kCsvColumns =
    "generation,evals,best_f,median_f,sigma,cond,min_axis,max_axis,stop_flags";
constexpr std::string_view kCheckpointFormat = "cmaes-checkpoint";

[[noreturn]] void config_error(std::string_view field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "field '" + std::string(field) + "': " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view field, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  // accept "1e5"-style budgets as long as they are integral
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  char* end = nullptr;
  const std::string s(text);
  const double d = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size() && d >= 0.0 && d < 1.8e19 && std::floor(d) == d)
    return static_cast<std::uint64_t>(d);
  config_error(field, "expected a nonnegative integer, got '" + s + "'");
}

double parse_double(std::string_view field, std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    config_error(field, "expected a number, got '" + s + "'");
  return d;
}

bool parse_bool(std::string_view field, std::string_view text) {
  const std::string_view s = trim(text);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  config_error(field, "expected a boolean, got '" + std::string(s) + "'");
}

Vector parse_list(std::string_view field, std::string_view text) {
  Vector out;
  std::string_view rest = trim(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(field, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) config_error(field, "expected a comma-separated list of numbers");
  return out;
}

std::pair<double, double> parse_pair(std::string_view field, std::string_view text) {
  const Vector v = parse_list(field, text);
  if (v.size() != 2) config_error(field, "expected two numbers 'a,b'");
  return {v[0], v[1]};
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

json encode_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json params_flat(const StrategyParams& p) {
  json j;
  j["n"] = p.n;
  j["lambda"] = p.lambda;
  j["mu"] = p.mu;
  j["mu_eff"] = encode_number(p.mu_eff);
  j["mu_eff_minus"] = encode_number(p.mu_eff_minus);
  j["c_m"] = encode_number(p.c_m);
  j["c_sigma"] = encode_number(p.c_sigma);
  j["d_sigma"] = encode_number(p.d_sigma);
  j["c_c"] = encode_number(p.c_c);
  j["c_1"] = encode_number(p.c_1);
  j["c_mu"] = encode_number(p.c_mu);
  j["chi_n"] = encode_number(p.chi_n);
  json w = json::array();
  for (double x : p.weights) w.push_back(encode_number(x));
  j["weights"] = w;
  return j;
}

Objective build_objective(const RunConfig& cfg) {
  Objective obj;
  try {
    obj = make_objective(cfg.objective, cfg.dim);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DimensionTooSmall) config_error("dim", e.what());
    config_error("objective", e.what());
  }
  if (cfg.bounds) {
    BoxBounds box{Vector(cfg.dim, cfg.bounds->first), Vector(cfg.dim, cfg.bounds->second)};
    obj = box_repair_penalty_wrap(std::move(obj), std::move(box), cfg.penalty_alpha);
  }
  return obj;
}

void evaluate(Population& pop, const Objective& f, unsigned threads) {
  if (threads <= 1 || pop.size() < 2) {
    for (Candidate& c : pop.candidates) c.fitness = f(c.x);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < pop.size(); i = next++) pop[i].fitness = f(pop[i].x);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StrategyParams leg_params(const RunConfig& cfg, std::size_t lambda) {
  ParamOverrides o;
  o.lambda = lambda;
  o.alpha_cov = cfg.alpha_cov;
  o.c_m = cfg.c_m;
  o.positive_weights_only = !cfg.active_weights;
  return make_params(cfg.dim, o);
}

Vector initial_mean(const RunConfig& cfg, std::uint64_t leg_seed) {
  if (cfg.mean.values) return *cfg.mean.values;
  Xoshiro256 gen(derive_seed(leg_seed, 1));
  Vector m(cfg.dim);
  for (double& x : m) x = cfg.mean.uniform_lo + (cfg.mean.uniform_hi - cfg.mean.uniform_lo) * gen.uniform();
  return m;
}

json leg_json(const LegSummary& s) {
  json j;
  j["index"] = s.index;
  j["lambda"] = s.lambda;
  j["seed"] = s.seed;
  j["stop_reasons"] = s.stop_reasons;
  j["best_fitness"] = encode_number(s.best_fitness);
  j["evals"] = s.evals;
  return j;
}

LegSummary leg_from(const json& j) {
  LegSummary s;
  s.index = j.at("index").get<std::size_t>();
  s.lambda = j.at("lambda").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.stop_reasons = j.at("stop_reasons").get<std::vector<std::string>>();
  s.best_fitness = j.at("best_fitness").is_null() ? kInf : j.at("best_fitness").get<double>();
  s.evals = j.at("evals").get<std::uint64_t>();
  return s;
}

// Everything needed to continue a run where a checkpoint left off.
struct Checkpoint {
  std::size_t leg = 0;
  bool leg_done = false;
  bool success = false;
  RunResult totals;
  LegSummary current;
  std::optional<EngineState> engine;
  std::optional<History> history;
};

void save_checkpoint(const RunConfig& cfg, const Checkpoint& cp) {
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = 1;
  j["objective"] = cfg.objective;
  j["dim"] = cfg.dim;
  j["seed"] = cfg.seed;
  j["leg"] = cp.leg;
  j["leg_done"] = cp.leg_done;
  j["success"] = cp.success;
  j["total_evals"] = cp.totals.evals;
  j["best_fitness"] = encode_number(cp.totals.best_fitness);
  json bx = json::array();
  for (double x : cp.totals.best_x) bx.push_back(x);
  j["best_x"] = bx;
  json legs = json::array();
  for (const auto& l : cp.totals.legs) legs.push_back(leg_json(l));
  j["legs"] = legs;
  j["current_leg"] = leg_json(cp.current);
  j["engine"] = json::parse(serialize_state(*cp.engine));
  j["history"] = json::parse(serialize_history(*cp.history));
  write_file_atomic(cfg.checkpoint_path, j.dump());
}

Checkpoint load_checkpoint(const RunConfig& cfg) {
  const std::string text = read_file(cfg.resume_path);
  try {
    const json j = json::parse(text);
    if (j.at("format") != kCheckpointFormat) config_error("resume", "not a checkpoint file");
    if (j.at("objective").get<std::string>() != cfg.objective || j.at("dim").get<std::size_t>() != cfg.dim ||
        j.at("seed").get<std::uint64_t>() != cfg.seed) {
      config_error("resume", "checkpoint was written for a different objective, dim or seed");
    }
    Checkpoint cp;
    cp.leg = j.at("leg").get<std::size_t>();
    cp.leg_done = j.at("leg_done").get<bool>();
    cp.success = j.at("success").get<bool>();
    cp.totals.evals = j.at("total_evals").get<std::uint64_t>();
    cp.totals.best_fitness = j.at("best_fitness").is_null() ? kInf : j.at("best_fitness").get<double>();
    cp.totals.best_x = j.at("best_x").get<Vector>();
    for (const auto& l : j.at("legs")) cp.totals.legs.push_back(leg_from(l));
    cp.current = leg_from(j.at("current_leg"));
    cp.engine = deserialize_state(j.at("engine").dump());
    cp.history = deserialize_history(j.at("history").dump());
    return cp;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::IoError, "malformed checkpoint '" + cfg.resume_path + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t RunConfig::effective_max_evals() const {
  return max_evals.value_or(static_cast<std::uint64_t>(1000) * dim * dim);
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  const std::string k(key);
  if (k == "objective") {
    cfg.objective = std::string(trim(value));
  } else if (k == "dim") {
    cfg.dim = parse_u64(k, value);
  } else if (k == "seed") {
    cfg.seed = parse_u64(k, value);
  } else if (k == "sigma0") {
    cfg.sigma0 = parse_double(k, value);
  } else if (k == "mean") {
    const std::string_view v = trim(value);
    if (v.starts_with("uniform:")) {
      const auto [lo, hi] = parse_pair(k, v.substr(8));
      cfg.mean = MeanSpec{std::nullopt, lo, hi};
    } else {
      cfg.mean.values = parse_list(k, v);
    }
  } else if (k == "lambda") {
    cfg.lambda = parse_u64(k, value);
  } else if (k == "max_evals") {
    cfg.max_evals = parse_u64(k, value);
  } else if (k == "stop_fitness") {
    if (trim(value) == "none") cfg.stop_fitness.reset();
    else cfg.stop_fitness = parse_double(k, value);
  } else if (k == "restarts") {
    cfg.restart.max_restarts = parse_u64(k, value);
    cfg.restart.ipop = cfg.restart.max_restarts > 0;
  } else if (k == "restart_mult") {
    cfg.restart.multiplier = parse_double(k, value);
  } else if (k == "log") {
    cfg.log_path = std::string(trim(value));
  } else if (k == "log_format") {
    const std::string_view v = trim(value);
    if (v == "csv") cfg.log_format = LogFormat::Csv;
    else if (v == "jsonl") cfg.log_format = LogFormat::Jsonl;
    else config_error(k, "expected 'csv' or 'jsonl', got '" + std::string(v) + "'");
  } else if (k == "log_every") {
    cfg.log_every = parse_u64(k, value);
  } else if (k == "checkpoint") {
    cfg.checkpoint_path = std::string(trim(value));
  } else if (k == "checkpoint_every") {
    cfg.checkpoint_every = parse_u64(k, value);
  } else if (k == "resume") {
    cfg.resume_path = std::string(trim(value));
  } else if (k == "threads") {
    cfg.threads = static_cast<unsigned>(parse_u64(k, value));
  } else if (k == "tol_fun") {
    cfg.termination.tol_fun = parse_double(k, value);
  } else if (k == "tol_x") {
    cfg.termination.tol_x_rel = parse_double(k, value);
  } else if (k == "max_cond") {
    cfg.termination.max_cond = parse_double(k, value);
  } else if (k == "tol_x_up") {
    cfg.termination.tol_x_up = parse_double(k, value);
  } else if (k == "disable") {
    std::string_view rest = trim(value);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view name = trim(rest.substr(0, comma));
      const auto c = criterion_from_string(name);
      if (!c) config_error(k, "unknown termination criterion '" + std::string(name) + "'");
      cfg.termination.set_enabled(*c, false);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  } else if (k == "alpha_cov") {
    cfg.alpha_cov = parse_double(k, value);
  } else if (k == "c_m") {
    cfg.c_m = parse_double(k, value);
  } else if (k == "active") {
    cfg.active_weights = parse_bool(k, value);
  } else if (k == "eager_eigen") {
    cfg.eager_eigen = parse_bool(k, value);
  } else if (k == "bounds") {
    cfg.bounds = parse_pair(k, value);
  } else if (k == "penalty_alpha") {
    cfg.penalty_alpha = parse_double(k, value);
  } else {
    config_error(k, "unknown setting");
  }
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError,
                  "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    config_error("config", e.what());
  }
  apply_config_text(cfg, text);
}

void validate(const RunConfig& cfg) {
  if (cfg.dim < 1) config_error("dim", "must be at least 1");
  if (!(cfg.sigma0 > 0.0) || !std::isfinite(cfg.sigma0)) config_error("sigma0", "must be positive and finite");
  if (cfg.mean.values) {
    if (cfg.mean.values->size() != cfg.dim)
      config_error("mean", "has " + std::to_string(cfg.mean.values->size()) + " entries, dim is " +
                               std::to_string(cfg.dim));
    for (double x : *cfg.mean.values)
      if (!std::isfinite(x)) config_error("mean", "entries must be finite");
  } else if (!(cfg.mean.uniform_lo < cfg.mean.uniform_hi)) {
    config_error("mean", "uniform box needs a < b");
  }
  const std::size_t lambda = cfg.lambda.value_or(default_lambda(cfg.dim));
  if (lambda < 2) config_error("lambda", "must be at least 2");
  if (cfg.effective_max_evals() < lambda) config_error("max_evals", "must be at least lambda");
  if (!(cfg.restart.multiplier > 1.0)) config_error("restart_mult", "must be greater than 1");
  if (cfg.log_every < 1) config_error("log_every", "must be at least 1");
  if (cfg.checkpoint_every < 1) config_error("checkpoint_every", "must be at least 1");
  if (cfg.threads < 1) config_error("threads", "must be at least 1");
  if (!(cfg.termination.tol_fun > 0.0)) config_error("tol_fun", "must be positive");
  if (!(cfg.termination.tol_x_rel > 0.0)) config_error("tol_x", "must be positive");
  if (!(cfg.termination.max_cond > 0.0)) config_error("max_cond", "must be positive");
  if (!(cfg.termination.tol_x_up > 0.0)) config_error("tol_x_up", "must be positive");
  if (cfg.alpha_cov && !(*cfg.alpha_cov > 0.0)) config_error("alpha_cov", "must be positive");
  if (cfg.c_m && !(*cfg.c_m > 0.0 && *cfg.c_m <= 1.0)) config_error("c_m", "must be in (0, 1]");
  if (cfg.bounds && !(cfg.bounds->first < cfg.bounds->second)) config_error("bounds", "needs a < b");
  if (!(cfg.penalty_alpha > 0.0)) config_error("penalty_alpha", "must be positive");
  if (!cfg.checkpoint_path.empty() && cfg.checkpoint_path == cfg.resume_path) {
    // allowed: resume and keep checkpointing to the same file
  }
  build_objective(cfg);
}

void LogWriter::write_header(std::uint64_t leg, const StrategyParams& params) {
  std::ostream& out = *out_;
  if (format_ == LogFormat::Jsonl) {
    json j;
    j["leg"] = leg;
    j["params"] = params_flat(params);
    out << j.dump() << '\n';
  } else {
    out << "# leg=" << leg << " n=" << params.n << " lambda=" << params.lambda << " mu=" << params.mu
        << " mu_eff=" << format_double(params.mu_eff)
        << " mu_eff_minus=" << format_double(params.mu_eff_minus)
        << " c_m=" << format_double(params.c_m) << " c_sigma=" << format_double(params.c_sigma)
        << " d_sigma=" << format_double(params.d_sigma) << " c_c=" << format_double(params.c_c)
        << " c_1=" << format_double(params.c_1) << " c_mu=" << format_double(params.c_mu)
        << " chi_n=" << format_double(params.chi_n) << " weights=[";
    for (std::size_t i = 0; i < params.weights.size(); ++i)
      out << (i ? "," : "") << format_double(params.weights[i]);
    out << "]\n" << kCsvColumns << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed to write log header");
}

void LogWriter::emit_log(const LogRecord& r) {
  std::ostream& out = *out_;
  if (format_ == LogFormat::Jsonl) {
    json j;
    j["generation"] = r.generation;
    j["evals"] = r.evals;
    j["best_f"] = encode_number(r.best_f);
    j["median_f"] = encode_number(r.median_f);
    j["sigma"] = encode_number(r.sigma);
    j["cond"] = encode_number(r.cond);
    j["min_axis"] = encode_number(r.min_axis);
    j["max_axis"] = encode_number(r.max_axis);
    j["stop_flags"] = r.stop_flags;
    out << j.dump() << '\n';
  } else {
    out << r.generation << ',' << r.evals << ',' << format_double(r.best_f) << ','
        << format_double(r.median_f) << ',' << format_double(r.sigma) << ','
        << format_double(r.cond) << ',' << format_double(r.min_axis) << ','
        << format_double(r.max_axis) << ',' << csv_quote(r.stop_flags) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed to write log record");
}

std::vector<LogRecord> parse_csv_log(std::string_view text) {
  std::vector<LogRecord> out;
  std::uint64_t leg = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (seen_header) ++leg;
      seen_header = true;
      continue;
    }
    if (line.starts_with("generation,")) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(ErrorCode::IoError, "log row has " + std::to_string(f.size()) + " fields");
    LogRecord r;
    r.leg = leg;
    r.generation = std::stoull(f[0]);
    r.evals = std::stoull(f[1]);
    r.best_f = std::strtod(f[2].c_str(), nullptr);
    r.median_f = std::strtod(f[3].c_str(), nullptr);
    r.sigma = std::strtod(f[4].c_str(), nullptr);
    r.cond = std::strtod(f[5].c_str(), nullptr);
    r.min_axis = std::strtod(f[6].c_str(), nullptr);
    r.max_axis = std::strtod(f[7].c_str(), nullptr);
    r.stop_flags = f[8];
    out.push_back(std::move(r));
  }
  return out;
}

int RunResult::exit_code() const {
  switch (status) {
    case RunStatus::Success:
      return 0;
    case RunStatus::BudgetExhausted:
      return 1;
    case RunStatus::NumericalFailure:
      return 3;
  }
  return 1;
}

std::size_t leg_lambda(std::size_t lambda0, double multiplier, std::size_t leg) {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(lambda0) * std::pow(multiplier, static_cast<double>(leg))));
}

RunResult run(const RunConfig& cfg, std::ostream* log) {
  validate(cfg);
  const Objective objective = build_objective(cfg);

  std::ofstream log_file;
  if (!log && !cfg.log_path.empty()) {
    if (cfg.log_path == "-") {
      log = &std::cout;
    } else {
      log_file.open(cfg.log_path, std::ios::trunc);
      if (!log_file) throw Error(ErrorCode::IoError, "cannot open log '" + cfg.log_path + "'");
      log = &log_file;
    }
  }
  std::optional<LogWriter> writer;
  if (log) writer.emplace(*log, cfg.log_format);

  const std::uint64_t max_evals = cfg.effective_max_evals();
  const std::size_t lambda0 = cfg.lambda.value_or(default_lambda(cfg.dim));
  EngineOptions engine_options;
  engine_options.eager_eigen = cfg.eager_eigen;

  RunResult result;
  result.best_fitness = kInf;
  std::size_t first_leg = 0;
  std::optional<Checkpoint> resume;
  if (!cfg.resume_path.empty()) {
    resume = load_checkpoint(cfg);
    result.evals = resume->totals.evals;
    result.best_fitness = resume->totals.best_fitness;
    result.best_x = resume->totals.best_x;
    result.legs = resume->totals.legs;
    first_leg = resume->leg;
    if (resume->success) {
      result.legs.push_back(resume->current);
      result.status = RunStatus::Success;
      return result;
    }
    if (resume->leg_done) {
      result.legs.push_back(resume->current);
      if (!cfg.restart.ipop || first_leg >= cfg.restart.max_restarts) {
        result.status = RunStatus::BudgetExhausted;
        return result;
      }
      ++first_leg;
      resume.reset();
    }
  }

  bool success = false;
  bool budget = false;
  bool numerical = false;

  for (std::size_t leg = first_leg;; ++leg) {
    const std::size_t lambda = leg_lambda(lambda0, cfg.restart.multiplier, leg);
    const std::uint64_t leg_seed = derive_seed(cfg.seed, leg);

    std::optional<Engine> engine;
    std::optional<History> history;
    LegSummary summary{leg, lambda, leg_seed, {}, kInf, 0};
    if (resume) {
      engine.emplace(Engine::restore(std::move(*resume->engine), engine_options));
      history.emplace(std::move(*resume->history));
      summary = resume->current;
      resume.reset();
    } else {
      if (result.evals + lambda > max_evals) {
        budget = true;
        break;
      }
      engine.emplace(leg_params(cfg, lambda), initial_mean(cfg, leg_seed), cfg.sigma0, leg_seed,
                     engine_options);
      const auto& sc = engine->state().eig.scales;
      history.emplace(cfg.dim, lambda, cfg.sigma0, cfg.sigma0 * *std::max_element(sc.begin(), sc.end()));
    }
    if (writer) writer->write_header(leg, engine->params());

    bool leg_numerical = false;
    while (true) {
      Population pop = engine->ask();
      evaluate(pop, objective, cfg.threads);
      GenerationReport rep;
      try {
        rep = engine->tell(pop);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ConditionError && e.code() != ErrorCode::StepSizeOverflow) throw;
        summary.stop_reasons.emplace_back(to_string(e.code()));
        leg_numerical = true;
        break;
      }
      result.evals += lambda;
      summary.evals += lambda;
      history->record(rep);
      if (std::isfinite(rep.best_fitness) && rep.best_fitness < summary.best_fitness)
        summary.best_fitness = rep.best_fitness;
      if (std::isfinite(rep.best_fitness) && rep.best_fitness < result.best_fitness) {
        result.best_fitness = rep.best_fitness;
        result.best_x = rep.best_x;
      }

      std::vector<std::string> reasons;
      const bool hit = cfg.stop_fitness && rep.best_fitness <= *cfg.stop_fitness;
      if (hit) reasons.emplace_back("StopFitness");
      for (Criterion c : check(engine->state(), *history, cfg.termination))
        reasons.emplace_back(to_string(c));
      const bool out_of_budget = result.evals + lambda > max_evals;
      if (out_of_budget) reasons.emplace_back("MaxEvals");

      std::string flags;
      for (const auto& r : reasons) flags += (flags.empty() ? "" : ",") + r;
      LogRecord rec{leg,          rep.generation, result.evals, rep.best_fitness, rep.median_fitness,
                    rep.sigma,    rep.condition,  rep.min_axis, rep.max_axis,     flags};
      if (writer && (rep.generation % cfg.log_every == 0 || !reasons.empty())) writer->emit_log(rec);
      result.records.push_back(std::move(rec));

      if (!reasons.empty()) summary.stop_reasons = reasons;
      if (!cfg.checkpoint_path.empty() &&
          ((rep.generation + 1) % cfg.checkpoint_every == 0 || !reasons.empty())) {
        Checkpoint cp;
        cp.leg = leg;
        cp.leg_done = !reasons.empty() && !(reasons.size() == 1 && out_of_budget);
        cp.success = hit;
        cp.totals.evals = result.evals;
        cp.totals.best_fitness = result.best_fitness;
        cp.totals.best_x = result.best_x;
        cp.totals.legs = result.legs;
        cp.current = summary;
        cp.engine = engine->state();
        cp.history = *history;
        save_checkpoint(cfg, cp);
      }

      if (!reasons.empty()) {
        success = hit;
        budget = out_of_budget;
        break;
      }
    }
    result.legs.push_back(summary);
    numerical = leg_numerical;
    if (success || budget) break;
    if (!cfg.restart.ipop || leg >= cfg.restart.max_restarts) break;
  }

  if (success) result.status = RunStatus::Success;
  else if (numerical) result.status = RunStatus::NumericalFailure;
  else result.status = RunStatus::BudgetExhausted;
  if (log) log->flush();
  return result;
}

}  // namespace cmaes
