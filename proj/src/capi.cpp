#include "cmaes/cmaes.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <optional>
#include <string>

#include "cmaes/engine.hpp"
#include "cmaes/errors.hpp"
#include "cmaes/objectives.hpp"
#include "cmaes/runner.hpp"
#include "cmaes/state_io.hpp"
#include "cmaes/termination.hpp"
#include "json.hpp"

struct cmaes_engine {
  cmaes::Engine engine;
  cmaes::History history;
  std::optional<cmaes::Population> pending;
};

struct cmaes_config {
  cmaes::RunConfig config;
};

struct cmaes_result {
  cmaes::RunResult result;
  std::size_t dim = 0;
};

namespace {

thread_local std::string last_error;

cmaes_status status_of(cmaes::ErrorCode code) {
  return static_cast<cmaes_status>(static_cast<int>(code) + 1);
}

template <typename F>
cmaes_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return CMAES_OK;
  } catch (const cmaes::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CMAES_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CMAES_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw cmaes::Error(cmaes::ErrorCode::InvalidArgument, what);
}

void copy_out(const std::string& s, char* buffer, std::size_t size, std::size_t* required) {
  if (required) *required = s.size() + 1;
  if (!buffer || size == 0) return;
  const std::size_t n = std::min(size - 1, s.size());
  std::memcpy(buffer, s.data(), n);
  buffer[n] = '\0';
}

using json = nlohmann::ordered_json;

json number(double v) {
  if (std::isfinite(v)) return v;
  return cmaes::format_double(v);
}

}  // namespace

extern "C" {

const char* cmaes_last_error(void) { return last_error.c_str(); }

const char* cmaes_status_name(cmaes_status status) {
  if (status == CMAES_OK) return "Ok";
  if (status == CMAES_ERR_INTERNAL) return "Internal";
  if (status >= CMAES_ERR_NON_FINITE && status <= CMAES_ERR_IO)
    return cmaes::to_string(static_cast<cmaes::ErrorCode>(status - 1)).data();
  return "Unknown";
}

cmaes_status cmaes_engine_create(size_t n, size_t lambda, const double* mean, double sigma,
                                 uint64_t seed, cmaes_engine** out) {
  return guard([&] {
    require(out != nullptr && mean != nullptr, "null argument");
    cmaes::ParamOverrides o;
    if (lambda != 0) o.lambda = lambda;
    auto params = cmaes::make_params(n, o);
    const std::size_t lam = params.lambda;
    cmaes::Engine engine(std::move(params), cmaes::Vector(mean, mean + n), sigma, seed);
    *out = new cmaes_engine{std::move(engine), cmaes::History(n, lam, sigma), std::nullopt};
  });
}

void cmaes_engine_destroy(cmaes_engine* engine) { delete engine; }

size_t cmaes_engine_dim(const cmaes_engine* e) { return e ? e->engine.params().n : 0; }
size_t cmaes_engine_lambda(const cmaes_engine* e) { return e ? e->engine.params().lambda : 0; }
uint64_t cmaes_engine_generation(const cmaes_engine* e) { return e ? e->engine.state().generation : 0; }
double cmaes_engine_sigma(const cmaes_engine* e) { return e ? e->engine.state().sigma : 0.0; }

cmaes_status cmaes_engine_mean(const cmaes_engine* e, double* out) {
  return guard([&] {
    require(e != nullptr && out != nullptr, "null argument");
    const auto& m = e->engine.state().mean;
    std::copy(m.begin(), m.end(), out);
  });
}

cmaes_status cmaes_engine_ask(cmaes_engine* e, double* points) {
  return guard([&] {
    require(e != nullptr && points != nullptr, "null argument");
    cmaes::Population pop = e->engine.ask();
    const std::size_t n = e->engine.params().n;
    for (std::size_t k = 0; k < pop.size(); ++k) std::copy(pop[k].x.begin(), pop[k].x.end(), points + k * n);
    e->pending = std::move(pop);
  });
}

cmaes_status cmaes_engine_tell(cmaes_engine* e, const double* fitnesses) {
  return guard([&] {
    require(e != nullptr && fitnesses != nullptr, "null argument");
    if (!e->pending) throw cmaes::Error(cmaes::ErrorCode::StaleBatch, "tell without a preceding ask");
    cmaes::Population pop = *e->pending;
    for (std::size_t k = 0; k < pop.size(); ++k) pop[k].fitness = fitnesses[k];
    const cmaes::GenerationReport report = e->engine.tell(pop);
    e->pending.reset();
    e->history.record(report);
  });
}

cmaes_status cmaes_engine_check_termination(const cmaes_engine* e, char* buffer, size_t size,
                                            size_t* required) {
  return guard([&] {
    require(e != nullptr, "null argument");
    const auto fired = cmaes::check(e->engine.state(), e->history, cmaes::TerminationConfig{});
    copy_out(cmaes::join_criteria(fired), buffer, size, required);
  });
}

cmaes_status cmaes_engine_save(const cmaes_engine* e, const char* path) {
  return guard([&] {
    require(e != nullptr && path != nullptr, "null argument");
    json j;
    j["engine"] = json::parse(cmaes::serialize_state(e->engine.state()));
    j["history"] = json::parse(cmaes::serialize_history(e->history));
    cmaes::write_file_atomic(path, j.dump());
  });
}

cmaes_status cmaes_engine_load(const char* path, cmaes_engine** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    json j;
    try {
      j = json::parse(cmaes::read_file(path));
    } catch (const nlohmann::json::exception& ex) {
      throw cmaes::Error(cmaes::ErrorCode::IoError, std::string("malformed engine file: ") + ex.what());
    }
    if (!j.contains("engine") || !j.contains("history"))
      throw cmaes::Error(cmaes::ErrorCode::IoError, "engine file lacks 'engine' or 'history'");
    auto state = cmaes::deserialize_state(j["engine"].dump());
    auto history = cmaes::deserialize_history(j["history"].dump());
    *out = new cmaes_engine{cmaes::Engine::restore(std::move(state)), std::move(history), std::nullopt};
  });
}

cmaes_status cmaes_objective_eval(const char* name, size_t n, const double* x, double* out) {
  return guard([&] {
    require(name != nullptr && x != nullptr && out != nullptr, "null argument");
    const auto obj = cmaes::make_objective(name, n);
    *out = obj(std::span<const double>(x, n));
  });
}

cmaes_status cmaes_config_create(cmaes_config** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = new cmaes_config{};
  });
}

void cmaes_config_destroy(cmaes_config* config) { delete config; }

cmaes_status cmaes_config_set(cmaes_config* config, const char* key, const char* value) {
  return guard([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    std::string k(key);
    std::replace(k.begin(), k.end(), '-', '_');
    cmaes::apply_setting(config->config, k, value);
  });
}

cmaes_status cmaes_config_load_file(cmaes_config* config, const char* path) {
  return guard([&] {
    require(config != nullptr && path != nullptr, "null argument");
    cmaes::apply_config_file(config->config, path);
  });
}

cmaes_status cmaes_config_validate(const cmaes_config* config) {
  return guard([&] {
    require(config != nullptr, "null argument");
    cmaes::validate(config->config);
  });
}

cmaes_status cmaes_run(const cmaes_config* config, cmaes_result** out) {
  return guard([&] {
    require(config != nullptr && out != nullptr, "null argument");
    auto result = std::make_unique<cmaes_result>();
    result->result = cmaes::run(config->config);
    result->dim = config->config.dim;
    *out = result.release();
  });
}

void cmaes_result_destroy(cmaes_result* result) { delete result; }

double cmaes_result_best_fitness(const cmaes_result* r) { return r ? r->result.best_fitness : 0.0; }
uint64_t cmaes_result_evals(const cmaes_result* r) { return r ? r->result.evals : 0; }
size_t cmaes_result_dim(const cmaes_result* r) { return r ? r->dim : 0; }
int cmaes_result_exit_code(const cmaes_result* r) { return r ? r->result.exit_code() : 1; }
size_t cmaes_result_leg_count(const cmaes_result* r) { return r ? r->result.legs.size() : 0; }

cmaes_status cmaes_result_best_x(const cmaes_result* r, double* out) {
  return guard([&] {
    require(r != nullptr && out != nullptr, "null argument");
    std::copy(r->result.best_x.begin(), r->result.best_x.end(), out);
  });
}

cmaes_status cmaes_result_json(const cmaes_result* r, char* buffer, size_t size, size_t* required) {
  return guard([&] {
    require(r != nullptr, "null argument");
    const auto& res = r->result;
    json j;
    j["exit_code"] = res.exit_code();
    j["best_fitness"] = number(res.best_fitness);
    json x = json::array();
    for (double v : res.best_x) x.push_back(v);
    j["best_x"] = x;
    j["evals"] = res.evals;
    json legs = json::array();
    for (const auto& l : res.legs) {
      legs.push_back({{"leg", l.index},
                      {"lambda", l.lambda},
                      {"seed", l.seed},
                      {"evals", l.evals},
                      {"best_fitness", number(l.best_fitness)},
                      {"stop_reasons", l.stop_reasons}});
    }
    j["legs"] = legs;
    copy_out(j.dump(), buffer, size, required);
  });
}

}  // extern "C"
