#include "cmaes/state_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmaes/errors.hpp"
#include "json.hpp"

namespace cmaes {

namespace {

using json = nlohmann::ordered_json;

json encode(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::IoError, "expected a number, got " + j.dump());
}

json encode(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(encode(x));
  return a;
}

Vector decode_vector(const json& j) {
  Vector v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(decode(x));
  return v;
}

std::string hex64(std::uint64_t w) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(w));
  return buf;
}

std::uint64_t unhex64(const json& j) {
  const auto s = j.get<std::string>();
  if (s.size() != 16) throw Error(ErrorCode::IoError, "bad rng word '" + s + "'");
  return std::stoull(s, nullptr, 16);
}

json params_json(const StrategyParams& p) {
  json j;
  j["n"] = p.n;
  j["lambda"] = p.lambda;
  j["mu"] = p.mu;
  j["weights"] = encode(p.weights);
  j["mu_eff"] = encode(p.mu_eff);
  j["mu_eff_minus"] = encode(p.mu_eff_minus);
  j["c_m"] = encode(p.c_m);
  j["c_sigma"] = encode(p.c_sigma);
  j["d_sigma"] = encode(p.d_sigma);
  j["c_c"] = encode(p.c_c);
  j["c_1"] = encode(p.c_1);
  j["c_mu"] = encode(p.c_mu);
  j["chi_n"] = encode(p.chi_n);
  j["alpha_cov"] = encode(p.alpha_cov);
  j["alpha_mu_minus"] = encode(p.alpha_mu_minus);
  j["alpha_mu_eff_minus"] = encode(p.alpha_mu_eff_minus);
  j["alpha_posdef_minus"] = encode(p.alpha_posdef_minus);
  return j;
}

StrategyParams params_from(const json& j) {
  StrategyParams p;
  p.n = j.at("n").get<std::size_t>();
  p.lambda = j.at("lambda").get<std::size_t>();
  p.mu = j.at("mu").get<std::size_t>();
  p.weights = decode_vector(j.at("weights"));
  p.mu_eff = decode(j.at("mu_eff"));
  p.mu_eff_minus = decode(j.at("mu_eff_minus"));
  p.c_m = decode(j.at("c_m"));
  p.c_sigma = decode(j.at("c_sigma"));
  p.d_sigma = decode(j.at("d_sigma"));
  p.c_c = decode(j.at("c_c"));
  p.c_1 = decode(j.at("c_1"));
  p.c_mu = decode(j.at("c_mu"));
  p.chi_n = decode(j.at("chi_n"));
  p.alpha_cov = decode(j.at("alpha_cov"));
  p.alpha_mu_minus = decode(j.at("alpha_mu_minus"));
  p.alpha_mu_eff_minus = decode(j.at("alpha_mu_eff_minus"));
  p.alpha_posdef_minus = decode(j.at("alpha_posdef_minus"));
  return p;
}

template <typename F>
auto guarded(std::string_view text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed state document: ") + e.what());
  }
}

}  // namespace

std::string serialize_params(const StrategyParams& p) { return params_json(p).dump(); }

StrategyParams deserialize_params(std::string_view text) {
  return guarded(text, [](const json& j) { return params_from(j); });
}

std::string serialize_state(const EngineState& s) {
  json j;
  j["params"] = params_json(s.params);
  j["mean"] = encode(s.mean);
  j["sigma"] = encode(s.sigma);
  j["cov"] = encode(s.cov.data());
  j["basis"] = encode(s.eig.basis.data());
  j["scales"] = encode(s.eig.scales);
  j["p_sigma"] = encode(s.p_sigma);
  j["p_c"] = encode(s.p_c);
  j["generation"] = s.generation;
  j["eval_count"] = s.eval_count;
  j["evals_at_last_eigen"] = s.evals_at_last_eigen;
  const NormalSource::State rng = s.rng.state();
  json words = json::array();
  for (std::uint64_t w : rng.words) words.push_back(hex64(w));
  j["rng"] = {{"words", words}, {"has_spare", rng.has_spare}, {"spare", encode(rng.spare)}};
  j["batch"] = s.batch;
  j["batch_open"] = s.batch_open;
  return j.dump();
}

EngineState deserialize_state(std::string_view text) {
  return guarded(text, [](const json& j) {
    EngineState s;
    s.params = params_from(j.at("params"));
    const std::size_t n = s.params.n;
    s.mean = decode_vector(j.at("mean"));
    s.sigma = decode(j.at("sigma"));
    const Vector cov = decode_vector(j.at("cov"));
    if (cov.size() != n * n) throw Error(ErrorCode::IoError, "covariance has wrong size");
    s.cov = SymMatrix::from_upper(n, cov);
    const Vector basis = decode_vector(j.at("basis"));
    if (basis.size() != n * n) throw Error(ErrorCode::IoError, "basis has wrong size");
    s.eig.basis = DenseMatrix(n, n);
    std::copy(basis.begin(), basis.end(), s.eig.basis.data().begin());
    s.eig.scales = decode_vector(j.at("scales"));
    s.p_sigma = decode_vector(j.at("p_sigma"));
    s.p_c = decode_vector(j.at("p_c"));
    s.generation = j.at("generation").get<std::uint64_t>();
    s.eval_count = j.at("eval_count").get<std::uint64_t>();
    s.evals_at_last_eigen = j.at("evals_at_last_eigen").get<std::uint64_t>();
    const json& rng = j.at("rng");
    NormalSource::State st;
    const json& words = rng.at("words");
    if (words.size() != st.words.size()) throw Error(ErrorCode::IoError, "bad rng state");
    for (std::size_t i = 0; i < st.words.size(); ++i) st.words[i] = unhex64(words[i]);
    st.has_spare = rng.at("has_spare").get<bool>();
    st.spare = decode(rng.at("spare"));
    s.rng = NormalSource::from_state(st);
    s.batch = j.at("batch").get<std::uint64_t>();
    s.batch_open = j.at("batch_open").get<bool>();
    return s;
  });
}

std::string serialize_history(const History& h) {
  json j;
  j["n"] = h.dim();
  j["lambda"] = h.lambda();
  j["initial_sigma"] = encode(h.initial_sigma());
  j["initial_max_axis"] = encode(h.initial_max_axis());
  j["gen_count"] = h.gen_count();
  j["best"] = encode(Vector(h.best().begin(), h.best().end()));
  j["median"] = encode(Vector(h.median().begin(), h.median().end()));
  j["last_generation"] = encode(h.last_generation());
  return j.dump();
}

History deserialize_history(std::string_view text) {
  return guarded(text, [](const json& j) {
    const Vector best = decode_vector(j.at("best"));
    const Vector median = decode_vector(j.at("median"));
    return History::restore(j.at("n").get<std::size_t>(), j.at("lambda").get<std::size_t>(),
                            decode(j.at("initial_sigma")), decode(j.at("initial_max_axis")),
                            j.at("gen_count").get<std::uint64_t>(),
                            std::deque<double>(best.begin(), best.end()),
                            std::deque<double>(median.begin(), median.end()),
                            decode_vector(j.at("last_generation")));
  });
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + tmp + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cmaes
