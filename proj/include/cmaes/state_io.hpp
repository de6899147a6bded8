#pragma once

#include <string>
#include <string_view>

#include "cmaes/engine.hpp"
#include "cmaes/params.hpp"
#include "cmaes/termination.hpp"

namespace cmaes {

// JSON encodings used for checkpoints. Doubles are written in round-trip form,
// non-finite values as the strings "inf", "-inf" and "nan", RNG words as
// 16-digit hex strings. Matrices are row-major flat arrays.

std::string serialize_params(const StrategyParams& p);
StrategyParams deserialize_params(std::string_view json);

std::string serialize_state(const EngineState& s);
/// Throws Error{IoError} on malformed input.
EngineState deserialize_state(std::string_view json);

std::string serialize_history(const History& h);
History deserialize_history(std::string_view json);

/// Writes to `path` via a temporary file and rename. Throws Error{IoError}.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace cmaes
