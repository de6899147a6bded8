#pragma once

#include <cstddef>
#include <random>

#include "cmaes/linalg.hpp"

namespace testsupport {

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
cmaes::DenseMatrix random_orthogonal(std::size_t n, std::mt19937_64& gen);

/// Q diag(lambda) Q^T with eigenvalues log-uniform in [1, max_condition].
/// The extremes are pinned so the condition number equals max_condition.
cmaes::SymMatrix random_spd(std::size_t n, double max_condition, std::mt19937_64& gen);

/// Eigenvalues from an independent solver, ascending.
cmaes::Vector reference_eigenvalues(const cmaes::SymMatrix& c);

}  // namespace testsupport
