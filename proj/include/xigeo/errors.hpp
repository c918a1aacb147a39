#pragma once

#include <stdexcept>
#include <string>

namespace xigeo {

// Invalid parameters or arguments (CLI exit code 2).
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate metrics, non-finite data, failed numerics (CLI exit code 3).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was asked to run on a surface that does not satisfy its
// hypotheses (non-Lagrangian input to Maslov ops, non-flat input to the
// diagonalizing frame, non-xi input to xi-only identities).
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace xigeo
