#pragma once

#include <stdexcept>
#include <string>

namespace qshift {

// Exit-code contract for the CLI: usage/input problems map to 2,
// domain failures (empty alignment, undefined correlation, infeasible
// folds) map to 3.

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by model file IO; names the offending field where possible.
class PersistError : public std::runtime_error {
 public:
  explicit PersistError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qshift
