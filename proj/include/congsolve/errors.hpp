#pragma once

#include <stdexcept>
#include <string>

namespace congsolve {

// Error taxonomy, mirrored by the CLI exit codes: bad input (2), model
// infeasibility (3), refused work budget (4), internal inconsistency (5).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace congsolve
