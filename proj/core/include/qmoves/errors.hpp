#pragma once

#include <stdexcept>
#include <string>

namespace qmoves {

// Invalid configuration or argument outside the admissible domain.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke an operation's precondition (mismatched objects, non-normalized input, ...).
class ContractError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Eigensolver failure or a numerically meaningless intermediate.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A configured memory budget would be exceeded.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace qmoves
