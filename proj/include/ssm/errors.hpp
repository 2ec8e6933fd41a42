#pragma once

#include <stdexcept>
#include <string>

namespace ssm {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Arguments outside an operation's documented domain (bad ids, bad ranges).
class DomainError : public Error {
public:
    using Error::Error;
};

// Instance exceeds a documented capacity guard (universe too large, state
// space beyond the memory budget, ...).
class CapacityError : public Error {
public:
    using Error::Error;
};

// Malformed or unreadable input (files, records, tables).
class InputError : public Error {
public:
    using Error::Error;
};

// Input data that no model of this class can produce. CLI maps this to its
// own exit code so scripts can branch on it.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

// An observation that no candidate support set can explain; the likelihood
// is impossible for every parameter choice.
class CoverageError : public Error {
public:
    using Error::Error;
};

// Internal contract violation. Indicates a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace ssm
