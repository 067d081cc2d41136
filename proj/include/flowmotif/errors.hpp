#pragma once

#include <stdexcept>
#include <string>

namespace flowmotif {

// Base for every error the library raises. Input-side errors (bad files,
// out-of-range parameters) derive from InputError; the CLI maps those to
// exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class IoError : public InputError {
public:
    using InputError::InputError;
};

class FormatError : public InputError {
public:
    using InputError::InputError;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

// A caller broke a documented precondition (mixed teams, adjacent duplicate
// touches, mismatched k).
class ContractViolation : public InputError {
public:
    using InputError::InputError;
};

// The null model could not produce a valid replicate within its retry budget.
class DegenerateInputError : public InputError {
public:
    DegenerateInputError(const std::string& what, std::size_t possession_index)
        : InputError(what), possession_index_(possession_index) {}

    std::size_t possession_index() const noexcept { return possession_index_; }

private:
    std::size_t possession_index_;
};

} // namespace flowmotif
