#pragma once

#include <stdexcept>
#include <string>

namespace mixclust {

/// Input violates an operation's precondition (shape mismatch, bad weights, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a scalar function such as tau or zeta.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// lambda_{K-1}(S) - lambda_K(S) collapsed; the delta statistics are undefined.
class GapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested problem outside the supported regime (N <= F for the dual
/// spectrum, exhaustive search too large, ...).
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mixclust
