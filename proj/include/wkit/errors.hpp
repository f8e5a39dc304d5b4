#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed equation text. `position` is the 0-based byte offset of the
// offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Evaluation left the domain of F (division by zero, log of a non-positive
// number, ...). `subexpression` is the canonical text of the failing node.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::string subexpression)
        : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

// The integrator could not reach the end of the requested interval.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double reached)
        : Error(what + " (reached x = " + std::to_string(reached) + ")"), reached_(reached) {}
    double reached() const { return reached_; }

private:
    double reached_;
};

// Geometric degeneracy: singular Wronskian, inflection of a projective
// curve, rank-deficient fit, root of the cone equation not found, ...
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace wkit
