#pragma once

#include <stdexcept>
#include <string>

namespace rmup {

// Input files / configs that fail to parse. Carries the offending line when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, long line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(path), line_(line) {}
    const std::string& path() const { return path_; }
    long line() const { return line_; }

private:
    std::string path_;
    long line_;
};

// Precondition violations on operation inputs (bad indices, shapes, parameters).
using ValidationError = std::invalid_argument;

// Numerical failures (factorization breakdown, degenerate distributions).
class NumericalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rmup
