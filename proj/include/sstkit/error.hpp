#pragma once

#include <stdexcept>
#include <string>

namespace sst {

// Domain-level failure (bad input, violated precondition, corrupt data).
// The CLI maps these to exit code 1; usage errors exit 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse failure carrying the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(size_t line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}

    size_t line() const { return line_; }

private:
    size_t line_;
};

}  // namespace sst
