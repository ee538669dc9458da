#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmc {

// Application time: discrete, linear, minimum 0.
using Timestamp = std::int64_t;
using Value = std::int64_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Query text / catalog text rejected.
struct ParseError : Error {
    ParseError(std::string msg, int line, int col)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    int line;
    int col;
};

// A structurally valid parse that violates a normal-form clause.
struct ValidationError : Error {
    using Error::Error;
};

// The bounded engine declines to run (verdict or unsupported input pattern).
struct RefusalError : Error {
    using Error::Error;
};

struct InputError : Error {
    using Error::Error;
};

// One output tuple, constants already prepended.
struct OutputRow {
    std::vector<Value> values;

    auto operator<=>(const OutputRow&) const = default;
};

// Bag of output rows; multiplicities are always >= 1.
using Bag = std::map<OutputRow, std::int64_t>;

std::string row_text(const OutputRow& row);

}  // namespace bmc
