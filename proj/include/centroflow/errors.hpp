#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace centroflow {

/// Bad argument or precondition failure (grid mismatch, p < 1, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Strict convexity lost: r = s_thth + s <= 0 at the listed nodes.
class ConvexityViolation : public std::runtime_error {
public:
    ConvexityViolation(const std::string& what, std::vector<std::size_t> nodes)
        : std::runtime_error(what), offending_nodes(std::move(nodes)) {}

    std::vector<std::size_t> offending_nodes;
};

/// An iterative routine failed to converge or produced non-finite values.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace centroflow
