#pragma once

#include <stdexcept>
#include <string>

namespace sphavg {

// Bad user input: unknown symbols, malformed specs, violated preconditions.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured budget (memory, enumeration cap) was exceeded.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what, int completed_radius = -1)
        : std::runtime_error(what), completed_radius_(completed_radius) {}

    // Largest ball radius that was fully enumerated before the budget ran out,
    // or -1 when not applicable.
    int completed_radius() const { return completed_radius_; }

private:
    int completed_radius_;
};

// Non-finite values encountered inside an iterative solver.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sphavg
