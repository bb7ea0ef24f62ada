#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfsbp {

/// Invalid argument to a constructor or builder (counts, radii, overlapping holes).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adjacency graph has more than one connected component.
class ConnectivityError : public std::runtime_error {
public:
    ConnectivityError(const std::string& what, std::size_t orphan, std::size_t components)
        : std::runtime_error(what), orphan_(orphan), components_(components) {}

    /// Smallest node index of a component that does not contain node 0.
    std::size_t orphan() const noexcept { return orphan_; }
    std::size_t components() const noexcept { return components_; }

private:
    std::size_t orphan_;
    std::size_t components_;
};

/// Right-hand side of a singular Laplacian system is not orthogonal to its null space.
class CompatibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solve did not reach the requested tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, std::size_t iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

inline constexpr std::size_t no_node = static_cast<std::size_t>(-1);

/// Conserved state outside the admissible set (non-positive density or pressure).
class StateError : public std::runtime_error {
public:
    StateError(const std::string& what, std::size_t node = no_node, double time = 0.0)
        : std::runtime_error(what), node_(node), time_(time) {}

    std::size_t node() const noexcept { return node_; }
    double time() const noexcept { return time_; }

private:
    std::size_t node_;
    double time_;
};

}  // namespace mfsbp
