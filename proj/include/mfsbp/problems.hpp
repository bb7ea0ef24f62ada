#pragma once

// Initial data and exact solutions for the solver experiments.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "mfsbp/error.hpp"
#include "mfsbp/physics.hpp"

namespace mfsbp {

/// sin(pi/6 (x - a t)) sin(pi/6 (y - b t)).
inline ExactSolution<Advection> advection_sine(const Advection& eq) {
    return [a = eq.a, b = eq.b](double x, double y, double t) {
        const double k = std::numbers::pi / 6.0;
        return Advection::State{std::sin(k * (x - a * t)) * std::sin(k * (y - b * t))};
    };
}

/// rho = 1 + 1/2 sin(pi/3 (x + y - (v1 + v2) t)) with v = (0.1, 0.2) and p = 2.5.
/// `c0` replaces the sine by its absolute value.
inline ExactSolution<Euler> density_wave(const Euler& eq, bool c0 = false) {
    return [eq, c0](double x, double y, double t) {
        constexpr double v1 = 0.1, v2 = 0.2, p = 2.5;
        const double s = std::sin(std::numbers::pi / 3.0 * (x + y - t * (v1 + v2)));
        const double rho = 1.0 + 0.5 * (c0 ? std::abs(s) : s);
        return eq.from_primitive(rho, v1, v2, p);
    };
}

/// At rest; rho = 1 inside r < 0.4 and 0.001 outside; p = rho^gamma.
inline ExactSolution<Euler> explosion(const Euler& eq) {
    return [eq](double x, double y, double) {
        const double rho = x * x + y * y < 0.4 * 0.4 ? 1.0 : 0.001;
        return eq.from_primitive(rho, 0.0, 0.0, std::pow(rho, eq.gamma));
    };
}

}  // namespace mfsbp
