#pragma once

// Conservation laws (linear advection, 2D compressible Euler), numerical
// fluxes and boundary states.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <type_traits>

#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"

namespace mfsbp {

/// u_t + a u_x + b u_y = 0.
struct Advection {
    static constexpr std::size_t components = 1;
    using State = std::array<double, 1>;

    double a = 1.0;
    double b = 0.5;

    double normal_speed(double nx, double ny) const { return a * nx + b * ny; }

    /// f_x(u) n_x + f_y(u) n_y.
    State flux(const State& u, double nx, double ny) const { return {normal_speed(nx, ny) * u[0]}; }
    double max_speed(const State&, double nx, double ny) const { return std::abs(normal_speed(nx, ny)); }
    double max_speed(const State&) const { return std::hypot(a, b); }
    bool admissible(const State& u) const { return std::isfinite(u[0]); }
};

/// Conserved variables (rho, rho v1, rho v2, rho e) with an ideal-gas law.
struct Euler {
    static constexpr std::size_t components = 4;
    using State = std::array<double, 4>;

    double gamma = 1.4;

    double pressure(const State& u) const {
        return (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]);
    }
    double sound_speed(const State& u) const { return std::sqrt(gamma * pressure(u) / u[0]); }

    State from_primitive(double rho, double v1, double v2, double p) const {
        return {rho, rho * v1, rho * v2, p / (gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2)};
    }

    bool admissible(const State& u) const {
        if (!(u[0] > 0.0) || !std::isfinite(u[0])) return false;
        const double p = pressure(u);
        return p > 0.0 && std::isfinite(p);
    }

    State flux(const State& u, double nx, double ny) const {
        const double vn = (u[1] * nx + u[2] * ny) / u[0];
        const double p = pressure(u);
        return {u[0] * vn, u[1] * vn + p * nx, u[2] * vn + p * ny, (u[3] + p) * vn};
    }

    double max_speed(const State& u, double nx, double ny) const {
        return std::abs((u[1] * nx + u[2] * ny) / u[0]) + sound_speed(u);
    }
    double max_speed(const State& u) const { return std::hypot(u[1], u[2]) / u[0] + sound_speed(u); }

    /// Reflects the normal velocity; density and pressure are unchanged.
    State mirror(const State& u, double nx, double ny) const {
        const double mn = u[1] * nx + u[2] * ny;
        return {u[0], u[1] - 2.0 * mn * nx, u[2] - 2.0 * mn * ny, u[3]};
    }
};

/// Analytic Euler flux column; rejects inadmissible states.
inline Euler::State euler_flux(const Euler& eq, const Euler::State& u, Axis axis) {
    if (!eq.admissible(u)) throw StateError("inadmissible Euler state (rho <= 0 or p <= 0)");
    return axis == Axis::x ? eq.flux(u, 1.0, 0.0) : eq.flux(u, 0.0, 1.0);
}

enum class FluxKind { central, llf, hllc };

inline std::string_view to_string(FluxKind f) {
    switch (f) {
        case FluxKind::central: return "central";
        case FluxKind::llf: return "llf";
        case FluxKind::hllc: return "hllc";
    }
    return "unknown";
}

inline FluxKind parse_flux(std::string_view s) {
    if (s == "central") return FluxKind::central;
    if (s == "llf") return FluxKind::llf;
    if (s == "hllc") return FluxKind::hllc;
    throw ParameterError("unknown flux: " + std::string(s));
}

template <class Eq, class S = typename Eq::State>
S central_flux(const Eq& eq, const S& uL, const S& uR, double nx, double ny) {
    const S fL = eq.flux(uL, nx, ny);
    const S fR = eq.flux(uR, nx, ny);
    S f;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = 0.5 * (fL[k] + fR[k]);
    return f;
}

/// Davis estimate max(|v_L.n| + c_L, |v_R.n| + c_R); |(a,b).n| for advection.
template <class Eq, class S = typename Eq::State>
double davis_speed(const Eq& eq, const S& uL, const S& uR, double nx, double ny) {
    return std::max(eq.max_speed(uL, nx, ny), eq.max_speed(uR, nx, ny));
}

/// Local Lax-Friedrichs. A positive `lambda` overrides the local estimate.
template <class Eq, class S = typename Eq::State>
S llf_flux(const Eq& eq, const S& uL, const S& uR, double nx, double ny, double lambda = -1.0) {
    const S fL = eq.flux(uL, nx, ny);
    const S fR = eq.flux(uR, nx, ny);
    const double lam = lambda > 0.0 ? lambda : davis_speed(eq, uL, uR, nx, ny);
    S f;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = 0.5 * (fL[k] + fR[k]) - 0.5 * lam * (uR[k] - uL[k]);
    return f;
}

/// Three-wave HLLC with Davis outer speeds.
inline Euler::State hllc_flux(const Euler& eq, const Euler::State& uL, const Euler::State& uR, double nx, double ny) {
    const double rL = uL[0], rR = uR[0];
    const double vnL = (uL[1] * nx + uL[2] * ny) / rL;
    const double vnR = (uR[1] * nx + uR[2] * ny) / rR;
    const double pL = eq.pressure(uL), pR = eq.pressure(uR);
    const double cL = std::sqrt(eq.gamma * pL / rL), cR = std::sqrt(eq.gamma * pR / rR);

    const double sL = std::min(vnL - cL, vnR - cR);
    const double sR = std::max(vnL + cL, vnR + cR);

    if (sL >= 0.0) return eq.flux(uL, nx, ny);
    if (sR <= 0.0) return eq.flux(uR, nx, ny);

    const double sStar = (pR - pL + rL * vnL * (sL - vnL) - rR * vnR * (sR - vnR)) / (rL * (sL - vnL) - rR * (sR - vnR));

    auto star_flux = [&](const Euler::State& u, double r, double vn, double p, double s) {
        const Euler::State f = eq.flux(u, nx, ny);
        const double coef = r * (s - vn) / (s - sStar);
        const double dv = sStar - vn;
        const Euler::State us = {coef, coef * (u[1] / r + dv * nx), coef * (u[2] / r + dv * ny),
                                 coef * (u[3] / r + dv * (sStar + p / (r * (s - vn))))};
        Euler::State out;
        for (std::size_t k = 0; k < 4; ++k) out[k] = f[k] + s * (us[k] - u[k]);
        return out;
    };
    return sStar >= 0.0 ? star_flux(uL, rL, vnL, pL, sL) : star_flux(uR, rR, vnR, pR, sR);
}

template <class Eq, class S = typename Eq::State>
S numerical_flux(const Eq& eq, FluxKind kind, const S& uL, const S& uR, double nx, double ny, double lambda = -1.0) {
    switch (kind) {
        case FluxKind::central: return central_flux(eq, uL, uR, nx, ny);
        case FluxKind::llf: return llf_flux(eq, uL, uR, nx, ny, lambda);
        case FluxKind::hllc:
            if constexpr (std::is_same_v<Eq, Euler>) {
                return hllc_flux(eq, uL, uR, nx, ny);
            } else {
                throw ParameterError("hllc flux is only defined for the Euler equations");
            }
    }
    throw ParameterError("unknown flux");
}

enum class BcKind { dirichlet_exact, inflow_dirichlet, slip_wall };

inline std::string_view to_string(BcKind k) {
    switch (k) {
        case BcKind::dirichlet_exact: return "dirichlet_exact";
        case BcKind::inflow_dirichlet: return "inflow_dirichlet";
        case BcKind::slip_wall: return "slip_wall";
    }
    return "unknown";
}

inline BcKind parse_bc(std::string_view s) {
    if (s == "dirichlet_exact" || s == "exact") return BcKind::dirichlet_exact;
    if (s == "inflow_dirichlet" || s == "inflow") return BcKind::inflow_dirichlet;
    if (s == "slip_wall" || s == "slip") return BcKind::slip_wall;
    throw ParameterError("unknown boundary condition: " + std::string(s));
}

/// How boundary data enters the weak boundary term at node i:
///   riemann: w_i (f*(u_i, u_bc, n_i) - f(u_i).n_i)
///   state:   E_x (f_x(u_bc) - f_x(u_i)) + E_y (f_y(u_bc) - f_y(u_i))
enum class BcImposition { riemann, state };

inline BcImposition parse_imposition(std::string_view s) {
    if (s == "riemann") return BcImposition::riemann;
    if (s == "state") return BcImposition::state;
    throw ParameterError("unknown boundary imposition: " + std::string(s));
}

template <class Eq>
using ExactSolution = std::function<typename Eq::State(double x, double y, double t)>;

template <class Eq>
struct BoundaryCondition {
    BcKind kind = BcKind::dirichlet_exact;
    BcImposition imposition = BcImposition::riemann;
    ExactSolution<Eq> data;  // required for the Dirichlet kinds
};

/// Boundary state u_bc at boundary node i.
template <class Eq, class S = typename Eq::State>
S boundary_state(const Eq& eq, const BoundaryCondition<Eq>& bc, const S& ui, const PointCloud& cloud, std::size_t i,
                 double t) {
    if (!cloud.is_boundary(i)) throw ParameterError("boundary_state called on interior node " + std::to_string(i));
    const auto& p = cloud.points[i];
    const double nx = cloud.normal_x[i], ny = cloud.normal_y[i];
    switch (bc.kind) {
        case BcKind::dirichlet_exact:
            if (!bc.data) throw ParameterError("dirichlet boundary needs prescribed data");
            return bc.data(p.x, p.y, t);
        case BcKind::inflow_dirichlet:
            if constexpr (std::is_same_v<Eq, Advection>) {
                if (!bc.data) throw ParameterError("inflow boundary needs prescribed data");
                return eq.normal_speed(nx, ny) < 0.0 ? bc.data(p.x, p.y, t) : ui;
            } else {
                throw ParameterError("inflow_dirichlet is only defined for advection");
            }
        case BcKind::slip_wall:
            if constexpr (std::is_same_v<Eq, Euler>) {
                return eq.mirror(ui, nx, ny);
            } else {
                throw ParameterError("slip_wall is only defined for the Euler equations");
            }
    }
    throw ParameterError("unknown boundary condition");
}

}  // namespace mfsbp
