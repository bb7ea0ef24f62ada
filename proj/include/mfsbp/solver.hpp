#pragma once

// Semi-discrete flux form on an SBP operator set, weak boundary terms,
// SSP-RK(4,3) / forward Euler stepping and the time loop.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/physics.hpp"
#include "mfsbp/sbp.hpp"

namespace mfsbp {

template <class S>
using Field = std::vector<S>;

enum class LambdaMode { local, global };
enum class TimeStepper { ssprk43, forward_euler };
enum class DtRule { algebraic, edge_length };

inline TimeStepper parse_stepper(std::string_view s) {
    if (s == "ssprk43") return TimeStepper::ssprk43;
    if (s == "forward_euler" || s == "euler") return TimeStepper::forward_euler;
    throw ParameterError("unknown time stepper: " + std::string(s));
}

inline DtRule parse_dt_rule(std::string_view s) {
    if (s == "algebraic") return DtRule::algebraic;
    if (s == "edge_length") return DtRule::edge_length;
    throw ParameterError("unknown dt rule: " + std::string(s));
}

inline LambdaMode parse_lambda_mode(std::string_view s) {
    if (s == "local") return LambdaMode::local;
    if (s == "global") return LambdaMode::global;
    throw ParameterError("unknown lambda mode: " + std::string(s));
}

namespace detail {

/// out = a * x + b * y, componentwise over a field.
template <class S>
void combine(Field<S>& out, double a, const Field<S>& x, double b, const Field<S>& y) {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < S{}.size(); ++k) out[i][k] = a * x[i][k] + b * y[i][k];
}

}  // namespace detail

/// rhs(u, t) = -H^-1 [ sum_j 2|n_ij| f*(u_i, u_j, n_ij/|n_ij|) + boundary terms ]
/// with n_ij = ((Q_x)_ij, (Q_y)_ij), including the diagonal at boundary nodes.
template <class Eq>
class SemiDiscretization {
public:
    using State = typename Eq::State;

    SemiDiscretization(const PointCloud& cloud, const SbpOperatorSet& ops, Eq eq, FluxKind flux,
                       BoundaryCondition<Eq> bc, LambdaMode lambda_mode = LambdaMode::local)
        : cloud_(cloud), ops_(ops), eq_(eq), flux_(flux), bc_(std::move(bc)), lambda_mode_(lambda_mode) {
        if (!ops.has_norm()) throw ParameterError("operator set has no norm matrix");
        if (ops.size() != cloud.size()) throw ParameterError("operator set and cloud sizes differ");
        if (flux == FluxKind::hllc && !std::is_same_v<Eq, Euler>)
            throw ParameterError("hllc flux is only defined for the Euler equations");
        edges_.reserve(ops.edges.size());
        for (std::size_t k = 0; k < ops.edges.size(); ++k) {
            const auto [sx, sy] = ops.edge_normal(k);
            const double len = std::hypot(sx, sy);
            if (len == 0.0) continue;
            edges_.push_back({ops.edges[k].first, ops.edges[k].second, sx / len, sy / len, 2.0 * len});
        }
        inv_H_ = ops.H.cwiseInverse();

        // Per-node sum of 2|n_ij| over off-diagonal entries plus the boundary weight.
        outflow_.assign(cloud.size(), 0.0);
        for (const auto& e : edges_) {
            outflow_[e.i] += e.scale;
            outflow_[e.j] += e.scale;
        }
        for (std::size_t i = cloud.interior_count; i < cloud.size(); ++i) outflow_[i] += cloud.weight[i];
    }

    const Eq& equation() const { return eq_; }
    const PointCloud& cloud() const { return cloud_; }
    const SbpOperatorSet& operators() const { return ops_; }
    FluxKind flux() const { return flux_; }

    /// Toggle the weak boundary term (off only for conservation checks).
    void set_boundary_terms(bool on) { boundary_terms_ = on; }

    /// Full right-hand side, already multiplied by -H^-1.
    void operator()(const Field<State>& u, double t, Field<State>& out) const {
        residual(u, t, out);
        for (std::size_t i = 0; i < out.size(); ++i)
            for (auto& v : out[i]) v *= -inv_H_[static_cast<Eigen::Index>(i)];
    }

    Field<State> rhs(const Field<State>& u, double t) const {
        Field<State> out;
        (*this)(u, t, out);
        return out;
    }

    /// du before the -H^-1 scaling.
    void residual(const Field<State>& u, double t, Field<State>& du) const {
        const std::size_t n = cloud_.size();
        if (u.size() != n) throw ParameterError("state field size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (!eq_.admissible(u[i]))
                throw StateError("inadmissible state at node " + std::to_string(i) + " at t = " + std::to_string(t), i,
                                 t);
        }
        du.assign(n, State{});

        double lambda = -1.0;
        if (lambda_mode_ == LambdaMode::global) {
            lambda = 0.0;
            for (const auto& s : u) lambda = std::max(lambda, eq_.max_speed(s));
        }

        for (const auto& e : edges_) {
            const State f = numerical_flux(eq_, flux_, u[e.i], u[e.j], e.nx, e.ny, lambda);
            for (std::size_t k = 0; k < f.size(); ++k) {
                du[e.i][k] += e.scale * f[k];
                du[e.j][k] -= e.scale * f[k];
            }
        }

        for (std::size_t i = cloud_.interior_count; i < n; ++i) {
            const double w = cloud_.weight[i];
            const double nx = cloud_.normal_x[i], ny = cloud_.normal_y[i];
            // Diagonal entry (Q)_ii = E_ii / 2, so 2|n_ii| = w_i and f*(u_i, u_i) = f(u_i).
            const State fi = eq_.flux(u[i], nx, ny);
            for (std::size_t k = 0; k < fi.size(); ++k) du[i][k] += w * fi[k];
            if (!boundary_terms_) continue;

            const State ub = boundary_state(eq_, bc_, u[i], cloud_, i, t);
            const State fb = bc_.imposition == BcImposition::riemann
                                 ? numerical_flux(eq_, flux_, u[i], ub, nx, ny, lambda)
                                 : eq_.flux(ub, nx, ny);
            for (std::size_t k = 0; k < fi.size(); ++k) du[i][k] += w * (fb[k] - fi[k]);
        }
    }

    /// Largest nodal wavespeed.
    double max_wavespeed(const Field<State>& u) const {
        double lam = 0.0;
        for (const auto& s : u) lam = std::max(lam, eq_.max_speed(s));
        return lam;
    }

    /// min_i H_ii / (sum_j 2|n_ij| + w_i): the length scale of the algebraic CFL condition.
    double algebraic_length() const {
        double h = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < outflow_.size(); ++i)
            if (outflow_[i] > 0.0) h = std::min(h, ops_.H[static_cast<Eigen::Index>(i)] / outflow_[i]);
        return h;
    }

    /// Shortest graph edge.
    double min_edge_length() const {
        double h = std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : ops_.edges) h = std::min(h, distance(cloud_.points[a], cloud_.points[b]));
        return h;
    }

private:
    struct EdgeNormal {
        std::uint32_t i, j;
        double nx, ny, scale;
    };

    const PointCloud& cloud_;
    const SbpOperatorSet& ops_;
    Eq eq_;
    FluxKind flux_;
    BoundaryCondition<Eq> bc_;
    LambdaMode lambda_mode_;
    bool boundary_terms_ = true;
    std::vector<EdgeNormal> edges_;
    std::vector<double> outflow_;
    Eigen::VectorXd inv_H_;
};

/// u1 = u + dt/2 F(u); u2 = u1 + dt/2 F(u1); u3 = 2/3 u + 1/3 (u2 + dt/2 F(u2));
/// u+ = u3 + dt/2 F(u3).
template <class S, class F>
void ssprk43_step(Field<S>& u, double t, double dt, F&& f) {
    Field<S> k, u1, u2;
    f(u, t, k);
    detail::combine(u1, 1.0, u, 0.5 * dt, k);
    f(u1, t + 0.5 * dt, k);
    detail::combine(u2, 1.0, u1, 0.5 * dt, k);
    f(u2, t + dt, k);
    detail::combine(u2, 1.0, u2, 0.5 * dt, k);
    detail::combine(u1, 2.0 / 3.0, u, 1.0 / 3.0, u2);
    f(u1, t + 0.5 * dt, k);
    detail::combine(u, 1.0, u1, 0.5 * dt, k);
}

template <class S, class F>
void forward_euler_step(Field<S>& u, double t, double dt, F&& f) {
    Field<S> k;
    f(u, t, k);
    detail::combine(u, 1.0, u, dt, k);
}

struct TimeIntegrationConfig {
    double cfl = 0.5;
    double t_final = 0.7;
    TimeStepper stepper = TimeStepper::ssprk43;
    DtRule dt_rule = DtRule::algebraic;
    double fixed_dt = 0.0;  // > 0 bypasses the CFL rule
    std::vector<double> snapshot_times;

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0)) throw ParameterError("cfl must lie in (0, 1]");
        if (!(t_final > 0.0)) throw ParameterError("final time must be positive");
    }
};

/// dt = cfl * h / lambda_max, capped by the remaining time.
template <class Eq>
double compute_dt(const SemiDiscretization<Eq>& sd, const Field<typename Eq::State>& u, const TimeIntegrationConfig& cfg,
                  double remaining) {
    if (cfg.fixed_dt > 0.0) return std::min(cfg.fixed_dt, remaining);
    const double lam = sd.max_wavespeed(u);
    if (lam == 0.0) return remaining;
    const double h = cfg.dt_rule == DtRule::algebraic ? sd.algebraic_length() : sd.min_edge_length();
    return std::min(cfg.cfl * h / lam, remaining);
}

template <class S>
struct Snapshot {
    double t = 0.0;
    Field<S> u;
};

template <class Eq>
struct RunResult {
    Field<typename Eq::State> u;
    double t = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    double dt_min = std::numeric_limits<double>::infinity();
    double dt_max = 0.0;
    /// Per-step minima of density and pressure (Euler only).
    double min_density = std::numeric_limits<double>::infinity();
    double min_pressure = std::numeric_limits<double>::infinity();
    std::vector<Snapshot<typename Eq::State>> snapshots;
};

namespace detail {

template <class Eq>
void track_minima(const Eq& eq, const Field<typename Eq::State>& u, RunResult<Eq>& r) {
    if constexpr (std::is_same_v<Eq, Euler>) {
        for (const auto& s : u) {
            r.min_density = std::min(r.min_density, s[0]);
            r.min_pressure = std::min(r.min_pressure, eq.pressure(s));
        }
    }
}

}  // namespace detail

template <class Eq>
RunResult<Eq> integrate(const SemiDiscretization<Eq>& sd, Field<typename Eq::State> u0, const TimeIntegrationConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RunResult<Eq> r;
    r.u = std::move(u0);
    detail::track_minima(sd.equation(), r.u, r);

    std::vector<double> stops = cfg.snapshot_times;
    std::erase_if(stops, [&](double s) { return s < 0.0 || s > cfg.t_final; });
    std::sort(stops.begin(), stops.end());
    std::size_t next_stop = 0;
    while (next_stop < stops.size() && stops[next_stop] <= 0.0) {
        r.snapshots.push_back({0.0, r.u});
        ++next_stop;
    }

    auto f = [&](const Field<typename Eq::State>& u, double t, Field<typename Eq::State>& out) { sd(u, t, out); };
    const double eps = 1e-14 * cfg.t_final;
    while (r.t < cfg.t_final - eps) {
        const double target = next_stop < stops.size() ? stops[next_stop] : cfg.t_final;
        const double dt = compute_dt(sd, r.u, cfg, target - r.t);
        if (!(dt > 0.0)) throw SolverError("non-positive time step", dt, r.steps);
        if (cfg.stepper == TimeStepper::ssprk43)
            ssprk43_step(r.u, r.t, dt, f);
        else
            forward_euler_step(r.u, r.t, dt, f);
        r.t = (target - r.t - dt) <= eps ? target : r.t + dt;
        ++r.steps;
        r.dt_min = std::min(r.dt_min, dt);
        r.dt_max = std::max(r.dt_max, dt);

        for (std::size_t i = 0; i < r.u.size(); ++i)
            if (!sd.equation().admissible(r.u[i]))
                throw StateError("inadmissible state at node " + std::to_string(i) + " after step " +
                                     std::to_string(r.steps) + " (t = " + std::to_string(r.t) + ")",
                                 i, r.t);
        detail::track_minima(sd.equation(), r.u, r);

        while (next_stop < stops.size() && stops[next_stop] <= r.t + eps) {
            r.snapshots.push_back({r.t, r.u});
            ++next_stop;
        }
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

template <class Eq>
Field<typename Eq::State> sample_state(const PointCloud& cloud, const ExactSolution<Eq>& f, double t) {
    Field<typename Eq::State> u(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) u[i] = f(cloud.points[i].x, cloud.points[i].y, t);
    return u;
}

/// Which conserved components enter the discrete L2 error.
enum class ErrorComponents { first, all };

inline ErrorComponents parse_error_components(std::string_view s) {
    if (s == "first" || s == "density") return ErrorComponents::first;
    if (s == "all") return ErrorComponents::all;
    throw ParameterError("unknown error components: " + std::string(s));
}

/// sqrt(sum_i H_ii |u_i - u_exact(x_i, t)|^2) over the selected components.
template <class Eq>
double l2_state_error(const PointCloud& cloud, const Eigen::VectorXd& H, const Field<typename Eq::State>& u,
                      const ExactSolution<Eq>& exact, double t, ErrorComponents which = ErrorComponents::first) {
    double s = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto e = exact(cloud.points[i].x, cloud.points[i].y, t);
        const std::size_t m = which == ErrorComponents::first ? 1 : e.size();
        double d2 = 0.0;
        for (std::size_t k = 0; k < m; ++k) d2 += (u[i][k] - e[k]) * (u[i][k] - e[k]);
        s += H[static_cast<Eigen::Index>(i)] * d2;
    }
    return std::sqrt(s);
}

}  // namespace mfsbp
