#pragma once

// End-to-end drivers shared by the CLI and the acceptance run:
// cloud -> adjacency -> SBP operators -> norm, then derivative errors or a
// PDE solve.

#include <algorithm>
#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mfsbp/adjacency.hpp"
#include "mfsbp/calculus.hpp"
#include "mfsbp/config.hpp"
#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/laplacian.hpp"
#include "mfsbp/norm.hpp"
#include "mfsbp/physics.hpp"
#include "mfsbp/problems.hpp"
#include "mfsbp/sbp.hpp"
#include "mfsbp/solver.hpp"

namespace mfsbp {

/// Failure inside a named pipeline stage.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct OperatorOptions {
    AdjacencyMethod adjacency = AdjacencyMethod::euclidean_radius;
    NormKind norm = NormKind::optimized;
    double radius_factor = 2.5;
    LaplacianMethod laplacian = LaplacianMethod::pcg;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

/// Everything built for one grid. Not copyable: solvers keep references.
struct OperatorBuild {
    GridPreset grid;
    PointCloud cloud;
    AdjacencyGraph graph;
    SbpOperatorSet ops;
    SbpReport report;
    AssemblyStats solve_stats;
    std::vector<StageTiming> timings;

    OperatorBuild() = default;
    OperatorBuild(const OperatorBuild&) = delete;
    OperatorBuild& operator=(const OperatorBuild&) = delete;

    double radius() const { return graph.radius(); }

    /// Swaps the norm matrix in place.
    void set_norm(NormKind kind) {
        ops.H = kind == NormKind::optimized ? optimize_H(ops.Qx, ops.Qy, cloud.x(), cloud.y()) : uniform_H(cloud);
        report = verify_sbp(ops, cloud.interior_count);
    }
};

namespace detail {

template <class F>
auto timed_stage(std::vector<StageTiming>& t, const std::string& name, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto done = [&] {
        t.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    };
    try {
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            done();
        } else {
            auto r = f();
            done();
            return r;
        }
    } catch (const ConnectivityError&) {
        throw;
    } catch (const ParameterError& e) {
        throw ParameterError(name + ": " + e.what());
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace detail

inline std::unique_ptr<OperatorBuild> build_operators(const DomainSpec& domain, const GridPreset& preset,
                                                      const OperatorOptions& opt = {}) {
    auto b = std::make_unique<OperatorBuild>();
    b->grid = preset;
    b->cloud = detail::timed_stage(b->timings, "cloud", [&] { return build_cloud(preset.grid, domain); });
    b->graph = detail::timed_stage(b->timings, "adjacency", [&] {
        return build_adjacency(b->cloud, opt.adjacency, default_radius(b->cloud.diameter(), preset.grid, opt.radius_factor));
    });
    LaplacianOptions lopt;
    lopt.method = opt.laplacian;
    b->ops = detail::timed_stage(b->timings, "sbp", [&] { return assemble_sbp(b->cloud, b->graph, lopt, &b->solve_stats); });
    detail::timed_stage(b->timings, "norm", [&] { b->set_norm(opt.norm); });
    return b;
}

inline std::unique_ptr<OperatorBuild> build_operators(const ExperimentConfig& c, const std::string& grid) {
    return build_operators(c.domain, grid_preset(grid), {c.adjacency, c.norm, c.radius_factor, c.laplacian});
}

inline nlohmann::json to_json(const OperatorBuild& b) {
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& t : b.timings) timings[t.stage] = t.seconds;
    return {{"grid", b.grid.name},
            {"nx", b.grid.grid.nx},
            {"ny", b.grid.grid.ny},
            {"n_boundary", b.grid.grid.n_boundary},
            {"n_hole", b.cloud.domain.holes.empty() ? 0 : b.grid.grid.n_hole},
            {"N", b.cloud.size()},
            {"N_interior", b.cloud.interior_count},
            {"N_boundary", b.cloud.boundary_count()},
            {"adjacency", std::string(to_string(b.graph.method()))},
            {"r", b.graph.radius()},
            {"edges", b.graph.edge_count()},
            {"psi_iterations", {b.solve_stats.x.iterations, b.solve_stats.y.iterations}},
            {"psi_residual", {b.solve_stats.x.relative_residual, b.solve_stats.y.relative_residual}},
            {"norm_clipped", clipped_count(b.ops.H)},
            {"invariants", to_json(b.report)},
            {"timings", timings}};
}

/// L2 error of D u - u_axis under the build's current norm.
inline double derivative_l2_error(const OperatorBuild& b, const TestFunction& f, Axis axis = Axis::x) {
    return l2_error(b.ops.H, derivative_error(b.ops, b.cloud, f, axis));
}

struct SolveSummary {
    std::string grid;
    std::size_t N = 0;
    double error = std::numeric_limits<double>::quiet_NaN();
    std::size_t steps = 0;
    double t_final = 0.0;
    double dt_min = 0.0;
    double dt_max = 0.0;
    double wall_seconds = 0.0;
    double min_density = std::numeric_limits<double>::quiet_NaN();
    double min_pressure = std::numeric_limits<double>::quiet_NaN();
};

inline nlohmann::json to_json(const SolveSummary& s) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"grid", s.grid},         {"N", s.N},
            {"error", num(s.error)},  {"steps", s.steps},
            {"t_final", s.t_final},   {"dt_min", s.dt_min},
            {"dt_max", s.dt_max},     {"wall_seconds", s.wall_seconds},
            {"min_density", num(s.min_density)}, {"min_pressure", num(s.min_pressure)}};
}

/// Snapshot sink: (time, x, y, component values).
using SnapshotWriter = std::function<void(double t, const PointCloud&, const std::vector<std::vector<double>>&)>;

namespace detail {

template <class Eq>
SolveSummary finish_run(const OperatorBuild& b, const RunResult<Eq>& r, const ExactSolution<Eq>* exact,
                        ErrorComponents which, const SnapshotWriter& writer) {
    SolveSummary s;
    s.grid = b.grid.name;
    s.N = b.cloud.size();
    if (exact) s.error = l2_state_error<Eq>(b.cloud, b.ops.H, r.u, *exact, r.t, which);
    s.steps = r.steps;
    s.t_final = r.t;
    s.dt_min = r.dt_min;
    s.dt_max = r.dt_max;
    s.wall_seconds = r.wall_seconds;
    if constexpr (std::is_same_v<Eq, Euler>) {
        s.min_density = r.min_density;
        s.min_pressure = r.min_pressure;
    }
    if (writer) {
        for (const auto& snap : r.snapshots) {
            std::vector<std::vector<double>> cols(snap.u.size());
            for (std::size_t i = 0; i < snap.u.size(); ++i) cols[i].assign(snap.u[i].begin(), snap.u[i].end());
            writer(snap.t, b.cloud, cols);
        }
    }
    return s;
}

}  // namespace detail

/// Integrates the configured problem on a prepared build.
inline SolveSummary run_problem(const OperatorBuild& b, const ExperimentConfig& c, const SnapshotWriter& writer = {}) {
    if (c.equation == EquationKind::advection) {
        if (c.problem != ProblemKind::advection_sine) throw ParameterError("advection supports advection_sine only");
        const Advection eq{c.advection_a, c.advection_b};
        const auto exact = advection_sine(eq);
        SemiDiscretization<Advection> sd(b.cloud, b.ops, eq, c.flux, {c.bc, c.imposition, exact}, c.lambda);
        const auto r = integrate(sd, sample_state<Advection>(b.cloud, exact, 0.0), c.time);
        return detail::finish_run<Advection>(b, r, &exact, c.error, writer);
    }
    const Euler eq{c.gamma};
    if (c.problem == ProblemKind::advection_sine) throw ParameterError("advection_sine is not an Euler problem");
    const bool has_exact = c.problem != ProblemKind::explosion;
    const auto exact = c.problem == ProblemKind::explosion ? explosion(eq)
                                                           : density_wave(eq, c.problem == ProblemKind::density_wave_c0);
    SemiDiscretization<Euler> sd(b.cloud, b.ops, eq, c.flux, {c.bc, c.imposition, exact}, c.lambda);
    const auto r = integrate(sd, sample_state<Euler>(b.cloud, exact, 0.0), c.time);
    return detail::finish_run<Euler>(b, r, has_exact ? &exact : nullptr, c.error, writer);
}

}  // namespace mfsbp
