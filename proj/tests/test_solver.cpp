#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "mfsbp/solver.hpp"
#include "support.hpp"

using namespace mfsbp;

namespace {

const Euler gas{1.4};

// max_i sum_j |Q_ij| over both directions: the scale of a residual entry per unit flux.
double row_scale(const SbpOperatorSet& ops) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < ops.Qx.outerSize(); ++i) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(ops.Qx, i); it; ++it) s += std::abs(it.value());
        for (SparseMatrix::InnerIterator it(ops.Qy, i); it; ++it) s += std::abs(it.value());
        m = std::max(m, s);
    }
    return 2.0 * m;
}

template <class S>
double field_max_abs(const Field<S>& u) {
    double m = 0.0;
    for (const auto& s : u)
        for (double v : s) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

class FreeStream : public ::testing::TestWithParam<std::tuple<AdjacencyMethod, FluxKind>> {};

TEST_P(FreeStream, ConstantStateIsPreserved) {
    const auto [method, flux] = GetParam();
    for (bool punctured : {false, true}) {
        const auto b = fixtures::small_build(method, punctured);
        const auto u0 = gas.from_primitive(1.3, 0.4, -0.25, 1.7);
        const ExactSolution<Euler> constant = [u0](double, double, double) { return u0; };
        SemiDiscretization<Euler> sd(b->cloud, b->ops, gas, flux, {BcKind::dirichlet_exact, BcImposition::riemann, constant});
        const Field<Euler::State> u(b->cloud.size(), u0);
        Field<Euler::State> du;
        sd.residual(u, 0.0, du);
        EXPECT_LE(field_max_abs(du), 1e-12 * row_scale(b->ops) * fixtures::max_abs(gas.flux(u0, 1.0, 0.0)));
    }
}

INSTANTIATE_TEST_SUITE_P(Methods, FreeStream,
                         ::testing::Combine(::testing::Values(AdjacencyMethod::euclidean_radius,
                                                              AdjacencyMethod::delaunay1, AdjacencyMethod::mst),
                                            ::testing::Values(FluxKind::central, FluxKind::llf, FluxKind::hllc)));

TEST(Conservation, InteriorFluxesCancel) {
    const auto b = fixtures::small_build(AdjacencyMethod::delaunay2, true);
    std::mt19937_64 rng(17);
    Field<Euler::State> u(b->cloud.size());
    for (auto& s : u) s = fixtures::random_euler_state(gas, rng);
    const auto data = density_wave(gas);
    for (auto flux : {FluxKind::llf, FluxKind::hllc}) {
        SemiDiscretization<Euler> sd(b->cloud, b->ops, gas, flux, {BcKind::dirichlet_exact, BcImposition::riemann, data});
        Field<Euler::State> du;
        sd.residual(u, 0.2, du);
        // Only boundary fluxes survive in 1^T du.
        Euler::State total{}, expect{}, magnitude{};
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t k = 0; k < 4; ++k) {
                total[k] += du[i][k];
                magnitude[k] += std::abs(du[i][k]);
            }
        const auto& c = b->cloud;
        for (std::size_t i = c.interior_count; i < c.size(); ++i) {
            const auto ub = data(c.points[i].x, c.points[i].y, 0.2);
            const auto f = numerical_flux(gas, flux, u[i], ub, c.normal_x[i], c.normal_y[i]);
            for (std::size_t k = 0; k < 4; ++k) expect[k] += c.weight[i] * f[k];
        }
        for (std::size_t k = 0; k < 4; ++k) EXPECT_LE(std::abs(total[k] - expect[k]), 1e-12 * magnitude[k]);

        sd.set_boundary_terms(false);
        sd.residual(u, 0.2, du);
        Euler::State open{}, open_expect{};
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t k = 0; k < 4; ++k) open[k] += du[i][k];
        for (std::size_t i = c.interior_count; i < c.size(); ++i) {
            const auto f = gas.flux(u[i], c.normal_x[i], c.normal_y[i]);
            for (std::size_t k = 0; k < 4; ++k) open_expect[k] += c.weight[i] * f[k];
        }
        for (std::size_t k = 0; k < 4; ++k) EXPECT_LE(std::abs(open[k] - open_expect[k]), 1e-12 * magnitude[k]);
    }
}

TEST(CentralFlux, MatchesMatrixForm) {
    const auto b = build_operators(DomainSpec::disk(3.0), grid_preset("grid1"));
    const auto& c = b->cloud;
    const Advection eq{1.0, 0.5};
    const auto exact = advection_sine(eq);
    SemiDiscretization<Advection> sd(c, b->ops, eq, FluxKind::central,
                                     {BcKind::inflow_dirichlet, BcImposition::state, exact});
    const double t = 0.35;
    Field<Advection::State> u(c.size());
    Eigen::VectorXd uv(static_cast<Eigen::Index>(c.size())), ub(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double v = std::cos(c.points[i].x) + 0.3 * c.points[i].y;
        u[i] = {v};
        uv[static_cast<Eigen::Index>(i)] = v;
        ub[static_cast<Eigen::Index>(i)] =
            c.is_boundary(i) && eq.normal_speed(c.normal_x[i], c.normal_y[i]) < 0.0 ? exact(c.points[i].x, c.points[i].y, t)[0] : v;
    }
    // H u_t = -(Q_x a u + Q_y b u + E_x a (u_bc - u) + E_y b (u_bc - u)).
    const Eigen::VectorXd jump = ub - uv;
    const Eigen::VectorXd r = eq.a * (b->ops.Qx * uv) + eq.b * (b->ops.Qy * uv) +
                              (eq.a * b->ops.Ex + eq.b * b->ops.Ey).cwiseProduct(jump);
    const Eigen::VectorXd oracle = -r.cwiseQuotient(b->ops.H);
    const auto rhs = sd.rhs(u, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        worst = std::max(worst, std::abs(rhs[i][0] - oracle[static_cast<Eigen::Index>(i)]));
    EXPECT_LE(worst, 1e-10 * oracle.lpNorm<Eigen::Infinity>());
}

TEST(Residual, SinglePairInstantiation) {
    PointCloud c;
    c.points = {{0, 0}, {1, 0}};
    c.interior_count = 2;
    c.normal_x = c.normal_y = c.weight = {0.0, 0.0};
    SbpOperatorSet ops;
    ops.edges = {{0, 1}};
    ops.psi_x = Eigen::Vector2d(0.25, -0.25);
    ops.psi_y = Eigen::Vector2d::Zero();
    ops.Ex = ops.Ey = Eigen::Vector2d::Zero();
    ops.H = Eigen::Vector2d::Ones();
    ops.Qx = build_S(AdjacencyGraph(2, {{0, 1}}, AdjacencyMethod::euclidean_radius), ops.psi_x);
    ops.Qy.resize(2, 2);
    ASSERT_DOUBLE_EQ(ops.Qx.coeff(0, 1), 0.5);
    const Advection eq{1.0, 0.5};
    SemiDiscretization<Advection> sd(c, ops, eq, FluxKind::llf, {BcKind::inflow_dirichlet, BcImposition::riemann, {}});
    const Field<Advection::State> u = {{2.0}, {5.0}};
    Field<Advection::State> du;
    sd.residual(u, 0.0, du);
    const double f = llf_flux(eq, u[0], u[1], 1.0, 0.0)[0];
    EXPECT_DOUBLE_EQ(du[0][0], 2.0 * 0.5 * f);
    EXPECT_DOUBLE_EQ(du[1][0], -2.0 * 0.5 * f);
}

TEST(RungeKutta, ZeroForcingLeavesStateUnchanged) {
    Field<std::array<double, 1>> u = {{3.0}, {-1.0}};
    ssprk43_step(u, 0.0, 0.7, [](const auto& x, double, auto& out) { out.assign(x.size(), {0.0}); });
    EXPECT_EQ(u, (Field<std::array<double, 1>>{{3.0}, {-1.0}}));
}

TEST(RungeKutta, AmplificationAtZEqualsOne) {
    // Stability polynomial 1 + z + z^2/2 + z^3/6 + z^4/48 at z = 1.
    Field<std::array<double, 1>> u = {{1.0}};
    ssprk43_step(u, 0.0, 1.0, [](const auto& x, double, auto& out) { out = x; });
    EXPECT_DOUBLE_EQ(u[0][0], 1.0 + 1.0 + 0.5 + 1.0 / 6.0 + 1.0 / 48.0);
    EXPECT_DOUBLE_EQ(u[0][0], 2.6875);
}

TEST(RungeKutta, ThirdOrderUnderStepHalving) {
    // Damped rotation u' = A u, exact solution by matrix exponential.
    Eigen::Matrix2d A;
    A << -0.1, 1.0, -1.0, -0.1;
    const auto f = [&](const Field<std::array<double, 2>>& x, double, Field<std::array<double, 2>>& out) {
        out.resize(1);
        out[0] = {A(0, 0) * x[0][0] + A(0, 1) * x[0][1], A(1, 0) * x[0][0] + A(1, 1) * x[0][1]};
    };
    const double T = 2.0;
    const Eigen::Vector2d exact = std::exp(-0.1 * T) * Eigen::Vector2d(std::cos(T) + std::sin(T), std::cos(T) - std::sin(T));
    std::vector<double> errors;
    for (int n : {10, 20, 40, 80}) {
        Field<std::array<double, 2>> u = {{1.0, 1.0}};
        for (int k = 0; k < n; ++k) ssprk43_step(u, k * T / n, T / n, f);
        errors.push_back(std::hypot(u[0][0] - exact[0], u[0][1] - exact[1]));
    }
    const auto rates = convergence_rates(errors);
    for (double r : rates) EXPECT_NEAR(r, 3.0, 0.15);
}

TEST(RungeKutta, ForwardEuler) {
    Field<std::array<double, 1>> u = {{2.0}};
    forward_euler_step(u, 0.0, 0.5, [](const auto& x, double, auto& out) { out = x; });
    EXPECT_DOUBLE_EQ(u[0][0], 3.0);
}

TEST(TimeStep, StillAdvectionTakesTheRemainingTime) {
    const auto b = fixtures::small_build(AdjacencyMethod::euclidean_radius);
    const Advection eq{0.0, 0.0};
    SemiDiscretization<Advection> sd(b->cloud, b->ops, eq, FluxKind::llf,
                                     {BcKind::inflow_dirichlet, BcImposition::riemann, advection_sine(eq)});
    const Field<Advection::State> u(b->cloud.size(), {1.0});
    EXPECT_EQ(compute_dt(sd, u, TimeIntegrationConfig{}, 0.25), 0.25);
}

TEST(TimeStep, EulerAtRest) {
    const auto b = fixtures::small_build(AdjacencyMethod::euclidean_radius);
    const auto rest = gas.from_primitive(1.0, 0.0, 0.0, 1.0);
    SemiDiscretization<Euler> sd(b->cloud, b->ops, gas, FluxKind::llf, {BcKind::slip_wall, BcImposition::riemann, {}});
    const Field<Euler::State> u(b->cloud.size(), rest);
    EXPECT_NEAR(sd.max_wavespeed(u), std::sqrt(1.4), 1e-15);
    TimeIntegrationConfig cfg;
    cfg.cfl = 0.4;
    EXPECT_NEAR(compute_dt(sd, u, cfg, 10.0), 0.4 * sd.algebraic_length() / std::sqrt(1.4), 1e-15);
    cfg.dt_rule = DtRule::edge_length;
    EXPECT_NEAR(compute_dt(sd, u, cfg, 10.0), 0.4 * sd.min_edge_length() / std::sqrt(1.4), 1e-15);
    cfg.fixed_dt = 1e-3;
    EXPECT_EQ(compute_dt(sd, u, cfg, 10.0), 1e-3);
}

TEST(Integrate, SlipWallsKeepAFluidAtRest) {
    const auto b = fixtures::small_build(AdjacencyMethod::delaunay2, true);
    const auto rest = gas.from_primitive(1.0, 0.0, 0.0, 1.0);
    SemiDiscretization<Euler> sd(b->cloud, b->ops, gas, FluxKind::hllc, {BcKind::slip_wall, BcImposition::riemann, {}});
    TimeIntegrationConfig cfg;
    cfg.t_final = 0.2;
    cfg.snapshot_times = {0.0, 0.1};
    const auto r = integrate(sd, Field<Euler::State>(b->cloud.size(), rest), cfg);
    EXPECT_DOUBLE_EQ(r.t, 0.2);
    EXPECT_GT(r.steps, 1u);
    ASSERT_EQ(r.snapshots.size(), 2u);
    EXPECT_DOUBLE_EQ(r.snapshots[1].t, 0.1);
    double worst = 0.0;
    for (const auto& s : r.u) worst = std::max(worst, fixtures::max_abs_diff(s, rest));
    EXPECT_LE(worst, 1e-12);
}

TEST(Integrate, InadmissibleStateIsReported) {
    const auto b = fixtures::small_build(AdjacencyMethod::euclidean_radius);
    SemiDiscretization<Euler> sd(b->cloud, b->ops, gas, FluxKind::llf, {BcKind::slip_wall, BcImposition::riemann, {}});
    Field<Euler::State> u(b->cloud.size(), gas.from_primitive(1.0, 0.0, 0.0, 1.0));
    u[7] = {-1.0, 0.0, 0.0, 1.0};
    try {
        integrate(sd, u, TimeIntegrationConfig{});
        FAIL() << "expected a state error";
    } catch (const StateError& e) {
        EXPECT_EQ(e.node(), 7u);
    }
}

TEST(Integrate, ExactInitialDataHasZeroError) {
    const auto b = fixtures::small_build(AdjacencyMethod::euclidean_radius);
    const auto exact = density_wave(gas);
    const auto u = sample_state<Euler>(b->cloud, exact, 0.3);
    EXPECT_EQ(l2_state_error<Euler>(b->cloud, b->ops.H, u, exact, 0.3), 0.0);
    EXPECT_EQ(l2_state_error<Euler>(b->cloud, b->ops.H, u, exact, 0.3, ErrorComponents::all), 0.0);
    EXPECT_GT(l2_state_error<Euler>(b->cloud, b->ops.H, u, exact, 0.5), 0.0);
}

TEST(Integrate, ForwardEulerLlfStaysPositiveOnAnExplosion) {
    const auto b = build_operators(DomainSpec::disk(1.0), grid_preset("40:40:120"));
    const auto init = explosion(gas);
    SemiDiscretization<Euler> sd(b->cloud, b->ops, gas, FluxKind::llf, {BcKind::slip_wall, BcImposition::riemann, init});
    TimeIntegrationConfig cfg;
    cfg.stepper = TimeStepper::forward_euler;
    cfg.t_final = 0.3;
    const auto r = integrate(sd, sample_state<Euler>(b->cloud, init, 0.0), cfg);
    EXPECT_GT(r.min_density, 0.0);
    EXPECT_GT(r.min_pressure, 0.0);
}

TEST(Parsing, Enums) {
    EXPECT_EQ(parse_stepper("forward_euler"), TimeStepper::forward_euler);
    EXPECT_EQ(parse_dt_rule("edge_length"), DtRule::edge_length);
    EXPECT_EQ(parse_lambda_mode("global"), LambdaMode::global);
    EXPECT_THROW(parse_stepper("rk4"), ParameterError);
    EXPECT_THROW(parse_error_components("some"), ParameterError);
}
