#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "mfsbp/calculus.hpp"
#include "support.hpp"

using namespace mfsbp;

TEST(Derivative, ConstantsAreExact) {
    for (auto m : {AdjacencyMethod::euclidean_radius, AdjacencyMethod::delaunay2}) {
        const auto b = fixtures::small_build(m, true);
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(b->cloud.size()));
        for (auto axis : {Axis::x, Axis::y}) {
            // Relative to the operator scale |Q|/H.
            const double scale = b->report.qmax_x / b->ops.H.minCoeff();
            EXPECT_LE(apply_D(b->ops, axis, one).lpNorm<Eigen::Infinity>(), 1e-11 * scale);
        }
    }
}

TEST(Derivative, TwoNodeHandCalculation) {
    // One-dimensional two-point SBP pair: Q = [[-1/2, 1/2], [-1/2, 1/2]], H = diag(1/2, 1/2).
    SbpOperatorSet ops;
    ops.Qx.resize(2, 2);
    ops.Qx.insert(0, 0) = -0.5;
    ops.Qx.insert(0, 1) = 0.5;
    ops.Qx.insert(1, 0) = -0.5;
    ops.Qx.insert(1, 1) = 0.5;
    ops.Qy.resize(2, 2);
    ops.Ex = Eigen::Vector2d(-1.0, 1.0);
    ops.Ey = Eigen::Vector2d::Zero();
    ops.H = Eigen::Vector2d(0.5, 0.5);
    const auto d = apply_D(ops, Axis::x, Eigen::Vector2d(1.0, 3.0));
    EXPECT_DOUBLE_EQ(d[0], 2.0);
    EXPECT_DOUBLE_EQ(d[1], 2.0);
    EXPECT_EQ(apply_D(ops, Axis::y, Eigen::Vector2d(1.0, 3.0)), Eigen::Vector2d::Zero());
}

TEST(Derivative, RequiresNorm) {
    SbpOperatorSet ops;
    ops.Ex = Eigen::VectorXd::Zero(2);
    EXPECT_THROW(apply_D(ops, Axis::x, Eigen::VectorXd::Zero(2)), ParameterError);
}

TEST(L2Error, Examples) {
    const Eigen::VectorXd H = Eigen::VectorXd::Constant(100, 9.0 * std::numbers::pi / 100.0);
    EXPECT_EQ(l2_error(H, Eigen::VectorXd::Zero(100)), 0.0);
    EXPECT_NEAR(l2_error(H, Eigen::VectorXd::Ones(100)), std::sqrt(9.0 * std::numbers::pi), 1e-12);
    EXPECT_NEAR(std::sqrt(9.0 * std::numbers::pi), 5.3174, 1e-4);
}

TEST(L2Error, MatchesExplicitSum) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd H(80), v(80);
    double s = 0.0;
    for (int i = 0; i < 80; ++i) {
        H[i] = u(rng);
        v[i] = u(rng) - 0.5;
        s += H[i] * v[i] * v[i];
    }
    EXPECT_NEAR(l2_error(H, v), std::sqrt(s), 1e-14);
}

TEST(LinfRegion, SelectsNodes) {
    const auto c = fixtures::small_disk();
    Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = c.points[i].x;
    const double right = linf_error_region(c, v, [](const Point2& p) { return p.x > 0.0; });
    EXPECT_DOUBLE_EQ(right, 3.0);
    const double inner = linf_error_region(c, v, [](const Point2& p) { return p.x * p.x + p.y * p.y < 1.0; });
    EXPECT_LT(inner, 1.0);
    EXPECT_THROW(linf_error_region(c, v, [](const Point2&) { return false; }), ParameterError);
}

TEST(Rates, Definition) {
    const auto r = convergence_rates({0.4, 0.2, 0.1});
    ASSERT_EQ(r.size(), 2u);
    EXPECT_DOUBLE_EQ(r[0], 1.0);
    EXPECT_DOUBLE_EQ(r[1], 1.0);
}

TEST(Rates, StudyAndCsv) {
    const std::vector<double> errs = {0.4, 0.1};
    std::size_t k = 0;
    const auto rows = convergence_study({"a", "b"}, [&](const std::string&) {
        const std::pair<std::size_t, double> row{10 * (k + 1), errs[k]};
        ++k;
        return row;
    });
    EXPECT_TRUE(std::isnan(rows[0].rate));
    EXPECT_DOUBLE_EQ(rows[1].rate, 2.0);
    std::ostringstream os;
    write_convergence_csv(os, rows);
    EXPECT_EQ(os.str(), "grid,N,error,rate\na,10,0.4,\nb,20,0.1,2\n");
    EXPECT_THROW(convergence_study({"a"}, [](const std::string&) { return std::pair<std::size_t, double>{1, 1.0}; }),
                 ParameterError);
}

TEST(TestFunctions, AnalyticDerivativesMatchFiniteDifferences) {
    for (const auto& f : {u1_function(), u2_function()}) {
        for (const auto& [x, y] : std::vector<std::pair<double, double>>{{0.3, -0.7}, {1.1, 0.4}, {-2.0, 1.5}}) {
            const double h = 1e-5;
            EXPECT_NEAR(f.dx(x, y), (f.u(x + h, y) - f.u(x - h, y)) / (2 * h), 1e-8) << f.name;
            EXPECT_NEAR(f.dy(x, y), (f.u(x, y + h) - f.u(x, y - h)) / (2 * h), 1e-8) << f.name;
        }
    }
    EXPECT_THROW(test_function("u3"), ParameterError);
}

TEST(TestFunctions, LinearDerivativeErrorIsBoundaryDominated) {
    const auto b = build_operators(DomainSpec::disk(3.0), grid_preset("grid1"));
    const auto e = derivative_error(b->ops, b->cloud, u1_function(), Axis::x);
    const double outer = linf_error_region(b->cloud, e, [](const Point2& p) { return p.x * p.x + p.y * p.y >= 4.0; });
    const double inner = linf_error_region(b->cloud, e, [](const Point2& p) { return p.x * p.x + p.y * p.y < 4.0; });
    EXPECT_GT(outer, 10.0 * inner);
    EXPECT_NEAR(l2_error(b->ops.H, e), 0.2605, 0.0005);
}
