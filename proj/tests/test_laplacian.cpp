#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "mfsbp/laplacian.hpp"
#include "support.hpp"

using namespace mfsbp;

namespace {

AdjacencyGraph path3() { return AdjacencyGraph(3, {{0, 1}, {1, 2}}, AdjacencyMethod::euclidean_radius); }

}  // namespace

TEST(Laplacian, PathGraph) {
    const Eigen::MatrixXd L = Eigen::MatrixXd(build_laplacian(path3()));
    Eigen::MatrixXd expect(3, 3);
    expect << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    EXPECT_EQ(L, expect);
}

TEST(Laplacian, CompleteGraph) {
    const AdjacencyGraph k3(3, {{0, 1}, {0, 2}, {1, 2}}, AdjacencyMethod::euclidean_radius);
    const Eigen::MatrixXd L = Eigen::MatrixXd(build_laplacian(k3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(L(i, j), i == j ? 2.0 : -1.0);
}

TEST(Laplacian, RowSumsVanishExactly) {
    const auto c = fixtures::small_punctured();
    const auto L = build_laplacian(delaunay_adjacency(c, 2));
    const Eigen::VectorXd s = L * Eigen::VectorXd::Ones(L.cols());
    EXPECT_EQ(s.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Laplacian, DisconnectedGraphIsRejected) {
    EXPECT_THROW(build_laplacian(AdjacencyGraph(3, {{0, 1}}, AdjacencyMethod::euclidean_radius)), ConnectivityError);
}

TEST(PsiSolve, ZeroRightHandSide) {
    for (auto m : {LaplacianMethod::pcg, LaplacianMethod::cholesky}) {
        LaplacianOptions opt;
        opt.method = m;
        EXPECT_EQ(solve_psi(build_laplacian(path3()), Eigen::VectorXd::Zero(3), opt), Eigen::VectorXd::Zero(3));
    }
}

TEST(PsiSolve, PathGraphExample) {
    Eigen::VectorXd b(3);
    b << 1, 0, -1;
    for (auto m : {LaplacianMethod::pcg, LaplacianMethod::cholesky}) {
        LaplacianOptions opt;
        opt.method = m;
        const auto psi = solve_psi(build_laplacian(path3()), b, opt);
        EXPECT_NEAR(psi[0], 1.0, 1e-12);
        EXPECT_NEAR(psi[1], 0.0, 1e-12);
        EXPECT_NEAR(psi[2], -1.0, 1e-12);
    }
}

TEST(PsiSolve, IncompatibleRightHandSide) {
    Eigen::VectorXd b(3);
    b << 1, 0, 0;
    EXPECT_THROW(solve_psi(build_laplacian(path3()), b), CompatibilityError);
}

TEST(PsiSolve, IterationCapReportsSolverError) {
    const auto c = fixtures::small_disk();
    const auto E = build_E(c);
    LaplacianOptions opt;
    opt.max_iterations = 2;
    try {
        solve_psi(build_laplacian(radius_adjacency(c, default_radius(6.0, GridSpec{15, 15, 40, 0}))), -0.5 * E.x, opt);
        FAIL() << "expected a solver error";
    } catch (const SolverError& e) {
        EXPECT_GT(e.residual(), 1e-12);
        EXPECT_EQ(e.iterations(), 2u);
    }
}

TEST(PsiSolve, AgreesWithDensePseudoInverse) {
    for (bool punctured : {false, true}) {
        const auto c = punctured ? fixtures::small_punctured() : fixtures::small_disk();
        ASSERT_LE(c.size(), 1000u);
        const auto E = build_E(c);
        for (const auto& g : {delaunay_adjacency(c, 1), mst_adjacency(c)}) {
            const auto L = build_laplacian(g);
            const Eigen::VectorXd b = -0.5 * E.x;
            const Eigen::VectorXd ref = fixtures::pseudo_inverse_solve(L, b);
            for (auto m : {LaplacianMethod::pcg, LaplacianMethod::cholesky}) {
                if (m == LaplacianMethod::pcg && g.method() == AdjacencyMethod::mst) continue;
                LaplacianOptions opt;
                opt.method = m;
                opt.tolerance = 1e-10;
                const auto psi = solve_psi(L, b, opt);
                EXPECT_NEAR(psi.sum(), 0.0, 1e-9);
                EXPECT_LT((psi - ref).lpNorm<Eigen::Infinity>(), 1e-8 * std::max(1.0, ref.lpNorm<Eigen::Infinity>()));
            }
        }
    }
}

TEST(PsiSolve, GridOneResidual) {
    const auto c = build_disk_cloud(GridSpec{75, 75, 250, 0}, 3.0);
    const auto L = build_laplacian(radius_adjacency(c, default_radius(6.0, GridSpec{75, 75, 250, 0})));
    const Eigen::VectorXd b = -0.5 * build_E(c).x;
    LaplacianSolver solver(L);
    const auto psi = solver.solve(b);
    EXPECT_LE((L * psi - b).norm(), 1e-10 * b.norm());
    EXPECT_LE(solver.last_stats().relative_residual, 1e-12);
    EXPECT_GT(solver.last_stats().iterations, 0u);
}

TEST(TreeSolve, MatchesPseudoInverseOnARandomTree) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < 40; ++i) edges.emplace_back(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng), i);
    const AdjacencyGraph g(40, edges, AdjacencyMethod::mst);
    Eigen::VectorXd b(40);
    for (auto& v : b) v = u(rng);
    b.array() -= b.mean();
    Eigen::VectorXd psi;
    const auto d = tree_edge_differences(g, b, psi);
    const Eigen::VectorXd ref = fixtures::pseudo_inverse_solve(build_laplacian(g), b);
    EXPECT_LE((psi - ref).lpNorm<Eigen::Infinity>(), 1e-12);
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto [a, c] = g.edges()[k];
        EXPECT_NEAR(d[k], ref[a] - ref[c], 1e-12);
    }
}

TEST(TreeSolve, PathFlowsAreSubtreeSums) {
    Eigen::VectorXd psi;
    const auto d = tree_edge_differences(path3(), Eigen::Vector3d(1.0, 0.0, -1.0), psi);
    // psi_0 - psi_1 = b_0 and psi_1 - psi_2 = b_0 + b_1.
    EXPECT_EQ(d, (std::vector<double>{1.0, 1.0}));
    EXPECT_NEAR(psi[0], 1.0, 1e-15);
    EXPECT_NEAR(psi[2], -1.0, 1e-15);
}

TEST(TreeSolve, Rejections) {
    Eigen::VectorXd psi;
    const AdjacencyGraph triangle(3, {{0, 1}, {1, 2}, {0, 2}}, AdjacencyMethod::euclidean_radius);
    EXPECT_THROW(tree_edge_differences(triangle, Eigen::Vector3d::Zero(), psi), ParameterError);
    EXPECT_THROW(tree_edge_differences(path3(), Eigen::Vector3d(1.0, 0.0, 0.0), psi), CompatibilityError);
}

TEST(TreeSolve, SpanningTreeOperatorsAreConsistentToRounding) {
    const auto b = fixtures::small_build(AdjacencyMethod::mst, true);
    EXPECT_LE(std::max(b->report.q1_x, b->report.q1_y), 1e-14);
    EXPECT_LE(b->solve_stats.x.relative_residual, 1e-10);
}
