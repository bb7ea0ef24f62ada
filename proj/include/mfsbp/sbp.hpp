#pragma once

// SBP operator assembly: Q = S + E/2 with S_ij = psi_i - psi_j on graph edges,
// where L psi = -E 1 / 2 makes Q exact on constants.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <json.hpp>

#include "mfsbp/adjacency.hpp"
#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/laplacian.hpp"

namespace mfsbp {

struct BoundaryOperator {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
};

/// Diagonals (E_x)_ii = w_i n_x,i and (E_y)_ii = w_i n_y,i; zero at interior nodes.
inline BoundaryOperator build_E(const PointCloud& cloud) {
    const auto n = static_cast<Eigen::Index>(cloud.size());
    BoundaryOperator E{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    for (std::size_t i = cloud.interior_count; i < cloud.size(); ++i) {
        E.x[static_cast<Eigen::Index>(i)] = cloud.weight[i] * cloud.normal_x[i];
        E.y[static_cast<Eigen::Index>(i)] = cloud.weight[i] * cloud.normal_y[i];
    }
    return E;
}

/// S_ij = psi_i - psi_j on edges of the graph.
inline SparseMatrix build_S(const AdjacencyGraph& g, const Eigen::VectorXd& psi) {
    if (static_cast<std::size_t>(psi.size()) != g.node_count()) throw ParameterError("psi size mismatch");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * g.edge_count());
    for (const auto& [a, b] : g.edges()) {
        const double s = psi[a] - psi[b];
        if (s == 0.0) continue;
        t.emplace_back(static_cast<int>(a), static_cast<int>(b), s);
        t.emplace_back(static_cast<int>(b), static_cast<int>(a), -s);
    }
    const auto n = static_cast<Eigen::Index>(g.node_count());
    SparseMatrix S(n, n);
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

/// S from precomputed differences d_k = psi_a - psi_b, one per edge of g.edges().
inline SparseMatrix build_S(const AdjacencyGraph& g, const std::vector<double>& d) {
    if (d.size() != g.edge_count()) throw ParameterError("edge difference count mismatch");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * g.edge_count());
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (d[k] == 0.0) continue;
        const auto [a, b] = g.edges()[k];
        t.emplace_back(static_cast<int>(a), static_cast<int>(b), d[k]);
        t.emplace_back(static_cast<int>(b), static_cast<int>(a), -d[k]);
    }
    const auto n = static_cast<Eigen::Index>(g.node_count());
    SparseMatrix S(n, n);
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

/// Q_x, Q_y, E_x, E_y and H for one cloud. H stays empty until a norm is chosen.
struct SbpOperatorSet {
    SparseMatrix Qx;
    SparseMatrix Qy;
    Eigen::VectorXd Ex;
    Eigen::VectorXd Ey;
    Eigen::VectorXd H;
    Eigen::VectorXd psi_x;
    Eigen::VectorXd psi_y;
    /// Graph edges (i < j); the skew part on edge (i, j) is (psi_i - psi_j).
    std::vector<Edge> edges;

    std::size_t size() const { return static_cast<std::size_t>(Ex.size()); }
    bool has_norm() const { return H.size() == Ex.size() && H.size() > 0; }

    /// Skew-part "normal" n_ij = ((Q_x)_ij, (Q_y)_ij) for the k-th edge, i < j.
    std::pair<double, double> edge_normal(std::size_t k) const {
        const auto [a, b] = edges[k];
        return {psi_x[a] - psi_x[b], psi_y[a] - psi_y[b]};
    }
};

struct AssemblyStats {
    SolveStats x;
    SolveStats y;
};

inline SparseMatrix add_half_diagonal(const SparseMatrix& S, const Eigen::VectorXd& e) {
    SparseMatrix D(S.rows(), S.cols());
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < e.size(); ++i)
        if (e[i] != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), 0.5 * e[i]);
    D.setFromTriplets(t.begin(), t.end());
    SparseMatrix Q = S + D;
    Q.prune(0.0);
    return Q;
}

inline SbpOperatorSet assemble_sbp(const PointCloud& cloud, const AdjacencyGraph& g, LaplacianOptions opt = {},
                                   AssemblyStats* stats = nullptr) {
    if (g.node_count() != cloud.size()) throw ParameterError("graph and cloud sizes differ");
    auto E = build_E(cloud);
    SbpOperatorSet ops;
    ops.Ex = std::move(E.x);
    ops.Ey = std::move(E.y);
    ops.edges = g.edges();
    if (g.node_count() > 1 && g.edge_count() + 1 == g.node_count()) {
        // Spanning tree (MST): exact edge flows. Differencing a solved psi loses
        // digits in proportion to tree depth.
        const SparseMatrix L = build_laplacian(g);
        const Eigen::VectorXd bx = -0.5 * ops.Ex, by = -0.5 * ops.Ey;
        const auto dx = tree_edge_differences(g, bx, ops.psi_x);
        const auto dy = tree_edge_differences(g, by, ops.psi_y);
        if (stats) {
            stats->x = {0, bx.norm() > 0 ? (L * ops.psi_x - bx).norm() / bx.norm() : 0.0};
            stats->y = {0, by.norm() > 0 ? (L * ops.psi_y - by).norm() / by.norm() : 0.0};
        }
        ops.Qx = add_half_diagonal(build_S(g, dx), ops.Ex);
        ops.Qy = add_half_diagonal(build_S(g, dy), ops.Ey);
        return ops;
    }
    LaplacianSolver solver(build_laplacian(g), opt);
    ops.psi_x = solver.solve(-0.5 * ops.Ex);
    if (stats) stats->x = solver.last_stats();
    ops.psi_y = solver.solve(-0.5 * ops.Ey);
    if (stats) stats->y = solver.last_stats();
    ops.Qx = add_half_diagonal(build_S(g, ops.psi_x), ops.Ex);
    ops.Qy = add_half_diagonal(build_S(g, ops.psi_y), ops.Ey);
    return ops;
}

/// Measured residuals of the SBP identities.
struct SbpReport {
    double q1_x = 0.0;        // ||Q_x 1||_inf
    double q1_y = 0.0;
    double qmax_x = 0.0;      // max |Q_x|
    double qmax_y = 0.0;
    double qe_x = 0.0;        // max |Q_x + Q_x^T - E_x|
    double qe_y = 0.0;
    double skew_x = 0.0;      // max |S + S^T| off the diagonal
    double skew_y = 0.0;
    double e_sum_x = 0.0;     // 1^T E_x 1
    double e_sum_y = 0.0;
    double e_interior = 0.0;  // max |E| over interior nodes
    double h_min = std::numeric_limits<double>::quiet_NaN();
    double h_bound = 0.0;     // 1 / N^2

    bool consistency_ok(double tol = 1e-11) const { return q1_x <= tol && q1_y <= tol; }
    bool sbp_ok(double tol = 1e-12) const { return qe_x <= tol && qe_y <= tol; }
    bool skew_ok() const { return skew_x == 0.0 && skew_y == 0.0; }
    bool boundary_ok(double tol = 1e-10) const {
        return std::abs(e_sum_x) <= tol && std::abs(e_sum_y) <= tol && e_interior == 0.0;
    }
    /// NaN-safe: passes when no norm is attached.
    bool norm_ok() const { return std::isnan(h_min) || h_min >= h_bound; }
    bool passed() const { return consistency_ok() && sbp_ok() && skew_ok() && boundary_ok() && norm_ok(); }
};

namespace detail {

inline void measure(const SparseMatrix& Q, const Eigen::VectorXd& E, double& q1, double& qmax, double& qe,
                    double& skew) {
    const Eigen::VectorXd row = Q * Eigen::VectorXd::Ones(Q.cols());
    q1 = row.lpNorm<Eigen::Infinity>();
    qmax = 0.0;
    for (Eigen::Index k = 0; k < Q.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(Q, k); it; ++it) qmax = std::max(qmax, std::abs(it.value()));
    const SparseMatrix Qt = Q.transpose();
    const SparseMatrix sum = Q + Qt;
    qe = 0.0;
    skew = 0.0;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(Q.rows());
    for (Eigen::Index k = 0; k < sum.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(sum, k); it; ++it) {
            if (it.row() == it.col()) {
                diag[it.row()] = it.value();
            } else {
                qe = std::max(qe, std::abs(it.value()));
                skew = std::max(skew, std::abs(it.value()));
            }
        }
    }
    qe = std::max(qe, (diag - E).lpNorm<Eigen::Infinity>());
}

}  // namespace detail

inline SbpReport verify_sbp(const SbpOperatorSet& ops, std::size_t interior_count) {
    SbpReport r;
    detail::measure(ops.Qx, ops.Ex, r.q1_x, r.qmax_x, r.qe_x, r.skew_x);
    detail::measure(ops.Qy, ops.Ey, r.q1_y, r.qmax_y, r.qe_y, r.skew_y);
    r.e_sum_x = ops.Ex.sum();
    r.e_sum_y = ops.Ey.sum();
    const auto ni = static_cast<Eigen::Index>(interior_count);
    r.e_interior = ni > 0 ? std::max(ops.Ex.head(ni).lpNorm<Eigen::Infinity>(), ops.Ey.head(ni).lpNorm<Eigen::Infinity>())
                          : 0.0;
    const double n = static_cast<double>(ops.size());
    r.h_bound = 1.0 / (n * n);
    if (ops.has_norm()) r.h_min = ops.H.minCoeff();
    return r;
}

inline nlohmann::json to_json(const SbpReport& r) {
    auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
    return {{"q1_x", r.q1_x},       {"q1_y", r.q1_y},       {"qe_x", r.qe_x},       {"qe_y", r.qe_y},
            {"skew_x", r.skew_x},   {"skew_y", r.skew_y},   {"e_sum_x", r.e_sum_x}, {"e_sum_y", r.e_sum_y},
            {"h_min", num(r.h_min)}, {"h_bound", r.h_bound}, {"passed", r.passed()}};
}

namespace detail {

inline void write_coo(const std::filesystem::path& path, const SparseMatrix& M) {
    std::ofstream os(path);
    if (!os) throw ParameterError("cannot open " + path.string());
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index k = 0; k < M.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(M, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

inline void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v) {
    std::ofstream os(path);
    if (!os) throw ParameterError("cannot open " + path.string());
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < v.size(); ++i) os << v[i] << '\n';
}

}  // namespace detail

/// Writes Qx.coo, Qy.coo (row col value), Ex.txt, Ey.txt, H.txt and a JSON
/// manifest naming them and the cloud file.
inline nlohmann::json write_operators(const std::filesystem::path& dir, const SbpOperatorSet& ops,
                                      const std::string& cloud_file, nlohmann::json extra = nlohmann::json::object()) {
    std::filesystem::create_directories(dir);
    detail::write_coo(dir / "Qx.coo", ops.Qx);
    detail::write_coo(dir / "Qy.coo", ops.Qy);
    detail::write_vector(dir / "Ex.txt", ops.Ex);
    detail::write_vector(dir / "Ey.txt", ops.Ey);
    nlohmann::json manifest = {{"N", ops.size()},
                               {"cloud", cloud_file},
                               {"Qx", "Qx.coo"},
                               {"Qy", "Qy.coo"},
                               {"Ex", "Ex.txt"},
                               {"Ey", "Ey.txt"},
                               {"nnz_Qx", ops.Qx.nonZeros()},
                               {"nnz_Qy", ops.Qy.nonZeros()}};
    if (ops.has_norm()) {
        detail::write_vector(dir / "H.txt", ops.H);
        manifest["H"] = "H.txt";
    }
    manifest.update(extra);
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
    return manifest;
}

}  // namespace mfsbp
