#pragma once

// Graph Laplacian L = D - A and solvers for the singular consistent system
// L psi = b with the gauge 1^T psi = 0.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "mfsbp/adjacency.hpp"
#include "mfsbp/error.hpp"

namespace mfsbp {

namespace detail {

inline std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace detail

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline SparseMatrix build_laplacian(const AdjacencyGraph& g) {
    require_connected(g);
    const auto n = static_cast<Eigen::Index>(g.node_count());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(g.node_count() + 2 * g.edge_count());
    for (std::size_t i = 0; i < g.node_count(); ++i)
        t.emplace_back(static_cast<int>(i), static_cast<int>(i), static_cast<double>(g.degree(i)));
    for (const auto& [a, b] : g.edges()) {
        t.emplace_back(static_cast<int>(a), static_cast<int>(b), -1.0);
        t.emplace_back(static_cast<int>(b), static_cast<int>(a), -1.0);
    }
    SparseMatrix L(n, n);
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

enum class LaplacianMethod { pcg, cholesky };

inline LaplacianMethod parse_laplacian_method(std::string_view s) {
    if (s == "pcg") return LaplacianMethod::pcg;
    if (s == "cholesky") return LaplacianMethod::cholesky;
    throw ParameterError("unknown laplacian solver: " + std::string(s));
}

struct LaplacianOptions {
    LaplacianMethod method = LaplacianMethod::pcg;
    double tolerance = 1e-12;
    std::size_t max_iterations = 0;  // 0 means 10 * N
};

struct SolveStats {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

/// Solves L psi = b on span{1}^perp. The Jacobi preconditioner (or the
/// factorization) is built once and reused across right-hand sides.
class LaplacianSolver {
public:
    explicit LaplacianSolver(SparseMatrix L, LaplacianOptions opt = {}) : L_(std::move(L)), opt_(opt) {
        if (L_.rows() != L_.cols()) throw ParameterError("laplacian must be square");
        inv_diag_ = L_.diagonal().cwiseInverse();
        if (opt_.method == LaplacianMethod::cholesky && L_.rows() > 1) {
            // Pin node 0: the reduced matrix is SPD for a connected graph.
            const auto m = L_.rows() - 1;
            Eigen::SparseMatrix<double> reduced = L_.bottomRightCorner(m, m);
            chol_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(reduced);
            if (chol_->info() != Eigen::Success) throw SolverError("laplacian factorization failed", 0.0, 0);
        }
    }

    const SparseMatrix& matrix() const { return L_; }
    const SolveStats& last_stats() const { return stats_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) {
        const auto n = L_.rows();
        if (b.size() != n) throw ParameterError("right-hand side size mismatch");
        const double b1 = b.lpNorm<1>();
        if (std::abs(b.sum()) > 1e-10 * b1)
            throw CompatibilityError("right-hand side is not orthogonal to the constant vector (1^T b = " +
                                     std::to_string(b.sum()) + ")");
        stats_ = {};
        if (b1 == 0.0) return Eigen::VectorXd::Zero(n);
        Eigen::VectorXd psi = opt_.method == LaplacianMethod::cholesky ? solve_direct(b) : solve_pcg(b);
        stats_.relative_residual = (L_ * psi - b).norm() / b.norm();
        if (!(stats_.relative_residual <= opt_.tolerance))
            throw SolverError("laplacian solve relative residual " + detail::format_g(stats_.relative_residual) +
                                  " above tolerance after " + std::to_string(stats_.iterations) + " iterations",
                              stats_.relative_residual, stats_.iterations);
        return psi;
    }

private:
    static void project(Eigen::VectorXd& v) { v.array() -= v.mean(); }

    Eigen::VectorXd solve_direct(const Eigen::VectorXd& b) {
        const auto m = L_.rows() - 1;
        Eigen::VectorXd psi(L_.rows());
        psi[0] = 0.0;
        psi.tail(m) = chol_->solve(b.tail(m));
        project(psi);
        stats_.iterations = 1;
        // Iterative refinement down to the rounding floor: trees are ill-conditioned
        // enough that one factor solve leaves digits on the table, and S inherits
        // every bit of the residual through Q 1.
        double last = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 8; ++k) {
            const Eigen::VectorXd r = b - L_ * psi;
            const double rn = r.norm();
            if (rn == 0.0 || rn > 0.5 * last) break;
            last = rn;
            psi.tail(m) += chol_->solve(r.tail(m));
            project(psi);
            ++stats_.iterations;
        }
        return psi;
    }

    Eigen::VectorXd solve_pcg(const Eigen::VectorXd& b) {
        const auto n = L_.rows();
        const std::size_t max_it = opt_.max_iterations ? opt_.max_iterations : 10 * static_cast<std::size_t>(n);
        // Slightly tighter internal target so the true residual also passes.
        const double target = 0.5 * opt_.tolerance * b.norm();

        Eigen::VectorXd rhs = b;
        project(rhs);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd r(n), z(n), p(n), q(n);
        std::size_t it = 0;
        // Restart from the true residual whenever the recurrence claims convergence.
        for (int restart = 0; restart < 8; ++restart) {
            r.noalias() = rhs - L_ * x;
            project(r);
            if (r.norm() <= target) break;
            z = inv_diag_.cwiseProduct(r);
            project(z);
            p = z;
            double rz = r.dot(z);
            for (; it < max_it && r.norm() > target; ++it) {
                q.noalias() = L_ * p;
                const double alpha = rz / p.dot(q);
                x += alpha * p;
                r -= alpha * q;
                z = inv_diag_.cwiseProduct(r);
                project(z);
                const double rz_next = r.dot(z);
                p = z + (rz_next / rz) * p;
                rz = rz_next;
            }
            if (it >= max_it) break;
        }
        project(x);
        stats_.iterations = it;
        return x;
    }

    SparseMatrix L_;
    LaplacianOptions opt_;
    Eigen::VectorXd inv_diag_;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> chol_;
    SolveStats stats_;
};

/// Exact solve of L psi = b when g is a spanning tree. Returns psi_a - psi_b for
/// every edge (a, b) of g.edges(): the flow through a tree edge is the sum of b
/// over the subtree it cuts off, so the differences never pass through a
/// potential whose magnitude grows with tree depth. psi itself is also filled.
inline std::vector<double> tree_edge_differences(const AdjacencyGraph& g, const Eigen::VectorXd& b,
                                                 Eigen::VectorXd& psi) {
    const std::size_t n = g.node_count();
    if (n == 0 || g.edge_count() + 1 != n) throw ParameterError("graph is not a tree");
    if (static_cast<std::size_t>(b.size()) != n) throw ParameterError("right-hand side size mismatch");
    require_connected(g);
    if (std::abs(b.sum()) > 1e-10 * b.lpNorm<1>())
        throw CompatibilityError("right-hand side is not orthogonal to the constant vector (1^T b = " +
                                 std::to_string(b.sum()) + ")");
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent(n, none), order;
    order.reserve(n);
    order.push_back(0);
    parent[0] = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
        for (const auto j : g.neighbors(order[k]))
            if (parent[j] == none) {
                parent[j] = order[k];
                order.push_back(j);
            }
    // sub[i] = psi_i - psi_parent(i)
    std::vector<double> sub(b.data(), b.data() + n);
    for (std::size_t k = n; k-- > 1;) sub[parent[order[k]]] += sub[order[k]];
    psi.resize(static_cast<Eigen::Index>(n));
    psi[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) psi[order[k]] = psi[parent[order[k]]] + sub[order[k]];
    psi.array() -= psi.mean();
    std::vector<double> d;
    d.reserve(g.edge_count());
    for (const auto& [a, c] : g.edges()) d.push_back(parent[a] == c ? sub[a] : -sub[c]);
    return d;
}

/// Convenience single solve.
inline Eigen::VectorXd solve_psi(const SparseMatrix& L, const Eigen::VectorXd& b, LaplacianOptions opt = {}) {
    LaplacianSolver solver(L, opt);
    return solver.solve(b);
}

}  // namespace mfsbp
