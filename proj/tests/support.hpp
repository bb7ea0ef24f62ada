#pragma once

// Small clouds and independent oracles shared by the unit tests and the
// acceptance run.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfsbp/mfsbp.hpp"

namespace mfsbp::fixtures {

inline PointCloud small_disk(int n = 15, int nb = 40, double R = 3.0) {
    return build_cloud(GridSpec{n, n, nb, 0}, DomainSpec::disk(R));
}

inline PointCloud small_punctured() { return build_cloud(GridSpec{25, 25, 75, 30}, DomainSpec::three_hole_disk()); }

/// Full operator build on a small grid.
inline std::unique_ptr<OperatorBuild> small_build(AdjacencyMethod method, bool punctured = false,
                                                  NormKind norm = NormKind::optimized) {
    const GridSpec grid = punctured ? GridSpec{25, 25, 75, 30} : GridSpec{15, 15, 40, 0};
    const DomainSpec domain = punctured ? DomainSpec::three_hole_disk() : DomainSpec::disk(3.0);
    OperatorOptions opt;
    opt.adjacency = method;
    opt.norm = norm;
    return build_operators(domain, GridPreset{"small", grid}, opt);
}

/// Projected-gradient minimization of 1/2|Q_x x - w|^2 + 1/2|Q_y y - w|^2 over
/// w >= 1/N^2, using only objective gradients.
inline Eigen::VectorXd projected_gradient_norm(const SparseMatrix& Qx, const SparseMatrix& Qy,
                                               const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                               int iterations = 200) {
    const double n = static_cast<double>(x.size());
    const double lb = 1.0 / (n * n);
    const Eigen::VectorXd ax = Qx * x;
    const Eigen::VectorXd ay = Qy * y;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(x.size(), lb);
    const double step = 0.3;  // below 1/L with L = 2
    for (int k = 0; k < iterations; ++k) {
        const Eigen::VectorXd grad = (w - ax) + (w - ay);
        w = (w - step * grad).cwiseMax(lb);
    }
    return w;
}

/// Minimum-norm solution of L psi = b through a dense pseudo-inverse.
inline Eigen::VectorXd pseudo_inverse_solve(const SparseMatrix& L, const Eigen::VectorXd& b) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(L);
    return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(dense).pseudoInverse() * b;
}

/// Random admissible Euler state with density and pressure in [0.1, 3] and
/// speeds up to 2.
inline Euler::State random_euler_state(const Euler& eq, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(0.1, 3.0), vel(-2.0, 2.0);
    return eq.from_primitive(pos(rng), vel(rng), vel(rng), pos(rng));
}

inline std::pair<double, double> random_unit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    const double a = ang(rng);
    return {std::cos(a), std::sin(a)};
}

inline double max_abs_diff(const Euler::State& a, const Euler::State& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double max_abs(const Euler::State& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace mfsbp::fixtures
