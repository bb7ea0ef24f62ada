#pragma once

// Diagonal norm H: optimized by the bound-constrained least-squares fit to
// Q_x x and Q_y y, or uniform Vol / N.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/laplacian.hpp"

namespace mfsbp {

enum class NormKind { optimized, uniform };

inline std::string_view to_string(NormKind k) { return k == NormKind::optimized ? "opt" : "unif"; }

inline NormKind parse_norm(std::string_view s) {
    if (s == "opt" || s == "optimized") return NormKind::optimized;
    if (s == "unif" || s == "uniform") return NormKind::uniform;
    throw ParameterError("unknown norm: " + std::string(s));
}

/// Exact minimizer of 1/2|Q_x x - w|^2 + 1/2|Q_y y - w|^2 subject to w >= 1/N^2.
/// The objective separates per component, so the answer is the clipped mean.
inline Eigen::VectorXd optimize_H(const SparseMatrix& Qx, const SparseMatrix& Qy, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) {
    if (Qx.rows() != x.size() || Qy.rows() != y.size() || x.size() != y.size())
        throw ParameterError("optimize_H: dimension mismatch");
    const double n = static_cast<double>(x.size());
    const double lb = 1.0 / (n * n);
    const Eigen::VectorXd target = 0.5 * (Qx * x + Qy * y);
    return target.cwiseMax(lb);
}

/// Value of the quadratic objective, used by tests and reports.
inline double norm_objective(const SparseMatrix& Qx, const SparseMatrix& Qy, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    return 0.5 * (Qx * x - w).squaredNorm() + 0.5 * (Qy * y - w).squaredNorm();
}

inline Eigen::VectorXd uniform_H(const PointCloud& cloud) {
    if (cloud.size() == 0) throw ParameterError("uniform_H: empty cloud");
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cloud.size()),
                                     cloud.volume() / static_cast<double>(cloud.size()));
}

/// Number of components sitting on the lower bound.
inline std::size_t clipped_count(const Eigen::VectorXd& H) {
    const double n = static_cast<double>(H.size());
    const double lb = 1.0 / (n * n);
    return static_cast<std::size_t>((H.array() <= lb).count());
}

}  // namespace mfsbp
