#pragma once

// Applying D = H^-1 Q, discrete error norms, test functions and
// convergence tables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/sbp.hpp"

namespace mfsbp {

inline Eigen::VectorXd apply_D(const SbpOperatorSet& ops, Axis axis, const Eigen::VectorXd& u) {
    if (!ops.has_norm()) throw ParameterError("apply_D: norm matrix not set");
    if (u.size() != static_cast<Eigen::Index>(ops.size())) throw ParameterError("apply_D: field size mismatch");
    const Eigen::VectorXd q = axis == Axis::x ? Eigen::VectorXd(ops.Qx * u) : Eigen::VectorXd(ops.Qy * u);
    return q.cwiseQuotient(ops.H);
}

/// sqrt(v^T H v).
inline double l2_error(const Eigen::VectorXd& H, const Eigen::VectorXd& v) {
    if (H.size() != v.size()) throw ParameterError("l2_error: size mismatch");
    return std::sqrt((H.array() * v.array().square()).sum());
}

using RegionPredicate = std::function<bool(const Point2&)>;

inline double linf_error_region(const PointCloud& cloud, const Eigen::VectorXd& v, const RegionPredicate& in_region) {
    if (static_cast<std::size_t>(v.size()) != cloud.size()) throw ParameterError("linf_error_region: size mismatch");
    double m = 0.0;
    std::size_t selected = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!in_region(cloud.points[i])) continue;
        ++selected;
        m = std::max(m, std::abs(v[static_cast<Eigen::Index>(i)]));
    }
    if (selected == 0) throw ParameterError("linf_error_region: predicate selects no node");
    return m;
}

/// Scalar field with analytic gradient.
struct TestFunction {
    std::string name;
    std::function<double(double, double)> u;
    std::function<double(double, double)> dx;
    std::function<double(double, double)> dy;

    Eigen::VectorXd sample(const PointCloud& c, const std::function<double(double, double)>& f) const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
        for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(c.points[i].x, c.points[i].y);
        return v;
    }
};

inline TestFunction u1_function() {
    return {"u1", [](double x, double) { return x; }, [](double, double) { return 1.0; },
            [](double, double) { return 0.0; }};
}

/// 4 sin x sin y exp(-(x^2+y^2)); its x-derivative is
/// 4 sin y exp(-(x^2+y^2)) (cos x - 2x sin x).
inline TestFunction u2_function() {
    return {"u2",
            [](double x, double y) { return 4.0 * std::sin(x) * std::sin(y) * std::exp(-(x * x + y * y)); },
            [](double x, double y) {
                return 4.0 * std::sin(y) * std::exp(-(x * x + y * y)) * (std::cos(x) - 2.0 * x * std::sin(x));
            },
            [](double x, double y) {
                return 4.0 * std::sin(x) * std::exp(-(x * x + y * y)) * (std::cos(y) - 2.0 * y * std::sin(y));
            }};
}

inline TestFunction test_function(std::string_view name) {
    if (name == "u1") return u1_function();
    if (name == "u2") return u2_function();
    throw ParameterError("unknown test function: " + std::string(name));
}

/// Nodal error D u - u_axis.
inline Eigen::VectorXd derivative_error(const SbpOperatorSet& ops, const PointCloud& cloud, const TestFunction& f,
                                        Axis axis) {
    const auto u = f.sample(cloud, f.u);
    const auto exact = f.sample(cloud, axis == Axis::x ? f.dx : f.dy);
    return apply_D(ops, axis, u) - exact;
}

/// log2(e_{i-1} / e_i) for consecutive entries.
inline std::vector<double> convergence_rates(const std::vector<double>& errors) {
    std::vector<double> r;
    for (std::size_t i = 1; i < errors.size(); ++i) r.push_back(std::log2(errors[i - 1] / errors[i]));
    return r;
}

struct ConvergenceRow {
    std::string grid;
    std::size_t N = 0;
    double error = 0.0;
    double rate = std::numeric_limits<double>::quiet_NaN();  // NaN on the first row
};

/// Runs `measure` on each grid and fills in pairwise rates. `measure`
/// returns (N, error).
template <class Measure>
std::vector<ConvergenceRow> convergence_study(const std::vector<std::string>& grids, Measure&& measure) {
    if (grids.size() < 2) throw ParameterError("convergence study needs at least 2 grids");
    std::vector<ConvergenceRow> rows;
    for (const auto& g : grids) {
        const auto [n, e] = measure(g);
        ConvergenceRow row{g, n, e};
        if (!rows.empty()) row.rate = std::log2(rows.back().error / e);
        rows.push_back(row);
    }
    return rows;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "grid,N,error,rate\n";
    for (const auto& r : rows) {
        os << r.grid << ',' << r.N << ',' << std::setprecision(4) << r.error << ',';
        if (!std::isnan(r.rate)) os << std::setprecision(4) << r.rate;
        os << '\n';
    }
}

}  // namespace mfsbp
