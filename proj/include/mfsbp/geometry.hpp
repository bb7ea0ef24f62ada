#pragma once

// Point clouds on disks and punctured disks with analytic boundary normals
// and equispaced trapezoidal boundary weights.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mfsbp/error.hpp"

namespace mfsbp {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class Axis { x, y };

/// Circular hole of the given radius. The `size` parameter of the punctured
/// disk is interpreted as the radius itself.
struct Hole {
    Point2 center;
    double radius = 0.0;
};

struct DomainSpec {
    double outer_radius = 3.0;
    std::vector<Hole> holes;

    static DomainSpec disk(double radius) { return DomainSpec{radius, {}}; }

    /// Outer disk of radius R with three holes of radius `hole_radius` centred
    /// at distance R/2 on the angles 2*pi*i/3, i = 1, 2, 3.
    static DomainSpec three_hole_disk(double radius = 3.0, double hole_radius = 2.0 / 3.0) {
        DomainSpec spec{radius, {}};
        for (int i = 1; i <= 3; ++i) {
            const double angle = 2.0 * std::numbers::pi * i / 3.0;
            spec.holes.push_back({{0.5 * radius * std::cos(angle), 0.5 * radius * std::sin(angle)}, hole_radius});
        }
        return spec;
    }

    double area() const {
        double a = std::numbers::pi * outer_radius * outer_radius;
        for (const auto& h : holes) a -= std::numbers::pi * h.radius * h.radius;
        return a;
    }

    double perimeter() const {
        double p = 2.0 * std::numbers::pi * outer_radius;
        for (const auto& h : holes) p += 2.0 * std::numbers::pi * h.radius;
        return p;
    }

    double diameter() const { return 2.0 * outer_radius; }

    /// Strict interior test: inside the outer circle and outside every hole.
    bool contains_strictly(const Point2& p) const {
        if (p.x * p.x + p.y * p.y >= outer_radius * outer_radius) return false;
        for (const auto& h : holes) {
            const double dx = p.x - h.center.x;
            const double dy = p.y - h.center.y;
            if (dx * dx + dy * dy <= h.radius * h.radius) return false;
        }
        return true;
    }

    void validate() const {
        if (!(outer_radius > 0.0) || !std::isfinite(outer_radius)) throw ParameterError("outer radius must be positive");
        for (std::size_t i = 0; i < holes.size(); ++i) {
            const auto& h = holes[i];
            if (!(h.radius > 0.0)) throw ParameterError("hole radius must be positive");
            if (std::hypot(h.center.x, h.center.y) + h.radius >= outer_radius)
                throw ParameterError("hole " + std::to_string(i) + " overlaps the outer boundary");
            for (std::size_t j = 0; j < i; ++j) {
                if (distance(h.center, holes[j].center) <= h.radius + holes[j].radius)
                    throw ParameterError("holes " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
            }
        }
    }
};

/// Background grid resolution and boundary node counts. `n_hole` is ignored
/// for domains without holes.
struct GridSpec {
    int nx = 75;
    int ny = 75;
    int n_boundary = 250;
    int n_hole = 0;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Nodes are stored interior first, then boundary. Boundary rows carry a unit
/// outward normal and an arc-length quadrature weight; interior rows have zeros.
struct PointCloud {
    std::vector<Point2> points;
    std::vector<double> normal_x;
    std::vector<double> normal_y;
    std::vector<double> weight;
    std::size_t interior_count = 0;
    /// Node count on each boundary curve: outer circle first, then holes in spec order.
    std::vector<std::size_t> curve_sizes;
    DomainSpec domain;

    std::size_t size() const { return points.size(); }
    std::size_t boundary_count() const { return points.size() - interior_count; }
    bool is_boundary(std::size_t i) const { return i >= interior_count; }
    double volume() const { return domain.area(); }
    double diameter() const { return domain.diameter(); }
    double perimeter() const { return domain.perimeter(); }

    Eigen::VectorXd x() const {
        Eigen::VectorXd v(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) v[static_cast<Eigen::Index>(i)] = points[i].x;
        return v;
    }
    Eigen::VectorXd y() const {
        Eigen::VectorXd v(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) v[static_cast<Eigen::Index>(i)] = points[i].y;
        return v;
    }

    /// Residuals of the discrete closed-curve identity sum_i w_i n_i = 0.
    Point2 normal_integral() const {
        Point2 s;
        for (std::size_t i = interior_count; i < points.size(); ++i) {
            s.x += weight[i] * normal_x[i];
            s.y += weight[i] * normal_y[i];
        }
        return s;
    }
};

namespace detail {

inline void push_boundary(PointCloud& c, Point2 p, double nx, double ny, double w) {
    c.points.push_back(p);
    c.normal_x.push_back(nx);
    c.normal_y.push_back(ny);
    c.weight.push_back(w);
}

inline void check_grid(const GridSpec& g) {
    if (g.nx < 2 || g.ny < 2) throw ParameterError("background grid needs at least 2 points per axis");
    if (g.n_boundary < 3) throw ParameterError("outer boundary needs at least 3 nodes");
}

inline PointCloud build_cloud(const GridSpec& grid, const DomainSpec& spec) {
    check_grid(grid);
    spec.validate();
    const double R = spec.outer_radius;

    PointCloud cloud;
    cloud.domain = spec;

    // Background grid of nx by ny equispaced points spanning [-R, R]^2.
    for (int a = 0; a < grid.nx; ++a) {
        const double px = R * (2.0 * a / (grid.nx - 1) - 1.0);
        for (int b = 0; b < grid.ny; ++b) {
            const Point2 p{px, R * (2.0 * b / (grid.ny - 1) - 1.0)};
            if (spec.contains_strictly(p)) {
                cloud.points.push_back(p);
            }
        }
    }
    cloud.interior_count = cloud.points.size();
    cloud.normal_x.assign(cloud.interior_count, 0.0);
    cloud.normal_y.assign(cloud.interior_count, 0.0);
    cloud.weight.assign(cloud.interior_count, 0.0);

    const double two_pi = 2.0 * std::numbers::pi;
    const double w_outer = two_pi * R / grid.n_boundary;
    for (int t = 0; t < grid.n_boundary; ++t) {
        const double th = two_pi * t / grid.n_boundary;
        const double c = std::cos(th), s = std::sin(th);
        detail::push_boundary(cloud, {R * c, R * s}, c, s, w_outer);
    }
    cloud.curve_sizes.push_back(static_cast<std::size_t>(grid.n_boundary));

    for (const auto& h : spec.holes) {
        const double w_hole = two_pi * h.radius / grid.n_hole;
        for (int t = 0; t < grid.n_hole; ++t) {
            const double th = two_pi * t / grid.n_hole;
            const double c = std::cos(th), s = std::sin(th);
            // Outward from the domain means pointing into the hole.
            detail::push_boundary(cloud, {h.center.x + h.radius * c, h.center.y + h.radius * s}, -c, -s, w_hole);
        }
        cloud.curve_sizes.push_back(static_cast<std::size_t>(grid.n_hole));
    }
    return cloud;
}

}  // namespace detail

inline PointCloud build_disk_cloud(const GridSpec& grid, double radius) {
    if (!(radius > 0.0)) throw ParameterError("radius must be positive");
    return detail::build_cloud(grid, DomainSpec::disk(radius));
}

inline PointCloud build_punctured_disk_cloud(const GridSpec& grid, const DomainSpec& spec) {
    if (spec.holes.empty()) throw ParameterError("punctured disk needs at least one hole");
    if (grid.n_hole < 3) throw ParameterError("each hole needs at least 3 boundary nodes");
    return detail::build_cloud(grid, spec);
}

/// Dispatches on whether the domain has holes.
inline PointCloud build_cloud(const GridSpec& grid, const DomainSpec& spec) {
    return spec.holes.empty() ? build_disk_cloud(grid, spec.outer_radius) : build_punctured_disk_cloud(grid, spec);
}

// CSV schema: kind,x,y,nx,ny,w with kind in {interior, boundary}.
inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
    os << "kind,x,y,nx,ny,w\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        os << (cloud.is_boundary(i) ? "boundary" : "interior") << ',' << cloud.points[i].x << ',' << cloud.points[i].y
           << ',' << cloud.normal_x[i] << ',' << cloud.normal_y[i] << ',' << cloud.weight[i] << '\n';
    }
}

inline void write_cloud_csv(const std::string& path, const PointCloud& cloud) {
    std::ofstream os(path);
    if (!os) throw ParameterError("cannot open " + path);
    write_cloud_csv(os, cloud);
}

/// Reads node data only; the returned cloud carries a default DomainSpec and a
/// single boundary curve, so callers needing hole geometry must set it.
inline PointCloud read_cloud_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("kind,", 0) != 0) throw ParameterError("missing cloud CSV header");
    PointCloud cloud;
    std::vector<Point2> interior, boundary;
    std::vector<double> bnx, bny, bw;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string kind, field;
        std::getline(row, kind, ',');
        double v[5];
        for (double& d : v) {
            if (!std::getline(row, field, ',')) throw ParameterError("short cloud CSV row: " + line);
            d = std::stod(field);
        }
        if (kind == "interior") {
            if (!boundary.empty()) throw ParameterError("interior rows must precede boundary rows");
            interior.push_back({v[0], v[1]});
        } else if (kind == "boundary") {
            boundary.push_back({v[0], v[1]});
            bnx.push_back(v[2]);
            bny.push_back(v[3]);
            bw.push_back(v[4]);
        } else {
            throw ParameterError("unknown node kind: " + kind);
        }
    }
    cloud.interior_count = interior.size();
    cloud.points = std::move(interior);
    cloud.normal_x.assign(cloud.interior_count, 0.0);
    cloud.normal_y.assign(cloud.interior_count, 0.0);
    cloud.weight.assign(cloud.interior_count, 0.0);
    for (std::size_t i = 0; i < boundary.size(); ++i) detail::push_boundary(cloud, boundary[i], bnx[i], bny[i], bw[i]);
    cloud.curve_sizes = {boundary.size()};
    return cloud;
}

}  // namespace mfsbp
