#pragma once

// Delaunay edges of a planar point set, taken as the dual of the Voronoi
// diagram built by Boost.Polygon on integer-snapped coordinates. Sites that
// share a Voronoi vertex of degree > 3 (cocircular sites) are fanned from the
// lowest site index so the result is always a full triangulation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/polygon/voronoi.hpp>

#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"

namespace mfsbp {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

namespace detail {

inline Edge ordered(std::size_t a, std::size_t b) {
    return a < b ? Edge{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)}
                 : Edge{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(a)};
}

inline void sort_unique(std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace detail

/// Unique undirected Delaunay edges (i < j), sorted.
inline std::vector<Edge> delaunay_edges(std::span<const Point2> points) {
    namespace bp = boost::polygon;
    if (points.size() < 2) return {};

    double extent = 0.0;
    for (const auto& p : points) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    if (extent == 0.0) throw ParameterError("delaunay: all points coincide");
    // Snap to a 2^29 lattice; the rounding acts as a fixed symbolic perturbation.
    const double scale = static_cast<double>(1 << 29) / extent;

    std::vector<bp::point_data<std::int32_t>> sites;
    sites.reserve(points.size());
    for (const auto& p : points) {
        sites.emplace_back(static_cast<std::int32_t>(std::lround(p.x * scale)),
                           static_cast<std::int32_t>(std::lround(p.y * scale)));
    }
    {
        std::vector<std::pair<std::int64_t, std::int64_t>> keys;
        keys.reserve(sites.size());
        for (const auto& s : sites) keys.emplace_back(s.x(), s.y());
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
            throw ParameterError("delaunay: two points coincide after snapping");
    }

    bp::voronoi_diagram<double> vd;
    bp::construct_voronoi(sites.begin(), sites.end(), &vd);

    std::vector<Edge> edges;
    edges.reserve(3 * points.size());
    for (const auto& e : vd.edges()) {
        const std::size_t a = e.cell()->source_index();
        const std::size_t b = e.twin()->cell()->source_index();
        if (a < b) edges.push_back(detail::ordered(a, b));
    }

    std::vector<std::size_t> ring;
    for (const auto& v : vd.vertices()) {
        ring.clear();
        const auto* e = v.incident_edge();
        do {
            ring.push_back(e->cell()->source_index());
            e = e->rot_next();
        } while (e != v.incident_edge());
        if (ring.size() <= 3) continue;
        const auto apex = std::min_element(ring.begin(), ring.end()) - ring.begin();
        std::rotate(ring.begin(), ring.begin() + apex, ring.end());
        for (std::size_t k = 2; k + 1 < ring.size(); ++k) edges.push_back(detail::ordered(ring[0], ring[k]));
    }
    detail::sort_unique(edges);
    return edges;
}

}  // namespace mfsbp
