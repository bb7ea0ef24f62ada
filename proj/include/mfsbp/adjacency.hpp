#pragma once

// Connectivity graphs over point clouds: Euclidean radius (k-d tree),
// Euclidean minimum spanning tree, and degree-1 / degree-2 Delaunay.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mfsbp/delaunay.hpp"
#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/kdtree.hpp"

namespace mfsbp {

enum class AdjacencyMethod { euclidean_radius, mst, delaunay1, delaunay2 };

inline std::string_view to_string(AdjacencyMethod m) {
    switch (m) {
        case AdjacencyMethod::euclidean_radius: return "radius";
        case AdjacencyMethod::mst: return "mst";
        case AdjacencyMethod::delaunay1: return "delaunay1";
        case AdjacencyMethod::delaunay2: return "delaunay2";
    }
    return "unknown";
}

inline AdjacencyMethod parse_adjacency(std::string_view s) {
    if (s == "radius" || s == "euclidean_radius") return AdjacencyMethod::euclidean_radius;
    if (s == "mst") return AdjacencyMethod::mst;
    if (s == "delaunay1") return AdjacencyMethod::delaunay1;
    if (s == "delaunay2") return AdjacencyMethod::delaunay2;
    throw ParameterError("unknown adjacency method: " + std::string(s));
}

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Symmetric 0/1 adjacency without self loops, stored as sorted CSR rows.
class AdjacencyGraph {
public:
    AdjacencyGraph() = default;

    /// Builds from undirected edges; duplicates and self loops are dropped.
    AdjacencyGraph(std::size_t n, std::vector<Edge> edges, AdjacencyMethod method, double radius = 0.0)
        : n_(n), method_(method), radius_(radius) {
        std::erase_if(edges, [](const Edge& e) { return e.first == e.second; });
        for (auto& e : edges) {
            if (e.first > e.second) std::swap(e.first, e.second);
            if (e.second >= n) throw ParameterError("edge index out of range");
        }
        detail::sort_unique(edges);
        edges_ = std::move(edges);

        offsets_.assign(n + 1, 0);
        for (const auto& [a, b] : edges_) {
            ++offsets_[a + 1];
            ++offsets_[b + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        columns_.resize(offsets_.back());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto& [a, b] : edges_) {
            columns_[fill[a]++] = b;
            columns_[fill[b]++] = a;
        }
        for (std::size_t i = 0; i < n; ++i)
            std::sort(columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                      columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
    }

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    AdjacencyMethod method() const { return method_; }
    double radius() const { return radius_; }

    /// Unique edges with first < second, lexicographically sorted.
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const std::uint32_t> neighbors(std::size_t i) const {
        return {columns_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

    bool has_edge(std::size_t i, std::size_t j) const {
        const auto row = neighbors(i);
        return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(j));
    }

private:
    std::size_t n_ = 0;
    AdjacencyMethod method_ = AdjacencyMethod::euclidean_radius;
    double radius_ = 0.0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> columns_;
};

/// Connected-component labels, numbered in order of their smallest node.
inline std::vector<std::size_t> component_labels(const AdjacencyGraph& g) {
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(g.node_count(), unset);
    std::vector<std::size_t> stack;
    std::size_t next = 0;
    for (std::size_t s = 0; s < g.node_count(); ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (auto w : g.neighbors(v)) {
                if (label[w] == unset) {
                    label[w] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    return label;
}

inline bool is_connected(const AdjacencyGraph& g) {
    if (g.node_count() <= 1) return true;
    const auto labels = component_labels(g);
    return std::all_of(labels.begin(), labels.end(), [](std::size_t l) { return l == 0; });
}

/// Throws ConnectivityError naming the smallest node outside node 0's component.
inline void require_connected(const AdjacencyGraph& g) {
    if (g.node_count() <= 1) return;
    const auto labels = component_labels(g);
    const auto count = *std::max_element(labels.begin(), labels.end()) + 1;
    if (count == 1) return;
    const auto orphan = static_cast<std::size_t>(
        std::find_if(labels.begin(), labels.end(), [](std::size_t l) { return l != 0; }) - labels.begin());
    throw ConnectivityError("adjacency graph (" + std::string(to_string(g.method())) + ") has " +
                                std::to_string(count) + " components; node " + std::to_string(orphan) +
                                " is not connected to node 0",
                            orphan, count);
}

/// Radius rule r = factor * Diam / (max(nx, ny) - 1): a fixed multiple of the
/// background-grid spacing.
inline double default_radius(double diameter, const GridSpec& grid, double factor = 2.5) {
    return factor * diameter / (std::max(grid.nx, grid.ny) - 1);
}

/// Edge (i, j) iff 0 < |p_i - p_j| <= r.
inline AdjacencyGraph radius_adjacency(std::span<const Point2> points, double r, bool validate = true) {
    if (!(r > 0.0)) throw ParameterError("radius must be positive");
    const KdTree2 tree(points);
    std::vector<Edge> edges;
    std::vector<std::uint32_t> hits;
    for (std::size_t i = 0; i < points.size(); ++i) {
        hits.clear();
        tree.radius_query(points[i], r, hits);
        for (auto j : hits)
            if (j > i) edges.emplace_back(static_cast<std::uint32_t>(i), j);
    }
    AdjacencyGraph g(points.size(), std::move(edges), AdjacencyMethod::euclidean_radius, r);
    if (validate) require_connected(g);
    return g;
}

inline AdjacencyGraph radius_adjacency(const PointCloud& cloud, double r, bool validate = true) {
    return radius_adjacency(std::span<const Point2>(cloud.points), r, validate);
}

/// Euclidean minimum spanning tree (Kruskal over Delaunay edges, which
/// contain the EMST). Ties broken by (length, i, j).
inline AdjacencyGraph mst_adjacency(std::span<const Point2> points) {
    if (points.size() < 2) throw ParameterError("minimum spanning tree needs at least 2 nodes");
    auto candidates = delaunay_edges(points);
    std::vector<double> length(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k)
        length[k] = distance(points[candidates[k].first], points[candidates[k].second]);
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return length[a] < length[b]; });

    UnionFind uf(points.size());
    std::vector<Edge> tree;
    tree.reserve(points.size() - 1);
    for (auto k : order) {
        if (uf.unite(candidates[k].first, candidates[k].second)) tree.push_back(candidates[k]);
        if (tree.size() + 1 == points.size()) break;
    }
    return AdjacencyGraph(points.size(), std::move(tree), AdjacencyMethod::mst);
}

inline AdjacencyGraph mst_adjacency(const PointCloud& cloud) { return mst_adjacency(std::span<const Point2>(cloud.points)); }

/// Boolean closure A | A^2 without the diagonal.
inline std::vector<Edge> degree_two_closure(const AdjacencyGraph& g) {
    std::vector<Edge> edges = g.edges();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        for (auto j : g.neighbors(i))
            for (auto k : g.neighbors(j))
                if (k > i) edges.emplace_back(static_cast<std::uint32_t>(i), k);
    }
    detail::sort_unique(edges);
    return edges;
}

/// True when segment ab passes closer than `radius` to `c`.
inline bool segment_enters_disk(const Point2& a, const Point2& b, const Point2& c, double radius) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((c.x - a.x) * dx + (c.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double px = a.x + t * dx - c.x, py = a.y + t * dy - c.y;
    return px * px + py * py < radius * radius;
}

/// Drops edges that cut through a hole. The hole is the polygon inscribed by
/// its boundary nodes, so chords between consecutive hole nodes survive.
inline std::vector<Edge> prune_hole_crossings(const PointCloud& cloud, std::vector<Edge> edges) {
    const auto& holes = cloud.domain.holes;
    if (holes.empty()) return edges;
    std::vector<double> inscribed(holes.size());
    for (std::size_t h = 0; h < holes.size(); ++h) {
        const double n = h + 1 < cloud.curve_sizes.size() ? static_cast<double>(cloud.curve_sizes[h + 1]) : 0.0;
        const double shrink = n >= 3 ? std::cos(std::numbers::pi / n) : 1.0;
        inscribed[h] = holes[h].radius * shrink * (1.0 - 1e-9);
    }
    std::erase_if(edges, [&](const Edge& e) {
        const auto& a = cloud.points[e.first];
        const auto& b = cloud.points[e.second];
        for (std::size_t h = 0; h < holes.size(); ++h)
            if (segment_enters_disk(a, b, holes[h].center, inscribed[h])) return true;
        return false;
    });
    return edges;
}

inline AdjacencyGraph delaunay_adjacency(const PointCloud& cloud, int degree) {
    if (degree != 1 && degree != 2) throw ParameterError("delaunay degree must be 1 or 2");
    auto edges = prune_hole_crossings(cloud, delaunay_edges(cloud.points));
    const auto method = degree == 1 ? AdjacencyMethod::delaunay1 : AdjacencyMethod::delaunay2;
    if (degree == 2) {
        const AdjacencyGraph first(cloud.size(), std::move(edges), method);
        edges = prune_hole_crossings(cloud, degree_two_closure(first));
    }
    AdjacencyGraph g(cloud.size(), std::move(edges), method);
    require_connected(g);
    return g;
}

inline AdjacencyGraph build_adjacency(const PointCloud& cloud, AdjacencyMethod method, double radius) {
    switch (method) {
        case AdjacencyMethod::euclidean_radius: return radius_adjacency(cloud, radius);
        case AdjacencyMethod::mst: return mst_adjacency(cloud);
        case AdjacencyMethod::delaunay1: return delaunay_adjacency(cloud, 1);
        case AdjacencyMethod::delaunay2: return delaunay_adjacency(cloud, 2);
    }
    throw ParameterError("unknown adjacency method");
}

/// Edge list "i j" per line (0-based), preceded by a one-line JSON header.
inline void write_edge_list(std::ostream& os, const AdjacencyGraph& g) {
    const nlohmann::json header = {
        {"N", g.node_count()}, {"method", std::string(to_string(g.method()))}, {"r", g.radius()}, {"edges", g.edge_count()}};
    os << header.dump() << '\n';
    for (const auto& [a, b] : g.edges()) os << a << ' ' << b << '\n';
}

}  // namespace mfsbp
