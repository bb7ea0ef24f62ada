#pragma once

// Static 2D k-d tree for fixed-radius neighbour queries.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "mfsbp/geometry.hpp"

namespace mfsbp {

class KdTree2 {
public:
    explicit KdTree2(std::span<const Point2> points, std::size_t leaf_size = 12)
        : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
        index_.resize(points_.size());
        std::iota(index_.begin(), index_.end(), std::uint32_t{0});
        if (!points_.empty()) {
            nodes_.reserve(2 * points_.size() / leaf_size_ + 2);
            build(0, index_.size());
        }
    }

    std::size_t size() const { return points_.size(); }

    /// Appends every index j with |p - points[j]| <= r. Order is unspecified.
    void radius_query(const Point2& p, double r, std::vector<std::uint32_t>& out) const {
        if (nodes_.empty()) return;
        query(0, p, r, r * r, out);
    }

    std::vector<std::uint32_t> radius_query(const Point2& p, double r) const {
        std::vector<std::uint32_t> out;
        radius_query(p, r, out);
        return out;
    }

private:
    struct Node {
        std::uint32_t begin = 0, end = 0;
        std::int32_t left = -1, right = -1;
        int axis = 0;
        double split = 0.0;
        double lo[2] = {0.0, 0.0};
        double hi[2] = {0.0, 0.0};
    };

    static double coord(const Point2& p, int axis) { return axis == 0 ? p.x : p.y; }

    std::int32_t build(std::size_t begin, std::size_t end) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        Node node;
        node.begin = static_cast<std::uint32_t>(begin);
        node.end = static_cast<std::uint32_t>(end);
        node.lo[0] = node.lo[1] = std::numeric_limits<double>::infinity();
        node.hi[0] = node.hi[1] = -std::numeric_limits<double>::infinity();
        for (std::size_t k = begin; k < end; ++k) {
            const auto& q = points_[index_[k]];
            node.lo[0] = std::min(node.lo[0], q.x);
            node.hi[0] = std::max(node.hi[0], q.x);
            node.lo[1] = std::min(node.lo[1], q.y);
            node.hi[1] = std::max(node.hi[1], q.y);
        }
        if (end - begin > leaf_size_) {
            node.axis = (node.hi[0] - node.lo[0]) >= (node.hi[1] - node.lo[1]) ? 0 : 1;
            const std::size_t mid = begin + (end - begin) / 2;
            const int axis = node.axis;
            std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                             index_.begin() + static_cast<std::ptrdiff_t>(mid),
                             index_.begin() + static_cast<std::ptrdiff_t>(end),
                             [&](std::uint32_t a, std::uint32_t b) {
                                 return coord(points_[a], axis) < coord(points_[b], axis);
                             });
            node.split = coord(points_[index_[mid]], axis);
            node.left = build(begin, mid);
            node.right = build(mid, end);
        }
        nodes_[static_cast<std::size_t>(id)] = node;
        return id;
    }

    static double box_distance2(const Node& n, const Point2& p) {
        const double dx = std::max({n.lo[0] - p.x, 0.0, p.x - n.hi[0]});
        const double dy = std::max({n.lo[1] - p.y, 0.0, p.y - n.hi[1]});
        return dx * dx + dy * dy;
    }

    void query(std::int32_t id, const Point2& p, double r, double r2, std::vector<std::uint32_t>& out) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        if (box_distance2(n, p) > r2) return;
        if (n.left < 0) {
            for (std::uint32_t k = n.begin; k < n.end; ++k) {
                const auto j = index_[k];
                const double dx = points_[j].x - p.x;
                const double dy = points_[j].y - p.y;
                if (dx * dx + dy * dy <= r2) out.push_back(j);
            }
            return;
        }
        query(n.left, p, r, r2, out);
        query(n.right, p, r, r2, out);
    }

    std::vector<Point2> points_;
    std::vector<std::uint32_t> index_;
    std::vector<Node> nodes_;
    std::size_t leaf_size_;
};

}  // namespace mfsbp
