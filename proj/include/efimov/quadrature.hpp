#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace efimov {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const noexcept { return hi - lo; }
};

/// Composite Gauss-Legendre rule on [a,b] whose segments are delimited by
/// the stored breakpoints. Every segment carries the same number of nodes.
class Grid1D {
public:
    Grid1D() = default;

    const Interval& domain() const noexcept { return domain_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    int order_per_segment() const noexcept { return order_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t segment_count() const noexcept { return breakpoints_.size() - 1; }

    /// Index of the segment [b_s, b_{s+1}] that holds node i.
    std::size_t segment_of(std::size_t i) const noexcept { return i / static_cast<std::size_t>(order_); }

private:
    friend Grid1D build_grid(Interval, std::span<const double>, int);

    Interval domain_{};
    std::vector<double> breakpoints_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    int order_ = 0;
};

/// Tensor product of two 1-D rules. Node (x_i, y_j) is stored at i * ny + j.
struct Grid2D {
    Grid1D gx;
    Grid1D gy;

    std::size_t nx() const noexcept { return gx.size(); }
    std::size_t ny() const noexcept { return gy.size(); }
    std::size_t size() const noexcept { return nx() * ny(); }
    std::size_t flatten(std::size_t i, std::size_t j) const noexcept { return i * ny() + j; }
    double weight(std::size_t i, std::size_t j) const noexcept { return gx.weights()[i] * gy.weights()[j]; }
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Builds the composite rule. Breakpoints outside the domain or non-finite are
/// rejected; endpoints are added when absent and near-duplicates (1e-14) merged.
Grid1D build_grid(Interval domain, std::span<const double> breakpoints, int order);

/// Weighted sum over nodes in ascending node order. Throws on a non-finite sample.
double integrate(const std::function<double(double)>& f, const Grid1D& grid);

Grid2D product_grid(Grid1D gx, Grid1D gy);

}  // namespace efimov
