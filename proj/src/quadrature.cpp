#include "efimov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace efimov {

namespace {

constexpr double kBreakpointMergeTol = 1e-14;

// Legendre P_n(x) and its derivative by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1) {
        throw std::invalid_argument("gauss_legendre: order must be >= 1");
    }
    nodes.assign(static_cast<std::size_t>(order), 0.0);
    weights.assign(static_cast<std::size_t>(order), 0.0);
    const int half = (order + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Tricomi initial guess, then Newton.
        double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
        double p = 0.0;
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre(order, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        legendre(order, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(k)] = -x;
        nodes[static_cast<std::size_t>(order - 1 - k)] = x;
        weights[static_cast<std::size_t>(k)] = w;
        weights[static_cast<std::size_t>(order - 1 - k)] = w;
    }
    if (order % 2 == 1) {
        nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    }
}

Grid1D build_grid(Interval domain, std::span<const double> breakpoints, int order) {
    if (!std::isfinite(domain.lo) || !std::isfinite(domain.hi) || !(domain.lo < domain.hi)) {
        throw std::invalid_argument("build_grid: empty or non-finite domain");
    }
    if (order < 1) {
        throw std::invalid_argument("build_grid: segment order must be >= 1");
    }

    std::vector<double> pts;
    pts.reserve(breakpoints.size() + 2);
    pts.push_back(domain.lo);
    for (double b : breakpoints) {
        if (!std::isfinite(b)) {
            throw std::invalid_argument("build_grid: non-finite breakpoint");
        }
        if (b < domain.lo - kBreakpointMergeTol || b > domain.hi + kBreakpointMergeTol) {
            throw std::invalid_argument("build_grid: breakpoint " + std::to_string(b) + " outside domain");
        }
        pts.push_back(std::clamp(b, domain.lo, domain.hi));
    }
    pts.push_back(domain.hi);
    std::sort(pts.begin(), pts.end());

    std::vector<double> merged;
    merged.reserve(pts.size());
    for (double b : pts) {
        if (merged.empty() || b - merged.back() > kBreakpointMergeTol) {
            merged.push_back(b);
        }
    }
    // The domain end must survive the merge even when a breakpoint sat within
    // tolerance of it.
    merged.back() = domain.hi;
    if (merged.size() < 2) {
        throw std::invalid_argument("build_grid: degenerate domain after merging");
    }

    std::vector<double> ref_nodes;
    std::vector<double> ref_weights;
    gauss_legendre(order, ref_nodes, ref_weights);

    Grid1D grid;
    grid.domain_ = domain;
    grid.order_ = order;
    grid.breakpoints_ = std::move(merged);
    const std::size_t segments = grid.breakpoints_.size() - 1;
    grid.nodes_.reserve(segments * static_cast<std::size_t>(order));
    grid.weights_.reserve(segments * static_cast<std::size_t>(order));
    for (std::size_t s = 0; s < segments; ++s) {
        const double a = grid.breakpoints_[s];
        const double b = grid.breakpoints_[s + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int k = 0; k < order; ++k) {
            grid.nodes_.push_back(mid + half * ref_nodes[static_cast<std::size_t>(k)]);
            grid.weights_.push_back(half * ref_weights[static_cast<std::size_t>(k)]);
        }
    }
    return grid;
}

double integrate(const std::function<double(double)>& f, const Grid1D& grid) {
    double sum = 0.0;
    const auto& x = grid.nodes();
    const auto& w = grid.weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = f(x[i]);
        if (!std::isfinite(v)) {
            throw std::domain_error("integrate: non-finite integrand at x = " + std::to_string(x[i]));
        }
        sum += w[i] * v;
    }
    return sum;
}

Grid2D product_grid(Grid1D gx, Grid1D gy) {
    if (gx.size() == 0 || gy.size() == 0) {
        throw std::invalid_argument("product_grid: empty constituent grid");
    }
    return Grid2D{std::move(gx), std::move(gy)};
}

}  // namespace efimov
