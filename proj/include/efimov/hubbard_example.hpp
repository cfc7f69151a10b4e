#pragma once

#include "efimov/bound_states.hpp"
#include "efimov/operators.hpp"

#include <functional>
#include <optional>
#include <vector>

// Explicit model on [0,1]^2 with infinitely many bound states below the edge:
// H = u(x)u(y) - (gamma T1 + T2), T1 integrating out x against k1 = 1, and
// k2(y,t) = sum_n (2/3)^n phi_n(y) phi_n(t) built from sine bumps supported on
// the dyadic segments [p_{n-1}, p_n], p_n = 1 - 2^-n.
namespace efimov::hubbard {

inline constexpr double kMinGamma = 2.0 / 3.0;
inline constexpr int kMaxTruncation = 40;

struct Example5Params {
    int M = 4;                  ///< tents n = 2..M kept in u
    int N = 4;                  ///< terms n = 1..N kept in k2
    double gamma = 2.0 / 3.0;   ///< coupling on T1, >= 2/3
    /// delta_n for n >= 2; empty selects (sqrt(2)/3)^n. delta_1 = 1 is fixed.
    std::function<double(int)> delta;
    int order = 8;              ///< Gauss points per segment
    /// Treat the N-term kernel as the model itself instead of a truncation of
    /// the infinite series.
    bool finite_rank_kernel = false;
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const Example5Params& params);

double p(int n);
/// Midpoint of [p_{n-1}, p_n]; n >= 1.
double q(int n);

struct Breakpoints {
    double p = 0.0;
    std::optional<double> q;  ///< absent for n = 0
};
Breakpoints breakpoints(int n);

/// Tent on [p_{kappa-1}, p_kappa] peaking at 1 at q_kappa; zero outside.
double tent(int kappa, double x);

double default_delta(int n);
double delta(int n, const Example5Params& params);

/// u(x) = 0 on [0, 1/2], sum_{n=2..M} delta_n r_n(x) on (1/2, 1]. Throws outside [0,1].
double potential_u(double x, const Example5Params& params);

/// 2^{(n+1)/2} sin(pi (y - p_{n-1}) / (p_n - p_{n-1})) on [p_{n-1}, p_n], else 0.
double phi(int n, double y);

/// (2/3)^n.
double series_coefficient(int n);

/// Truncated kernel sum_{n<=N} (2/3)^n phi_n(y) phi_n(t).
double kernel_k2(double y, double t, const Example5Params& params);
/// Value of the omitted terms at (y, t). At most one term is nonzero, and
/// only when y and t share a segment beyond p_N.
double kernel_k2_tail(double y, double t, int N);
/// Operator-norm distance between the full and truncated K2: (2/3)^{N+1}.
double kernel_k2_operator_tail(int N);

/// Breakpoints p_1..p_K and q_1..q_K with K = max(M, N).
std::vector<double> grid_breakpoints(int M, int N);

ModelSpec example_model(const Example5Params& params);

/// gamma + (2/3)^n, the eigenvalue of gamma T1 + T2 on 1 (x) phi_n.
double analytic_T_eigenvalue(int n, double gamma);

/// phi_from .. phi_to as an indexed family on the second axis.
std::vector<IndexedFunction> phi_family(int from, int to);

/// Builds example_model for each schedule row (M, N, order from the row).
std::function<ModelSpec(const ScheduleEntry&)> schedule_builder(const Example5Params& base);

}  // namespace efimov::hubbard
