#include "efimov/hubbard_example.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace efimov::hubbard {

namespace {

// Segment n with p_{n-1} <= y <= p_n, or 0 when y lies beyond every segment
// representable here (y = 1 is a limit point of breakpoints).
int segment_of(double y) {
    if (y < 0.0 || y > 1.0) {
        return 0;
    }
    for (int n = 1; n <= 60; ++n) {
        if (y <= p(n)) {
            return n;
        }
    }
    return 0;
}

}  // namespace

void validate(const Example5Params& params) {
    if (!(params.gamma >= kMinGamma - 1e-12)) {
        std::ostringstream os;
        os << "gamma = " << params.gamma << " violates the model constraint gamma >= 2/3";
        throw std::invalid_argument(os.str());
    }
    if (params.N < 1 || params.N > kMaxTruncation) {
        throw std::invalid_argument("N must lie in [1, 40]");
    }
    if (params.M < 2 || params.M > kMaxTruncation) {
        throw std::invalid_argument("M must lie in [2, 40]");
    }
    if (params.order < 1) {
        throw std::invalid_argument("quadrature order g must be >= 1");
    }
    for (int n = 2; n <= params.M; ++n) {
        const double d = delta(n, params);
        if (!(d >= 0.0) || d > default_delta(n) * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "delta_" << n << " = " << d << " violates 0 <= delta_n <= (sqrt(2)/3)^n";
            throw std::invalid_argument(os.str());
        }
    }
}

double p(int n) {
    if (n < 0) {
        throw std::invalid_argument("p: negative index");
    }
    return 1.0 - std::ldexp(1.0, -n);
}

double q(int n) {
    if (n < 1) {
        throw std::invalid_argument("q: index must be >= 1");
    }
    return 0.5 * (p(n - 1) + p(n));
}

Breakpoints breakpoints(int n) {
    Breakpoints b;
    b.p = p(n);
    if (n >= 1) {
        b.q = q(n);
    }
    return b;
}

double tent(int kappa, double x) {
    if (kappa < 1) {
        throw std::invalid_argument("tent: kappa must be >= 1");
    }
    const double left = p(kappa - 1);
    const double right = p(kappa);
    const double peak = q(kappa);
    if (x < left || x > right) {
        return 0.0;
    }
    if (x <= peak) {
        return (x - left) / (peak - left);
    }
    return (right - x) / (right - peak);
}

double default_delta(int n) {
    if (n == 1) {
        return 1.0;
    }
    return std::pow(std::numbers::sqrt2 / 3.0, n);
}

double delta(int n, const Example5Params& params) {
    if (n == 1 || !params.delta) {
        return default_delta(n);
    }
    return params.delta(n);
}

double potential_u(double x, const Example5Params& params) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("potential_u: x outside [0, 1]");
    }
    if (x <= 0.5) {
        return 0.0;
    }
    const int n = segment_of(x);
    if (n < 2 || n > params.M) {
        return 0.0;
    }
    // Tents have disjoint interiors; at a shared endpoint both vanish.
    return delta(n, params) * tent(n, x);
}

double phi(int n, double y) {
    if (n < 1) {
        throw std::invalid_argument("phi: index must be >= 1");
    }
    const double left = p(n - 1);
    const double right = p(n);
    if (y < left || y > right) {
        return 0.0;
    }
    return std::pow(2.0, 0.5 * (n + 1)) * std::sin(std::numbers::pi * (y - left) / (right - left));
}

double series_coefficient(int n) { return std::pow(2.0 / 3.0, n); }

double kernel_k2(double y, double t, const Example5Params& params) {
    const int n = segment_of(y);
    if (n == 0 || n > params.N) {
        return 0.0;
    }
    // phi_m(y) phi_m(t) vanishes unless both points sit in segment m; at a
    // shared endpoint the sine factor is zero.
    return series_coefficient(n) * phi(n, y) * phi(n, t);
}

double kernel_k2_tail(double y, double t, int N) {
    const int n = segment_of(y);
    if (n == 0 || n <= N) {
        return 0.0;
    }
    return series_coefficient(n) * phi(n, y) * phi(n, t);
}

double kernel_k2_operator_tail(int N) { return series_coefficient(N + 1); }

std::vector<double> grid_breakpoints(int M, int N) {
    const int k = std::max(M, N);
    std::vector<double> b;
    for (int n = 1; n <= k; ++n) {
        b.push_back(q(n));
        b.push_back(p(n));
    }
    return b;
}

ModelSpec example_model(const Example5Params& params) {
    validate(params);
    ModelSpec spec;
    spec.gamma = params.gamma;
    spec.k0 = KernelSpec::potential(
        [params](double x, double y) { return potential_u(x, params) * potential_u(y, params); }, "u(x)u(y)");
    spec.k1 = KernelSpec::constant(KernelKind::OnOmega1, 1.0, {0.0, 1.0});
    spec.k1.name = "one";

    std::vector<RankTerm> terms;
    for (int n = 1; n <= params.N; ++n) {
        terms.push_back({series_coefficient(n), [n](double y) { return phi(n, y); }});
    }
    spec.k2 = KernelSpec::rank_sum(KernelKind::OnOmega2, std::move(terms), "example5_k2");
    spec.k2.evaluate = [params](double y, double t) { return kernel_k2(y, t, params); };
    spec.k2.infinite_series = !params.finite_rank_kernel;

    const auto b = grid_breakpoints(params.M, params.N);
    spec.x_axis = AxisSpec{{0.0, 1.0}, b, params.order};
    spec.y_axis = AxisSpec{{0.0, 1.0}, b, params.order};
    return spec;
}

double analytic_T_eigenvalue(int n, double gamma) {
    if (n < 1) {
        throw std::invalid_argument("analytic_T_eigenvalue: n must be >= 1");
    }
    return gamma + series_coefficient(n);
}

std::vector<IndexedFunction> phi_family(int from, int to) {
    if (from < 1 || to < from) {
        throw std::invalid_argument("phi_family: need 1 <= from <= to");
    }
    std::vector<IndexedFunction> family;
    for (int n = from; n <= to; ++n) {
        family.push_back({n, [n](double y) { return phi(n, y); }});
    }
    return family;
}

std::function<ModelSpec(const ScheduleEntry&)> schedule_builder(const Example5Params& base) {
    return [base](const ScheduleEntry& row) {
        Example5Params p = base;
        p.M = row.M;
        p.N = row.N;
        p.order = row.order;
        return example_model(p);
    };
}

}  // namespace efimov::hubbard
