#include "efimov/spectra.hpp"

#include "efimov/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace efimov {

namespace {

void require_nonempty(const SymmetricOperator& op) {
    if (op.dim() == 0) {
        throw std::invalid_argument("eigensolve: dimension 0");
    }
}

}  // namespace

EigenSystem eig_symmetric(const SymmetricOperator& op) {
    require_nonempty(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix(), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eig_symmetric: QR iteration did not converge");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXd eigenvalues_symmetric(const SymmetricOperator& op) {
    require_nonempty(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eigenvalues_symmetric: QR iteration did not converge");
    }
    return es.eigenvalues();
}

// ---------------------------------------------------------------------------
// SpectralSet

SpectralSet::SpectralSet(std::span<const double> values, bool essential_zero) : essential_zero_(essential_zero) {
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("SpectralSet: non-finite value");
        }
    }
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted) {
        if (!points_.empty() && v - points_.back() <= kMergeTol) {
            ++multiplicities_.back();
        } else {
            points_.push_back(v);
            multiplicities_.push_back(1);
        }
    }
}

SpectralSet::SpectralSet(std::initializer_list<double> values, bool essential_zero)
    : SpectralSet(std::span<const double>(values.begin(), values.size()), essential_zero) {}

bool SpectralSet::contains(double v) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), v - kMergeTol);
    return it != points_.end() && std::abs(*it - v) <= kMergeTol;
}

std::optional<double> SpectralSet::max() const {
    if (points_.empty()) {
        return std::nullopt;
    }
    return points_.back();
}

SpectralSet SpectralSet::nonzero() const {
    std::vector<double> kept;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (std::abs(points_[i]) > kMergeTol) {
            kept.insert(kept.end(), static_cast<std::size_t>(multiplicities_[i]), points_[i]);
        }
    }
    return SpectralSet(kept, essential_zero_);
}

TensorSpectrum tensor_spectrum(const SpectralSet& sd1_in, const SpectralSet& sd2_in) {
    const SpectralSet sd1 = sd1_in.nonzero();
    const SpectralSet sd2 = sd2_in.nonzero();

    std::vector<double> with_zero1 = sd1.points();
    with_zero1.push_back(0.0);
    std::vector<double> with_zero2 = sd2.points();
    with_zero2.push_back(0.0);

    std::vector<double> sums;
    for (double a : with_zero1) {
        for (double b : with_zero2) {
            sums.push_back(a + b);
        }
    }

    std::vector<double> ess = sd1.points();
    ess.insert(ess.end(), sd2.points().begin(), sd2.points().end());
    ess.push_back(0.0);
    SpectralSet essential(ess, true);

    std::vector<double> disc;
    for (double a : sd1.points()) {
        for (double b : sd2.points()) {
            if (!essential.contains(a + b)) {
                disc.push_back(a + b);
            }
        }
    }

    TensorSpectrum out;
    out.sigma = SpectralSet(sums, true);
    out.essential = std::move(essential);
    // Distinct values only: a point of sigma_d(T) is one spectral point.
    SpectralSet merged(disc);
    out.discrete = SpectralSet(merged.points());
    return out;
}

CardinalityReport cardinality_checks(const SpectralSet& sd1_in, const SpectralSet& sd2_in) {
    const SpectralSet sd1 = sd1_in.nonzero();
    const SpectralSet sd2 = sd2_in.nonzero();
    const TensorSpectrum t = tensor_spectrum(sd1, sd2);
    CardinalityReport r;
    r.sd_k1 = sd1.size();
    r.sd_k2 = sd2.size();
    r.sigma_k1 = sd1.size() + 1;
    r.sigma_k2 = sd2.size() + 1;
    r.sigma_e_t = t.essential.size();
    r.sigma_d_t = t.discrete.size();
    r.lower_k1 = r.sd_k1 + 1 <= r.sigma_e_t;
    r.lower_k2 = r.sd_k2 + 1 <= r.sigma_e_t;
    r.upper = r.sigma_e_t <= r.sd_k1 + r.sd_k2 + 1;
    r.product = r.sigma_d_t <= r.sd_k1 * r.sd_k2;
    return r;
}

// ---------------------------------------------------------------------------
// Minimax

double default_edge_tolerance(double e_min) { return 1e-6 * std::max(1.0, std::abs(e_min)); }

namespace {

void apply_dichotomy(MinimaxResult& result, const std::vector<double>& minima, double e_min,
                     std::optional<double> tol);

// Literal construction: each step minimizes the Rayleigh quotient on the
// orthogonal complement of the previous minimizers. The complement basis is
// carried explicitly and shrunk by one Householder reflection per step.
std::vector<double> literal_minima(const Eigen::MatrixXd& a, int n, Eigen::MatrixXd& minimizers) {
    const Eigen::Index dim = a.rows();
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(dim, dim);
    minimizers.resize(dim, n);
    std::vector<double> minima;
    minima.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const Eigen::MatrixXd restricted = basis.transpose() * a * basis;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (restricted + restricted.transpose()));
        const Eigen::VectorXd s = es.eigenvectors().col(0);
        minima.push_back(es.eigenvalues()(0));
        minimizers.col(k) = basis * s;

        if (basis.cols() == 1) {
            continue;
        }
        // Reflector P with P s = +-e1; columns 2.. of P span s-perp.
        Eigen::VectorXd v = s;
        const double alpha = (s(0) >= 0.0 ? -1.0 : 1.0) * s.norm();
        v(0) -= alpha;
        const double vn = v.squaredNorm();
        Eigen::MatrixXd reflector = Eigen::MatrixXd::Identity(s.size(), s.size());
        if (vn > 0.0) {
            reflector -= (2.0 / vn) * v * v.transpose();
        }
        basis = (basis * reflector.rightCols(s.size() - 1)).eval();
    }
    return minima;
}

}  // namespace

MinimaxResult minimax_sequence(const SymmetricOperator& op, int n, double e_min, std::optional<double> tol,
                               MinimaxMethod method) {
    if (n < 1) {
        throw std::invalid_argument("minimax_sequence: n must be >= 1");
    }
    if (n > op.dim()) {
        throw std::invalid_argument("minimax_sequence: n exceeds the dimension");
    }
    if (method == MinimaxMethod::Auto) {
        method = (n <= 10 && op.dim() <= 200) ? MinimaxMethod::Literal : MinimaxMethod::Eigensolve;
    }

    MinimaxResult result;
    std::vector<double> minima;
    if (method == MinimaxMethod::Literal) {
        minima = literal_minima(op.matrix(), n, result.minimizers);
    } else {
        const Eigen::VectorXd ev = eigenvalues_symmetric(op);
        minima.assign(ev.data(), ev.data() + n);
    }
    apply_dichotomy(result, minima, e_min, tol);
    return result;
}

MinimaxResult minimax_from_eigenvalues(const Eigen::VectorXd& ascending, int n, double e_min,
                                       std::optional<double> tol) {
    if (n < 1 || n > ascending.size()) {
        throw std::invalid_argument("minimax_from_eigenvalues: need 1 <= n <= number of eigenvalues");
    }
    MinimaxResult result;
    apply_dichotomy(result, std::vector<double>(ascending.data(), ascending.data() + n), e_min, tol);
    return result;
}

namespace {

void apply_dichotomy(MinimaxResult& result, const std::vector<double>& minima, double e_min,
                     std::optional<double> tol) {
    const int n = static_cast<int>(minima.size());
    result.e_min = e_min;
    result.tol = tol.value_or(default_edge_tolerance(e_min));

    double running = -std::numeric_limits<double>::infinity();
    bool saturated = false;
    for (int k = 0; k < n; ++k) {
        running = std::max(running, minima[static_cast<std::size_t>(k)]);
        result.raw.push_back(running);
        if (!saturated && running < e_min - result.tol) {
            result.mu.push_back(running);
            result.tags.push_back(MinimaxTag::Eigenvalue);
            ++result.n_below_edge;
        } else {
            saturated = true;
            result.mu.push_back(e_min);
            result.tags.push_back(MinimaxTag::EdgeSaturated);
        }
    }
}

}  // namespace

OrderReport check_order_monotonicity(const SymmetricOperator& a, const SymmetricOperator& b, double e_min, int n) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("check_order_monotonicity: dimension mismatch");
    }
    OrderReport r;
    const SymmetricOperator diff(b.matrix() - a.matrix(), OperatorRole::Generic, b.shape());
    r.min_eig_difference = eigenvalues_symmetric(diff)(0);
    if (r.min_eig_difference < -1e-10) {
        throw OrderViolation(r.min_eig_difference);
    }
    r.mu_a = minimax_sequence(a, n, e_min, {}, MinimaxMethod::Eigensolve);
    r.mu_b = minimax_sequence(b, n, e_min, {}, MinimaxMethod::Eigensolve);
    r.holds = true;
    for (int k = 0; k < n; ++k) {
        if (r.mu_a.mu[static_cast<std::size_t>(k)] > r.mu_b.mu[static_cast<std::size_t>(k)] + 1e-10) {
            r.holds = false;
            r.first_violation = k + 1;
            break;
        }
    }
    return r;
}

}  // namespace efimov
