#pragma once

#include "efimov/operators.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace efimov {

struct EigenSystem {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXd vectors;  ///< orthonormal columns
};

/// Full dense symmetric eigendecomposition.
EigenSystem eig_symmetric(const SymmetricOperator& op);
/// Eigenvalues only, ascending.
Eigen::VectorXd eigenvalues_symmetric(const SymmetricOperator& op);

struct LanczosOptions {
    std::uint64_t seed = 20240601;
    double tol = 1e-10;       ///< residual norm required of every requested pair
    int block_size = 0;       ///< 0 picks max(4, m) capped at the dimension
    int max_basis = 0;        ///< 0 picks min(n, max(600, 8 m))
};

struct PartialEigenSystem {
    Eigen::VectorXd values;     ///< m smallest Ritz values, ascending
    Eigen::MatrixXd vectors;
    std::vector<double> residuals;
    Eigen::Index basis_size = 0;
};

/// m smallest eigenpairs by block Lanczos with full reorthogonalization.
/// Deterministic for a fixed seed. Throws ConvergenceError when the basis
/// limit is reached first.
PartialEigenSystem lowest_eigenpairs(const LinearOperator& op, int m, const LanczosOptions& options = {});

/// Finite set of reals with an optional essential point at zero. Values closer
/// than kMergeTol are merged and their multiplicities added.
class SpectralSet {
public:
    static constexpr double kMergeTol = 1e-12;

    SpectralSet() = default;
    explicit SpectralSet(std::span<const double> values, bool essential_zero = false);
    SpectralSet(std::initializer_list<double> values, bool essential_zero = false);

    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<int>& multiplicities() const noexcept { return multiplicities_; }
    bool essential_zero() const noexcept { return essential_zero_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    bool contains(double v) const;
    std::optional<double> max() const;

    /// Nonzero points only; the discrete spectrum of a compact operator.
    SpectralSet nonzero() const;

private:
    std::vector<double> points_;
    std::vector<int> multiplicities_;
    bool essential_zero_ = false;
};

/// Spectrum of K1 kron E + E kron K2 from the discrete spectra of K1 and K2.
struct TensorSpectrum {
    SpectralSet sigma;      ///< (sd1 u {0}) + (sd2 u {0})
    SpectralSet essential;  ///< {0} u sd1 u sd2
    SpectralSet discrete;   ///< {a + b : a in sd1, b in sd2} minus essential
};

TensorSpectrum tensor_spectrum(const SpectralSet& sd1, const SpectralSet& sd2);

struct CardinalityReport {
    std::size_t sd_k1 = 0;
    std::size_t sd_k2 = 0;
    std::size_t sigma_k1 = 0;
    std::size_t sigma_k2 = 0;
    std::size_t sigma_e_t = 0;
    std::size_t sigma_d_t = 0;
    bool lower_k1 = false;  ///< |sd(K1)| + 1 <= |sigma_e(T)|
    bool lower_k2 = false;  ///< |sd(K2)| + 1 <= |sigma_e(T)|
    bool upper = false;     ///< |sigma_e(T)| <= |sd(K1)| + |sd(K2)| + 1
    bool product = false;   ///< |sigma_d(T)| <= |sd(K1)| |sd(K2)|

    bool all_hold() const noexcept { return lower_k1 && lower_k2 && upper && product; }
};

CardinalityReport cardinality_checks(const SpectralSet& sd1, const SpectralSet& sd2);

enum class MinimaxTag { Eigenvalue, EdgeSaturated };
enum class MinimaxMethod { Auto, Literal, Eigensolve };

struct MinimaxResult {
    std::vector<double> mu;   ///< clamped sequence; edge-saturated entries equal e_min
    std::vector<double> raw;  ///< running sup before clamping
    std::vector<MinimaxTag> tags;
    int n_below_edge = 0;
    double e_min = 0.0;
    double tol = 0.0;
    /// Successive constrained minimizers (literal path only, else empty).
    Eigen::MatrixXd minimizers;
};

/// 1e-6 max(1, |e_min|).
double default_edge_tolerance(double e_min);

/// mu_1 = min Rayleigh quotient, mu^(1)_k = min over the orthogonal complement of
/// the previous minimizers, mu_n = running sup; then the dichotomy against the
/// injected essential edge. Auto uses the literal path for n <= 10, dim <= 200.
MinimaxResult minimax_sequence(const SymmetricOperator& op, int n, double e_min, std::optional<double> tol = {},
                               MinimaxMethod method = MinimaxMethod::Auto);

struct OrderReport {
    double min_eig_difference = 0.0;  ///< min eigenvalue of B - A
    MinimaxResult mu_a;
    MinimaxResult mu_b;
    bool holds = false;
    int first_violation = -1;  ///< 1-based k, or -1
};

/// Eigensolve path of minimax_sequence on already computed ascending eigenvalues.
MinimaxResult minimax_from_eigenvalues(const Eigen::VectorXd& ascending, int n, double e_min,
                                       std::optional<double> tol = {});

/// Verifies mu_k(A) <= mu_k(B) + 1e-10 for k <= n with a shared edge. Throws
/// OrderViolation when B - A has an eigenvalue below -1e-10.
OrderReport check_order_monotonicity(const SymmetricOperator& a, const SymmetricOperator& b, double e_min, int n);

}  // namespace efimov
