#pragma once

#include "efimov/operators.hpp"
#include "efimov/spectra.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace efimov {

// ---------------------------------------------------------------------------
// Essential spectrum of H = H0 - T1 - T2
//
// sigma_e(H) = sigma(H0) u sigma(H0 - T1) u sigma(H0 - T2). H0 - T1 acts on
// each y-section separately, so its spectrum is the closure of the union of
// the fiber spectra of diag(k0(., y)) - gamma K1; likewise for H0 - T2.

enum class EdgeComponent { H0, W1, W2 };

std::string to_string(EdgeComponent c);

struct EssentialEdgeReport {
    double h0_min = 0.0;
    double h0_max = 0.0;
    std::vector<double> w1_fiber_minima;  ///< one per y-node
    std::vector<double> w2_fiber_minima;  ///< one per x-node
    std::vector<double> y_nodes;
    std::vector<double> x_nodes;
    double lambda_w1 = 0.0;  ///< min over W1 fibers
    double lambda_w2 = 0.0;  ///< min over W2 fibers
    double lambda = 0.0;     ///< E_min(H)
    EdgeComponent attained_by = EdgeComponent::H0;
    std::size_t fiber_index = 0;   ///< node index of the attaining fiber (W1: y, W2: x)
    double fiber_coordinate = 0.0;
    /// k0 reaches zero at some node (min <= 1e-8). A zero strictly between
    /// nodes cannot be seen.
    bool zero_set_at_nodes = false;
    /// Full fiber spectra, kept for diagnostics only.
    std::vector<std::vector<double>> w1_fiber_spectra;
    std::vector<std::vector<double>> w2_fiber_spectra;
};

/// Ties between components within this tolerance go to H0, then W1, then W2.
inline constexpr double kEdgeTieTol = 1e-12;

EssentialEdgeReport essential_edge(const ModelSpec& spec);
EssentialEdgeReport essential_edge(const ModelDiscretization& parts);

// ---------------------------------------------------------------------------
// eta0 = sup sigma_e(T)

struct Eta0 {
    double value = 0.0;
    SpectralSet sd_k1;  ///< discrete spectrum of gamma K1
    SpectralSet sd_k2;
    bool from_rank_hints = false;
};

Eta0 eta0(const ModelSpec& spec);

/// Nonzero eigenvalues (|lambda| > 1e-10) of the discretized kernel, or the
/// rank-hint coefficients when a hint is present. scale multiplies them.
SpectralSet discrete_spectrum(const KernelSpec& k, const Grid1D& grid, double scale = 1.0);

// ---------------------------------------------------------------------------
// Finiteness test: H0 >= (E_min(H) + eta0) E and |sigma_d(T)| < infinity imply
// finitely many eigenvalues below E_min(H); contrapositively an infinite
// sigma_d(T) is necessary for accumulation.

enum class FinitenessVerdict { FiniteSpectrumPredicted, EfimovPossible, PremiseViolated };

std::string to_string(FinitenessVerdict v);

struct FinitenessReport {
    FinitenessVerdict verdict = FinitenessVerdict::PremiseViolated;
    double lambda = 0.0;
    double eta0 = 0.0;
    double min_premise_margin = 0.0;  ///< min over nodes of k0 - (lambda + eta0)
    bool premise_holds = false;
    bool sigma_d_t_finite = false;
    std::size_t sigma_d_t_size = 0;   ///< for the (possibly truncated) spectra in hand
    /// Points of sigma_d(T) above eta0: eigenvalues of eta0 E - T below its edge 0.
    std::size_t sigma_d0_size = 0;
    bool zero_set_at_nodes = false;
};

FinitenessReport finiteness_test(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Sufficient conditions for infinitely many bound states

struct IndexedFunction {
    int index = 0;
    std::function<double(double)> f;
};

enum class ConditionKind {
    W1Edge,  ///< (W1 f, f) < Lambda + (T2 f, f), f = 1 (x) phi_k
    W2Edge,  ///< (W2 f, f) < Lambda + (T1 f, f), f = phi_k (x) 1
};

enum class ConditionVerdict {
    Sufficient,      ///< every row passes
    TailSufficient,  ///< a nonempty trailing run of rows passes
    NotEstablished,
};

std::string to_string(ConditionVerdict v);

struct ConditionRow {
    int kappa = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct ConditionReport {
    ConditionKind kind = ConditionKind::W1Edge;
    double lambda = 0.0;
    std::vector<ConditionRow> rows;
    ConditionVerdict verdict = ConditionVerdict::NotEstablished;
    std::size_t passing_tail = 0;  ///< length of the trailing run of passing rows
};

/// Family must be orthonormal on the y grid within 1e-8 and the edge must be
/// attained by W1 with Lambda_1 <= E_min(W2); otherwise PreconditionError.
ConditionReport condition5_check(const ModelSpec& spec, std::span<const IndexedFunction> family);
/// Mirror image: family on the x axis, edge attained by W2.
ConditionReport condition6_check(const ModelSpec& spec, std::span<const IndexedFunction> family);

// ---------------------------------------------------------------------------
// Counting bound states

enum class SolvePath { Dense, Iterative };

std::string to_string(SolvePath p);

struct BoundStateCount {
    std::size_t count = 0;
    std::vector<double> below;   ///< eigenvalues < lambda - tol, ascending
    std::vector<double> lowest;  ///< smallest computed eigenvalues (at most 5)
    SolvePath path = SolvePath::Dense;
};

/// Dense route.
BoundStateCount count_below(const SymmetricOperator& op, double lambda, std::optional<double> tol = {});
/// Dense route on eigenvalues already in hand (ascending).
BoundStateCount count_below_values(const Eigen::VectorXd& ascending, double lambda, std::optional<double> tol = {});
/// Iterative route: grows the number of requested pairs until one lies above
/// the threshold.
BoundStateCount count_below(const LinearOperator& op, double lambda, std::optional<double> tol,
                            const LanczosOptions& options);

struct ScheduleEntry {
    int M = 2;
    int N = 2;
    int order = 8;
    std::string label;  ///< empty: "M=..,N=..,g=.."
};

struct AccumulationRow {
    std::string label;
    int M = 0;
    int N = 0;
    int order = 0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double lambda = 0.0;
    std::size_t count = 0;
    std::optional<double> gap;  ///< lambda - largest eigenvalue below it
    std::vector<double> lowest;
    std::vector<double> below;
    SolvePath path = SolvePath::Dense;
    bool skipped = false;
    std::string notice;
};

enum class AccumulationVerdict { Consistent, NoAccumulation, Inconsistent };

std::string to_string(AccumulationVerdict v);

struct AccumulationTable {
    std::vector<AccumulationRow> rows;
    AccumulationVerdict verdict = AccumulationVerdict::NoAccumulation;
};

struct AccumulationOptions {
    std::size_t dense_cap = kDefaultDenseCap;
    /// Rows above the dense cap go matrix-free up to this dimension; beyond it
    /// they are skipped with a notice.
    std::size_t iterative_cap = 40000;
    std::optional<double> tol;
    LanczosOptions lanczos;
    double min_gap_ratio = 1.2;
};

/// Rows must refine: N nondecreasing, and order increasing whenever N repeats.
AccumulationTable accumulation_study(const std::function<ModelSpec(const ScheduleEntry&)>& build,
                                     std::span<const ScheduleEntry> schedule,
                                     const AccumulationOptions& options = {});

/// Verdict from counts and gaps of already computed rows. Counts must not
/// decrease; gaps are compared only across steps where N grows.
AccumulationVerdict accumulation_verdict(std::span<const AccumulationRow> rows, double min_gap_ratio = 1.2);

}  // namespace efimov
