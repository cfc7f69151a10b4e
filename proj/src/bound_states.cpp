#include "efimov/bound_states.hpp"

#include "efimov/errors.hpp"
#include "efimov/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace efimov {

std::string to_string(EdgeComponent c) {
    switch (c) {
        case EdgeComponent::H0: return "H0";
        case EdgeComponent::W1: return "W1";
        case EdgeComponent::W2: return "W2";
    }
    return "unknown";
}

std::string to_string(FinitenessVerdict v) {
    switch (v) {
        case FinitenessVerdict::FiniteSpectrumPredicted: return "finite-spectrum-predicted";
        case FinitenessVerdict::EfimovPossible: return "efimov-possible";
        case FinitenessVerdict::PremiseViolated: return "premise-violated";
    }
    return "unknown";
}

std::string to_string(ConditionVerdict v) {
    switch (v) {
        case ConditionVerdict::Sufficient: return "efimov-sufficient";
        case ConditionVerdict::TailSufficient: return "efimov-sufficient-tail";
        case ConditionVerdict::NotEstablished: return "not-established";
    }
    return "unknown";
}

std::string to_string(SolvePath p) { return p == SolvePath::Dense ? "dense" : "iterative"; }

std::string to_string(AccumulationVerdict v) {
    switch (v) {
        case AccumulationVerdict::Consistent: return "accumulation consistent";
        case AccumulationVerdict::NoAccumulation: return "no accumulation";
        case AccumulationVerdict::Inconsistent: return "inconsistent";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> fiber_spectrum(const Eigen::VectorXd& diagonal, const Eigen::MatrixXd& kernel, double scale) {
    Eigen::MatrixXd f = -scale * kernel;
    f.diagonal() += diagonal;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

EssentialEdgeReport essential_edge(const ModelDiscretization& parts) {
    const std::size_t nx = parts.grid.nx();
    const std::size_t ny = parts.grid.ny();
    EssentialEdgeReport r;
    r.x_nodes = parts.grid.gx.nodes();
    r.y_nodes = parts.grid.gy.nodes();
    r.h0_min = parts.potential.minCoeff();
    r.h0_max = parts.potential.maxCoeff();
    r.zero_set_at_nodes = r.h0_min <= 1e-8 && r.h0_min >= -1e-8;

    r.w1_fiber_spectra.resize(ny);
    parallel_for(ny, [&](std::size_t j) {
        Eigen::VectorXd d(static_cast<Eigen::Index>(nx));
        for (std::size_t i = 0; i < nx; ++i) d(static_cast<Eigen::Index>(i)) = parts.potential(static_cast<Eigen::Index>(i * ny + j));
        r.w1_fiber_spectra[j] = fiber_spectrum(d, parts.k1.matrix(), parts.gamma);
    });
    r.w2_fiber_spectra.resize(nx);
    parallel_for(nx, [&](std::size_t i) {
        const Eigen::VectorXd d = parts.potential.segment(static_cast<Eigen::Index>(i * ny), static_cast<Eigen::Index>(ny));
        r.w2_fiber_spectra[i] = fiber_spectrum(d, parts.k2.matrix(), 1.0);
    });

    for (const auto& s : r.w1_fiber_spectra) r.w1_fiber_minima.push_back(s.front());
    for (const auto& s : r.w2_fiber_spectra) r.w2_fiber_minima.push_back(s.front());

    const auto w1_it = std::min_element(r.w1_fiber_minima.begin(), r.w1_fiber_minima.end());
    const auto w2_it = std::min_element(r.w2_fiber_minima.begin(), r.w2_fiber_minima.end());
    r.lambda_w1 = *w1_it;
    r.lambda_w2 = *w2_it;
    r.lambda = std::min({r.h0_min, r.lambda_w1, r.lambda_w2});

    if (r.h0_min <= r.lambda + kEdgeTieTol) {
        r.attained_by = EdgeComponent::H0;
        Eigen::Index node = 0;
        parts.potential.minCoeff(&node);
        r.fiber_index = static_cast<std::size_t>(node);
        r.fiber_coordinate = r.x_nodes[static_cast<std::size_t>(node) / ny];
    } else if (r.lambda_w1 <= r.lambda + kEdgeTieTol) {
        r.attained_by = EdgeComponent::W1;
        r.fiber_index = static_cast<std::size_t>(w1_it - r.w1_fiber_minima.begin());
        r.fiber_coordinate = r.y_nodes[r.fiber_index];
    } else {
        r.attained_by = EdgeComponent::W2;
        r.fiber_index = static_cast<std::size_t>(w2_it - r.w2_fiber_minima.begin());
        r.fiber_coordinate = r.x_nodes[r.fiber_index];
    }
    return r;
}

EssentialEdgeReport essential_edge(const ModelSpec& spec) { return essential_edge(discretize_model(spec)); }

// ---------------------------------------------------------------------------

SpectralSet discrete_spectrum(const KernelSpec& k, const Grid1D& grid, double scale) {
    std::vector<double> values;
    if (!k.rank_terms.empty()) {
        for (const auto& term : k.rank_terms) {
            const double v = scale * term.coefficient;
            if (std::abs(v) > 1e-10) values.push_back(v);
        }
    } else {
        const auto m = discretize_kernel(k, grid);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix(), Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double v = scale * es.eigenvalues()(i);
            if (std::abs(v) > 1e-10) values.push_back(v);
        }
    }
    return SpectralSet(values, true);
}

Eta0 eta0(const ModelSpec& spec) {
    const Grid2D grid = model_grid(spec);
    Eta0 e;
    e.sd_k1 = discrete_spectrum(spec.k1, grid.gx, spec.gamma);
    e.sd_k2 = discrete_spectrum(spec.k2, grid.gy, 1.0);
    e.from_rank_hints = !spec.k1.rank_terms.empty() || !spec.k2.rank_terms.empty();
    e.value = std::max({0.0, e.sd_k1.max().value_or(0.0), e.sd_k2.max().value_or(0.0)});
    return e;
}

FinitenessReport finiteness_test(const ModelSpec& spec) {
    const ModelDiscretization parts = discretize_model(spec);
    const EssentialEdgeReport edge = essential_edge(parts);
    const Eta0 e = eta0(spec);

    FinitenessReport r;
    r.lambda = edge.lambda;
    r.eta0 = e.value;
    r.zero_set_at_nodes = edge.zero_set_at_nodes;
    r.min_premise_margin = parts.potential.minCoeff() - (r.lambda + r.eta0);
    r.premise_holds = r.min_premise_margin >= -1e-10;
    r.sigma_d_t_finite = !spec.k1.infinite_series && !spec.k2.infinite_series;

    const TensorSpectrum t = tensor_spectrum(e.sd_k1, e.sd_k2);
    r.sigma_d_t_size = t.discrete.size();
    r.sigma_d0_size = static_cast<std::size_t>(std::count_if(t.discrete.points().begin(), t.discrete.points().end(),
                                                             [&](double w) { return w > r.eta0 + SpectralSet::kMergeTol; }));

    if (!r.premise_holds) {
        r.verdict = FinitenessVerdict::PremiseViolated;
    } else if (r.sigma_d_t_finite) {
        r.verdict = FinitenessVerdict::FiniteSpectrumPredicted;
    } else {
        r.verdict = FinitenessVerdict::EfimovPossible;
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kOrthonormalTol = 1e-8;
constexpr double kComponentTol = 1e-10;

void require_orthonormal(std::span<const IndexedFunction> family, const Grid1D& grid) {
    if (family.empty()) {
        throw PreconditionError("condition check: empty family");
    }
    std::vector<Eigen::VectorXd> samples;
    for (const auto& f : family) samples.push_back(sample(grid, f.f));
    for (std::size_t a = 0; a < samples.size(); ++a) {
        for (std::size_t b = a; b < samples.size(); ++b) {
            const double g = samples[a].dot(samples[b]);
            const double expected = a == b ? 1.0 : 0.0;
            if (std::abs(g - expected) > kOrthonormalTol) {
                std::ostringstream os;
                os << "condition check: family is not orthonormal (<f_" << family[a].index << ", f_" << family[b].index
                   << "> = " << g << ")";
                throw PreconditionError(os.str());
            }
        }
    }
}

ConditionVerdict verdict_for(const std::vector<ConditionRow>& rows, std::size_t& tail) {
    tail = 0;
    for (auto it = rows.rbegin(); it != rows.rend() && it->pass; ++it) ++tail;
    if (!rows.empty() && tail == rows.size()) return ConditionVerdict::Sufficient;
    if (tail >= 2) return ConditionVerdict::TailSufficient;
    return ConditionVerdict::NotEstablished;
}

ConditionReport condition_check(const ModelSpec& spec, std::span<const IndexedFunction> family, ConditionKind kind) {
    auto parts = std::make_shared<const ModelDiscretization>(discretize_model(spec));
    const Grid2D& grid = parts->grid;
    const bool on_y = kind == ConditionKind::W1Edge;
    require_orthonormal(family, on_y ? grid.gy : grid.gx);

    const EssentialEdgeReport edge = essential_edge(*parts);
    const double own = on_y ? edge.lambda_w1 : edge.lambda_w2;
    const double other = on_y ? edge.lambda_w2 : edge.lambda_w1;
    if (!(own <= edge.lambda + kComponentTol && own <= other + kComponentTol)) {
        std::ostringstream os;
        os << "condition check: essential edge " << edge.lambda << " is not attained by " << (on_y ? "W1" : "W2")
           << " (E_min(W1) = " << edge.lambda_w1 << ", E_min(W2) = " << edge.lambda_w2 << ")";
        throw PreconditionError(os.str());
    }

    const ModelOperator w(parts, on_y ? OperatorRole::W1 : OperatorRole::W2);
    const ModelOperator t_other(parts, on_y ? OperatorRole::T2 : OperatorRole::T1);
    const Interval flat_axis = on_y ? grid.gx.domain() : grid.gy.domain();
    const double c0 = 1.0 / std::sqrt(flat_axis.length());
    const auto flat = [c0](double) { return c0; };

    ConditionReport report;
    report.kind = kind;
    report.lambda = edge.lambda;
    for (const auto& member : family) {
        const Eigen::VectorXd f =
            on_y ? sample_separable(grid, flat, member.f) : sample_separable(grid, member.f, flat);
        ConditionRow row;
        row.kappa = member.index;
        row.lhs = quadratic_form(w, f);
        row.rhs = edge.lambda + quadratic_form(t_other, f);
        row.margin = row.rhs - row.lhs;
        row.pass = row.margin > 0.0;
        report.rows.push_back(row);
    }
    report.verdict = verdict_for(report.rows, report.passing_tail);
    return report;
}

}  // namespace

ConditionReport condition5_check(const ModelSpec& spec, std::span<const IndexedFunction> family) {
    return condition_check(spec, family, ConditionKind::W1Edge);
}

ConditionReport condition6_check(const ModelSpec& spec, std::span<const IndexedFunction> family) {
    return condition_check(spec, family, ConditionKind::W2Edge);
}

// ---------------------------------------------------------------------------

namespace {

BoundStateCount summarize(const Eigen::VectorXd& values, double threshold, SolvePath path) {
    BoundStateCount c;
    c.path = path;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) < threshold) c.below.push_back(values(i));
        if (i < 5) c.lowest.push_back(values(i));
    }
    c.count = c.below.size();
    return c;
}

}  // namespace

BoundStateCount count_below(const SymmetricOperator& op, double lambda, std::optional<double> tol) {
    return count_below_values(eigenvalues_symmetric(op), lambda, tol);
}

BoundStateCount count_below_values(const Eigen::VectorXd& ascending, double lambda, std::optional<double> tol) {
    const double threshold = lambda - tol.value_or(default_edge_tolerance(lambda));
    return summarize(ascending, threshold, SolvePath::Dense);
}

BoundStateCount count_below(const LinearOperator& op, double lambda, std::optional<double> tol,
                            const LanczosOptions& options) {
    const double threshold = lambda - tol.value_or(default_edge_tolerance(lambda));
    const auto n = static_cast<int>(op.dim());
    int m = std::min(n, 8);
    while (true) {
        const PartialEigenSystem pairs = lowest_eigenpairs(op, m, options);
        BoundStateCount c = summarize(pairs.values, threshold, SolvePath::Iterative);
        if (static_cast<int>(c.count) < m || m == n) {
            return c;
        }
        m = std::min(n, 2 * m);
    }
}

// ---------------------------------------------------------------------------

AccumulationVerdict accumulation_verdict(std::span<const AccumulationRow> rows, double min_gap_ratio) {
    std::vector<const AccumulationRow*> live;
    for (const auto& r : rows) {
        if (!r.skipped) live.push_back(&r);
    }
    const bool any = std::any_of(live.begin(), live.end(), [](const AccumulationRow* r) { return r->count > 0; });
    if (!any) {
        return AccumulationVerdict::NoAccumulation;
    }
    int compared = 0;
    for (std::size_t i = 1; i < live.size(); ++i) {
        if (live[i]->count < live[i - 1]->count) {
            return AccumulationVerdict::Inconsistent;
        }
        // Gaps shrink only when a series term is added; at fixed N a finer
        // grid should leave them alone.
        if (live[i]->N > live[i - 1]->N && live[i]->gap && live[i - 1]->gap) {
            ++compared;
            if (*live[i - 1]->gap < min_gap_ratio * *live[i]->gap) {
                return AccumulationVerdict::Inconsistent;
            }
        }
    }
    return compared > 0 ? AccumulationVerdict::Consistent : AccumulationVerdict::Inconsistent;
}

AccumulationTable accumulation_study(const std::function<ModelSpec(const ScheduleEntry&)>& build,
                                     std::span<const ScheduleEntry> schedule, const AccumulationOptions& options) {
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        const auto& a = schedule[i - 1];
        const auto& b = schedule[i];
        if (b.N < a.N || (b.N == a.N && b.order <= a.order)) {
            throw std::invalid_argument("accumulation_study: schedule must refine (N nondecreasing, g increasing at fixed N)");
        }
    }

    AccumulationTable table;
    for (const auto& entry : schedule) {
        AccumulationRow row;
        row.M = entry.M;
        row.N = entry.N;
        row.order = entry.order;
        if (entry.label.empty()) {
            std::ostringstream os;
            os << "M=" << entry.M << ",N=" << entry.N << ",g=" << entry.order;
            row.label = os.str();
        } else {
            row.label = entry.label;
        }

        const ModelSpec spec = build(entry);
        auto parts = std::make_shared<const ModelDiscretization>(discretize_model(spec));
        row.nx = parts->grid.nx();
        row.ny = parts->grid.ny();
        const std::size_t dim = parts->grid.size();
        row.lambda = essential_edge(*parts).lambda;

        const ModelOperator h(parts, OperatorRole::H);
        BoundStateCount c;
        if (dim <= options.dense_cap) {
            c = count_below(h.to_dense(options.dense_cap), row.lambda, options.tol);
        } else if (dim <= options.iterative_cap) {
            c = count_below(h, row.lambda, options.tol, options.lanczos);
        } else {
            row.skipped = true;
            std::ostringstream os;
            os << "dimension " << dim << " exceeds the iterative cap " << options.iterative_cap << "; row skipped";
            row.notice = os.str();
            table.rows.push_back(std::move(row));
            continue;
        }
        if (c.path == SolvePath::Iterative) {
            std::ostringstream os;
            os << "dimension " << dim << " exceeds the dense cap " << options.dense_cap << "; solved matrix-free";
            row.notice = os.str();
        }
        row.path = c.path;
        row.count = c.count;
        row.lowest = c.lowest;
        row.below = c.below;
        if (!c.below.empty()) {
            row.gap = row.lambda - c.below.back();
        }
        table.rows.push_back(std::move(row));
    }
    table.verdict = accumulation_verdict(table.rows, options.min_gap_ratio);
    return table;
}

}  // namespace efimov
