#include "efimov/cli/run.hpp"

#include "efimov/bound_states.hpp"
#include "efimov/errors.hpp"
#include "efimov/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace efimov::cli {

using nlohmann::ordered_json;

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return format_number(static_cast<long long>(v)); }
std::string num(int v) { return format_number(static_cast<long long>(v)); }

std::string joined(const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) s += ';';
        s += num(values[i]);
    }
    return s;
}

ordered_json edge_json(const EssentialEdgeReport& e) {
    ordered_json j;
    j["lambda"] = e.lambda;
    j["attained_by"] = to_string(e.attained_by);
    j["fiber_index"] = e.fiber_index;
    j["fiber_coordinate"] = e.fiber_coordinate;
    j["h0_range"] = {e.h0_min, e.h0_max};
    j["lambda_w1"] = e.lambda_w1;
    j["lambda_w2"] = e.lambda_w2;
    j["zero_set_at_nodes"] = e.zero_set_at_nodes;
    return j;
}

ordered_json count_json(const BoundStateCount& c) {
    ordered_json j;
    j["path"] = to_string(c.path);
    j["count"] = c.count;
    j["below"] = c.below;
    j["lowest"] = c.lowest;
    return j;
}

ordered_json condition_json(const ConditionReport& r) {
    ordered_json j;
    j["kind"] = r.kind == ConditionKind::W1Edge ? "W1 edge" : "W2 edge";
    j["lambda"] = r.lambda;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"kappa", row.kappa}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"margin", row.margin}, {"pass", row.pass}});
    }
    j["rows"] = rows;
    j["passing_tail"] = r.passing_tail;
    j["verdict"] = to_string(r.verdict);
    return j;
}

Table condition_table(const ConditionReport& r) {
    Table t{{"kappa", "lhs", "rhs", "margin", "pass"}, {}};
    for (const auto& row : r.rows) {
        t.rows.push_back({num(row.kappa), num(row.lhs), num(row.rhs), num(row.margin), row.pass ? "true" : "false"});
    }
    return t;
}

LanczosOptions lanczos(const RunConfig& c) {
    LanczosOptions o;
    o.seed = c.seed;
    return o;
}

// Counts with the dense solver when allowed, otherwise matrix-free.
BoundStateCount count_model(const std::shared_ptr<const ModelDiscretization>& parts, double lambda,
                            const RunConfig& c) {
    const ModelOperator h(parts, OperatorRole::H);
    if (parts->grid.size() <= c.dense_cap) {
        return count_below(h.to_dense(c.dense_cap), lambda, c.tol);
    }
    if (parts->grid.size() > c.iterative_cap) {
        throw DenseCapExceeded(parts->grid.size(), c.iterative_cap);
    }
    return count_below(h, lambda, c.tol, lanczos(c));
}

std::vector<IndexedFunction> family_for(const RunConfig& c, const Interval& axis) {
    FamilyConfig f;
    if (c.family) {
        f = *c.family;
    } else {
        f.basis = "phi";
        f.from = 2;
        f.to = std::max(c.model.params.M, c.model.params.N);
    }
    return build_family(f, axis);
}

// --- experiments ----------------------------------------------------------

void spectrum(const RunConfig& c, RunOutcome& out) {
    const SymmetricOperator h = assemble_H(c.model.spec, c.dense_cap);
    const EssentialEdgeReport edge = essential_edge(*h.components());
    const Eigen::VectorXd values = eigenvalues_symmetric(h);
    const BoundStateCount count = count_below_values(values, edge.lambda, c.tol);
    const int terms = std::min<int>(static_cast<int>(values.size()), std::max<int>(c.minimax_terms, static_cast<int>(count.count) + 1));
    const MinimaxResult mm = minimax_from_eigenvalues(values, terms, edge.lambda, c.tol);

    ordered_json r;
    r["dimension"] = values.size();
    r["grid"] = {h.components()->grid.nx(), h.components()->grid.ny()};
    r["edge"] = edge_json(edge);
    r["bound_states"] = count_json(count);
    ordered_json m;
    m["tol"] = mm.tol;
    m["n_below_edge"] = mm.n_below_edge;
    m["mu"] = mm.mu;
    out.report["result"] = r;
    out.report["result"]["minimax"] = m;
    out.report["verdict"] = std::to_string(count.count) + " eigenvalue(s) below the essential edge";

    out.table.header = {"k", "eigenvalue", "minimax_mu", "tag", "below_edge"};
    PlotData plot;
    plot.title = "Lowest eigenvalues of H";
    plot.x_label = "index k";
    plot.y_label = "eigenvalue";
    plot.hline = edge.lambda;
    plot.hline_label = "essential edge " + num(edge.lambda);
    for (int k = 0; k < terms; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const bool below = mm.tags[i] == MinimaxTag::Eigenvalue;
        out.table.rows.push_back({num(k + 1), num(values(k)), num(mm.mu[i]), below ? "eigenvalue" : "edge",
                                  below ? "true" : "false"});
        plot.points.emplace_back(k + 1.0, values(k));
    }
    out.plot = plot;
}

void essential(const RunConfig& c, RunOutcome& out) {
    const EssentialEdgeReport e = essential_edge(c.model.spec);
    ordered_json r;
    r["edge"] = edge_json(e);
    r["w1_fiber_minima"] = e.w1_fiber_minima;
    r["w2_fiber_minima"] = e.w2_fiber_minima;
    out.report["result"] = r;
    out.report["verdict"] = "edge attained by " + to_string(e.attained_by);

    out.table.header = {"component", "node_index", "coordinate", "fiber_minimum"};
    for (std::size_t j = 0; j < e.w1_fiber_minima.size(); ++j) {
        out.table.rows.push_back({"W1", num(j), num(e.y_nodes[j]), num(e.w1_fiber_minima[j])});
    }
    for (std::size_t i = 0; i < e.w2_fiber_minima.size(); ++i) {
        out.table.rows.push_back({"W2", num(i), num(e.x_nodes[i]), num(e.w2_fiber_minima[i])});
    }
}

void condition(const RunConfig& c, RunOutcome& out, bool w1) {
    const Grid2D grid = model_grid(c.model.spec);
    const auto family = family_for(c, w1 ? grid.gy.domain() : grid.gx.domain());
    const ConditionReport r = w1 ? condition5_check(c.model.spec, family) : condition6_check(c.model.spec, family);
    out.report["result"] = condition_json(r);
    out.report["verdict"] = to_string(r.verdict);
    out.table = condition_table(r);
    if (r.verdict == ConditionVerdict::NotEstablished) out.exit_code = kExitFailedCheck;
}

void thm41(const RunConfig& c, RunOutcome& out) {
    const FinitenessReport f = finiteness_test(c.model.spec);
    ordered_json r;
    r["lambda"] = f.lambda;
    r["eta0"] = f.eta0;
    r["min_premise_margin"] = f.min_premise_margin;
    r["premise_holds"] = f.premise_holds;
    r["sigma_d_t_finite"] = f.sigma_d_t_finite;
    r["sigma_d_t_size"] = f.sigma_d_t_size;
    r["sigma_d0_size"] = f.sigma_d0_size;
    r["zero_set_at_nodes"] = f.zero_set_at_nodes;
    r["verdict"] = to_string(f.verdict);
    out.report["result"] = r;
    out.report["verdict"] = to_string(f.verdict);
    out.table.header = {"quantity", "value"};
    out.table.rows = {{"lambda", num(f.lambda)},
                      {"eta0", num(f.eta0)},
                      {"min_premise_margin", num(f.min_premise_margin)},
                      {"premise_holds", f.premise_holds ? "true" : "false"},
                      {"sigma_d_t_finite", f.sigma_d_t_finite ? "true" : "false"},
                      {"sigma_d_t_size", num(f.sigma_d_t_size)},
                      {"sigma_d0_size", num(f.sigma_d0_size)},
                      {"verdict", to_string(f.verdict)}};
}

void accumulate(const RunConfig& c, RunOutcome& out) {
    const auto schedule = c.schedule.empty() ? default_schedule(c.model.params) : c.schedule;
    AccumulationOptions o;
    o.dense_cap = c.dense_cap;
    o.iterative_cap = c.iterative_cap;
    o.tol = c.tol;
    o.lanczos = lanczos(c);
    o.min_gap_ratio = c.min_gap_ratio;
    const AccumulationTable t = accumulation_study(hubbard::schedule_builder(c.model.params), schedule, o);

    ordered_json rows = ordered_json::array();
    out.table.header = {"label", "M", "N", "g", "nx", "ny", "lambda", "count", "gap", "path", "skipped", "lowest", "notice"};
    PlotData plot;
    plot.title = "Eigenvalues below the edge along the schedule";
    plot.x_label = "schedule row";
    plot.y_label = "eigenvalue";
    bool have_edge = false;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        ordered_json j;
        j["label"] = row.label;
        j["M"] = row.M;
        j["N"] = row.N;
        j["g"] = row.order;
        j["grid"] = {row.nx, row.ny};
        j["lambda"] = row.lambda;
        j["skipped"] = row.skipped;
        if (!row.skipped) {
            j["path"] = to_string(row.path);
            j["count"] = row.count;
            j["gap"] = row.gap ? ordered_json(*row.gap) : ordered_json(nullptr);
            j["below"] = row.below;
            j["lowest"] = row.lowest;
        }
        if (!row.notice.empty()) j["notice"] = row.notice;
        rows.push_back(j);

        out.table.rows.push_back({row.label, num(row.M), num(row.N), num(row.order), num(row.nx), num(row.ny),
                                  num(row.lambda), row.skipped ? "" : num(row.count),
                                  row.gap ? num(*row.gap) : "", row.skipped ? "" : to_string(row.path),
                                  row.skipped ? "true" : "false", joined(row.lowest), row.notice});
        plot.x_ticks.push_back(row.label);
        if (row.skipped) continue;
        if (!have_edge) {
            plot.hline = row.lambda;
            have_edge = true;
        }
        for (double v : row.lowest) plot.points.emplace_back(static_cast<double>(i), v);
    }
    plot.hline_label = "essential edge " + num(plot.hline);
    out.report["result"] = {{"rows", rows}, {"verdict", to_string(t.verdict)}};
    out.report["verdict"] = to_string(t.verdict);
    if (!plot.points.empty()) out.plot = plot;
    if (t.verdict == AccumulationVerdict::Inconsistent) out.exit_code = kExitFailedCheck;
}

void example5(const RunConfig& c, RunOutcome& out) {
    const hubbard::Example5Params& p = c.model.params;
    auto parts = std::make_shared<const ModelDiscretization>(discretize_model(c.model.spec));
    const EssentialEdgeReport edge = essential_edge(*parts);

    // Eigenpairs of gamma T1 + T2 on 1 (x) phi_n.
    const ModelOperator t(parts, OperatorRole::T);
    ordered_json eig = ordered_json::array();
    std::vector<double> omega, residual;
    for (int n = 1; n <= p.N; ++n) {
        const Eigen::VectorXd f = sample_separable(parts->grid, [](double) { return 1.0; }, [n](double y) { return hubbard::phi(n, y); });
        const double w = hubbard::analytic_T_eigenvalue(n, p.gamma);
        const double res = (t * f - w * f).norm() / f.norm();
        omega.push_back(w);
        residual.push_back(res);
        eig.push_back({{"n", n}, {"omega", w}, {"residual", res}});
    }

    const auto family = hubbard::phi_family(1, std::max(p.M, p.N));
    const ConditionReport cond = condition5_check(c.model.spec, family);

    ordered_json r;
    r["grid"] = {parts->grid.nx(), parts->grid.ny()};
    r["edge"] = edge_json(edge);
    r["t_eigenpairs"] = eig;
    r["condition"] = condition_json(cond);
    if (parts->grid.size() <= c.iterative_cap) {
        r["bound_states"] = count_json(count_model(parts, edge.lambda, c));
    } else {
        r["bound_states"] = {{"skipped", true},
                             {"notice", "dimension " + std::to_string(parts->grid.size()) + " exceeds the iterative cap"}};
    }
    out.report["result"] = r;
    out.report["verdict"] = to_string(cond.verdict);
    if (cond.verdict == ConditionVerdict::NotEstablished) out.exit_code = kExitFailedCheck;

    out.table.header = {"n", "omega_n", "t_residual", "lhs", "rhs", "margin", "pass"};
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& row = cond.rows[i];
        const bool has_eig = i < omega.size();
        out.table.rows.push_back({num(row.kappa), has_eig ? num(omega[i]) : "", has_eig ? num(residual[i]) : "",
                                  num(row.lhs), num(row.rhs), num(row.margin), row.pass ? "true" : "false"});
    }
}

ordered_json config_json(const RunConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["dense_cap"] = c.dense_cap;
    j["iterative_cap"] = c.iterative_cap;
    j["bound_state_tol"] = c.tol ? ordered_json(*c.tol) : ordered_json("default");
    j["min_gap_ratio"] = c.min_gap_ratio;
    if (c.family) j["family"] = {{"basis", c.family->basis}, {"from", c.family->from}, {"to", c.family->to}};
    if (!c.schedule.empty()) {
        ordered_json s = ordered_json::array();
        for (const auto& e : c.schedule) s.push_back({{"M", e.M}, {"N", e.N}, {"g", e.order}, {"label", e.label}});
        j["schedule"] = s;
    }
    return j;
}

}  // namespace

RunOutcome evaluate(const RunConfig& config) {
    RunOutcome out;
    out.report["tool"] = "efimov";
    out.report["experiment"] = to_string(config.experiment);
    out.report["config"] = config_json(config);
    out.report["model"] = config.model.echo;
    const bool example = config.model.example;
    switch (config.experiment) {
        case Experiment::Spectrum: spectrum(config, out); break;
        case Experiment::Essential: essential(config, out); break;
        case Experiment::Condition5: condition(config, out, true); break;
        case Experiment::Condition6: condition(config, out, false); break;
        case Experiment::Thm41: thm41(config, out); break;
        case Experiment::Accumulate: accumulate(config, out); break;
        case Experiment::Example5:
            if (!example) throw ConfigError("model.type", "the example5 experiment needs the example model");
            example5(config, out);
            break;
    }
    out.report["exit_code"] = out.exit_code;
    return out;
}

int run(const RunConfig& config, std::ostream& err) {
    try {
        const RunOutcome out = evaluate(config);
        std::filesystem::create_directories(config.out_dir);
        write_text(config.out_dir / "report.json", out.report.dump(2) + "\n");
        emit_csv(out.table, config.out_dir / "table.csv");
        if (out.plot) emit_svg(*out.plot, config.out_dir / "plot.svg");
        return out.exit_code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace efimov::cli
