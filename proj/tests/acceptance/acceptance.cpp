// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "efimov/bound_states.hpp"
#include "efimov/cli/run.hpp"
#include "efimov/hubbard_example.hpp"
#include "efimov/operators.hpp"
#include "efimov/quadrature.hpp"
#include "efimov/spectra.hpp"
#include "oracles/random_matrices.hpp"
#include "oracles/sturm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace efimov;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

hubbard::Example5Params example(int M, int N, double gamma = 2.0 / 3.0, int order = 8) {
    hubbard::Example5Params p;
    p.M = M;
    p.N = N;
    p.gamma = gamma;
    p.order = order;
    return p;
}

SymmetricOperator generic(const Eigen::MatrixXd& m) { return SymmetricOperator(m, OperatorRole::Generic); }

Outcome edge() {
    double worst = 0.0;
    for (double gamma : {2.0 / 3.0, 1.0}) {
        const EssentialEdgeReport r = essential_edge(hubbard::example_model(example(4, 4, gamma)));
        worst = std::max(worst, std::abs(r.lambda + gamma));
    }
    return {worst <= 1e-9, "max |Lambda + gamma| = " + fmt("%.3e", worst)};
}

Outcome t_eigenpairs() {
    const double gamma = 2.0 / 3.0;
    const ModelSpec spec = hubbard::example_model(example(4, 4, gamma));
    auto parts = std::make_shared<const ModelDiscretization>(discretize_model(spec));
    const ModelOperator t(parts, OperatorRole::T);
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const Eigen::VectorXd f =
            sample_separable(parts->grid, [](double) { return 1.0; }, [n](double y) { return hubbard::phi(n, y); });
        const double b = std::pow(2.0 / 3.0, n);
        worst = std::max(worst, (t * f - (gamma + b) * f).norm());
    }
    return {worst <= 1e-8, "max residual = " + fmt("%.3e", worst)};
}

Outcome condition5() {
    const ModelSpec spec = hubbard::example_model(example(6, 6));
    const ConditionReport r = condition5_check(spec, hubbard::phi_family(2, 6));
    bool ok = r.rows.size() == 5;
    double slack = 1e300;
    for (const auto& row : r.rows) {
        const double bound = std::pow(2.0 / 3.0, row.kappa) - std::pow(std::sqrt(2.0) / 3.0, row.kappa);
        ok = ok && row.pass && row.margin >= bound - 1e-8;
        slack = std::min(slack, row.margin - bound);
    }
    return {ok, "rows " + std::to_string(r.rows.size()) + ", min(margin - bound) = " + fmt("%.3e", slack)};
}

std::vector<ScheduleEntry> schedule_2_to_5() { return {{2, 2, 8, ""}, {3, 3, 8, ""}, {4, 4, 8, ""}, {5, 5, 8, ""}}; }

Outcome accumulation() {
    const AccumulationTable t = accumulation_study(hubbard::schedule_builder(example(4, 4)), schedule_2_to_5());
    bool ok = t.rows.size() == 4;
    std::string counts, gaps;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        ok = ok && !row.skipped && row.gap.has_value();
        if (i > 0 && ok) {
            ok = row.count >= t.rows[i - 1].count && *t.rows[i - 1].gap >= 1.2 * *row.gap;
        }
        counts += (i ? "," : "") + std::to_string(row.count);
        gaps += (i ? "," : "") + (row.gap ? fmt("%.3e", *row.gap) : std::string("-"));
    }
    ok = ok && t.verdict == AccumulationVerdict::Consistent;
    return {ok, "counts " + counts + ", gaps " + gaps + ", " + to_string(t.verdict)};
}

Outcome finite_rank() {
    bool ok = true;
    std::string counts;
    std::optional<std::size_t> first;
    for (int order : {6, 8, 12}) {
        auto params = example(2, 1, 2.0 / 3.0, order);
        params.finite_rank_kernel = true;
        const ModelSpec spec = hubbard::example_model(params);
        const FinitenessReport f = finiteness_test(spec);
        ok = ok && f.verdict == FinitenessVerdict::FiniteSpectrumPredicted;
        const std::size_t c = count_below(assemble_H(spec), f.lambda).count;
        if (!first) first = c;
        ok = ok && c == *first;
        counts += (counts.empty() ? "" : ",") + std::to_string(c);
    }
    return {ok, "counts at g=6,8,12: " + counts};
}

// Enumeration of sigma_e and sigma_d for integer spectra.
struct Enumerated {
    std::set<long long> essential;
    std::set<long long> discrete;
};

Enumerated enumerate(const std::vector<long long>& a, const std::vector<long long>& b) {
    Enumerated s;
    s.essential.insert(0);
    s.essential.insert(a.begin(), a.end());
    s.essential.insert(b.begin(), b.end());
    for (long long x : a)
        for (long long y : b)
            if (!s.essential.count(x + y)) s.discrete.insert(x + y);
    return s;
}

Outcome tensor() {
    std::mt19937_64 rng(31);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd a = oracle::random_symmetric(6, rng);
        const Eigen::MatrixXd b = oracle::random_symmetric(8, rng);
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(48, 48);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 8; ++j)
                for (int r = 0; r < 6; ++r)
                    for (int s = 0; s < 8; ++s)
                        k(i * 8 + j, r * 8 + s) = (j == s ? a(i, r) : 0.0) + (i == r ? b(j, s) : 0.0);
        std::vector<double> sums;
        for (double x : oracle::eigenvalues(a))
            for (double y : oracle::eigenvalues(b)) sums.push_back(x + y);
        std::sort(sums.begin(), sums.end());
        const Eigen::VectorXd got = eigenvalues_symmetric(generic(k));
        for (std::size_t i = 0; i < sums.size(); ++i)
            worst = std::max(worst, std::abs(got(static_cast<Eigen::Index>(i)) - sums[i]));
    }

    std::uniform_int_distribution<int> size(0, 7);
    std::uniform_int_distribution<int> value(-6, 10);
    int bad_sets = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::set<long long> sa, sb;
        for (int i = size(rng); i > 0; --i)
            if (long long v = value(rng)) sa.insert(v);
        for (int i = size(rng); i > 0; --i)
            if (long long v = value(rng)) sb.insert(v);
        const std::vector<long long> a(sa.begin(), sa.end()), b(sb.begin(), sb.end());
        const Enumerated e = enumerate(a, b);
        const std::size_t na = a.size(), nb = b.size(), ne = e.essential.size(), nd = e.discrete.size();
        const bool truth = na + 1 <= ne && nb + 1 <= ne && ne <= na + nb + 1 && nd <= na * nb;

        const std::vector<double> da(a.begin(), a.end()), db(b.begin(), b.end());
        const SpectralSet s1(da), s2(db);
        const CardinalityReport r = cardinality_checks(s1, s2);
        const bool agree = r.sd_k1 == na && r.sd_k2 == nb && r.sigma_e_t == ne && r.sigma_d_t == nd;
        if (!truth || !agree || !r.all_hold()) ++bad_sets;
    }
    return {worst <= 1e-9 && bad_sets == 0,
            "max Kronecker error " + fmt("%.3e", worst) + ", cardinality failures " + std::to_string(bad_sets) + "/1000"};
}

Outcome minimax() {
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> dim(2, 60);
    double worst = 0.0;
    int plateau_failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dim(rng);
        const Eigen::MatrixXd a = oracle::random_symmetric(n, rng);
        const auto ref = oracle::eigenvalues(a);
        const int k = std::uniform_int_distribution<int>(1, n - 1)(rng);
        const double e_min = 0.5 * (ref[static_cast<std::size_t>(k - 1)] + ref[static_cast<std::size_t>(k)]);
        const MinimaxResult r = minimax_sequence(generic(a), n, e_min);
        if (r.n_below_edge != k) ++plateau_failures;
        for (int i = 0; i < n; ++i) {
            const auto s = static_cast<std::size_t>(i);
            if (i < k) {
                worst = std::max(worst, std::abs(r.mu[s] - ref[s]));
                if (r.tags[s] != MinimaxTag::Eigenvalue) ++plateau_failures;
            } else if (r.mu[s] != e_min || r.tags[s] != MinimaxTag::EdgeSaturated) {
                ++plateau_failures;
            }
        }
    }

    int order_failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dim(rng);
        const Eigen::MatrixXd a = oracle::random_symmetric(n, rng);
        const int rank = std::uniform_int_distribution<int>(1, n)(rng);
        const Eigen::MatrixXd b = a + oracle::random_psd(n, rank, rng);
        const double e_min = std::normal_distribution<double>(0.0, 1.0)(rng);
        const OrderReport r = check_order_monotonicity(generic(a), generic(b), e_min, n);
        const auto ea = oracle::eigenvalues(a);
        const auto eb = oracle::eigenvalues(b);
        bool ok = r.holds;
        for (std::size_t i = 0; i < ea.size(); ++i) {
            ok = ok && std::min(ea[i], e_min) <= std::min(eb[i], e_min) + 1e-9;
            ok = ok && r.mu_a.mu[i] <= r.mu_b.mu[i];
        }
        if (!ok) ++order_failures;
    }
    return {worst <= 1e-9 && plateau_failures == 0 && order_failures == 0,
            "max eigenvalue error " + fmt("%.3e", worst) + ", plateau failures " + std::to_string(plateau_failures) +
                ", order failures " + std::to_string(order_failures) + "/200"};
}

Outcome quadrature() {
    double worst = 0.0;
    const std::vector<double> bp{0.1, 0.35, 0.5, 0.9};
    for (int order = 1; order <= 12; ++order) {
        const Grid1D g = build_grid({-0.5, 1.5}, bp, order);
        for (int degree = 0; degree <= 2 * order - 1; ++degree) {
            for (std::size_t s = 0; s < g.segment_count(); ++s) {
                const double a = g.breakpoints()[s];
                const double b = g.breakpoints()[s + 1];
                const auto f = [&](double x) { return (x >= a && x <= b) ? std::pow(x, degree) : 0.0; };
                const double exact = (std::pow(b, degree + 1) - std::pow(a, degree + 1)) / (degree + 1);
                const double scale = std::max(std::abs(exact), (b - a) * std::max(std::pow(std::abs(a), degree),
                                                                                  std::pow(std::abs(b), degree)));
                worst = std::max(worst, std::abs(integrate(f, g) - exact) / scale);
            }
        }
    }
    const Grid1D y = build_grid({0.0, 1.0}, hubbard::grid_breakpoints(6, 6), 8);
    double norm_err = 0.0;
    for (int n = 1; n <= 6; ++n) {
        const auto sq = [n](double t) { return hubbard::phi(n, t) * hubbard::phi(n, t); };
        norm_err = std::max(norm_err, std::abs(integrate(sq, y) - 1.0));
    }
    return {worst <= 1e-12 && norm_err <= 1e-10,
            "max relative error " + fmt("%.3e", worst) + ", max |int phi_n^2 - 1| " + fmt("%.3e", norm_err)};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

Outcome determinism() {
    cli::RunConfig c;
    c.experiment = cli::Experiment::Accumulate;
    c.model = cli::example_model_config(example(4, 4));
    c.schedule = schedule_2_to_5();
    const fs::path root = fs::temp_directory_path() / "efimov_acceptance";
    fs::remove_all(root);
    std::ostringstream err;
    int codes[2];
    for (int i = 0; i < 2; ++i) {
        c.out_dir = root / (i == 0 ? "a" : "b");
        codes[i] = cli::run(c, err);
    }
    const bool same_json = slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json");
    const bool same_csv = slurp(root / "a" / "table.csv") == slurp(root / "b" / "table.csv");
    const bool nonempty = !slurp(root / "a" / "table.csv").empty();
    return {codes[0] == cli::kExitOk && codes[1] == cli::kExitOk && same_json && same_csv && nonempty,
            "exit " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", report.json " +
                (same_json ? "identical" : "differs") + ", table.csv " + (same_csv ? "identical" : "differs")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"example edge at -gamma", edge},
        {"eigenpairs of T on 1 (x) phi_n", t_eigenpairs},
        {"W1-edge sufficiency rows kappa = 2..6", condition5},
        {"accumulation along N = 2..5", accumulation},
        {"finite-rank truncation stays finite", finite_rank},
        {"Kronecker sums and cardinality relations", tensor},
        {"minimax values, plateau and order", minimax},
        {"quadrature exactness and phi_n norms", quadrature},
        {"byte-identical reruns", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("criterion %zu: %s  %s  [%s; %.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
