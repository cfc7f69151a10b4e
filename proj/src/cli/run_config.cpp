#include "efimov/cli/run_config.hpp"
#include "efimov/cli/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace efimov::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* const kExperimentNames[] = {"spectrum", "essential", "condition5", "condition6",
                                        "thm41",    "accumulate", "example5"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_decimal(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return v;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) {
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double real_at(const json& v, const std::string& path) {
    if (v.is_number()) {
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
        return d;
    }
    if (v.is_string()) {
        try {
            return parse_real(v.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path, e.what());
        }
    }
    throw ConfigError(path, "expected a number or a rational literal such as \"2/3\"");
}

long long integer_at(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 1e15) return static_cast<long long>(d);
    }
    throw ConfigError(path, "expected an integer");
}

int int_at(const json& v, const std::string& path) {
    const long long x = integer_at(v, path);
    if (x < -1000000 || x > 1000000) throw ConfigError(path, "out of range");
    return static_cast<int>(x);
}

std::size_t size_at(const json& v, const std::string& path) {
    const long long x = integer_at(v, path);
    if (x < 1) throw ConfigError(path, "must be positive");
    return static_cast<std::size_t>(x);
}

bool bool_at(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    return v.get<bool>();
}

std::string string_at(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

// --- basis registry -------------------------------------------------------

std::function<double(double)> basis_function(const std::string& name, int index, const Interval& axis,
                                             const std::string& path) {
    const double a = axis.lo;
    const double len = axis.length();
    if (name == "constant") {
        if (index != 0) throw ConfigError(join(path, "index"), "the constant basis has only index 0");
        const double c = 1.0 / std::sqrt(len);
        return [c](double) { return c; };
    }
    if (name == "legendre") {
        if (index < 0 || index > 60) throw ConfigError(join(path, "index"), "legendre index must lie in [0, 60]");
        const double c = std::sqrt((2.0 * index + 1.0) / len);
        const auto n = static_cast<unsigned>(index);
        return [c, n, a, len](double x) {
            const double t = std::clamp(2.0 * (x - a) / len - 1.0, -1.0, 1.0);
            return c * std::legendre(n, t);
        };
    }
    if (name == "sine") {
        if (index < 1) throw ConfigError(join(path, "index"), "sine index must be >= 1");
        const double c = std::sqrt(2.0 / len);
        return [c, index, a, len](double x) { return c * std::sin(index * std::numbers::pi * (x - a) / len); };
    }
    if (name == "phi") {
        if (index < 1 || index > 60) throw ConfigError(join(path, "index"), "phi index must lie in [1, 60]");
        if (axis.lo != 0.0 || axis.hi != 1.0) throw ConfigError(join(path, "basis"), "phi requires the axis [0, 1]");
        return [index](double x) { return hubbard::phi(index, x); };
    }
    throw ConfigError(join(path, "basis"), "unknown basis '" + name + "' (constant, legendre, sine, phi)");
}

// --- model parsing --------------------------------------------------------

AxisSpec parse_axis(const json& j, const std::string& path, ordered_json& echo) {
    check_keys(j, path, {"domain", "breakpoints", "g"});
    AxisSpec axis;
    if (j.contains("domain")) {
        const json& d = j["domain"];
        if (!d.is_array() || d.size() != 2) throw ConfigError(join(path, "domain"), "expected [lo, hi]");
        axis.domain = {real_at(d[0], join(path, "domain[0]")), real_at(d[1], join(path, "domain[1]"))};
        if (!(axis.domain.hi > axis.domain.lo)) throw ConfigError(join(path, "domain"), "need lo < hi");
    }
    if (j.contains("breakpoints")) {
        const json& b = j["breakpoints"];
        if (!b.is_array()) throw ConfigError(join(path, "breakpoints"), "expected an array");
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::string p = join(path, "breakpoints[" + std::to_string(i) + "]");
            const double v = real_at(b[i], p);
            if (v < axis.domain.lo || v > axis.domain.hi) throw ConfigError(p, "outside the domain");
            axis.breakpoints.push_back(v);
        }
    }
    if (j.contains("g")) {
        axis.order = int_at(j["g"], join(path, "g"));
        if (axis.order < 1) throw ConfigError(join(path, "g"), "must be >= 1");
    }
    echo = ordered_json::object();
    echo["domain"] = {axis.domain.lo, axis.domain.hi};
    echo["breakpoints"] = axis.breakpoints;
    echo["g"] = axis.order;
    return axis;
}

KernelSpec parse_axis_kernel(const json& j, KernelKind kind, const Interval& axis, const std::string& path,
                             ordered_json& echo) {
    if (j.is_string()) {
        json wrapped = {{"builtin", j.get<std::string>()}};
        return parse_axis_kernel(wrapped, kind, axis, path, echo);
    }
    check_keys(j, path, {"builtin", "value", "N", "rank_sum"});
    echo = ordered_json::object();
    if (j.contains("rank_sum")) {
        if (j.contains("builtin")) throw ConfigError(path, "give either builtin or rank_sum");
        const json& terms = j["rank_sum"];
        if (!terms.is_array() || terms.empty()) throw ConfigError(join(path, "rank_sum"), "expected a nonempty array");
        std::vector<RankTerm> out;
        ordered_json list = ordered_json::array();
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string p = join(path, "rank_sum[" + std::to_string(i) + "]");
            check_keys(terms[i], p, {"coefficient", "basis", "index"});
            if (!terms[i].contains("coefficient")) throw ConfigError(join(p, "coefficient"), "missing");
            if (!terms[i].contains("basis")) throw ConfigError(join(p, "basis"), "missing");
            const double c = real_at(terms[i]["coefficient"], join(p, "coefficient"));
            const std::string basis = string_at(terms[i]["basis"], join(p, "basis"));
            const int index = terms[i].contains("index") ? int_at(terms[i]["index"], join(p, "index")) : 0;
            out.push_back({c, basis_function(basis, index, axis, p)});
            list.push_back({{"coefficient", c}, {"basis", basis}, {"index", index}});
        }
        echo["rank_sum"] = list;
        return KernelSpec::rank_sum(kind, std::move(out));
    }
    if (!j.contains("builtin")) throw ConfigError(join(path, "builtin"), "missing (or give rank_sum)");
    const std::string name = string_at(j["builtin"], join(path, "builtin"));
    echo["builtin"] = name;
    if (name == "zero") return KernelSpec::zero(kind);
    if (name == "one") return KernelSpec::constant(kind, 1.0, axis);
    if (name == "constant") {
        if (!j.contains("value")) throw ConfigError(join(path, "value"), "missing");
        const double v = real_at(j["value"], join(path, "value"));
        echo["value"] = v;
        return KernelSpec::constant(kind, v, axis);
    }
    if (name == "example5_series") {
        if (!j.contains("N")) throw ConfigError(join(path, "N"), "missing");
        const int N = int_at(j["N"], join(path, "N"));
        if (N < 1 || N > hubbard::kMaxTruncation) throw ConfigError(join(path, "N"), "must lie in [1, 40]");
        if (axis.lo != 0.0 || axis.hi != 1.0) throw ConfigError(join(path, "builtin"), "example5_series requires [0, 1]");
        echo["N"] = N;
        hubbard::Example5Params p;
        p.N = N;
        p.M = std::max(2, N);
        KernelSpec k = hubbard::example_model(p).k2;
        k.kind = kind;
        return k;
    }
    throw ConfigError(join(path, "builtin"), "unknown kernel '" + name + "' (zero, one, constant, example5_series)");
}

KernelSpec parse_potential(const json& j, const std::string& path, ordered_json& echo) {
    if (j.is_string()) {
        json wrapped = {{"builtin", j.get<std::string>()}};
        return parse_potential(wrapped, path, echo);
    }
    check_keys(j, path, {"builtin", "value", "M", "center", "scale"});
    if (!j.contains("builtin")) throw ConfigError(join(path, "builtin"), "missing");
    const std::string name = string_at(j["builtin"], join(path, "builtin"));
    echo = ordered_json::object();
    echo["builtin"] = name;
    if (name == "zero") return KernelSpec::zero(KernelKind::Potential);
    if (name == "constant") {
        if (!j.contains("value")) throw ConfigError(join(path, "value"), "missing");
        const double v = real_at(j["value"], join(path, "value"));
        echo["value"] = v;
        return KernelSpec::constant(KernelKind::Potential, v);
    }
    if (name == "u_product") {
        hubbard::Example5Params p;
        if (j.contains("M")) p.M = int_at(j["M"], join(path, "M"));
        if (p.M < 2 || p.M > hubbard::kMaxTruncation) throw ConfigError(join(path, "M"), "must lie in [2, 40]");
        echo["M"] = p.M;
        return KernelSpec::potential([p](double x, double y) {
            const auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
            return hubbard::potential_u(clamp01(x), p) * hubbard::potential_u(clamp01(y), p);
        }, "u(x)u(y)");
    }
    if (name == "quadratic_well") {
        double cx = 0.5, cy = 0.5, scale = 1.0;
        if (j.contains("center")) {
            const json& c = j["center"];
            if (!c.is_array() || c.size() != 2) throw ConfigError(join(path, "center"), "expected [x, y]");
            cx = real_at(c[0], join(path, "center[0]"));
            cy = real_at(c[1], join(path, "center[1]"));
        }
        if (j.contains("scale")) scale = real_at(j["scale"], join(path, "scale"));
        if (scale < 0.0) throw ConfigError(join(path, "scale"), "must be >= 0");
        echo["center"] = {cx, cy};
        echo["scale"] = scale;
        return KernelSpec::potential(
            [cx, cy, scale](double x, double y) { return scale * ((x - cx) * (x - cx) + (y - cy) * (y - cy)); },
            "quadratic_well");
    }
    throw ConfigError(join(path, "builtin"), "unknown potential '" + name + "' (zero, constant, u_product, quadratic_well)");
}

ModelConfig parse_example(const json& j, const std::string& path) {
    check_keys(j, path, {"type", "M", "N", "gamma", "g", "delta", "finite_rank_kernel"});
    hubbard::Example5Params p;
    if (j.contains("M")) p.M = int_at(j["M"], join(path, "M"));
    if (j.contains("N")) p.N = int_at(j["N"], join(path, "N"));
    if (j.contains("gamma")) p.gamma = real_at(j["gamma"], join(path, "gamma"));
    if (j.contains("g")) p.order = int_at(j["g"], join(path, "g"));
    if (j.contains("finite_rank_kernel")) p.finite_rank_kernel = bool_at(j["finite_rank_kernel"], join(path, "finite_rank_kernel"));
    std::vector<double> deltas;
    if (j.contains("delta")) {
        const json& d = j["delta"];
        if (!d.is_array()) throw ConfigError(join(path, "delta"), "expected [delta_2, delta_3, ...]");
        for (std::size_t i = 0; i < d.size(); ++i) deltas.push_back(real_at(d[i], join(path, "delta[" + std::to_string(i) + "]")));
    }
    return example_model_config(p, std::move(deltas));
}

// Rank hints stand in for the kernel spectrum, so their factors must be orthonormal on the grid.
void check_rank_factors(const KernelSpec& k, const AxisSpec& axis, const std::string& path) {
    if (k.rank_terms.size() < 2) return;
    const Grid1D grid = build_grid(axis.domain, axis.breakpoints, axis.order);
    double worst = 0.0;
    for (std::size_t a = 0; a < k.rank_terms.size(); ++a) {
        for (std::size_t b = a; b < k.rank_terms.size(); ++b) {
            const double ip = integrate(
                [&](double t) { return k.rank_terms[a].factor(t) * k.rank_terms[b].factor(t); }, grid);
            worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
        }
    }
    if (worst > 1e-8) {
        throw ConfigError(join(path, "rank_sum"), "factors are not orthonormal on the grid (Gram deviation " +
                                                      format_number(worst) + "); refine g or use distinct indices of one basis");
    }
}

ModelConfig parse_inline(const json& j, const std::string& path) {
    check_keys(j, path, {"type", "gamma", "x_axis", "y_axis", "k0", "k1", "k2"});
    ModelConfig m;
    m.example = false;
    ordered_json echo = ordered_json::object();
    echo["type"] = "inline";
    ModelSpec& s = m.spec;
    if (j.contains("gamma")) s.gamma = real_at(j["gamma"], join(path, "gamma"));
    echo["gamma"] = s.gamma;
    ordered_json e;
    if (j.contains("x_axis")) s.x_axis = parse_axis(j["x_axis"], join(path, "x_axis"), e);
    else parse_axis(json::object(), join(path, "x_axis"), e);
    echo["x_axis"] = e;
    if (j.contains("y_axis")) s.y_axis = parse_axis(j["y_axis"], join(path, "y_axis"), e);
    else parse_axis(json::object(), join(path, "y_axis"), e);
    echo["y_axis"] = e;

    echo["k0"] = {{"builtin", "zero"}};
    echo["k1"] = {{"builtin", "zero"}};
    echo["k2"] = {{"builtin", "zero"}};
    if (j.contains("k0")) {
        s.k0 = parse_potential(j["k0"], join(path, "k0"), e);
        echo["k0"] = e;
    }
    if (j.contains("k1")) {
        s.k1 = parse_axis_kernel(j["k1"], KernelKind::OnOmega1, s.x_axis.domain, join(path, "k1"), e);
        echo["k1"] = e;
    }
    if (j.contains("k2")) {
        s.k2 = parse_axis_kernel(j["k2"], KernelKind::OnOmega2, s.y_axis.domain, join(path, "k2"), e);
        echo["k2"] = e;
    }
    check_rank_factors(s.k1, s.x_axis, join(path, "k1"));
    check_rank_factors(s.k2, s.y_axis, join(path, "k2"));
    m.echo = echo;
    return m;
}

FamilyConfig parse_family(const json& j, const std::string& path) {
    check_keys(j, path, {"basis", "from", "to"});
    FamilyConfig f;
    if (j.contains("basis")) f.basis = string_at(j["basis"], join(path, "basis"));
    if (j.contains("from")) f.from = int_at(j["from"], join(path, "from"));
    if (j.contains("to")) f.to = int_at(j["to"], join(path, "to"));
    if (f.to < f.from) throw ConfigError(join(path, "to"), "must be >= from");
    if (f.to - f.from > 200) throw ConfigError(join(path, "to"), "at most 201 family members");
    return f;
}

std::vector<ScheduleEntry> parse_schedule(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array");
    std::vector<ScheduleEntry> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        check_keys(j[i], p, {"M", "N", "g", "label"});
        ScheduleEntry e;
        if (!j[i].contains("N")) throw ConfigError(join(p, "N"), "missing");
        e.N = int_at(j[i]["N"], join(p, "N"));
        e.M = j[i].contains("M") ? int_at(j[i]["M"], join(p, "M")) : std::max(2, e.N);
        e.order = j[i].contains("g") ? int_at(j[i]["g"], join(p, "g")) : 8;
        if (j[i].contains("label")) e.label = string_at(j[i]["label"], join(p, "label"));
        if (i > 0) {
            const auto& prev = out.back();
            if (e.N < prev.N || (e.N == prev.N && e.order <= prev.order)) {
                throw ConfigError(p, "schedule must refine: N nondecreasing, g increasing at fixed N");
            }
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace

std::string to_string(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment parse_experiment(const std::string& name) {
    for (int i = 0; i < 7; ++i) {
        if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
    }
    throw ConfigError("experiment",
                      "unknown experiment '" + name + "' (spectrum, essential, condition5, condition6, thm41, accumulate, example5)");
}

double parse_real(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        return parse_decimal(text);
    }
    const double num = parse_decimal(text.substr(0, slash));
    const double den = parse_decimal(text.substr(slash + 1));
    if (den == 0.0) {
        throw std::invalid_argument("zero denominator in '" + text + "'");
    }
    return num / den;
}

ModelConfig example_model_config(const hubbard::Example5Params& params, std::vector<double> deltas) {
    ModelConfig m;
    m.example = true;
    m.params = params;
    m.deltas = std::move(deltas);
    if (!m.deltas.empty()) {
        if (m.deltas.size() + 1 < static_cast<std::size_t>(std::max(params.M, 2))) {
            throw ConfigError("model.delta", "need one value for each n = 2.." + std::to_string(params.M));
        }
        const auto d = m.deltas;
        // Rows of a schedule may reach past the listed values; they fall back to the default rule.
        m.params.delta = [d](int n) {
            const auto i = static_cast<std::size_t>(n - 2);
            return i < d.size() ? d[i] : hubbard::default_delta(n);
        };
    }
    try {
        m.spec = hubbard::example_model(m.params);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        std::string key = "model";
        if (what.find("gamma") != std::string::npos) key = "model.gamma";
        else if (what.find("delta") != std::string::npos) key = "model.delta";
        else if (what.rfind("N ", 0) == 0) key = "model.N";
        else if (what.rfind("M ", 0) == 0) key = "model.M";
        else if (what.find("order") != std::string::npos) key = "model.g";
        throw ConfigError(key, what);
    }
    ordered_json echo = ordered_json::object();
    echo["type"] = "example5";
    echo["M"] = params.M;
    echo["N"] = params.N;
    echo["gamma"] = params.gamma;
    echo["g"] = params.order;
    echo["finite_rank_kernel"] = params.finite_rank_kernel;
    if (m.deltas.empty()) echo["delta"] = "default";
    else echo["delta"] = m.deltas;
    m.echo = echo;
    return m;
}

std::vector<IndexedFunction> build_family(const FamilyConfig& family, const Interval& axis) {
    std::vector<IndexedFunction> out;
    for (int n = family.from; n <= family.to; ++n) {
        out.push_back({n, basis_function(family.basis, n, axis, "family")});
    }
    return out;
}

std::vector<ScheduleEntry> default_schedule(const hubbard::Example5Params& params) {
    std::vector<ScheduleEntry> s;
    for (int n = 2; n <= 5; ++n) s.push_back({n, n, params.order, ""});
    return s;
}

RunConfig parse_config(const json& doc) {
    check_keys(doc, "", {"experiment", "model", "family", "schedule", "out", "tolerances", "seed", "dense_cap",
                         "iterative_cap", "minimax_terms"});
    RunConfig c;
    if (!doc.contains("experiment")) throw ConfigError("experiment", "missing");
    c.experiment = parse_experiment(string_at(doc["experiment"], "experiment"));

    if (!doc.contains("model")) {
        c.model = example_model_config(hubbard::Example5Params{});
    } else {
        const json& m = doc["model"];
        if (m.is_string()) {
            if (m.get<std::string>() != "example5") throw ConfigError("model", "a string model must be \"example5\"");
            c.model = example_model_config(hubbard::Example5Params{});
        } else {
            if (!m.is_object()) throw ConfigError("model", "expected an object or \"example5\"");
            const std::string type = m.contains("type") ? string_at(m["type"], "model.type") : "example5";
            if (type == "example5") c.model = parse_example(m, "model");
            else if (type == "inline") c.model = parse_inline(m, "model");
            else throw ConfigError("model.type", "expected example5 or inline");
        }
    }

    if (doc.contains("family")) c.family = parse_family(doc["family"], "family");
    if (doc.contains("schedule")) c.schedule = parse_schedule(doc["schedule"], "schedule");
    if (doc.contains("out")) c.out_dir = string_at(doc["out"], "out");
    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        check_keys(t, "tolerances", {"bound_state", "min_gap_ratio"});
        if (t.contains("bound_state")) {
            const double v = real_at(t["bound_state"], "tolerances.bound_state");
            if (v < 0.0) throw ConfigError("tolerances.bound_state", "must be >= 0");
            c.tol = v;
        }
        if (t.contains("min_gap_ratio")) {
            c.min_gap_ratio = real_at(t["min_gap_ratio"], "tolerances.min_gap_ratio");
            if (c.min_gap_ratio < 1.0) throw ConfigError("tolerances.min_gap_ratio", "must be >= 1");
        }
    }
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            throw ConfigError("seed", "expected a nonnegative integer");
        }
        c.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("dense_cap")) c.dense_cap = size_at(doc["dense_cap"], "dense_cap");
    if (doc.contains("iterative_cap")) c.iterative_cap = size_at(doc["iterative_cap"], "iterative_cap");
    if (doc.contains("minimax_terms")) c.minimax_terms = static_cast<int>(size_at(doc["minimax_terms"], "minimax_terms"));

    const bool needs_family = c.experiment == Experiment::Condition5 || c.experiment == Experiment::Condition6;
    if (needs_family && !c.family && !c.model.example) {
        throw ConfigError("family", "required for condition experiments on inline models");
    }
    if (c.experiment == Experiment::Accumulate && !c.model.example) {
        throw ConfigError("model.type", "accumulate builds its rows from the example model; use type example5");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("config", "cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace efimov::cli
