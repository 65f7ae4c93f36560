#include "frachardy/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "toml.hpp"

#include "frachardy/error.hpp"

namespace frachardy::config {

namespace {

// TOML -> JSON, remembering the source line of every key path.
json to_json(const toml::node& node, const std::string& path, std::map<std::string, int>& lines) {
    lines[path] = static_cast<int>(node.source().begin.line);
    if (auto t = node.as_table()) {
        json out = json::object();
        for (auto&& [k, v] : *t) {
            const std::string key(k.str());
            out[key] = to_json(v, path.empty() ? key : path + "." + key, lines);
        }
        return out;
    }
    if (auto a = node.as_array()) {
        json out = json::array();
        for (std::size_t i = 0; i < a->size(); ++i) {
            out.push_back(to_json(*a->get(i), fmt::format("{}[{}]", path, i), lines));
        }
        return out;
    }
    if (auto v = node.as_integer()) return v->get();
    if (auto v = node.as_floating_point()) return v->get();
    if (auto v = node.as_boolean()) return v->get();
    if (auto v = node.as_string()) return v->get();
    throw ParseError(path, "unsupported value type (dates and times are not used)");
}

// Typed access to one JSON object that rejects keys nobody asked for.
class Table {
public:
    Table(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ParseError(path_, "expected a table");
    }

    std::string key_path(const std::string& key) const {
        if (key.empty()) return path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        if (!has(key)) return required(key, def);
        const json& v = raw(key);
        if (v.is_string() && (v == "inf" || v == "+inf")) return INFINITY;
        if (!v.is_number()) throw ParseError(key_path(key), "expected a number");
        return v.get<double>();
    }

    long long integer(const std::string& key, std::optional<long long> def = std::nullopt) {
        if (!has(key)) return required(key, def);
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ParseError(key_path(key), "expected an integer");
        return v.get<long long>();
    }

    bool boolean(const std::string& key, std::optional<bool> def = std::nullopt) {
        if (!has(key)) return required(key, def);
        const json& v = raw(key);
        if (!v.is_boolean()) throw ParseError(key_path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> def,
                       const std::vector<std::string>& allowed = {}) {
        std::string s;
        if (!has(key)) {
            s = required(key, def);
        } else {
            const json& v = raw(key);
            if (!v.is_string()) throw ParseError(key_path(key), "expected a string");
            s = v.get<std::string>();
        }
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw ParseError(key_path(key), fmt::format("'{}' is not one of: {}", s, list));
        }
        return s;
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) {
        if (!has(key)) return required(key, def);
        const json& v = raw(key);
        if (!v.is_array()) throw ParseError(key_path(key), "expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ParseError(key_path(key), "expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    Point point(const std::string& key, int N, std::optional<Point> def = std::nullopt) {
        if (!has(key)) return required(key, def);
        const auto v = numbers(key);
        if (static_cast<int>(v.size()) != N) {
            throw ParseError(key_path(key), fmt::format("expected {} coordinates, got {}", N, v.size()));
        }
        Point p{};
        std::copy(v.begin(), v.end(), p.begin());
        return p;
    }

    Table table(const std::string& key) {
        if (!has(key)) throw ParseError(key_path(key), "missing required table");
        const json& v = raw(key);
        if (!v.is_object()) throw ParseError(key_path(key), "expected a table");
        return Table(v, key_path(key));
    }

    std::vector<Table> tables(const std::string& key) {
        std::vector<Table> out;
        if (!has(key)) return out;
        const json& v = raw(key);
        if (!v.is_array()) throw ParseError(key_path(key), "expected an array of tables");
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], fmt::format("{}[{}]", key_path(key), i));
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) throw ParseError(key_path(it.key()), "unknown key");
        }
    }

private:
    template <class T>
    T required(const std::string& key, const std::optional<T>& def) {
        if (!def) throw ParseError(key_path(key), "missing required key");
        return *def;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& where, const std::string& what) {
    if (!ok) throw ParseError(where, what);
}

double mass(Table& t, const std::string& key, const FracParams& P, std::optional<double> def) {
    const std::string rel = key + "_rel";
    require(!(t.has(key) && t.has(rel)), t.key_path(key), fmt::format("give either {} or {}, not both", key, rel));
    if (t.has(rel)) return t.number(rel) * P.gamma_hardy;
    return t.number(key, def);
}

ThetaPotential read_potential(Table t, const FracParams& P) {
    std::vector<Pole> poles;
    for (auto& pt : t.tables("pole")) {
        Pole p;
        p.a = pt.point("a", P.N, Point{});
        p.lambda = mass(pt, "lambda", P, std::nullopt);
        p.r = pt.number("r", kFullRadius);
        require(p.r > 0.0, pt.key_path("r"), "radius must be positive");
        pt.finish();
        poles.push_back(p);
    }
    Remainder rem;
    for (auto& bt : t.tables("bump")) {
        GaussianBump b;
        b.center = bt.point("center", P.N, Point{});
        b.amplitude = bt.number("amplitude");
        b.width = bt.number("width", 1.0);
        require(b.width > 0.0, bt.key_path("width"), "width must be positive");
        bt.finish();
        rem.terms.emplace_back(b);
    }
    const double lambda_inf = mass(t, "lambda_inf", P, 0.0);
    const double r_inf = t.number("r_inf", 1.0);
    const bool smooth = t.boolean("smooth", false);
    t.finish();
    try {
        return ThetaPotential::make(P, std::move(poles), lambda_inf, r_inf, std::move(rem), smooth);
    } catch (const Error& e) {
        throw ParseError(t.key_path(""), e.what());
    }
}

std::vector<double> ints_as_numbers(Table& t, const std::string& key, std::vector<double> def) {
    auto v = t.numbers(key, def);
    for (double x : v) require(x == std::floor(x) && x > 0, t.key_path(key), "expected positive integers");
    return v;
}

// Options of one experiment with defaults filled in; returns what must be present.
struct Needs {
    bool grid = false, tgrid = false;
    int min_potentials = 0, max_potentials = 0;
};

Needs read_options(const std::string& exp, Table& t, const ExperimentConfig& c, json& out) {
    const int N = c.params.N;
    const std::vector<double> origin(static_cast<std::size_t>(N), 0.0);
    auto witness = [&] {
        out["rhos"] = t.numbers("rhos");
        out["eta"] = t.number("eta", 1.0 / 32.0);
        out["support"] = t.number("support", 1.0);
        out["center"] = t.numbers("center", origin);
        require(out["center"].size() == static_cast<std::size_t>(N), t.key_path("center"), "wrong dimension");
    };
    Needs n;
    if (exp == "mu" || exp == "lemma51") {
        require(c.grid.has_value(), "grid", fmt::format("experiment {} needs a [grid] block", exp));
        out["ladder"] = ints_as_numbers(t, "ladder", {c.grid ? static_cast<double>(c.grid->n) : 0.0});
        n.grid = true;
        n.min_potentials = 1;
        n.max_potentials = exp == "mu" ? 64 : 1;
        if (exp == "mu") {
            out["cross_check"] = t.boolean("cross_check", false);
            n.tgrid = out["cross_check"].get<bool>();
        }
    } else if (exp == "theorem15") {
        const auto mode = t.string("mode", "sufficiency", {"sufficiency", "necessity"});
        out["mode"] = mode;
        n.grid = true;
        if (mode == "sufficiency") {
            out["count"] = t.integer("count", 20);
            out["poles"] = t.integer("poles", 3);
            out["sum_rel"] = t.number("sum_rel", 0.8);
            out["radius"] = t.number("radius", 1.0);
            require(out["count"].get<long long>() > 0, t.key_path("count"), "must be positive");
            require(out["poles"].get<long long>() > 0, t.key_path("poles"), "must be positive");
            require(out["radius"].get<double>() > 0, t.key_path("radius"), "must be positive");
        } else {
            witness();
            n.min_potentials = n.max_potentials = 1;
        }
    } else if (exp == "theorem14") {
        const auto mode = t.string("mode", "search", {"search", "witness"});
        out["mode"] = mode;
        n.grid = true;
        if (mode == "search") {
            out["masses_rel"] = t.numbers("masses_rel");
            out["margin"] = t.number("margin", 0.02);
        } else {
            witness();
            n.min_potentials = n.max_potentials = 1;
        }
    } else if (exp == "binding") {
        out["radii"] = t.numbers("radii");
        std::vector<double> e1(static_cast<std::size_t>(N), 0.0);
        e1[0] = 1.0;
        out["direction"] = t.numbers("direction", e1);
        require(out["direction"].size() == static_cast<std::size_t>(N), t.key_path("direction"), "wrong dimension");
        n.grid = true;
        n.min_potentials = n.max_potentials = 2;
    } else if (exp == "prop16") {
        out["margin"] = t.number("margin", 0.05);
        out["radius"] = t.number("radius", 1.0);
        n.grid = true;
        n.min_potentials = n.max_potentials = 1;
    } else if (exp == "lambda_curve") {
        out["points"] = t.integer("points", 65);
        require(out["points"].get<long long>() >= 3, t.key_path("points"), "need at least 3 points");
    } else if (exp == "angular_identity") {
        out["alphas_frac"] = t.numbers("alphas_frac", std::vector<double>{0.2, 0.5, 0.8});
        out["m"] = t.integer("m", 2048);
        for (double a : out["alphas_frac"].get<std::vector<double>>()) {
            require(a > 0 && a < 1, t.key_path("alphas_frac"), "fractions must lie in (0, 1)");
        }
    } else if (exp == "kappa_identity") {
        out["count"] = t.integer("count", 10);
        out["band"] = t.integer("band", 8);
        n.grid = n.tgrid = true;
    } else if (exp == "certificate") {
        out["alpha_frac"] = t.number("alpha_frac", 0.5);
        out["basis"] = t.integer("basis", 64);
        out["epsilon"] = t.number("epsilon", -1.0);
        const double a = out["alpha_frac"].get<double>();
        require(a > 0 && a < 1, t.key_path("alpha_frac"), "must lie in (0, 1)");
        n.grid = n.tgrid = true;
    }
    t.finish();
    return n;
}

}  // namespace

ExperimentConfig from_tree(const json& tree) {
    Table top(tree, "");
    ExperimentConfig c;
    c.experiment = top.string("experiment", std::nullopt, kExperiments);
    const auto seed = top.integer("seed", 1);
    require(seed >= 0, "seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.workers = static_cast<int>(top.integer("workers", 1));
    require(c.workers >= 1, "workers", "must be at least 1");

    {
        Table p = top.table("params");
        const auto N = p.integer("N");
        const double s = p.number("s");
        p.finish();
        require(N >= 1 && N <= kMaxDim, "params.N", fmt::format("N must lie in 1..{}", kMaxDim));
        try {
            c.params = FracParams::make(static_cast<int>(N), s);
        } catch (const Error& e) {
            throw ParseError("params", e.what());
        }
    }
    if (top.has("grid")) {
        Table g = top.table("grid");
        GridSpec gs;
        gs.n = static_cast<int>(g.integer("n"));
        gs.L = g.number("L");
        g.finish();
        require(gs.n >= 8 && (gs.n & (gs.n - 1)) == 0, "grid.n", "must be a power of two >= 8");
        require(gs.L > 0, "grid.L", "must be positive");
        c.grid = gs;
    }
    if (top.has("tgrid")) {
        Table g = top.table("tgrid");
        TGridSpec ts;
        ts.m_t = static_cast<int>(g.integer("m_t"));
        ts.t_max = g.number("t_max", 0.0);
        ts.grading = g.number("grading", 0.0);
        g.finish();
        require(ts.m_t >= 32, "tgrid.m_t", "must be at least 32");
        require(ts.t_max >= 0 && ts.grading >= 0, "tgrid", "t_max and grading must be nonnegative");
        c.tgrid = ts;
    }
    c.options = json::object();
    {
        json solver = json::object();
        if (top.has("solver")) {
            Table s = top.table("solver");
            solver["tol"] = s.number("tol", 1e-8);
            solver["max_matvecs"] = s.integer("max_matvecs", 500);
            s.finish();
        } else {
            solver["tol"] = 1e-8;
            solver["max_matvecs"] = 500;
        }
        c.options["solver"] = solver;
    }
    for (auto& pt : top.tables("potential")) c.potentials.push_back(read_potential(pt, c.params));

    json opts = json::object();
    Needs needs;
    if (top.has(c.experiment)) {
        Table t = top.table(c.experiment);
        needs = read_options(c.experiment, t, c, opts);
    } else {
        const json empty = json::object();
        Table t(empty, c.experiment);
        needs = read_options(c.experiment, t, c, opts);
    }
    for (auto it = opts.begin(); it != opts.end(); ++it) c.options[it.key()] = it.value();
    top.finish();

    require(!needs.grid || c.grid.has_value(), "grid", fmt::format("experiment {} needs a [grid] block", c.experiment));
    require(!needs.tgrid || c.tgrid.has_value(), "tgrid",
            fmt::format("experiment {} needs a [tgrid] block", c.experiment));
    const int np = static_cast<int>(c.potentials.size());
    require(np >= needs.min_potentials && np <= needs.max_potentials, "potential",
            needs.max_potentials == 0
                ? fmt::format("experiment {} takes no [[potential]] blocks", c.experiment)
                : fmt::format("experiment {} needs {}..{} [[potential]] blocks, got {}", c.experiment,
                              needs.min_potentials, needs.max_potentials, np));
    for (int i = 0; i < np; ++i) {
        const auto rep = validate_theta(c.potentials[i], c.params);
        if (!rep.valid) {
            throw ParseError(fmt::format("potential[{}]", i), rep.violations.empty() ? "invalid" : rep.violations.front());
        }
    }
    c.tree = tree;
    return c;
}

ExperimentConfig parse(const std::string& text, const std::string& source) {
    toml::table tbl;
    try {
        tbl = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ParseError(fmt::format("{}:{}", source, e.source().begin.line), std::string(e.description()));
    }
    std::map<std::string, int> lines;
    const json tree = to_json(tbl, "", lines);
    try {
        return from_tree(tree);
    } catch (const ParseError& e) {
        // Report the line of the deepest known prefix of the key path.
        const std::string& key = e.where();
        int line = 0;
        for (std::string k = key; !k.empty();) {
            if (auto it = lines.find(k); it != lines.end() && it->second > 0) {
                line = it->second;
                break;
            }
            const auto cut = k.find_last_of(".[");
            if (cut == std::string::npos) break;
            k.resize(cut);
        }
        const std::string where =
            line > 0 ? fmt::format("{}:{}: {}", source, line, key) : fmt::format("{}: {}", source, key);
        throw ParseError(where, e.detail());
    }
}

ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

ExperimentConfig with_overrides(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                                std::optional<int> workers) {
    json tree = cfg.tree;
    if (seed) tree["seed"] = *seed;
    if (workers) tree["workers"] = *workers;
    return from_tree(tree);
}

}  // namespace frachardy::config
