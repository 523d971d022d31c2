#include "deltalap/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "deltalap/errors.hpp"
#include "deltalap/io.hpp"
#include "deltalap/dynamics.hpp"
#include "deltalap/toml_lite.hpp"

namespace deltalap {

using nlohmann::json;

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

void merge(json& into, const json& from)
{
    for (auto it = from.begin(); it != from.end(); ++it) {
        if (it->is_object() && into.contains(it.key()) && into[it.key()].is_object())
            merge(into[it.key()], *it);
        else
            into[it.key()] = *it;
    }
}

double num(const json& v, const std::string& key)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s == "inf")
            return INFINITY;
        if (s == "-inf")
            return -INFINITY;
    }
    throw ConfigError("config: '" + key + "' must be a number");
}

long long integer(const json& v, const std::string& key)
{
    double x = num(v, key);
    if (x != std::floor(x) || std::fabs(x) > 9e15)
        throw ConfigError("config: '" + key + "' must be an integer");
    return static_cast<long long>(x);
}

}  // namespace

json parse_config_text(const std::string& text)
{
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config: malformed JSON: ") + e.what());
        }
    }
    return parse_toml(text);
}

void apply_override(json& tree, const std::string& assignment)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* t = &tree;
    std::size_t start = 0;
    while (true) {
        auto dot = key.find('.', start);
        std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw ConfigError("--set: malformed key '" + key + "'");
        if (dot == std::string::npos) {
            (*t)[part] = value;
            break;
        }
        json& next = (*t)[part];
        if (next.is_null())
            next = json::object();
        if (!next.is_object())
            throw ConfigError("--set: '" + part + "' is not a table");
        t = &next;
        start = dot + 1;
    }
}

ExperimentConfig config_from_json(const json& tree)
{
    if (!tree.is_object())
        throw ConfigError("config: top level must be a table");
    ExperimentConfig c;
    int d_grid = 0;
    for (auto it = tree.begin(); it != tree.end(); ++it) {
        const std::string& k = it.key();
        const json& v = *it;
        if (k == "experiment") {
            if (!v.is_string())
                throw ConfigError("config: 'experiment' must be a string");
            c.experiment = v.get<std::string>();
        } else if (k == "d") {
            c.d = static_cast<int>(integer(v, k));
        } else if (k == "alpha") {
            c.alpha = num(v, k);
        } else if (k == "alpha_2d") {
            c.alpha_2d = num(v, k);
        } else if (k == "grid") {
            if (!v.is_object())
                throw ConfigError("config: 'grid' must be a table");
            for (auto g = v.begin(); g != v.end(); ++g) {
                if (g.key() == "n")
                    c.grid.n = static_cast<int>(integer(*g, "grid.n"));
                else if (g.key() == "L")
                    c.grid.L = num(*g, "grid.L");
                else if (g.key() == "d")
                    d_grid = static_cast<int>(integer(*g, "grid.d"));
                else
                    throw ConfigError("config: unknown key 'grid." + g.key() + "'");
            }
        } else if (k == "quadrature") {
            if (!v.is_object())
                throw ConfigError("config: 'quadrature' must be a table");
            for (auto g = v.begin(); g != v.end(); ++g) {
                if (g.key() == "tol")
                    c.quadrature.tol = num(*g, "quadrature.tol");
                else if (g.key() == "panel_nodes")
                    c.quadrature.panel_nodes = static_cast<int>(integer(*g, "quadrature.panel_nodes"));
                else if (g.key() == "max_panels")
                    c.quadrature.max_panels = static_cast<int>(integer(*g, "quadrature.max_panels"));
                else
                    throw ConfigError("config: unknown key 'quadrature." + g.key() + "'");
            }
        } else if (k == "s") {
            c.s = num(v, k);
        } else if (k == "p") {
            c.p = num(v, k);
        } else if (k == "q") {
            c.q = num(v, k);
        } else if (k == "r") {
            c.r = num(v, k);
        } else if (k == "p_nl") {
            c.p_nl = num(v, k);
        } else if (k == "mu") {
            c.mu = num(v, k);
        } else if (k == "T") {
            c.T = num(v, k);
        } else if (k == "tau") {
            c.tau = num(v, k);
        } else if (k == "seed") {
            long long s = integer(v, k);
            if (s < 0)
                throw ConfigError("config: 'seed' must be >= 0");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (k == "family_size") {
            c.family_size = static_cast<int>(integer(v, k));
        } else if (k == "checkpoints") {
            if (!v.is_boolean())
                throw ConfigError("config: 'checkpoints' must be true or false");
            c.checkpoints = v.get<bool>();
        } else {
            throw ConfigError("config: unknown key '" + k + "'");
        }
    }
    if (d_grid != 0 && d_grid != c.d)
        throw ConfigError("config: grid.d = " + std::to_string(d_grid) + " differs from d = " + std::to_string(c.d));
    c.grid.d = c.d;
    return c;
}

void ExperimentConfig::validate() const
{
    if (std::find(experiment_tags.begin(), experiment_tags.end(), experiment) == experiment_tags.end())
        throw ConfigError("config: unknown experiment '" + experiment +
                          "' (greens, frac, decompose, embed, dispersive, strichartz, nls, verify-all)");
    if (d != 2 && d != 3)
        throw ConfigError("config: d = " + std::to_string(d) + " not in {2, 3}");
    if (!std::isfinite(alpha) || !std::isfinite(alpha_2d))
        throw ConfigError("config: alpha must be finite");
    try {
        grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(grid.L > 0.0) || !std::isfinite(grid.L))
        throw ConfigError("config: grid.L must be positive");
    try {
        quadrature.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (family_size < 2 || family_size > 1000)
        throw ConfigError("config: family_size must lie in [2, 1000]");
    if (s && !(*s > 0.0 && *s < 2.0))
        throw ConfigError("config: s = " + fmt(*s) + " not in (0,2)");
    if (p) {
        if (experiment == "dispersive") {
            bool ok = *p >= 2.0 && (d == 2 ? std::isfinite(*p) : *p < 3.0);
            if (!ok)
                throw ConfigError("config: p = " + fmt(*p) + " outside the decay window [2,inf) if d=2, [2,3) if d=3");
        } else {
            try {
                check_p_window(d, *p);
            } catch (const DomainError& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
    }
    if (q.has_value() != r.has_value())
        throw ConfigError("config: q and r must be given together");
    if (q) {
        try {
            check_strichartz_pair(d, *q, *r);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (p_nl && !(*p_nl > 1.0))
        throw ConfigError("config: p_nl = " + fmt(*p_nl) + " must exceed 1");
    if (mu && *mu != 1.0 && *mu != -1.0 && *mu != 0.0)
        throw ConfigError("config: mu must be +1 or -1 (0 switches the nonlinearity off)");
    if (tau && !(*tau > 0.0))
        throw ConfigError("config: tau must be positive");
    if (T && !(*T > 0.0))
        throw ConfigError("config: T must be positive");
    if (T && tau && !(*T >= *tau))
        throw ConfigError("config: T must be at least tau");
}

json ExperimentConfig::to_json() const
{
    json j;
    j["experiment"] = experiment;
    j["d"] = d;
    j["alpha"] = alpha;
    j["alpha_2d"] = alpha_2d;
    j["grid"] = {{"n", grid.n}, {"L", grid.L}};
    j["quadrature"] = {{"tol", quadrature.tol},
                       {"panel_nodes", quadrature.panel_nodes},
                       {"max_panels", quadrature.max_panels}};
    auto opt = [&](const char* k, const std::optional<double>& v) {
        if (v)
            j[k] = std::isinf(*v) ? json("inf") : json(*v);
    };
    opt("s", s);
    opt("p", p);
    opt("q", q);
    opt("r", r);
    opt("p_nl", p_nl);
    opt("mu", mu);
    opt("T", T);
    opt("tau", tau);
    j["seed"] = seed;
    j["family_size"] = family_size;
    j["checkpoints"] = checkpoints;
    return j;
}

ExperimentConfig load_config(const std::string& experiment, const std::string& path,
                             const std::vector<std::string>& overrides)
{
    json tree = json::object();
    if (!path.empty()) {
        std::string text;
        try {
            text = read_file(path);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        merge(tree, parse_config_text(text));
    }
    for (const auto& o : overrides)
        apply_override(tree, o);
    if (!experiment.empty()) {
        if (tree.contains("experiment") && tree["experiment"] != experiment)
            throw ConfigError("config: file names experiment " + tree["experiment"].dump() +
                              " but the command line asks for '" + experiment + "'");
        tree["experiment"] = experiment;
    }
    ExperimentConfig c = config_from_json(tree);
    c.validate();
    return c;
}

}  // namespace deltalap
