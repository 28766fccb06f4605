#include "parahess/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "parahess/errors.hpp"
#include "parahess/expression.hpp"

namespace parahess {

namespace {

constexpr int kMaxN = 16;

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"problem", {"name", "boundary_sampling"}},
        {"domain", {"n", "R", "a", "h"}},
        {"time", {"T", "M"}},
        {"operator", {"kind", "k"}},
        {"data", {"g", "G", "phi", "u0", "exact"}},
        {"solver",
         {"scheme", "dt_initial", "dt_min", "cfl_safety", "eps_g", "tol_perron", "max_sweeps", "tol_residual",
          "admissibility_slack", "barrier_eps", "tol_barrier", "tol_certificate", "explicit_cert_factor", "exec",
          "perron_ordering"}},
    };
    return s;
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
    const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
    if (!node) return fallback;
    const std::string text = node->get_value<std::string>();
    if constexpr (std::is_same_v<T, std::string>) {
        return text;
    } else {
        std::istringstream is(text);
        T v{};
        is >> v;
        if (is.fail() || !(is >> std::ws).eof()) throw ConfigError(key + ": cannot parse '" + text + "'");
        return v;
    }
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> variable_names(int n) {
    std::vector<std::string> v{"t"};
    for (int j = 1; j <= n; ++j) v.push_back("x" + std::to_string(j));
    for (int j = 1; j <= n; ++j) v.push_back("y" + std::to_string(j));
    v.insert(v.end(), {"r", "norm2", "fone"});
    return v;
}

// Compiled expression with the variable layout [t, z..., r, norm2, fone].
struct Bound {
    Expression e;
    int n;
    double fone;
    double operator()(double t, std::span<const double> z, double r) const {
        std::array<double, 2 * kMaxN + 4> v{};
        v[0] = t;
        double q = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            v[i + 1] = z[i];
            q += z[i] * z[i];
        }
        v[z.size() + 1] = r;
        v[z.size() + 2] = q;
        v[z.size() + 3] = fone;
        return e.eval(v);
    }
};

Bound bind_expression(const std::string& field, const std::string& text, int n, double fone, bool allow_t, bool allow_r) {
    const auto names = variable_names(n);
    Expression e;
    try {
        e = Expression::compile(text, names);
    } catch (const ConfigError& err) {
        throw ConfigError("data." + field + ": " + err.what());
    }
    if (!allow_t && e.uses(0)) throw ConfigError("data." + field + " must not depend on t");
    if (!allow_r && e.uses(static_cast<std::size_t>(2 * n + 1))) throw ConfigError("data." + field + " must not depend on r");
    return Bound{std::move(e), n, fone};
}

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> p = {
        {"stationary_n1",
         "[problem]\nname=stationary_n1\n[domain]\nn=1\nR=1\na=2\nh=0.125\n[time]\nT=0.25\nM=64\n"
         "[operator]\nk=1\n[data]\ng=fone\nG=0\nphi=norm2\nu0=norm2\nexact=norm2\n[solver]\nscheme=both\n"},
        {"manufactured_n1",
         "[problem]\nname=manufactured_n1\n[domain]\nn=1\nR=1\na=2\nh=0.25\n[time]\nT=0.25\nM=16\n"
         "[operator]\nk=1\n[data]\ng=1\nG=log((1+t)*fone) - norm2 + (r - (1+t)*norm2)\nphi=(1+t)*norm2\n"
         "u0=norm2\nexact=(1+t)*norm2\n[solver]\nscheme=both\n"},
        {"ma_ball_n2",
         "[problem]\nname=ma_ball_n2\n[domain]\nn=2\nR=1\na=2\nh=0.5\n[time]\nT=0.25\nM=4\n"
         "[operator]\nk=2\n[data]\ng=1\nG=log((1+t)*fone) - norm2 + (r - (1+t)*norm2)\nphi=(1+t)*norm2\n"
         "u0=norm2\nexact=(1+t)*norm2\n[solver]\nscheme=both\n"},
        {"quartic_n1",
         "[problem]\nname=quartic_n1\n[domain]\nn=1\nR=1\na=2\nh=0.25\n[time]\nT=0.25\nM=16\n"
         "[operator]\nk=1\n[data]\ng=1\nG=log(1+t+0.4*norm2) - norm2 + (r - (1+t)*norm2 - 0.1*norm2^2)\n"
         "phi=(1+t)*norm2 + 0.1*norm2^2\nu0=norm2 + 0.1*norm2^2\nexact=(1+t)*norm2 + 0.1*norm2^2\n"
         "[solver]\nscheme=both\n"},
        {"quartic_n2",
         "[problem]\nname=quartic_n2\n[domain]\nn=2\nR=1\na=2\nh=0.5\n[time]\nT=0.25\nM=4\n"
         "[operator]\nk=2\n[data]\ng=1\n"
         "G=0.5*log((1+t+0.2*norm2)*(1+t+0.4*norm2)) - norm2 + (r - (1+t)*norm2 - 0.1*norm2^2)\n"
         "phi=(1+t)*norm2 + 0.1*norm2^2\nu0=norm2 + 0.1*norm2^2\nexact=(1+t)*norm2 + 0.1*norm2^2\n"
         "[solver]\nscheme=both\n"},
        {"laplace_n2",
         "[problem]\nname=laplace_n2\n[domain]\nn=2\nR=1\na=2\nh=0.25\n[time]\nT=0.25\nM=16\n"
         "[operator]\nk=1\n[data]\ng=fone\nG=0\nphi=norm2 + x1 - y2\nu0=norm2 + x1 - y2\n"
         "exact=norm2 + x1 - y2\n[solver]\nscheme=both\n"},
        {"degenerate_g_n1",
         "[problem]\nname=degenerate_g_n1\n[domain]\nn=1\nR=1\na=2\nh=0.125\n[time]\nT=0.25\nM=64\n"
         "[operator]\nk=1\n[data]\ng=0\nG=0\nphi=0\nu0=0\nexact=0\n[solver]\nscheme=perron\n"},
    };
    return p;
}

void check_ranges(const RunConfig& c) {
    if (c.n < 1 || c.n > kMaxN) throw ConfigError("domain.n must lie in [1, " + std::to_string(kMaxN) + "]");
    if (!(c.R > 0.0)) throw ConfigError("domain.R must be positive");
    if (!(c.h > 0.0)) throw ConfigError("domain.h must be positive");
    if (!(c.T > 0.0)) throw ConfigError("time.T must be positive");
    if (c.M < 1) throw ConfigError("time.M must be at least 1");
    if (c.op_kind != "sigma_k_root") throw ConfigError("operator.kind must be sigma_k_root");
    if (c.k < 1 || c.k > c.n) throw ConfigError("operator.k must lie in [1, n]");
}

}  // namespace

RunConfig parse_config(const std::string& ini_text) {
    pt::ptree tree;
    try {
        std::istringstream is(ini_text);
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) throw ConfigError("unknown config section [" + section + "]");
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigError("unknown config key " + section + "." + key);
    }

    RunConfig c;
    c.name = get(tree, "problem.name", c.name);
    const auto sampling = get<std::string>(tree, "problem.boundary_sampling", "node");
    if (sampling == "node")
        c.sampling = BoundarySampling::node;
    else if (sampling == "projected")
        c.sampling = BoundarySampling::projected;
    else
        throw ConfigError("problem.boundary_sampling must be node or projected");

    c.n = get(tree, "domain.n", c.n);
    c.R = get(tree, "domain.R", c.R);
    c.a = get(tree, "domain.a", c.a);
    c.h = get(tree, "domain.h", c.h);
    c.T = get(tree, "time.T", c.T);
    c.M = get(tree, "time.M", c.M);
    c.op_kind = get(tree, "operator.kind", c.op_kind);
    c.k = get(tree, "operator.k", c.k);
    c.g = get(tree, "data.g", c.g);
    c.G = get(tree, "data.G", c.G);
    c.phi = get(tree, "data.phi", c.phi);
    c.u0 = get(tree, "data.u0", c.u0);
    c.exact = get(tree, "data.exact", c.exact);

    check_ranges(c);

    SolverConfig& s = c.solver;
    try {
        s.scheme = parse_scheme(get<std::string>(tree, "solver.scheme", scheme_name(s.scheme)));
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("solver.scheme: ") + e.what());
    }
    s.dt_initial = get(tree, "solver.dt_initial", s.dt_initial);
    s.dt_min = get(tree, "solver.dt_min", s.dt_min);
    s.cfl_safety = get(tree, "solver.cfl_safety", s.cfl_safety);
    s.eps_g = get(tree, "solver.eps_g", s.eps_g);
    s.tol_perron = get(tree, "solver.tol_perron", s.tol_perron);
    s.max_sweeps = get(tree, "solver.max_sweeps", s.max_sweeps);
    s.tol_residual = get(tree, "solver.tol_residual", s.tol_residual);
    s.admissibility_slack = get(tree, "solver.admissibility_slack", s.admissibility_slack);
    s.barrier_eps = get(tree, "solver.barrier_eps", s.barrier_eps);
    s.tol_barrier = get(tree, "solver.tol_barrier", s.tol_barrier);
    s.tol_certificate = get(tree, "solver.tol_certificate", s.tol_certificate);
    s.explicit_cert_factor = get(tree, "solver.explicit_cert_factor", s.explicit_cert_factor);
    const auto exec = get<std::string>(tree, "solver.exec", "parallel");
    if (exec != "serial" && exec != "parallel") throw ConfigError("solver.exec must be serial or parallel");
    s.exec = exec == "serial" ? Exec::serial : Exec::parallel;
    const auto ordering = get<std::string>(tree, "solver.perron_ordering", "gauss_seidel");
    if (ordering != "gauss_seidel" && ordering != "coloured")
        throw ConfigError("solver.perron_ordering must be gauss_seidel or coloured");
    s.perron_coloured = ordering == "coloured";
    s.validate();

    // compile once to report expression errors at load time
    for (const auto& [field, text, t, r] : {std::tuple{"g", c.g, false, false}, {"G", c.G, true, true},
                                            {"phi", c.phi, true, false}, {"u0", c.u0, false, false}})
        bind_expression(field, text, c.n, 1.0, t, r);
    if (!c.exact.empty()) bind_expression("exact", c.exact, c.n, 1.0, true, false);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : presets()) out.push_back(name);
    return out;
}

RunConfig preset_config(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return parse_config(it->second);
}

std::string config_to_ini(const RunConfig& c) {
    const SolverConfig& s = c.solver;
    std::ostringstream os;
    os << "[problem]\nname=" << c.name << "\nboundary_sampling="
       << (c.sampling == BoundarySampling::node ? "node" : "projected") << "\n";
    os << "[domain]\nn=" << c.n << "\nR=" << num(c.R) << "\na=" << num(c.a) << "\nh=" << num(c.h) << "\n";
    os << "[time]\nT=" << num(c.T) << "\nM=" << c.M << "\n";
    os << "[operator]\nkind=" << c.op_kind << "\nk=" << c.k << "\n";
    os << "[data]\ng=" << c.g << "\nG=" << c.G << "\nphi=" << c.phi << "\nu0=" << c.u0 << "\n";
    if (!c.exact.empty()) os << "exact=" << c.exact << "\n";
    os << "[solver]\nscheme=" << scheme_name(s.scheme) << "\ndt_initial=" << num(s.dt_initial)
       << "\ndt_min=" << num(s.dt_min) << "\ncfl_safety=" << num(s.cfl_safety) << "\neps_g=" << num(s.eps_g)
       << "\ntol_perron=" << num(s.tol_perron) << "\nmax_sweeps=" << s.max_sweeps
       << "\ntol_residual=" << num(s.tol_residual) << "\nadmissibility_slack=" << num(s.admissibility_slack)
       << "\nbarrier_eps=" << num(s.barrier_eps) << "\ntol_barrier=" << num(s.tol_barrier)
       << "\ntol_certificate=" << num(s.tol_certificate) << "\nexplicit_cert_factor=" << num(s.explicit_cert_factor)
       << "\nexec=" << (s.exec == Exec::serial ? "serial" : "parallel")
       << "\nperron_ordering=" << (s.perron_coloured ? "coloured" : "gauss_seidel") << "\n";
    return os.str();
}

RunConfig refine(const RunConfig& c, int level) {
    if (level < 0) throw ArgumentError("refinement level must be nonnegative");
    RunConfig r = c;
    r.h = c.h / static_cast<double>(1 << level);
    r.M = c.M * (1 << (2 * level));
    return r;
}

ProblemSpec build_problem(const RunConfig& c) {
    check_ranges(c);
    const auto op = SymOpSpec::sigma_k_root(c.n, c.k);
    const double fone = op.value_unchecked(std::vector<double>(static_cast<std::size_t>(c.n), 1.0));
    const auto dom = make_ball_domain(c.n, c.R, c.a, c.h);
    const Bound g = bind_expression("g", c.g, c.n, fone, false, false);
    const Bound G = bind_expression("G", c.G, c.n, fone, true, true);
    const Bound phi = bind_expression("phi", c.phi, c.n, fone, true, false);
    const Bound u0 = bind_expression("u0", c.u0, c.n, fone, false, false);
    auto p = ProblemSpec::make(
        c.name, dom, TimeGrid::make(c.T, c.M), op, [G](double t, std::span<const double> z, double r) { return G(t, z, r); },
        [g](std::span<const double> z) { return g(0.0, z, 0.0); },
        [phi](double t, std::span<const double> z) { return phi(t, z, 0.0); },
        [u0](std::span<const double> z) { return u0(0.0, z, 0.0); });
    p.sampling = c.sampling;
    return p;
}

std::optional<TimeSpaceFn> exact_solution(const RunConfig& c) {
    if (c.exact.empty()) return std::nullopt;
    const auto op = SymOpSpec::sigma_k_root(c.n, c.k);
    const double fone = op.value_unchecked(std::vector<double>(static_cast<std::size_t>(c.n), 1.0));
    const Bound e = bind_expression("exact", c.exact, c.n, fone, true, false);
    return TimeSpaceFn([e](double t, std::span<const double> z) { return e(t, z, 0.0); });
}

}  // namespace parahess
