#include <doctest.h>

#include <cmath>

#include "parahess/config.hpp"
#include "parahess/errors.hpp"
#include "parahess/expression.hpp"

using namespace parahess;

namespace {

double ev(const std::string& text, std::vector<double> values = {}, std::vector<std::string> names = {}) {
    return Expression::compile(text, names).eval(values);
}

}  // namespace

TEST_CASE("expression grammar") {
    CHECK(ev("1 + 2 * 3") == 7.0);
    CHECK(ev("(1 + 2) * 3") == 9.0);
    CHECK(ev("8 / 4 / 2") == 1.0);
    CHECK(ev("2 - 3 - 4") == -5.0);
    CHECK(ev("2^3^2") == 512.0);
    CHECK(ev("-2^2") == -4.0);
    CHECK(ev("2^-1") == 0.5);
    CHECK(ev("--3") == 3.0);
    CHECK(ev("1.5e2 + .5") == 150.5);
    CHECK(ev("pi") == doctest::Approx(M_PI));
    CHECK(ev("exp(log(3))") == doctest::Approx(3.0));
    CHECK(ev("sqrt(16) + abs(-2)") == 6.0);
    CHECK(ev("sin(0) + cos(0)") == 1.0);
    CHECK(ev("pow(2, 10)") == 1024.0);
    CHECK(ev("min(3, -1) + max(3, -1)") == 2.0);
    CHECK(ev("x*y + z", {2, 3, 4}, {"x", "y", "z"}) == 10.0);

    const auto e = Expression::compile("x1^2 + y1", {"t", "x1", "y1", "r"});
    CHECK(e.uses(1));
    CHECK(e.uses(2));
    CHECK_FALSE(e.uses(0));
    CHECK_FALSE(e.uses(3));

    for (const char* bad : {"", "1 +", "(1", "1)", "2 3", "foo", "exp(1, 2)", "pow(1)", "1 $ 2", "log", "x1.2"})
        CHECK_THROWS_AS(ev(bad, {0.0}, {"x1"}), ConfigError);
    try {
        ev("1 + * 2");
        FAIL("no error");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("position") != std::string::npos);
    }
    std::string deep;
    for (int i = 0; i < 200; ++i) deep += "(1+";
    deep += "1";
    for (int i = 0; i < 200; ++i) deep += ")";
    CHECK_THROWS_AS(ev(deep), ConfigError);
}

TEST_CASE("config parsing and round trip") {
    const auto c = parse_config(
        "[problem]\nname = demo\n[domain]\nn = 2\nR = 1.5\na = 3\nh = 0.25\n[time]\nT = 0.5\nM = 8\n"
        "[operator]\nk = 2\n[data]\ng = 1 + x1^2\nG = r\nphi = norm2 + t\nu0 = norm2\n"
        "[solver]\nscheme = both\ntol_perron = 1e-10\nexec = serial\nperron_ordering = coloured\n");
    CHECK(c.name == "demo");
    CHECK(c.n == 2);
    CHECK(c.R == 1.5);
    CHECK(c.k == 2);
    CHECK(c.solver.scheme == Scheme::both);
    CHECK(c.solver.tol_perron == 1e-10);
    CHECK(c.solver.exec == Exec::serial);
    CHECK(c.solver.perron_coloured);

    const auto text = config_to_ini(c);
    const auto back = parse_config(text);
    CHECK(config_to_ini(back) == text);

    for (const auto& name : preset_names()) {
        const auto p = preset_config(name);
        CHECK(config_to_ini(parse_config(config_to_ini(p))) == config_to_ini(p));
    }
    CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("[domain]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[extra]\nn = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[domain]\nn = two\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nscheme = implicit\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[domain\nn = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/parahess.ini"), ConfigError);

    auto c = preset_config("stationary_n1");
    c.g = "1 + t";
    CHECK_THROWS_AS(build_problem(c), ConfigError);
    c = preset_config("stationary_n1");
    c.phi = "r";
    CHECK_THROWS_AS(build_problem(c), ConfigError);
    c = preset_config("stationary_n1");
    c.k = 2;
    CHECK_THROWS_AS(build_problem(c), ConfigError);
    c = preset_config("ma_ball_n2");
    c.a = 1.0;
    try {
        build_problem(c);
        FAIL("no error");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("pseudoconvexity") != std::string::npos);
    }
}

TEST_CASE("refinement ladder and problem construction") {
    const auto base = preset_config("manufactured_n1");
    const auto l2 = refine(base, 2);
    CHECK(l2.h == base.h / 4.0);
    CHECK(l2.M == base.M * 16);

    const auto p = build_problem(preset_config("ma_ball_n2"));
    CHECK(p.op.n() == 2);
    CHECK(p.op.k() == 2);
    const auto exact = exact_solution(preset_config("ma_ball_n2"));
    REQUIRE(exact);
    for (std::size_t a = 0; a < p.domain->active_count(); ++a) {
        const auto z = p.domain->coords(a);
        double q = 0.0;
        for (double v : z) q += v * v;
        CHECK((*exact)(0.5, z) == doctest::Approx(1.5 * q));
        CHECK(p.u0[a] == doctest::Approx(q));
    }
    // fone = sigma_1(1, 1) = 2 for the k = 1 preset
    const auto lap = build_problem(preset_config("laplace_n2"));
    for (double v : lap.g) CHECK(v == doctest::Approx(2.0));
}
