#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "parahess/errors.hpp"
#include "parahess/grid_domain.hpp"

using namespace parahess;

namespace {

double norm2(std::span<const double> z) {
    double q = 0.0;
    for (double v : z) q += v * v;
    return q;
}

DefiningFunction ball_rho(double a, double R) {
    DefiningFunction rho;
    rho.value = [a, R](std::span<const double> z) { return a * (norm2(z) - R * R); };
    return rho;
}

}  // namespace

TEST_CASE("node classification") {
    BoxGrid box{2, 0.5, 3};
    const auto cls = classify_nodes(box, ball_rho(2.0, 1.0));
    // coordinates are (x1, x2, y1, y2)
    const std::vector<int> inside{1, 0, 1, 0}, outside{3, 0, 0, 0};
    CHECK(cls.kind[*box.index_of(inside)] == NodeKind::interior);
    CHECK(cls.kind[*box.index_of(outside)] == NodeKind::exterior);

    // n = 1, h = 1: the 3x3 box around the origin has one interior node
    BoxGrid small{1, 1.0, 1};
    CHECK(small.node_count() == 9);
    const auto c1 = classify_nodes(small, ball_rho(2.0, 1.0));
    int interior = 0;
    for (std::size_t i = 0; i < small.node_count(); ++i)
        if (c1.kind[i] == NodeKind::interior) {
            ++interior;
            CHECK(norm2(small.coords(i)) == 0.0);
        }
    CHECK(interior == 1);

    const auto dom = make_ball_domain(1, 1.0, 2.0, 1.0);
    CHECK(dom->interior().size() == 1);
    CHECK(dom->boundary().size() == 4);

    DefiningFunction nowhere;
    nowhere.value = [](std::span<const double> z) { return 1.0 + norm2(z); };
    CHECK_THROWS_AS(GridDomain::make(BoxGrid{1, 0.5, 2}, nowhere, ConeSpec::make(1, 1)), ConfigError);
    CHECK_THROWS_AS(make_ball_domain(2, 1.0, 1.0, 0.5), ConfigError);
}

TEST_CASE("projection onto the zero set") {
    const auto rho = ball_rho(2.0, 1.0);
    const std::vector<double> z{1.0, 0.5};
    const auto p = project_to_zero_set(rho, z);
    CHECK(std::abs(std::sqrt(norm2(p)) - 1.0) < 1e-6);
    // along the gradient of a radial rho the direction is preserved
    CHECK(p[1] / p[0] == doctest::Approx(0.5));

    const auto dom = make_ball_domain(2, 1.0, 2.0, 0.5);
    for (std::size_t a : dom->boundary()) CHECK(std::abs(norm2(dom->projected(a)) - 1.0) < 1e-10);
}

TEST_CASE("finite-difference complex Hessian is exact on quadratics") {
    for (int n : {1, 2}) {
        const auto dom = make_ball_domain(n, 1.0, 2.0, 0.25);
        const auto slice = dom->sample([](std::span<const double> z) { return norm2(z); });
        for (std::size_t a : dom->interior()) {
            const auto h = fd_complex_hessian(*dom, slice, a);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    CHECK(std::abs(h(j, k) - cplx(j == k ? 1.0 : 0.0)) < 1e-12);
        }
    }
    const auto dom1 = make_ball_domain(1, 1.0, 2.0, 0.25);
    const auto ph = dom1->sample([](std::span<const double> z) { return z[0] * z[0] - z[1] * z[1]; });
    for (std::size_t a : dom1->interior()) CHECK(std::abs(fd_complex_hessian(*dom1, ph, a)(0, 0)) < 1e-12);

    // Re(z1 conj z2) = x1 x2 + y1 y2 has H_12 = 1/2 and zero diagonal
    const auto dom2 = make_ball_domain(2, 1.0, 2.0, 0.25);
    const auto mixed = dom2->sample([](std::span<const double> z) { return z[0] * z[1] + z[2] * z[3]; });
    for (std::size_t a : dom2->interior()) {
        const auto h = fd_complex_hessian(*dom2, mixed, a);
        CHECK(std::abs(h(0, 1) - cplx(0.5)) < 1e-12);
        CHECK(std::abs(h(0, 0)) < 1e-12);
    }

    // (1+t)|z|^2 sliced at t = 1
    const auto tg = TimeGrid::make(1.0, 4);
    SpaceTimeField u(dom2, tg);
    for (int m = 0; m <= tg.M; ++m)
        for (std::size_t a = 0; a < dom2->active_count(); ++a) u.at(m, a) = (1.0 + tg.t(m)) * norm2(dom2->coords(a));
    const auto s = time_slice(u, 1.0);
    for (std::size_t a : dom2->interior()) {
        const auto h = fd_complex_hessian(*dom2, s, a);
        CHECK(std::abs(h(0, 0) - cplx(2.0)) < 1e-12);
        CHECK(std::abs(h(1, 1) - cplx(2.0)) < 1e-12);
    }
    CHECK_THROWS_AS(time_slice(u, 0.3), ArgumentError);
    CHECK_THROWS_AS(fd_complex_hessian(*dom2, s, dom2->boundary().front()), ArgumentError);
}

TEST_CASE("time sup and inf convolutions") {
    const auto dom = make_ball_domain(1, 1.0, 2.0, 0.5);
    const auto tg = TimeGrid::make(1.0, 40);
    const double alpha = 1.5;
    SpaceTimeField lin(dom, tg);
    for (int m = 0; m <= tg.M; ++m)
        for (std::size_t a = 0; a < dom->active_count(); ++a) lin.at(m, a) = alpha * tg.t(m);
    for (double k : {2.5 * alpha, 4.0 * alpha, 10.0}) {
        const auto up = sup_convolution_time(lin, k, 1.6);
        const auto lo = inf_convolution_time(lin, k, 1.6);
        for (int m = up.m_begin(); m <= up.m_end(); ++m)
            for (std::size_t a = 0; a < dom->active_count(); ++a) {
                CHECK(up.at(m, a) == doctest::Approx(lin.at(m, a)).epsilon(1e-14).scale(1.0));
                CHECK(lo.at(m, a) == doctest::Approx(lin.at(m, a)).epsilon(1e-14).scale(1.0));
            }
    }

    // oscillation 1, A = 2, k = 100: u <= u^k <= u + window oscillation
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SpaceTimeField w(dom, tg);
    for (auto m = 0; m <= tg.M; ++m)
        for (std::size_t a = 0; a < dom->active_count(); ++a) w.at(m, a) = unit(rng);
    const double k = 100.0, A = 2.0;
    const auto up = sup_convolution_time(w, k, A);
    for (int m = up.m_begin(); m <= up.m_end(); ++m)
        for (std::size_t a = 0; a < dom->active_count(); ++a) {
            double wmax = -1e300;
            for (int q = 0; q <= tg.M; ++q)
                if (std::abs(tg.t(q) - tg.t(m)) <= A / k + 1e-12) wmax = std::max(wmax, w.at(q, a));
            CHECK(up.at(m, a) >= w.at(m, a));
            CHECK(up.at(m, a) <= wmax);
        }
    CHECK_THROWS_AS(sup_convolution_time(w, 1.0, 2.0), ArgumentError);  // A/k >= T/2
    CHECK_THROWS_AS(sup_convolution_time(w, 100.0, 0.5), ArgumentError);  // A <= osc
}

TEST_CASE("space-time sup-convolution is semiconvex in t") {
    const auto dom = make_ball_domain(1, 1.0, 2.0, 0.25);
    const auto tg = TimeGrid::make(1.0, 40);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    SpaceTimeField w(dom, tg);
    for (auto m = 0; m <= tg.M; ++m)
        for (std::size_t a = 0; a < dom->active_count(); ++a) w.at(m, a) = unit(rng);
    const double eps = 0.3, A = 2.5;
    const auto conv = sup_convolution_spacetime(w, eps, A);
    const double dt = tg.dt(), floor = -2.0 * A / (eps * eps);
    int checked = 0;
    for (int m = conv.field.m_begin() + 1; m < conv.field.m_end(); ++m)
        for (std::size_t a = 0; a < dom->active_count(); ++a) {
            const double l = conv.field.at(m - 1, a), c = conv.field.at(m, a), r = conv.field.at(m + 1, a);
            if (std::isnan(l) || std::isnan(c) || std::isnan(r)) continue;
            ++checked;
            CHECK((l - 2.0 * c + r) / (dt * dt) >= floor - 1e-9);
            CHECK(c >= w.at(m, a));
        }
    CHECK(checked > 0);
}

TEST_CASE("field CSV round trip") {
    const auto dom = make_ball_domain(1, 1.0, 2.0, 0.5);
    const auto tg = TimeGrid::make(0.5, 4);
    SpaceTimeField u(dom, tg);
    for (int m = 0; m <= tg.M; ++m)
        for (std::size_t a = 0; a < dom->active_count(); ++a) u.at(m, a) = std::sin(1.0 + m + 3.0 * a) / 3.0;
    const auto dir = std::filesystem::temp_directory_path() / "parahess_csv_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "u.csv").string();
    write_field_csv(u, path);
    const auto back = read_field_csv(path, dom, tg);
    CHECK(back.values() == u.values());
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    CHECK_THROWS_AS(read_field_csv(path, dom, TimeGrid::make(0.5, 8)), ArgumentError);
    CHECK_THROWS_AS(read_field_csv(path, make_ball_domain(1, 1.0, 2.0, 0.25), tg), ArgumentError);
    std::filesystem::remove_all(dir);
}
