#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "parahess/problem.hpp"

namespace fixtures {

inline double norm2(std::span<const double> z) {
    double q = 0.0;
    for (double v : z) q += v * v;
    return q;
}

inline double f_ones(const parahess::SymOpSpec& op) { return op.value_unchecked(std::vector<double>(op.n(), 1.0)); }

// u0 = phi = |z|^2, g = f(1,...,1), G = 0: the solution is |z|^2 for all t.
inline parahess::ProblemSpec stationary(int n, double h, double T, int M) {
    using namespace parahess;
    const auto op = SymOpSpec::sigma_k_root(n, n);
    const double f1 = f_ones(op);
    return ProblemSpec::make(
        "stationary", make_ball_domain(n, 1.0, 2.0, h), TimeGrid::make(T, M), op,
        [](double, std::span<const double>, double) { return 0.0; }, [f1](std::span<const double>) { return f1; },
        [](double, std::span<const double> z) { return norm2(z); }, [](std::span<const double> z) { return norm2(z); });
}

// exact solution (1+t)|z|^2 with g = 1
inline parahess::ProblemSpec manufactured(int n, double h, double T, int M) {
    using namespace parahess;
    const auto op = SymOpSpec::sigma_k_root(n, n);
    const double f1 = f_ones(op);
    return ProblemSpec::make(
        "manufactured", make_ball_domain(n, 1.0, 2.0, h), TimeGrid::make(T, M), op,
        [f1](double t, std::span<const double> z, double r) {
            const double q = norm2(z);
            return std::log((1.0 + t) * f1) - q + (r - (1.0 + t) * q);
        },
        [](std::span<const double>) { return 1.0; },
        [](double t, std::span<const double> z) { return (1.0 + t) * norm2(z); },
        [](std::span<const double> z) { return norm2(z); });
}

inline double exact_manufactured(double t, std::span<const double> z) { return (1.0 + t) * norm2(z); }

// exact solution (1+t)q + 0.1 q^2 with q = |z|^2 and f = sigma_n^(1/n); the
// Hessian has eigenvalues 1+t+0.2q (n-1 times) and 1+t+0.4q
inline parahess::ProblemSpec quartic(int n, double h, double T, int M) {
    using namespace parahess;
    const auto op = SymOpSpec::sigma_k_root(n, n);
    return ProblemSpec::make(
        "quartic", make_ball_domain(n, 1.0, 2.0, h), TimeGrid::make(T, M), op,
        [op, n](double t, std::span<const double> z, double r) {
            const double q = norm2(z);
            std::vector<double> lam(static_cast<std::size_t>(n), 1.0 + t + 0.2 * q);
            lam.back() += 0.2 * q;
            return std::log(op.value_unchecked(lam)) - q + (r - (1.0 + t) * q - 0.1 * q * q);
        },
        [](std::span<const double>) { return 1.0; },
        [](double t, std::span<const double> z) {
            const double q = norm2(z);
            return (1.0 + t) * q + 0.1 * q * q;
        },
        [](std::span<const double> z) {
            const double q = norm2(z);
            return q + 0.1 * q * q;
        });
}

inline double exact_quartic(double t, std::span<const double> z) {
    const double q = norm2(z);
    return (1.0 + t) * q + 0.1 * q * q;
}

template <class Field, class Exact>
double max_error(const parahess::ProblemSpec& p, const Field& u, Exact exact) {
    double e = 0.0;
    for (int m = 0; m <= p.time.M; ++m)
        for (std::size_t a = 0; a < p.domain->active_count(); ++a)
            e = std::max(e, std::abs(u.at(m, a) - exact(p.time.t(m), p.domain->coords(a))));
    return e;
}

}  // namespace fixtures
