#include "parahess/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "parahess/errors.hpp"

namespace parahess {

int parallel_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

// Runs body(i) for i in [0, count); the parallel branch schedules statically
// so per-index results never depend on the thread count.
template <class Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
    const auto n = static_cast<std::ptrdiff_t>(count);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
    }
}

double laplacian_at(const GridDomain& dom, std::span<const double> u, std::size_t pos) {
    const auto st = dom.stencil(pos);
    const auto dim = static_cast<std::size_t>(dom.dim());
    double s = 0.0;
    for (std::size_t k = 0; k < 2 * dim; ++k) s += u[st[k]];
    return (s - 2.0 * static_cast<double>(dim) * u[dom.interior()[pos]]) / (dom.h() * dom.h());
}

}  // namespace

SliceOperator slice_operator(const GridDomain& dom, const SymOpSpec& op, std::span<const double> slice,
                             double slack, Exec exec) {
    SliceOperator out;
    out.n = dom.n();
    const std::size_t count = dom.interior().size();
    const auto N = static_cast<std::size_t>(dom.n());
    out.lambda.resize(count * N);
    out.F.resize(count);
    for_each_index(count, exec, [&](std::size_t pos) {
        const auto lambda = eigenvalues_hermitian(fd_complex_hessian_at(dom, slice, pos));
        std::copy(lambda.begin(), lambda.end(), out.lambda.begin() + static_cast<std::ptrdiff_t>(pos * N));
        out.F[pos] = F_from_eigenvalues(lambda, op, slack).value();
    });
    return out;
}

ExplicitUpdate explicit_update(const ProblemSpec& p, std::span<const double> slice, double t, double dt,
                               double eps_g, Exec exec) {
    const GridDomain& dom = *p.domain;
    ExplicitUpdate out;
    out.next.assign(slice.begin(), slice.end());
    const auto op = slice_operator(dom, p.op, slice, -1.0, exec);
    std::vector<char> bad(dom.interior().size(), 0);
    for_each_index(dom.interior().size(), exec, [&](std::size_t pos) {
        const std::size_t a = dom.interior()[pos];
        const double F = op.F[pos];
        if (!(F > 0.0)) {
            bad[pos] = 1;
            return;
        }
        const double rate = std::log(F) - std::log(std::max(p.g[a], eps_g)) - p.G(t, dom.coords(a), slice[a]);
        out.next[a] = slice[a] + dt * rate;
    });
    for (std::size_t pos = 0; pos < bad.size(); ++pos) {
        if (!bad[pos]) continue;
        if (out.bad_nodes++ == 0) out.first_bad = dom.interior()[pos];
    }
    return out;
}

double laplacian_residual(const GridDomain& dom, std::span<const double> u, Exec exec) {
    std::vector<double> r(dom.interior().size());
    for_each_index(r.size(), exec, [&](std::size_t pos) { r[pos] = std::abs(laplacian_at(dom, u, pos)); });
    double m = 0.0;
    for (double v : r) m = std::max(m, v);
    return m;
}

double sor_sweep(const GridDomain& dom, std::span<double> u, double omega, Exec exec) {
    const auto dim = static_cast<std::size_t>(dom.dim());
    const double inv = 1.0 / (2.0 * static_cast<double>(dim));
    auto relax = [&](std::size_t pos) {
        const auto st = dom.stencil(pos);
        double s = 0.0;
        for (std::size_t k = 0; k < 2 * dim; ++k) s += u[st[k]];
        const std::size_t a = dom.interior()[pos];
        const double delta = omega * (s * inv - u[a]);
        u[a] += delta;
        return std::abs(delta);
    };
    double change = 0.0;
    if (exec == Exec::serial) {
        for (std::size_t pos = 0; pos < dom.interior().size(); ++pos) change = std::max(change, relax(pos));
        return change;
    }
    // red-black by parity of the lattice multi-index sum
    std::vector<std::size_t> colour[2];
    for (std::size_t pos = 0; pos < dom.interior().size(); ++pos) {
        const auto mi = dom.box().multi_index(dom.box_index(dom.interior()[pos]));
        int s = 0;
        for (int v : mi) s += v;
        colour[(s % 2 + 2) % 2].push_back(pos);
    }
    for (const auto& c : colour) {
        std::vector<double> d(c.size());
        for_each_index(c.size(), Exec::parallel, [&](std::size_t i) { d[i] = relax(c[i]); });
        for (double v : d) change = std::max(change, v);
    }
    return change;
}

std::vector<std::vector<std::size_t>> stencil_coloring(const GridDomain& dom) {
    const int n = dom.n();
    int p = 2;
    std::vector<int> w(static_cast<std::size_t>(2 * n), 1);
    if (n > 1) {
        p = 4 * n;
        auto is_prime = [](int q) {
            for (int d = 2; d * d <= q; ++d)
                if (q % d == 0) return false;
            return true;
        };
        while (!is_prime(p)) ++p;
        for (int a = 0; a < 2 * n; ++a) w[static_cast<std::size_t>(a)] = a + 1;
    }
    std::vector<std::vector<std::size_t>> colours(static_cast<std::size_t>(p));
    for (std::size_t pos = 0; pos < dom.interior().size(); ++pos) {
        const auto mi = dom.box().multi_index(dom.box_index(dom.interior()[pos]));
        long s = 0;
        for (std::size_t a = 0; a < mi.size(); ++a) s += static_cast<long>(w[a]) * mi[a];
        colours[static_cast<std::size_t>(((s % p) + p) % p)].push_back(pos);
    }
    std::erase_if(colours, [](const auto& c) { return c.empty(); });
    return colours;
}

}  // namespace parahess
