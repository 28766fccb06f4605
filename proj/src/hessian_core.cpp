#include "parahess/hessian_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "parahess/errors.hpp"

namespace parahess {

ConeSpec ConeSpec::make(int n, int k) {
    if (n < 1) throw ArgumentError("cone dimension must be positive");
    if (k < 1 || k > n) throw ArgumentError("cone index k must satisfy 1 <= k <= n");
    return ConeSpec{n, k};
}

std::vector<double> elementary_symmetric_all(std::span<const double> x) {
    // coefficients of prod_i (1 + x_i t)
    std::vector<double> e(x.size() + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t l = i + 1; l >= 1; --l) e[l] += x[i] * e[l - 1];
    }
    return e;
}

double elementary_symmetric(std::span<const double> x, int l) {
    if (l < 1 || static_cast<std::size_t>(l) > x.size())
        throw ArgumentError("elementary_symmetric: l must lie in [1, n]");
    return elementary_symmetric_all(x)[static_cast<std::size_t>(l)];
}

double default_membership_slack(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return 1e-10 * (1.0 + m);
}

namespace {

void require_dim(std::span<const double> x, const ConeSpec& cone) {
    if (static_cast<int>(x.size()) != cone.n) throw ArgumentError("vector length does not match cone dimension");
}

}  // namespace

bool in_cone(std::span<const double> x, const ConeSpec& cone, double slack) {
    require_dim(x, cone);
    if (slack < 0.0) throw ArgumentError("in_cone: negative slack; use in_open_cone for the interior");
    const auto e = elementary_symmetric_all(x);
    for (int l = 1; l <= cone.k; ++l)
        if (!(e[static_cast<std::size_t>(l)] > -slack)) return false;
    return true;
}

bool in_open_cone(std::span<const double> x, const ConeSpec& cone) {
    require_dim(x, cone);
    const auto e = elementary_symmetric_all(x);
    for (int l = 1; l <= cone.k; ++l)
        if (!(e[static_cast<std::size_t>(l)] > 0.0)) return false;
    return true;
}

double cone_margin(std::span<const double> x, const ConeSpec& cone) {
    require_dim(x, cone);
    const double lo0 = *std::min_element(x.begin(), x.end());
    const double hi0 = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    std::vector<double> y(x.size());
    auto inside = [&](double s) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - s;
        const auto e = elementary_symmetric_all(y);
        for (int l = 1; l <= cone.k; ++l)
            if (e[static_cast<std::size_t>(l)] < 0.0) return false;
        return true;
    };
    double lo = lo0, hi = hi0;
    if (inside(hi)) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return lo;
}

SymOpSpec SymOpSpec::sigma_k_root(int n, int k) {
    SymOpSpec s;
    s.cone_ = ConeSpec::make(n, k);
    s.kind_ = SymOpKind::sigma_k_root;
    return s;
}

SymOpSpec SymOpSpec::custom(ConeSpec cone, CustomOperator op) {
    if (!op.f) throw ArgumentError("custom operator needs a function");
    SymOpSpec s;
    s.cone_ = ConeSpec::make(cone.n, cone.k);
    s.kind_ = SymOpKind::custom;
    s.custom_ = std::make_shared<const CustomOperator>(std::move(op));
    return s;
}

std::string SymOpSpec::name() const {
    if (kind_ == SymOpKind::custom) return custom_->name;
    return "sigma_" + std::to_string(cone_.k) + "^(1/" + std::to_string(cone_.k) + ")";
}

bool SymOpSpec::homogeneous() const {
    return kind_ == SymOpKind::sigma_k_root || custom_->homogeneous;
}

bool SymOpSpec::contains(std::span<const double> x, double slack) const {
    if (kind_ == SymOpKind::custom && custom_->membership) return custom_->membership(x, slack);
    return in_cone(x, cone_, slack);
}

double SymOpSpec::value_unchecked(std::span<const double> x) const {
    if (kind_ == SymOpKind::custom) return custom_->f(x);
    const double s = elementary_symmetric_all(x)[static_cast<std::size_t>(cone_.k)];
    if (s <= 0.0) return 0.0;
    return cone_.k == 1 ? s : std::pow(s, 1.0 / cone_.k);
}

double f_eval(const SymOpSpec& f, std::span<const double> x, double slack) {
    if (static_cast<int>(x.size()) != f.n()) throw ArgumentError("f_eval: dimension mismatch");
    if (slack < 0.0) slack = default_membership_slack(x);
    if (!f.contains(x, slack)) throw DomainError("f_eval: point lies outside the closed cone");
    return f.value_unchecked(x);
}

std::vector<double> f_gradient(const SymOpSpec& f, std::span<const double> x) {
    if (static_cast<int>(x.size()) != f.n()) throw ArgumentError("f_gradient: dimension mismatch");
    if (!in_open_cone(x, f.cone())) throw DomainError("f_gradient: point is not interior to the cone");
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    const double h = 1e-6 * (1.0 + m);
    std::vector<double> g(x.size());
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        const double fp = f.value_unchecked(y);
        y[i] = x[i] - h;
        const double fm = f.value_unchecked(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n * n)) {
    if (n < 1) throw ArgumentError("matrix dimension must be positive");
}

HermitianMatrix HermitianMatrix::from_entries(int n, std::vector<cplx> entries, double tol) {
    if (n < 1 || entries.size() != static_cast<std::size_t>(n * n))
        throw ArgumentError("HermitianMatrix: entry count does not match dimension");
    double scale = 0.0;
    for (const auto& e : entries) scale = std::max(scale, std::abs(e));
    const double bound = tol * (1.0 + scale);
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
            const cplx a = entries[static_cast<std::size_t>(j * n + k)];
            const cplx b = entries[static_cast<std::size_t>(k * n + j)];
            if (std::abs(a - std::conj(b)) > bound) throw ArgumentError("matrix is not Hermitian");
            m.set(j, k, 0.5 * (a + std::conj(b)));
        }
    }
    return m;
}

HermitianMatrix HermitianMatrix::identity(int n) {
    HermitianMatrix m(n);
    for (int j = 0; j < n; ++j) m.set(j, j, 1.0);
    return m;
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
    HermitianMatrix m(static_cast<int>(d.size()));
    for (int j = 0; j < m.n(); ++j) m.set(j, j, d[static_cast<std::size_t>(j)]);
    return m;
}

void HermitianMatrix::set(int j, int k, cplx value) {
    if (j == k) value = cplx(value.real(), 0.0);
    a_[static_cast<std::size_t>(j * n_ + k)] = value;
    a_[static_cast<std::size_t>(k * n_ + j)] = std::conj(value);
}

double HermitianMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& e : a_) m = std::max(m, std::abs(e));
    return m;
}

cplx HermitianMatrix::trace() const {
    cplx t = 0.0;
    for (int j = 0; j < n_; ++j) t += (*this)(j, j);
    return t;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
    if (o.n_ != n_) throw ArgumentError("dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
    if (o.n_ != n_) throw ArgumentError("dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
    for (auto& e : a_) e *= s;
    return *this;
}

// ---------------------------------------------------------------------------

SymmetricEigen jacobi_symmetric(std::vector<double> a, int m, bool want_vectors) {
    const auto M = static_cast<std::size_t>(m);
    if (a.size() != M * M) throw ArgumentError("jacobi_symmetric: size mismatch");
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * M + j]; };
    std::vector<double> v;
    if (want_vectors) {
        v.assign(M * M, 0.0);
        for (std::size_t i = 0; i < M; ++i) v[i * M + i] = 1.0;
    }
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < M; ++p)
            for (std::size_t q = p + 1; q < M; ++q) off += at(p, q) * at(p, q);
        if (off <= 1e-34 * scale * scale || off == 0.0) break;

        for (std::size_t p = 0; p < M; ++p) {
            for (std::size_t q = p + 1; q < M; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < M; ++r) {
                    const double arp = at(r, p), arq = at(r, q);
                    at(r, p) = c * arp - s * arq;
                    at(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < M; ++r) {
                    const double apr = at(p, r), aqr = at(q, r);
                    at(p, r) = c * apr - s * aqr;
                    at(q, r) = s * apr + c * aqr;
                }
                at(p, q) = at(q, p) = 0.0;
                if (want_vectors) {
                    for (std::size_t r = 0; r < M; ++r) {
                        const double vrp = v[r * M + p], vrq = v[r * M + q];
                        v[r * M + p] = c * vrp - s * vrq;
                        v[r * M + q] = s * vrp + c * vrq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return at(i, i) < at(j, j); });
    SymmetricEigen out;
    out.values.resize(M);
    for (std::size_t i = 0; i < M; ++i) out.values[i] = at(order[i], order[i]);
    if (want_vectors) {
        out.vectors.resize(M * M);
        for (std::size_t r = 0; r < M; ++r)
            for (std::size_t c = 0; c < M; ++c) out.vectors[r * M + c] = v[r * M + order[c]];
    }
    return out;
}

std::vector<double> real_embedding(const HermitianMatrix& h) {
    const auto n = static_cast<std::size_t>(h.n());
    const std::size_t m = 2 * n;
    std::vector<double> e(m * m);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const cplx z = h(static_cast<int>(j), static_cast<int>(k));
            e[j * m + k] = z.real();
            e[j * m + (k + n)] = -z.imag();
            e[(j + n) * m + k] = z.imag();
            e[(j + n) * m + (k + n)] = z.real();
        }
    }
    return e;
}

std::vector<double> eigenvalues_hermitian(const HermitianMatrix& h) {
    const int n = h.n();
    if (n == 1) return {h(0, 0).real()};
    if (n == 2) {
        const double a = h(0, 0).real(), d = h(1, 1).real();
        const double mean = 0.5 * (a + d);
        const double r = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
        return {mean - r, mean + r};
    }
    const auto eig = jacobi_symmetric(real_embedding(h), 2 * n);
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = eig.values[2 * i];
    return lambda;
}

OperatorValue F_from_eigenvalues(std::span<const double> lambda, const SymOpSpec& f, double slack) {
    if (slack < 0.0) slack = default_membership_slack(lambda);
    if (!f.contains(lambda, slack)) return OperatorValue::neg_infinity();
    return OperatorValue::finite(f.value_unchecked(lambda));
}

OperatorValue F_eval(const HermitianMatrix& h, const SymOpSpec& f, double slack) {
    if (h.n() != f.n()) throw ArgumentError("F_eval: dimension mismatch");
    const auto lambda = eigenvalues_hermitian(h);
    return F_from_eigenvalues(lambda, f, slack);
}

HermitianMatrix complex_hessian_of_quadratic(std::span<const double> q, int n, double tol) {
    const auto m = static_cast<std::size_t>(2 * n);
    if (n < 1 || q.size() != m * m) throw ArgumentError("quadratic form must be 2n x 2n");
    double scale = 0.0;
    for (double v : q) scale = std::max(scale, std::abs(v));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (std::abs(q[a * m + b] - q[b * m + a]) > tol * (1.0 + scale))
                throw ArgumentError("quadratic form is not symmetric");
    auto Q = [&](std::size_t a, std::size_t b) { return 0.5 * (q[a * m + b] + q[b * m + a]); };
    const auto N = static_cast<std::size_t>(n);
    HermitianMatrix h(n);
    // d^2/dz_j dzbar_k = 1/4 [(d_xj d_xk + d_yj d_yk) + i (d_xj d_yk - d_yj d_xk)]
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = j; k < N; ++k) {
            const double re = 0.25 * (Q(j, k) + Q(j + N, k + N));
            const double im = 0.25 * (Q(j, k + N) - Q(j + N, k));
            h.set(static_cast<int>(j), static_cast<int>(k), cplx(re, im));
        }
    }
    return h;
}

// ---------------------------------------------------------------------------

bool AxiomReport::pass() const {
    return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.pass; });
}

const AxiomResult* AxiomReport::find(const std::string& axiom) const {
    for (const auto& r : results)
        if (r.axiom == axiom) return &r;
    return nullptr;
}

namespace {

struct Audit {
    AxiomResult r;
    explicit Audit(std::string name) { r.axiom = std::move(name); }
    // margin < 0 is a violation
    void record(double margin, std::span<const double> witness) {
        ++r.tested;
        if (margin < 0.0 || std::isnan(margin)) {
            ++r.failed;
            r.pass = false;
        }
        if (std::isnan(margin) || margin < r.worst_margin) {
            r.worst_margin = std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin;
            r.witness.assign(witness.begin(), witness.end());
        }
    }
};

double inf_norm(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

std::vector<cplx> random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    const auto N = static_cast<std::size_t>(n);
    std::vector<cplx> u(N * N);
    for (auto& z : u) z = cplx(nd(rng), nd(rng));
    // modified Gram-Schmidt on columns
    for (std::size_t c = 0; c < N; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            cplx dot = 0.0;
            for (std::size_t r = 0; r < N; ++r) dot += std::conj(u[r * N + p]) * u[r * N + c];
            for (std::size_t r = 0; r < N; ++r) u[r * N + c] -= dot * u[r * N + p];
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < N; ++r) nrm += std::norm(u[r * N + c]);
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < N; ++r) u[r * N + c] /= nrm;
    }
    return u;
}

// U diag(d) U^*
HermitianMatrix conjugate_diagonal(const std::vector<cplx>& u, std::span<const double> d) {
    const int n = static_cast<int>(d.size());
    const auto N = static_cast<std::size_t>(n);
    HermitianMatrix h(n);
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = j; k < N; ++k) {
            cplx s = 0.0;
            for (std::size_t l = 0; l < N; ++l) s += u[j * N + l] * d[l] * std::conj(u[k * N + l]);
            h.set(static_cast<int>(j), static_cast<int>(k), s);
        }
    }
    return h;
}

}  // namespace

AxiomReport check_operator_axioms(const SymOpSpec& f, std::size_t samples, std::uint64_t seed, double tol) {
    if (samples < 1) throw ArgumentError("check_operator_axioms: need at least one sample");
    const int n = f.n();
    const int k = f.k();
    const auto N = static_cast<std::size_t>(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-1.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));

    auto sample_interior = [&]() {
        std::vector<double> x(N);
        const double s = std::exp(log_scale(rng));
        for (;;) {
            for (auto& v : x) v = s * box(rng);
            if (in_open_cone(x, f.cone()) && f.contains(x, 0.0)) return x;
        }
    };
    // Exact boundary points of Gamma_k: k = 1 uses a zero-sum vector, k > 1
    // zeroes n-k+1 coordinates so sigma_k vanishes identically.
    auto sample_boundary = [&]() {
        std::vector<double> x(N);
        const double s = std::exp(log_scale(rng));
        if (k == 1) {
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < N; ++i) {
                x[i] = s * (2.0 * unit(rng) - 1.0);
                sum += x[i];
            }
            x[N - 1] = -sum;
        } else {
            for (auto& v : x) v = s * (0.1 + 1.9 * unit(rng));
            std::vector<std::size_t> idx(N);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (int z = 0; z < n - k + 1; ++z) x[idx[static_cast<std::size_t>(z)]] = 0.0;
        }
        return x;
    };

    Audit symmetry("symmetry"), homogeneity("homogeneity"), concavity("concavity"),
        monotone("strict_monotonicity"), boundary("boundary_zero"), matrix("matrix_monotonicity"),
        coercive("coercivity");

    for (std::size_t s = 0; s < samples; ++s) {
        const auto x = sample_interior();
        const double fx = f.value_unchecked(x);
        const double scale = 1.0 + std::abs(fx) + inf_norm(x);

        auto px = x;
        std::shuffle(px.begin(), px.end(), rng);
        symmetry.record(tol * scale - std::abs(f.value_unchecked(px) - fx), x);

        if (f.homogeneous()) {
            const double c = std::exp(log_scale(rng));
            auto cx = x;
            for (auto& v : cx) v *= c;
            homogeneity.record(tol * (1.0 + c) * scale - std::abs(f.value_unchecked(cx) - c * fx), x);
        }

        {
            const auto y = (s % 4 == 3) ? sample_boundary() : sample_interior();
            std::vector<double> mid(N);
            for (std::size_t i = 0; i < N; ++i) mid[i] = 0.5 * (x[i] + y[i]);
            const double fy = f.value_unchecked(y);
            const double sc = 1.0 + std::abs(fx) + std::abs(fy) + inf_norm(x) + inf_norm(y);
            concavity.record(f.value_unchecked(mid) - 0.5 * (fx + fy) + tol * sc, x);
        }

        {
            const std::size_t i = static_cast<std::size_t>(rng() % N);
            auto xp = x;
            xp[i] += 1e-3 * (1.0 + inf_norm(x)) * (0.1 + unit(rng));
            monotone.record(f.value_unchecked(xp) - fx, x);
        }

        {
            const auto b = sample_boundary();
            boundary.record(tol * (1.0 + inf_norm(b)) - std::abs(f.value_unchecked(b)), b);
        }

        {
            const auto u = random_unitary(n, rng);
            const auto mm = conjugate_diagonal(u, x);
            const auto v = random_unitary(n, rng);
            std::vector<double> d(N, 0.0);
            const int rank = 1 + static_cast<int>(rng() % N);
            for (int r = 0; r < rank; ++r) d[static_cast<std::size_t>(r)] = inf_norm(x) * (0.05 + unit(rng));
            const auto nn = conjugate_diagonal(v, d);
            const auto fm = F_eval(mm, f);
            const auto fmn = F_eval(mm + nn, f);
            if (fm.is_finite()) {
                const double margin = fmn.is_finite() ? fmn.value() - fm.value() : -1.0;
                matrix.record(margin, x);
            }
        }
    }

    {
        std::vector<double> ones(N, 1.0);
        double prev = f.value_unchecked(ones);
        const double base = std::max(1.0, std::abs(prev));
        double r = 1.0;
        for (int j = 1; j <= 60; ++j) {
            r *= 2.0;
            std::vector<double> x(N, r);
            const double fr = f.value_unchecked(x);
            coercive.record(fr - prev, x);
            prev = fr;
        }
        std::vector<double> last(N, r);
        coercive.record(prev - 1e6 * base, last);
    }

    AxiomReport report;
    report.op = f.name();
    report.results = {symmetry.r, concavity.r, monotone.r, boundary.r, matrix.r, coercive.r};
    if (f.homogeneous()) report.results.insert(report.results.begin() + 1, homogeneity.r);
    return report;
}

}  // namespace parahess
