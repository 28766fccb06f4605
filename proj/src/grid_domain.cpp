#include "parahess/grid_domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "parahess/errors.hpp"

namespace parahess {

Point DefiningFunction::grad(std::span<const double> z) const {
    if (gradient) return gradient(z);
    Point g(z.size());
    Point y(z.begin(), z.end());
    for (std::size_t a = 0; a < z.size(); ++a) {
        const double step = 1e-6 * (1.0 + std::abs(z[a]));
        y[a] = z[a] + step;
        const double fp = value(y);
        y[a] = z[a] - step;
        const double fm = value(y);
        y[a] = z[a];
        g[a] = (fp - fm) / (2.0 * step);
    }
    return g;
}

std::size_t BoxGrid::node_count() const {
    std::size_t c = 1;
    for (int a = 0; a < dim(); ++a) c *= axis_count();
    return c;
}

std::vector<int> BoxGrid::multi_index(std::size_t box_index) const {
    std::vector<int> mi(static_cast<std::size_t>(dim()));
    const std::size_t ac = axis_count();
    for (int a = dim() - 1; a >= 0; --a) {
        mi[static_cast<std::size_t>(a)] = static_cast<int>(box_index % ac) - half_count;
        box_index /= ac;
    }
    return mi;
}

Point BoxGrid::coords(std::size_t box_index) const {
    const auto mi = multi_index(box_index);
    Point p(mi.size());
    for (std::size_t a = 0; a < mi.size(); ++a) p[a] = mi[a] * h;
    return p;
}

std::optional<std::size_t> BoxGrid::index_of(std::span<const int> multi) const {
    std::size_t idx = 0;
    const std::size_t ac = axis_count();
    for (int v : multi) {
        if (v < -half_count || v > half_count) return std::nullopt;
        idx = idx * ac + static_cast<std::size_t>(v + half_count);
    }
    return idx;
}

namespace {

std::vector<std::pair<int, int>> mixed_axis_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < 2 * n; ++a)
        for (int b = a + 1; b < 2 * n; ++b)
            if (a % n != b % n) pairs.emplace_back(a, b);
    return pairs;
}

// Second derivative D_ab of a callable at z by centred differences; the
// same formulas as the lattice stencil.
HermitianMatrix fd_hessian_of_function(const SpaceFn& fn, std::span<const double> z, double h, int n) {
    Point y(z.begin(), z.end());
    const double f0 = fn(z);
    auto d2 = [&](int a, int b) {
        const auto A = static_cast<std::size_t>(a), B = static_cast<std::size_t>(b);
        if (a == b) {
            y[A] = z[A] + h;
            const double fp = fn(y);
            y[A] = z[A] - h;
            const double fm = fn(y);
            y[A] = z[A];
            return (fp + fm - 2.0 * f0) / (h * h);
        }
        auto eval = [&](double sa, double sb) {
            y[A] = z[A] + sa * h;
            y[B] = z[B] + sb * h;
            const double v = fn(y);
            y[A] = z[A];
            y[B] = z[B];
            return v;
        };
        return (eval(1, 1) + eval(-1, -1) - eval(1, -1) - eval(-1, 1)) / (4.0 * h * h);
    };
    HermitianMatrix H(n);
    for (int j = 0; j < n; ++j) {
        H.set(j, j, 0.25 * (d2(j, j) + d2(n + j, n + j)));
        for (int k = j + 1; k < n; ++k) {
            const double re = 0.25 * (d2(j, k) + d2(n + j, n + k));
            const double im = 0.25 * (d2(j, n + k) - d2(n + j, k));
            H.set(j, k, cplx(re, im));
        }
    }
    return H;
}

}  // namespace

std::vector<std::vector<int>> hessian_stencil_offsets(int n) {
    const int dim = 2 * n;
    std::vector<std::vector<int>> offs;
    for (int a = 0; a < dim; ++a) {
        for (int s : {1, -1}) {
            std::vector<int> o(static_cast<std::size_t>(dim), 0);
            o[static_cast<std::size_t>(a)] = s;
            offs.push_back(o);
        }
    }
    for (auto [a, b] : mixed_axis_pairs(n)) {
        for (auto [sa, sb] : {std::pair{1, 1}, std::pair{-1, -1}, std::pair{1, -1}, std::pair{-1, 1}}) {
            std::vector<int> o(static_cast<std::size_t>(dim), 0);
            o[static_cast<std::size_t>(a)] = sa;
            o[static_cast<std::size_t>(b)] = sb;
            offs.push_back(o);
        }
    }
    return offs;
}

Point project_to_zero_set(const DefiningFunction& rho, std::span<const double> z) {
    Point p(z.begin(), z.end());
    for (int it = 0; it < 100; ++it) {
        const double r = rho.value(p);
        const Point g = rho.grad(p);
        double g2 = 0.0;
        for (double v : g) g2 += v * v;
        if (g2 == 0.0) throw NumericalError("projection onto {rho = 0}: vanishing gradient");
        if (std::abs(r) <= 1e-13 * std::sqrt(g2)) break;
        for (std::size_t a = 0; a < p.size(); ++a) p[a] -= r * g[a] / g2;
    }
    return p;
}

NodeClassification classify_nodes(const BoxGrid& box, const DefiningFunction& rho) {
    const std::size_t count = box.node_count();
    const auto offsets = hessian_stencil_offsets(box.n);
    NodeClassification out;
    out.kind.assign(count, NodeKind::exterior);
    out.projected.assign(count, Point{});

    std::vector<int> shifted(static_cast<std::size_t>(box.dim()));
    auto neighbour = [&](const std::vector<int>& mi, const std::vector<int>& off) {
        for (std::size_t a = 0; a < mi.size(); ++a) shifted[a] = mi[a] + off[a];
        return box.index_of(shifted);
    };

    bool any_interior = false;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(rho.value(box.coords(i)) < 0.0)) continue;
        const auto mi = box.multi_index(i);
        bool inside = true;
        for (const auto& off : offsets) {
            if (!neighbour(mi, off)) {
                inside = false;
                break;
            }
        }
        if (inside) {
            out.kind[i] = NodeKind::interior;
            any_interior = true;
        }
    }
    if (!any_interior) throw ConfigError("domain has no interior grid nodes");

    for (std::size_t i = 0; i < count; ++i) {
        if (out.kind[i] != NodeKind::interior) continue;
        const auto mi = box.multi_index(i);
        for (const auto& off : offsets) {
            const auto j = *neighbour(mi, off);
            if (out.kind[j] == NodeKind::exterior) out.kind[j] = NodeKind::boundary;
        }
    }
    for (std::size_t i = 0; i < count; ++i)
        if (out.kind[i] == NodeKind::boundary) out.projected[i] = project_to_zero_set(rho, box.coords(i));
    return out;
}

std::shared_ptr<const GridDomain> GridDomain::make(BoxGrid box, DefiningFunction rho, const ConeSpec& cone,
                                                   std::string label) {
    if (box.n < 1 || !(box.h > 0.0) || box.half_count < 1) throw ArgumentError("invalid box grid");
    if (cone.n != box.n) throw ArgumentError("cone dimension does not match domain");
    auto cls = classify_nodes(box, rho);

    std::shared_ptr<GridDomain> d(new GridDomain());
    d->box_ = box;
    d->rho_ = std::move(rho);
    d->label_ = std::move(label);
    d->box_kind_ = cls.kind;
    d->mixed_pairs_ = mixed_axis_pairs(box.n);
    const std::size_t count = box.node_count();
    const auto dim = static_cast<std::size_t>(box.dim());
    d->box_active_.assign(count, -1);
    for (std::size_t i = 0; i < count; ++i) {
        if (cls.kind[i] == NodeKind::exterior) continue;
        const std::size_t a = d->active_box_.size();
        d->box_active_[i] = static_cast<std::int64_t>(a);
        d->active_box_.push_back(i);
        d->kind_.push_back(cls.kind[i]);
        const Point p = box.coords(i);
        d->coords_.insert(d->coords_.end(), p.begin(), p.end());
        d->rho_values_.push_back(d->rho_.value(p));
        d->projected_.push_back(cls.projected[i]);
        (cls.kind[i] == NodeKind::interior ? d->interior_ : d->boundary_).push_back(a);
    }
    d->interior_pos_.assign(d->active_box_.size(), -1);
    for (std::size_t p = 0; p < d->interior_.size(); ++p)
        d->interior_pos_[d->interior_[p]] = static_cast<std::int64_t>(p);

    const auto offsets = hessian_stencil_offsets(box.n);
    d->stencil_width_ = offsets.size();
    d->stencil_.reserve(d->interior_.size() * offsets.size());
    std::vector<int> shifted(dim);
    for (std::size_t a : d->interior_) {
        const auto mi = box.multi_index(d->active_box_[a]);
        for (const auto& off : offsets) {
            for (std::size_t c = 0; c < dim; ++c) shifted[c] = mi[c] + off[c];
            const auto j = box.index_of(shifted);
            d->stencil_.push_back(static_cast<std::size_t>(d->box_active_[*j]));
        }
    }

    d->depth_ = 0.0;
    for (double r : d->rho_values_) d->depth_ = std::max(d->depth_, -r);

    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < d->active_box_.size(); ++a) {
        const auto H = fd_hessian_of_function(d->rho_.value, d->coords(a), box.h, box.n);
        auto lambda = eigenvalues_hermitian(H);
        for (auto& l : lambda) l -= 1.0;
        margin = std::min(margin, cone_margin(lambda, cone));
    }
    d->margin_ = margin;
    if (!(margin > 0.0)) {
        throw ConfigError("strict Γ-pseudoconvexity certificate failed: lambda(H rho) - 1 has cone margin " +
                          std::to_string(margin) + " <= 0");
    }
    return d;
}

std::span<const double> GridDomain::coords(std::size_t active) const {
    const auto dim = static_cast<std::size_t>(box_.dim());
    return {coords_.data() + active * dim, dim};
}

std::span<const double> GridDomain::projected(std::size_t active) const {
    return projected_[active];
}

std::span<const std::size_t> GridDomain::stencil(std::size_t interior_pos) const {
    return {stencil_.data() + interior_pos * stencil_width_, stencil_width_};
}

SpatialField GridDomain::sample(const SpaceFn& fn) const {
    SpatialField v(active_count());
    for (std::size_t a = 0; a < v.size(); ++a) v[a] = fn(coords(a));
    return v;
}

std::shared_ptr<const GridDomain> make_ball_domain(int n, double radius, double scale, double h) {
    if (!(radius > 0.0) || !(h > 0.0)) throw ArgumentError("ball domain needs R > 0 and h > 0");
    if (n < 1) throw ArgumentError("ball domain needs n >= 1");
    if (!(scale > 1.0)) {
        throw ConfigError("strict Γ-pseudoconvexity certificate failed: rho = a(|z|^2 - R^2) needs a > 1 "
                          "(H rho - I = (a-1) I must lie in the open cone)");
    }
    BoxGrid box;
    box.n = n;
    box.h = h;
    box.half_count = std::max(1, static_cast<int>(std::ceil(radius / h - 1e-9)));
    const double r2 = radius * radius;
    DefiningFunction rho;
    rho.value = [scale, r2](std::span<const double> z) {
        double s = 0.0;
        for (double v : z) s += v * v;
        return scale * (s - r2);
    };
    rho.gradient = [scale](std::span<const double> z) {
        Point g(z.size());
        for (std::size_t a = 0; a < z.size(); ++a) g[a] = 2.0 * scale * z[a];
        return g;
    };
    return GridDomain::make(box, std::move(rho), ConeSpec::make(n, n), "ball");
}

// ---------------------------------------------------------------------------

TimeGrid TimeGrid::make(double T, int M) {
    if (!(T > 0.0) || M < 1) throw ArgumentError("time grid needs T > 0 and M >= 1");
    return TimeGrid{T, M};
}

int TimeGrid::index_of(double t0) const {
    const double x = t0 / dt();
    const double m = std::round(x);
    if (m < 0 || m > M || std::abs(x - m) > 1e-9) throw ArgumentError("time " + std::to_string(t0) + " is not a grid node");
    return static_cast<int>(m);
}

SpaceTimeField::SpaceTimeField(std::shared_ptr<const GridDomain> domain, TimeGrid time, int m_begin, int m_end,
                               double fill)
    : domain_(std::move(domain)), time_(time), m_begin_(m_begin), m_end_(m_end) {
    if (!domain_) throw ArgumentError("field needs a domain");
    if (m_begin < 0 || m_end > time.M || m_begin > m_end) throw ArgumentError("invalid time window");
    nodes_ = domain_->active_count();
    values_.assign(static_cast<std::size_t>(m_end - m_begin + 1) * nodes_, fill);
}

std::size_t SpaceTimeField::offset(int m) const {
    return static_cast<std::size_t>(m - m_begin_) * nodes_;
}

void SpaceTimeField::set_slice(int m, std::span<const double> values) {
    if (values.size() != nodes_) throw ArgumentError("slice size mismatch");
    std::copy(values.begin(), values.end(), slice(m).begin());
}

double SpaceTimeField::oscillation() const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values_) {
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi >= lo ? hi - lo : 0.0;
}

double SpaceTimeField::max_abs() const {
    double m = 0.0;
    for (double v : values_)
        if (!std::isnan(v)) m = std::max(m, std::abs(v));
    return m;
}

bool SpaceTimeField::same_grid(const SpaceTimeField& o) const {
    return domain_ == o.domain_ && time_ == o.time_ && m_begin_ == o.m_begin_ && m_end_ == o.m_end_;
}

// ---------------------------------------------------------------------------

HermitianMatrix fd_complex_hessian_at(const GridDomain& domain, std::span<const double> u, std::size_t pos) {
    const int n = domain.n();
    const auto N = static_cast<std::size_t>(n);
    const auto st = domain.stencil(pos);
    const double center = u[domain.interior()[pos]];
    const double inv_h2 = 1.0 / (domain.h() * domain.h());
    auto pure = [&](std::size_t a) { return (u[st[2 * a]] + u[st[2 * a + 1]] - 2.0 * center) * inv_h2; };

    HermitianMatrix H(n);
    for (std::size_t j = 0; j < N; ++j) H.set(static_cast<int>(j), static_cast<int>(j), 0.25 * (pure(j) + pure(N + j)));
    if (n == 1) return H;

    // mixed derivatives in the order of mixed_pairs()
    const auto& pairs = domain.mixed_pairs();
    const std::size_t base = 4 * N;
    std::vector<double> mixed(4 * N * N, 0.0);  // dense D_ab for a != b
    const std::size_t D = 2 * N;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const std::size_t o = base + 4 * p;
        const double v = (u[st[o]] + u[st[o + 1]] - u[st[o + 2]] - u[st[o + 3]]) * 0.25 * inv_h2;
        const auto a = static_cast<std::size_t>(pairs[p].first), b = static_cast<std::size_t>(pairs[p].second);
        mixed[a * D + b] = mixed[b * D + a] = v;
    }
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = j + 1; k < N; ++k) {
            const double re = 0.25 * (mixed[j * D + k] + mixed[(N + j) * D + (N + k)]);
            const double im = 0.25 * (mixed[j * D + (N + k)] - mixed[(N + j) * D + k]);
            H.set(static_cast<int>(j), static_cast<int>(k), cplx(re, im));
        }
    }
    return H;
}

HermitianMatrix fd_complex_hessian(const GridDomain& domain, std::span<const double> slice, std::size_t node) {
    if (slice.size() != domain.active_count()) throw ArgumentError("slice size does not match domain");
    if (node >= domain.active_count()) throw ArgumentError("node index out of range");
    const auto pos = domain.interior_position(node);
    if (pos < 0) throw ArgumentError("fd_complex_hessian: stencil needs an interior node");
    return fd_complex_hessian_at(domain, slice, static_cast<std::size_t>(pos));
}

// ---------------------------------------------------------------------------

namespace {

template <class Better>
SpaceTimeField time_convolution(const SpaceTimeField& u, double k, double A, double sign, Better better) {
    if (!(k > 0.0)) throw ArgumentError("convolution parameter k must be positive");
    const double osc = u.oscillation();
    if (!(A > osc)) throw ArgumentError("convolution needs A > osc(u)");
    const TimeGrid& tg = u.time();
    const double w = A / k;
    if (!(w < 0.5 * tg.T)) throw ArgumentError("k too small: window A/k must be below T/2 (k > 2A/T)");
    const double dt = tg.dt();
    const int reach = static_cast<int>(std::floor(w / dt * (1.0 + 1e-12)));
    int lo = u.m_begin(), hi = u.m_end();
    while (lo <= hi && !(tg.t(lo) > w * (1.0 + 1e-12))) ++lo;
    while (hi >= lo && !(tg.t(hi) < tg.T - w * (1.0 + 1e-12))) --hi;
    if (lo > hi) throw ArgumentError("convolution window leaves no time nodes");

    SpaceTimeField out(u.domain(), tg, lo, hi);
    const std::size_t nodes = u.node_count();
    for (int m = lo; m <= hi; ++m) {
        const int j0 = std::max(u.m_begin(), m - reach), j1 = std::min(u.m_end(), m + reach);
        for (std::size_t a = 0; a < nodes; ++a) {
            double best = u.at(m, a);
            for (int j = j0; j <= j1; ++j) {
                const double cand = u.at(j, a) + sign * k * std::abs(j - m) * dt;
                if (better(cand, best)) best = cand;
            }
            out.at(m, a) = best;
        }
    }
    return out;
}

}  // namespace

SpaceTimeField sup_convolution_time(const SpaceTimeField& u, double k, double A) {
    return time_convolution(u, k, A, -1.0, [](double c, double b) { return c > b; });
}

SpaceTimeField inf_convolution_time(const SpaceTimeField& u, double k, double A) {
    return time_convolution(u, k, A, 1.0, [](double c, double b) { return c < b; });
}

SpacetimeConvolution sup_convolution_spacetime(const SpaceTimeField& w, double eps, double A) {
    if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
    if (!(A > w.oscillation())) throw ArgumentError("space-time convolution needs A > osc(w)");
    const GridDomain& dom = *w.domain();
    const TimeGrid& tg = w.time();
    const double h = dom.h(), dt = tg.dt();
    const auto dim = static_cast<std::size_t>(dom.dim());
    const double pen = A / (eps * eps);

    SpacetimeConvolution res;
    res.degenerate = eps < h && eps < dt;

    // spatial offsets inside the eps-ball
    const int sr = static_cast<int>(std::floor(eps / h * (1.0 + 1e-12)));
    std::vector<std::vector<int>> soffs;
    {
        std::vector<int> o(dim, -sr);
        for (;;) {
            double d2 = 0.0;
            for (int v : o) d2 += static_cast<double>(v) * v;
            if (d2 * h * h <= eps * eps * (1.0 + 1e-12)) soffs.push_back(o);
            std::size_t c = 0;
            while (c < dim && ++o[c] > sr) o[c++] = -sr;
            if (c == dim) break;
        }
    }

    // a node qualifies when its whole eps-ball consists of interior nodes
    const std::size_t nodes = dom.active_count();
    res.spatial_mask.assign(nodes, 0);
    std::vector<std::vector<std::size_t>> nbrs(nodes);
    std::vector<int> shifted(dim);
    for (std::size_t a : dom.interior()) {
        const auto mi = dom.box().multi_index(dom.box_index(a));
        bool ok = true;
        std::vector<std::size_t> list;
        for (const auto& o : soffs) {
            for (std::size_t c = 0; c < dim; ++c) shifted[c] = mi[c] + o[c];
            const auto j = dom.box().index_of(shifted);
            if (!j || dom.box_kinds()[*j] != NodeKind::interior) {
                ok = false;
                break;
            }
            list.push_back(static_cast<std::size_t>(dom.active_index(*j)));
        }
        if (ok) {
            res.spatial_mask[a] = 1;
            nbrs[a] = std::move(list);
        }
    }

    int lo = w.m_begin(), hi = w.m_end();
    while (lo <= hi && !(tg.t(lo) > eps)) ++lo;
    while (hi >= lo && !(tg.t(hi) < tg.T - eps)) --hi;
    if (lo > hi) throw ArgumentError("space-time convolution leaves no time nodes");
    const int tr = static_cast<int>(std::floor(eps / dt * (1.0 + 1e-12)));

    res.field = SpaceTimeField(w.domain(), tg, lo, hi, std::numeric_limits<double>::quiet_NaN());
    for (int m = lo; m <= hi; ++m) {
        for (std::size_t a = 0; a < nodes; ++a) {
            if (!res.spatial_mask[a]) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (int dm = -tr; dm <= tr; ++dm) {
                const int j = m + dm;
                if (!w.has_time(j)) continue;
                const double st2 = (dm * dt) * (dm * dt);
                for (std::size_t q = 0; q < soffs.size(); ++q) {
                    double sz2 = 0.0;
                    for (int v : soffs[q]) sz2 += static_cast<double>(v) * v;
                    sz2 *= h * h;
                    if (st2 + sz2 > eps * eps * (1.0 + 1e-12)) continue;
                    const double cand = w.at(j, nbrs[a][q]) - pen * (st2 + sz2);
                    if (cand > best) best = cand;
                }
            }
            res.field.at(m, a) = best;
        }
    }
    return res;
}

SpatialField time_slice(const SpaceTimeField& u, double t0) {
    const int m = u.time().index_of(t0);
    if (!u.has_time(m)) throw ArgumentError("time is outside the field's window");
    const auto s = u.slice(m);
    return SpatialField(s.begin(), s.end());
}

SpatialField g_mollify(std::span<const double> g, double eps_g) {
    if (!(eps_g > 0.0)) throw ArgumentError("eps_g must be positive");
    SpatialField out(g.begin(), g.end());
    for (auto& v : out) v = std::max(v, eps_g);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void append_number(std::string& s, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
}

}  // namespace

std::string field_csv_string(const SpaceTimeField& field) {
    const GridDomain& dom = *field.domain();
    const int n = dom.n();
    std::string s = "t";
    for (int j = 1; j <= n; ++j) s += ",x" + std::to_string(j);
    for (int j = 1; j <= n; ++j) s += ",y" + std::to_string(j);
    s += ",value\n";
    for (int m = field.m_begin(); m <= field.m_end(); ++m) {
        const double t = field.time().t(m);
        for (std::size_t a = 0; a < field.node_count(); ++a) {
            const double v = field.at(m, a);
            if (std::isnan(v)) continue;
            append_number(s, t);
            for (double c : dom.coords(a)) {
                s += ',';
                append_number(s, c);
            }
            s += ',';
            append_number(s, v);
            s += '\n';
        }
    }
    return s;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open " + tmp + " for writing");
        os << contents;
        if (!os) throw ConfigError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_field_csv(const SpaceTimeField& field, const std::string& path) {
    write_file_atomic(path, field_csv_string(field));
}

SpaceTimeField read_field_csv(const std::string& path, std::shared_ptr<const GridDomain> domain, TimeGrid time) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open field file " + path);
    const int n = domain->n();
    std::string line;
    std::getline(is, line);
    std::string expect = "t";
    for (int j = 1; j <= n; ++j) expect += ",x" + std::to_string(j);
    for (int j = 1; j <= n; ++j) expect += ",y" + std::to_string(j);
    expect += ",value";
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expect) throw ArgumentError("grid mismatch: field header '" + line + "' expected '" + expect + "'");

    SpaceTimeField f(domain, time);
    const std::size_t nodes = domain->active_count();
    const auto cols = static_cast<std::size_t>(2 * n + 2);
    std::vector<double> row(cols);
    for (int m = 0; m <= time.M; ++m) {
        for (std::size_t a = 0; a < nodes; ++a) {
            if (!std::getline(is, line)) throw ArgumentError("grid mismatch: field file has too few rows");
            std::size_t pos = 0;
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t next = line.find(',', pos);
                const std::string tok = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
                try {
                    row[c] = std::stod(tok);
                } catch (const std::exception&) {
                    throw ArgumentError("malformed number '" + tok + "' in field file");
                }
                if (next == std::string::npos && c + 1 < cols) throw ArgumentError("grid mismatch: short row");
                pos = next + 1;
            }
            const double t = time.t(m);
            if (std::abs(row[0] - t) > 1e-9 * (1.0 + std::abs(t))) throw ArgumentError("grid mismatch: time column");
            const auto z = domain->coords(a);
            for (std::size_t c = 0; c < z.size(); ++c)
                if (std::abs(row[c + 1] - z[c]) > 1e-9 * (1.0 + std::abs(z[c])))
                    throw ArgumentError("grid mismatch: node coordinates");
            f.at(m, a) = row[cols - 1];
        }
    }
    while (std::getline(is, line))
        if (!line.empty()) throw ArgumentError("grid mismatch: field file has extra rows");
    return f;
}

}  // namespace parahess
