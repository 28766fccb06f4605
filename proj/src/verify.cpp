#include "parahess/verify.hpp"

#include <algorithm>
#include <cmath>

#include "parahess/errors.hpp"
#include "parahess/kernels.hpp"

namespace parahess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Tracker {
public:
    Tracker(VerificationReport& r, const GridDomain& dom, const TimeGrid& tg) : r_(r), dom_(dom), tg_(tg) {}

    void record(int m, std::size_t node, double margin) {
        ++r_.tested;
        const bool bad = std::isnan(margin) || margin < -r_.tol;
        if (bad) {
            ++r_.failed;
            r_.pass = false;
        }
        const double key = std::isnan(margin) ? -kInf : margin;
        if (!r_.worst || key < r_.worst->margin) {
            VerificationReport::Worst w;
            w.m = m;
            w.t = tg_.t(m);
            w.node = node;
            const auto z = dom_.coords(node);
            w.z.assign(z.begin(), z.end());
            w.margin = key;
            r_.worst = std::move(w);
        }
    }

private:
    VerificationReport& r_;
    const GridDomain& dom_;
    const TimeGrid& tg_;
};

void require_full(const ProblemSpec& p, const SpaceTimeField& u) {
    if (u.domain() != p.domain || !(u.time() == p.time) || u.m_begin() != 0 || u.m_end() != p.time.M)
        throw ArgumentError("grid mismatch: field does not cover the problem's grid");
}

// Per interior node: F at slice m and the equation right-hand side.
void equation_terms(const ProblemSpec& p, const SpaceTimeField& u, int m, double eps_g, std::vector<double>& F,
                    std::vector<double>& rhs) {
    const GridDomain& dom = *p.domain;
    const auto op = slice_operator(dom, p.op, u.slice(m), -1.0, Exec::parallel);
    F = op.F;
    rhs.resize(F.size());
    for (std::size_t pos = 0; pos < F.size(); ++pos) {
        const std::size_t a = dom.interior()[pos];
        rhs[pos] = equation_rhs(p, m, a, u.at(m, a), u.at(m - 1, a), eps_g);
    }
}

}  // namespace

VerificationReport check_subsolution(const ProblemSpec& p, const SpaceTimeField& u, const CheckOptions& opts) {
    require_full(p, u);
    VerificationReport r;
    r.check = "subsolution";
    r.tol = opts.tol;
    const GridDomain& dom = *p.domain;
    Tracker tr(r, dom, p.time);
    std::vector<double> F, rhs;
    double worst_pde = kInf;
    for (int m = 1; m <= p.time.M; ++m) {
        equation_terms(p, u, m, opts.eps_g, F, rhs);
        for (std::size_t pos = 0; pos < F.size(); ++pos) {
            const double margin = F[pos] - rhs[pos];
            worst_pde = std::min(worst_pde, margin);
            tr.record(m, dom.interior()[pos], margin);
        }
    }
    double worst_bc = kInf;
    for (int m = 0; m <= p.time.M; ++m) {
        for (std::size_t a : dom.boundary()) {
            const double margin = p.boundary_value(p.time.t(m), a) - u.at(m, a);
            worst_bc = std::min(worst_bc, margin);
            tr.record(m, a, margin);
        }
    }
    double worst_ic = kInf;
    for (std::size_t a = 0; a < dom.active_count(); ++a) {
        const double margin = p.u0[a] - u.at(0, a);
        worst_ic = std::min(worst_ic, margin);
        tr.record(0, a, margin);
    }
    r.details = {{"worst_equation_margin", worst_pde}, {"worst_lateral_margin", worst_bc}, {"worst_initial_margin", worst_ic}};
    return r;
}

VerificationReport check_supersolution(const ProblemSpec& p, const SpaceTimeField& u, const CheckOptions& opts) {
    require_full(p, u);
    VerificationReport r;
    r.check = "supersolution";
    r.tol = opts.tol;
    const GridDomain& dom = *p.domain;
    Tracker tr(r, dom, p.time);
    std::vector<double> F, rhs;
    double worst_pde = kInf;
    double outside = 0;
    for (int m = 1; m <= p.time.M; ++m) {
        equation_terms(p, u, m, opts.eps_g, F, rhs);
        for (std::size_t pos = 0; pos < F.size(); ++pos) {
            // cone guard: outside the closed cone the inequality holds vacuously
            double margin = kInf;
            if (F[pos] == -kInf) {
                ++outside;
            } else {
                margin = rhs[pos] - F[pos];
            }
            worst_pde = std::min(worst_pde, margin);
            tr.record(m, dom.interior()[pos], margin);
        }
    }
    double worst_bc = kInf;
    for (int m = 0; m <= p.time.M; ++m) {
        for (std::size_t a : dom.boundary()) {
            const double margin = u.at(m, a) - p.boundary_value(p.time.t(m), a);
            worst_bc = std::min(worst_bc, margin);
            tr.record(m, a, margin);
        }
    }
    double worst_ic = kInf;
    for (std::size_t a = 0; a < dom.active_count(); ++a) {
        const double margin = u.at(0, a) - p.u0[a];
        worst_ic = std::min(worst_ic, margin);
        tr.record(0, a, margin);
    }
    r.details = {{"worst_equation_margin", worst_pde},
                 {"worst_lateral_margin", worst_bc},
                 {"worst_initial_margin", worst_ic},
                 {"outside_cone_nodes", outside}};
    return r;
}

VerificationReport check_comparison(const SpaceTimeField& u, const SpaceTimeField& v, double tol) {
    if (!u.same_grid(v)) throw ArgumentError("grid mismatch: comparison needs fields on a common grid");
    const GridDomain& dom = *u.domain();
    if (u.m_begin() != 0) throw ArgumentError("comparison needs fields that include t = 0");
    VerificationReport r;
    r.check = "comparison";
    r.tol = tol;

    double boundary = 0.0;  // sup of (u - v)_+
    for (std::size_t a = 0; a < dom.active_count(); ++a) boundary = std::max(boundary, u.at(0, a) - v.at(0, a));
    for (int m = 1; m <= u.m_end(); ++m)
        for (std::size_t a : dom.boundary()) boundary = std::max(boundary, u.at(m, a) - v.at(m, a));

    double interior = -kInf;
    Tracker tr(r, dom, u.time());
    for (int m = 1; m <= u.m_end(); ++m) {
        for (std::size_t a : dom.interior()) {
            const double d = u.at(m, a) - v.at(m, a);
            interior = std::max(interior, d);
            tr.record(m, a, boundary - d);
        }
    }
    r.details = {{"interior_sup", interior}, {"boundary_sup", boundary}};
    return r;
}

VerificationReport check_gamma_sh_slice(const SpaceTimeField& u, double t0, const ConeSpec& cone, double slack) {
    const int m = u.time().index_of(t0);
    if (!u.has_time(m)) throw ArgumentError("time is outside the field's window");
    const GridDomain& dom = *u.domain();
    if (cone.n != dom.n()) throw ArgumentError("cone dimension does not match domain");
    VerificationReport r;
    r.check = "gamma_sh_slice";
    r.tol = slack;
    Tracker tr(r, dom, u.time());
    const auto s = u.slice(m);
    std::vector<double> margin(dom.interior().size());
    const SymOpSpec op = SymOpSpec::sigma_k_root(cone.n, cone.k);
    const auto so = slice_operator(dom, op, s, slack, Exec::parallel);
    for (std::size_t pos = 0; pos < margin.size(); ++pos) {
        const auto e = elementary_symmetric_all(so.eigen(pos));
        double mg = kInf;
        for (int l = 1; l <= cone.k; ++l) mg = std::min(mg, e[static_cast<std::size_t>(l)]);
        // in_cone is strict: sigma_l > -slack
        if (mg <= -slack) mg = std::min(mg, std::nextafter(-slack, -kInf));
        tr.record(m, dom.interior()[pos], mg);
    }
    return r;
}

VerificationReport check_gamma_sh_all(const SpaceTimeField& u, const ConeSpec& cone, double slack) {
    VerificationReport all;
    all.check = "gamma_sh_slices";
    all.tol = slack;
    double failed_slices = 0;
    for (int m = u.m_begin(); m <= u.m_end(); ++m) {
        const auto r = check_gamma_sh_slice(u, u.time().t(m), cone, slack);
        all.tested += r.tested;
        all.failed += r.failed;
        if (!r.pass) {
            all.pass = false;
            ++failed_slices;
        }
        if (r.worst && (!all.worst || r.worst->margin < all.worst->margin)) all.worst = r.worst;
    }
    all.details = {{"slices", static_cast<double>(u.m_end() - u.m_begin() + 1)}, {"failed_slices", failed_slices}};
    return all;
}

VerificationReport check_admissible(const ProblemSpec& p, const AdmissibilityWitness& w, double tol) {
    const GridDomain& dom = *p.domain;
    if (w.u_eps.size() != dom.active_count()) throw ArgumentError("witness does not match the grid");
    VerificationReport r;
    r.check = "admissible";
    r.tol = tol;
    Tracker tr(r, dom, p.time);
    double worst_sandwich = kInf;
    for (std::size_t a = 0; a < dom.active_count(); ++a) {
        const double lo = w.u_eps[a] - p.u0[a];
        const double hi = p.u0[a] + w.epsilon - w.u_eps[a];
        worst_sandwich = std::min({worst_sandwich, lo, hi});
        tr.record(0, a, lo);
        tr.record(0, a, hi);
    }
    const auto so = slice_operator(dom, p.op, w.u_eps, -1.0, Exec::parallel);
    const double bound = std::exp(w.C_eps);
    double worst_op = kInf;
    for (std::size_t pos = 0; pos < so.F.size(); ++pos) {
        const std::size_t a = dom.interior()[pos];
        const double margin = so.F[pos] == -kInf ? kInf : bound * p.g[a] - so.F[pos];
        worst_op = std::min(worst_op, margin);
        tr.record(0, a, margin);
    }
    r.details = {{"C_eps", w.C_eps}, {"epsilon", w.epsilon}, {"worst_sandwich_margin", worst_sandwich},
                 {"worst_operator_margin", worst_op}};
    return r;
}

AdmissibilityWitness extract_admissibility_witness(const ProblemSpec& p, const SpaceTimeField& u, double eps,
                                                   ExtractionInfo* info) {
    require_full(p, u);
    if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
    const GridDomain& dom = *p.domain;
    const TimeGrid& tg = p.time;
    const double osc = u.oscillation();
    const double A = 2.0 * osc + 1e-9 * (1.0 + u.max_abs());

    double umax = -kInf;
    for (double v : u.values()) umax = std::max(umax, v);
    double C = -kInf;
    for (int m = 0; m <= tg.M; ++m)
        for (std::size_t a = 0; a < dom.active_count(); ++a) C = std::max(C, p.G_at(m, a, umax));

    for (int d = 1; d < tg.M; ++d) {
        double gap = 0.0;
        for (std::size_t a = 0; a < dom.active_count(); ++a) gap = std::max(gap, std::abs(u.at(d, a) - p.u0[a]));
        if (!(gap < 0.25 * eps)) break;
        const double delta = tg.t(d);
        // smallest power of two with delta inside (A/k, T - A/k)
        const double kmin = std::max(A / delta, A / (tg.T - delta)) * (1.0 + 1e-9);
        double k = std::exp2(std::ceil(std::log2(std::max(kmin, 2.0 * A / tg.T * (1.0 + 1e-9)))));
        for (int it = 0; it < 200; ++it, k *= 2.0) {
            const auto uk = inf_convolution_time(u, k, A);
            if (!uk.has_time(d)) continue;
            double dev = 0.0;
            for (std::size_t a = 0; a < dom.active_count(); ++a) dev = std::max(dev, std::abs(uk.at(d, a) - u.at(d, a)));
            if (dev < 0.25 * eps) {
                AdmissibilityWitness w;
                w.epsilon = eps;
                w.u_eps.resize(dom.active_count());
                for (std::size_t a = 0; a < w.u_eps.size(); ++a) w.u_eps[a] = uk.at(d, a) + 0.5 * eps;
                w.C_eps = k + C;
                if (info) *info = ExtractionInfo{d, k, A, C};
                return w;
            }
            if (A / k < tg.dt()) break;  // window is the node itself: nothing left to gain
        }
    }
    throw NumericalError("admissibility witness extraction failed: no time node delta and k0 within grid "
                         "resolution; use a finer time grid");
}

AdmissibilityWitness trivial_witness(const ProblemSpec& p, double eps) {
    const GridDomain& dom = *p.domain;
    const auto so = slice_operator(dom, p.op, p.u0, -1.0, Exec::parallel);
    double C = 0.0;
    for (std::size_t pos = 0; pos < so.F.size(); ++pos) {
        const double F = so.F[pos];
        if (!(F > 0.0)) continue;
        const double g = p.g[dom.interior()[pos]];
        if (!(g > 0.0))
            throw PreconditionError("no trivial admissibility witness: F(H u0) > 0 where g = 0");
        C = std::max(C, std::log(F / g));
    }
    // rounding headroom so the witness passes at zero tolerance
    C += 1e-12 * (1.0 + C);
    return AdmissibilityWitness{p.u0, C, eps};
}

VerificationReport check_envelope_stability(const ProblemSpec& p, const std::vector<SpaceTimeField>& fields,
                                            const CheckOptions& opts) {
    VerificationReport r;
    r.check = "envelope_stability";
    r.tol = opts.tol;
    if (fields.empty()) throw ArgumentError("envelope of an empty family");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (!check_subsolution(p, fields[i], opts).pass) {
            r.pass = false;
            r.failed = 1;
            r.note = "precondition violated: input " + std::to_string(i) + " is not a subsolution";
            return r;
        }
    }
    SpaceTimeField env = fields.front();
    for (std::size_t i = 1; i < fields.size(); ++i) {
        if (!fields[i].same_grid(env)) throw ArgumentError("grid mismatch in envelope family");
        for (int m = 0; m <= env.m_end(); ++m)
            for (std::size_t a = 0; a < env.node_count(); ++a) env.at(m, a) = std::max(env.at(m, a), fields[i].at(m, a));
    }
    auto sub = check_subsolution(p, env, opts);
    sub.check = r.check;
    return sub;
}

}  // namespace parahess
