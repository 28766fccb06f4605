#include "parahess/report.hpp"

#include <cmath>

namespace parahess {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

json run_json(const SchemeRun& run) {
    json flagged = json::array();
    for (const auto& [m, node] : run.flagged) flagged.push_back({{"m", m}, {"node", node}});
    return {{"scheme", scheme_name(run.scheme)},
            {"sweeps", run.sweeps},
            {"converged", run.converged},
            {"rejected_steps", run.rejected_steps},
            {"dt_history", numbers(run.dt_history)},
            {"residual_sup", numbers(run.residual_sup)},
            {"flagged_nodes", flagged}};
}

}  // namespace

json report_json(const VerificationReport& r) {
    json j = {{"check", r.check}, {"pass", r.pass}, {"tol", number(r.tol)}, {"tested", r.tested}, {"failed", r.failed}};
    if (r.worst) {
        j["worst"] = {{"t", r.worst->t}, {"m", r.worst->m}, {"node", r.worst->node}, {"z", r.worst->z},
                      {"margin", number(r.worst->margin)}};
    } else {
        j["worst"] = nullptr;
    }
    if (!r.details.empty()) {
        json d = json::object();
        for (const auto& [k, v] : r.details) d[k] = number(v);
        j["details"] = d;
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json barrier_json(const BarrierBundle& b) {
    json c = {{"searches", b.constants.searches}};
    if (b.side == BarrierSide::sub) {
        c["M1"] = b.constants.M1;
        c["M2"] = b.constants.M2;
    } else {
        c["C_eps"] = b.constants.C_eps;
        c["M1_prime"] = b.constants.M1_prime;
    }
    return {{"side", b.side == BarrierSide::sub ? "sub" : "super"},
            {"epsilon", b.epsilon},
            {"constants", c},
            {"certificate", report_json(b.certificate)},
            {"sandwich", report_json(b.sandwich)}};
}

json diagnostics_json(const SolveResult& r) {
    const SchemeRun& p = r.primary();
    json runs = json::array();
    for (const auto& run : r.runs) runs.push_back(run_json(run));
    return {{"scheme", scheme_name(r.scheme)},
            {"sweeps", p.sweeps},
            {"dt_history", numbers(p.dt_history)},
            {"residual_sup", numbers(p.residual_sup)},
            {"cross_gap", r.cross_gap ? number(*r.cross_gap) : json(nullptr)},
            {"runs", runs},
            {"barriers", {barrier_json(r.subbarrier), barrier_json(r.superbarrier)}}};
}

json certificates_json(const SolveResult& r) {
    json runs = json::array();
    for (const auto& run : r.runs) {
        json reports = json::array();
        for (const auto* rep : run.certificates.all()) reports.push_back(report_json(*rep));
        runs.push_back({{"scheme", scheme_name(run.scheme)},
                        {"certificate_tol", run.certificate_tol},
                        {"pass", run.certificates.pass()},
                        {"reports", reports}});
    }
    return {{"barriers", {barrier_json(r.subbarrier), barrier_json(r.superbarrier)}},
            {"runs", runs},
            {"pass", r.certified() && r.subbarrier.certified() && r.superbarrier.certified()}};
}

}  // namespace parahess
