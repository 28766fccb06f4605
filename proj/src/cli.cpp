#include "parahess/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "parahess/errors.hpp"
#include "parahess/report.hpp"
#include "parahess/suites.hpp"

namespace parahess {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Maps the library's exception families onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ArgumentError& e) {
        err << "argument error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        err << "io error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << "\n";
        return kExitCheck;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitCheck;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

std::string out_path(const CliOptions& o, const std::string& file) {
    fs::create_directories(o.out);
    return (fs::path(o.out) / file).string();
}

ProblemSpec load_problem(const RunConfig& c, std::uint64_t seed) {
    auto p = build_problem(c);
    ValidationOptions vo;
    vo.seed = seed;
    validate_problem(p, vo);
    return p;
}

std::string source_of(const CliOptions& o) { return o.config.empty() ? "preset:" + o.preset : o.config; }

json manifest(const std::string& sub, const CliOptions& o, const RunConfig& c, const std::vector<std::string>& outputs,
              double seconds) {
    return {{"subcommand", sub},
            {"source", source_of(o)},
            {"config", config_to_ini(c)},
            {"outputs", outputs},
            {"seed", o.seed},
            {"threads", parallel_threads()},
            {"wall_clock_seconds", seconds}};
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

}  // namespace

RunConfig resolve_config(const CliOptions& o) {
    if (o.config.empty() == o.preset.empty()) throw ArgumentError("give exactly one of --config and --preset");
    RunConfig c = o.config.empty() ? preset_config(o.preset) : load_config(o.config);
    if (!o.scheme.empty()) c.solver.scheme = parse_scheme(o.scheme);
    return c;
}

int cmd_solve(const CliOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const RunConfig c = resolve_config(o);
        const auto p = load_problem(c, o.seed);
        const auto result = solve(p, c.solver);
        const bool pass = result.certified() && result.subbarrier.certified() && result.superbarrier.certified();

        const std::vector<std::string> files = {"solution.csv", "diagnostics.json", "certificates.json"};
        write_file_atomic(out_path(o, files[0]), field_csv_string(result.field));
        write_file_atomic(out_path(o, files[1]), diagnostics_json(result).dump(2) + "\n");
        write_file_atomic(out_path(o, files[2]), certificates_json(result).dump(2) + "\n");
        write_file_atomic(out_path(o, "manifest.json"),
                          manifest("solve", o, c, files, elapsed(t0)).dump(2) + "\n");

        out << "problem " << c.name << ": " << p.domain->active_count() << " nodes, " << p.time.M << " steps\n";
        for (const auto& run : result.runs) {
            out << "  " << scheme_name(run.scheme) << ": " << verdict(run.certificates.pass());
            for (const auto* r : run.certificates.all())
                if (!r->pass) out << " [" << r->check << " failed at " << r->failed << " nodes]";
            out << "\n";
        }
        if (result.cross_gap) out << "  cross_gap " << *result.cross_gap << "\n";
        out << "certificates " << verdict(pass) << "\n";
        return pass ? kExitOk : kExitCheck;
    });
}

int cmd_verify(const CliOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig c = resolve_config(o);
        if (o.field.empty()) throw ArgumentError("verify needs --field");
        const std::vector<std::string> known = {"subsolution",    "supersolution",    "gamma_sh",
                                                "comparison_sub", "comparison_super", "admissible"};
        std::vector<std::string> checks;
        if (o.checks.empty() || o.checks == "all") {
            checks = known;
        } else {
            std::stringstream ss(o.checks);
            for (std::string item; std::getline(ss, item, ',');) {
                if (std::find(known.begin(), known.end(), item) == known.end())
                    throw ArgumentError("unknown check '" + item + "'");
                checks.push_back(item);
            }
        }
        const auto p = load_problem(c, o.seed);
        if (!fs::exists(o.field)) throw ConfigError("cannot read field file " + o.field);
        const auto u = read_field_csv(o.field, p.domain, p.time);
        const double tol = o.tol.value_or(c.solver.tol_certificate);
        const CheckOptions co{tol, c.solver.eps_g};

        std::optional<BarrierBundle> sub, super;
        auto barriers = [&] {
            if (sub) return;
            BarrierOptions bo;
            bo.tol_b = c.solver.tol_barrier;
            bo.eps_g = c.solver.eps_g;
            const double eps = c.solver.barrier_eps;
            sub = build_subbarrier(p, eps, bo);
            super = build_superbarrier(p, eps, trivial_witness(p, eps), bo);
        };

        json reports = json::array();
        bool pass = true;
        for (const auto& name : checks) {
            VerificationReport r;
            if (name == "subsolution") {
                r = check_subsolution(p, u, co);
            } else if (name == "supersolution") {
                r = check_supersolution(p, u, co);
            } else if (name == "gamma_sh") {
                r = check_gamma_sh_all(u, p.op.cone(), 1e-6 * (1.0 + u.max_abs()));
            } else if (name == "comparison_sub") {
                barriers();
                r = check_comparison(sub->field, u, tol);
                r.check = "comparison_subbarrier";
            } else if (name == "comparison_super") {
                barriers();
                r = check_comparison(u, super->field, tol);
                r.check = "comparison_superbarrier";
            } else {
                r = check_admissible(p, trivial_witness(p, c.solver.barrier_eps), tol);
            }
            pass = pass && r.pass;
            out << r.check << " " << verdict(r.pass);
            if (!r.pass && r.worst) out << " (worst node " << r.worst->node << ", t=" << r.worst->t << ", margin " << r.worst->margin << ")";
            out << "\n";
            reports.push_back(report_json(r));
        }
        write_file_atomic(out_path(o, "verify_reports.json"), reports.dump(2) + "\n");
        return pass ? kExitOk : kExitCheck;
    });
}

int cmd_convergence(const CliOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (o.levels < 2) throw ArgumentError("convergence needs --levels >= 2");
        const RunConfig base = resolve_config(o);
        const auto exact = exact_solution(base);
        if (!exact) throw ConfigError("convergence needs a [data] exact expression");

        std::ostringstream csv;
        csv << "level,h,dt,max_err,order,perron_err,explicit_err,cross_gap,bound_5h2\n";
        auto flush = [&] {
            write_file_atomic(out_path(o, "convergence.csv"), csv.str());
            out << csv.str();
        };
        double prev = NAN;
        bool pass = true;
        for (int level = 0; level < o.levels; ++level) {
            const RunConfig c = refine(base, level);
            SolveResult result;
            ProblemSpec p;
            try {
                p = load_problem(c, o.seed);
                result = solve(p, c.solver);
            } catch (...) {
                flush();
                throw;
            }
            std::map<Scheme, double> errs;
            for (const auto& run : result.runs) {
                double e = 0.0;
                for (int m = 0; m <= p.time.M; ++m)
                    for (std::size_t a = 0; a < p.domain->active_count(); ++a)
                        e = std::max(e, std::abs(run.field.at(m, a) - (*exact)(p.time.t(m), p.domain->coords(a))));
                errs[run.scheme] = e;
            }
            pass = pass && result.certified();
            double max_err = 0.0;
            for (const auto& [s, e] : errs) max_err = std::max(max_err, e);
            auto sci = [](std::optional<double> v) {
                if (!v) return std::string();
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.6e", *v);
                return std::string(buf);
            };
            auto err_of = [&](Scheme s) {
                const auto it = errs.find(s);
                return it == errs.end() ? std::optional<double>() : std::optional<double>(it->second);
            };
            const std::optional<double> order =
                level == 0 ? std::nullopt : std::optional<double>(std::log2(prev / max_err));
            char line[512];
            std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%s,%s,%s,%s,%s,%s\n", level, c.h, p.time.dt(),
                          sci(max_err).c_str(), sci(order).c_str(), sci(err_of(Scheme::perron)).c_str(),
                          sci(err_of(Scheme::explicit_euler)).c_str(), sci(result.cross_gap).c_str(),
                          sci(5.0 * c.h * c.h).c_str());
            csv << line;
            prev = max_err;
        }
        flush();
        return pass ? kExitOk : kExitCheck;
    });
}

int cmd_selftest(const CliOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (!o.fixture.empty() && o.fixture != "bad_f") throw ArgumentError("unknown fixture '" + o.fixture + "'");
        std::vector<SuiteResult> suites;
        suites.push_back(axiom_suite(2000, o.seed, o.fixture == "bad_f"));
        suites.push_back(convolution_suite(20, o.seed));
        suites.push_back(barrier_suite(o.seed));
        suites.push_back(comparison_suite(4, o.seed));
        bool pass = true;
        for (const auto& s : suites) {
            out << s.name << " " << verdict(s.pass) << " (" << s.summary << ")\n";
            for (const auto& f : s.failures) out << "  " << f << "\n";
            pass = pass && s.pass;
        }
        return pass ? kExitOk : kExitCheck;
    });
}

}  // namespace parahess
