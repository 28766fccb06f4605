#pragma once

// JSON serialization of verification reports, solve diagnostics and run
// manifests. Non-finite numbers serialize as null.

#include <json.hpp>

#include "parahess/barriers.hpp"
#include "parahess/solver.hpp"
#include "parahess/verify.hpp"

namespace parahess {

/// {"check","pass","tol","worst":{"t","z","margin"},"tested","failed"} plus
/// "details" and "note" when present.
nlohmann::json report_json(const VerificationReport& r);

/// {"side","epsilon","constants":{...},"certificate":{...},"sandwich":{...}}
nlohmann::json barrier_json(const BarrierBundle& b);

/// {"scheme","sweeps","dt_history","residual_sup","cross_gap","runs":[...]}
nlohmann::json diagnostics_json(const SolveResult& r);

/// {"barriers":[...],"runs":[{"scheme","certificate_tol","reports":[...]}],"pass"}
nlohmann::json certificates_json(const SolveResult& r);

}  // namespace parahess
