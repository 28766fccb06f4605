#pragma once

// Invariant suites shared by the selftest subcommand and the acceptance
// harness. Each suite is deterministic for a given seed.

#include <cstdint>
#include <string>
#include <vector>

namespace parahess {

struct SuiteResult {
    std::string name;
    bool pass = true;
    std::string summary;
    std::vector<std::string> failures;
};

/// Operator axioms for sigma_k^{1/k}, (n,k) in {(2,1),(2,2),(3,2),(3,3)}.
/// `bad_fixture` adds f = sum x_i^2, which must fail concavity.
SuiteResult axiom_suite(std::size_t samples, std::uint64_t seed, bool bad_fixture = false);

/// Sandwich, k-Lipschitz (all time pairs) and idempotence of the time
/// sup/inf-convolutions on random Lipschitz-in-t fields; exact to 1e-14.
SuiteResult convolution_suite(int fields, std::uint64_t seed);

/// Sub/superbarrier certificates, their ordering, the decomposition audit
/// and the harmonic-extension maximum principle on small problems.
SuiteResult barrier_suite(std::uint64_t seed);

/// Randomized comparison audits: subbarrier vs superbarrier and solutions
/// with ordered data.
SuiteResult comparison_suite(int problems, std::uint64_t seed);

}  // namespace parahess
