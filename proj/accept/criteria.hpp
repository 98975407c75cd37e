#pragma once
// Acceptance gate: one self-contained check per shipped guarantee, each
// judged against the independent oracles in oracles.hpp or against frozen
// closed-form values. Every check prints a single pass/fail verdict; the
// suite refuses to pass on indeterminate or partially-run checks.

#include <string>
#include <vector>

namespace rwre::accept {

struct CriterionResult {
    std::string id;
    bool pass = false;
    std::string details;
    double ms = 0.0;
};

// Stable ordering A1..A9.
const std::vector<std::string>& criterion_ids();

// cli_path is the rwre-lab binary used by the end-to-end reproducibility
// check (A9); the other criteria ignore it. Unknown ids fail rather than
// throw. Exceptions inside a criterion are caught and turned into failures.
CriterionResult run_criterion(const std::string& id, const std::string& cli_path);

std::vector<CriterionResult> run_all(const std::string& cli_path);

}  // namespace rwre::accept
