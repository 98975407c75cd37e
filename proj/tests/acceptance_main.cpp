// Acceptance gate runner: one line per criterion, nonzero exit when any
// criterion fails. --cli names the rwre-lab binary for the end-to-end check.

#include <cstring>
#include <iostream>
#include <string>

#include "criteria.hpp"

int main(int argc, char** argv) {
    std::string cli_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--cli") == 0) cli_path = argv[i + 1];

    bool all_pass = true;
    for (const auto& r : rwre::accept::run_all(cli_path)) {
        all_pass = all_pass && r.pass;
        std::cout << r.id << " " << (r.pass ? "PASS" : "FAIL") << " ("
                  << static_cast<long long>(r.ms) << " ms) " << r.details << std::endl;
    }
    std::cout << (all_pass ? "acceptance: all criteria PASS" : "acceptance: FAILURES present")
              << std::endl;
    return all_pass ? 0 : 1;
}
