#ifndef CASIMIR_VERIFY_HPP
#define CASIMIR_VERIFY_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace casimir {

// Deliberate transcription fault for probing that the suite actually bites.
enum class Mutation { None, Eq14SignFlip };

struct VerifyOptions {
    bool quick = false;  // reduced grids and dimensions, tolerances relaxed to 1e-4
    int jobs = 0;
    Mutation mutation = Mutation::None;
    std::vector<int> criteria; // subset of 1..9; empty runs all
};

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts);

// Prints one pass/fail line per criterion; returns 0 iff all pass.
int run_verify(const VerifyOptions& opts, std::ostream& out);

} // namespace casimir

#endif
