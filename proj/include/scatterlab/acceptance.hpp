#ifndef SCATTERLAB_ACCEPTANCE_HPP
#define SCATTERLAB_ACCEPTANCE_HPP

#include <string>
#include <vector>

#include "scatterlab/config.hpp"

namespace scatterlab::accept {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<int> all_criteria();
CriterionResult run_criterion(int id, const cli::Config& cfg);
std::vector<CriterionResult> run(const std::vector<int>& ids, const cli::Config& cfg);

// One line per criterion: "[PASS|FAIL] <id> <name> (<t>s) <detail>"
std::string format_line(const CriterionResult& r);

}  // namespace scatterlab::accept

#endif
