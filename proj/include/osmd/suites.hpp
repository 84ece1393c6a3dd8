#pragma once

#include <functional>
#include <string>
#include <vector>

namespace osmd {

/// One inequality or identity checked by a suite.
struct SuiteCheck {
    std::string name;
    bool passed;
    std::string detail;  // measured value against its threshold
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteCheck> checks;
    double seconds = 0.0;

    bool passed() const;
};

/// Names accepted by run_suite, in the order `all` runs them.
const std::vector<std::string>& suite_names();

/// Runs a named suite: unbiased, exp3, lemma4, graph, lp, bayes or all.
/// `workers` parallelises the regret runs inside the graph and lp suites.
std::vector<SuiteResult> run_suite(const std::string& name, int workers = 1);

SuiteResult unbiased_suite();
SuiteResult exp3_suite();
SuiteResult lemma4_suite();
SuiteResult graph_suite(int workers = 1);
SuiteResult lp_suite(int workers = 1);
SuiteResult bayes_suite();

}  // namespace osmd
