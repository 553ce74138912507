#pragma once

// Reference values produced by gen_stats_oracle.py (scipy), frozen into the
// repository so the tests never depend on the implementation they check.

#include <utility>
#include <vector>

namespace freqbench::oracle {

struct WelchOracleCase {
    std::vector<double> a;
    std::vector<double> b;
    double t;
    double df;
    double p;
};

struct TCdfOracleCase {
    double t;
    double df;
    double cdf;
};

#include "oracles/stats_oracle.inc"

} // namespace freqbench::oracle
