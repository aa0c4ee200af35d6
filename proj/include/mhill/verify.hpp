#pragma once

#include <string>
#include <vector>

namespace mhill {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;  // worst observed residual / quantity under test
    double threshold = 0.0; // acceptance bar, pinned in code
    std::string detail;
    double seconds = 0.0;
};

// Named verification suites:
//   free            exactness of the free operator
//   constant-oracle engine vs the a = 3 closed form
//   delta-oracle    engine vs the kick-comb closed form
//   smoothed-delta  mollified comb converging to the kick comb
//   counting        zero counts of rho and D+- at desk scale
//   splitting       resonance splitting and its gamma scaling
//   identities      trace/discriminant/multiplier identities
//   bands           band positivity and interior monotonicity
//   asymptotics     high-energy eigenvalue/resonance residual decay
//   reconstruction  spectral-determinant product versus direct values
//   series-bound    truncated series within its majorant
//   acceptance      all of the above in order
std::vector<CheckResult> run_suite(const std::string& suite, int n_max = 30);

std::vector<std::string> suite_names();

} // namespace mhill
