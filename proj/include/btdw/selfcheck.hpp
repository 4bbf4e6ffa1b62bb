#pragma once

#include <string>
#include <vector>

namespace btdw {

struct SelfCheck {
    std::string name;
    bool passed = false;
    std::string detail;  ///< worst error or the failure message
};

/// Fixture checks behind the `validate` subcommand: the printed five-node q4 against the
/// recurrence and enumeration, squid spectral data, star closed forms, circulant alpha*,
/// and agreement of the three exponential routes. Each check runs independently; none throw.
std::vector<SelfCheck> run_self_checks();

}  // namespace btdw
