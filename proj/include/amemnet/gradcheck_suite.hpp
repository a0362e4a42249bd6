#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amemnet {

struct GradCheckGroup {
    std::string name;
    double max_rel_err = 0.0;
};

// Analytic vs central finite-difference gradients of the full D and G
// objectives on a miniature model (d=6, h=3, hidden=4, N=4, K=3, B=2),
// reported per parameter group, plus standalone primitive checks.
std::vector<GradCheckGroup> run_gradcheck_suite(std::uint64_t seed);

bool gradcheck_passes(const std::vector<GradCheckGroup>& groups, double tol = 1e-4);

}  // namespace amemnet
