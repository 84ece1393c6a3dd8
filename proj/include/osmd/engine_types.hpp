#pragma once

#include "osmd/core.hpp"

#include <cstdint>
#include <vector>

namespace osmd {

struct Checkpoint {
    int t;
    double cum_regret;
};

/// Cumulative realised regret Σ_{s≤t} ⟨A_s − a*, ℓ_s⟩ at selected rounds, with
/// a* the best action over the whole horizon. The sums may dip.
struct RegretTrace {
    std::uint64_t run_id = 0;
    std::vector<Checkpoint> checkpoints;
    Vector final_iterate;
    double eta = 0.0;
};

/// Powers of two up to n, plus n itself.
std::vector<int> geometric_checkpoints(int n);

}  // namespace osmd
