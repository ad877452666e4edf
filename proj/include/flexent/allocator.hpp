#pragma once

#include <string>
#include <vector>

#include "flexent/metrics.hpp"

namespace flexent {

struct AllocationRequest {
    std::string id;
    double target_ebr = 0.0; // ebits/s against the conservative r_i basis
    int priority = 0;        // larger value served first
};

struct Assignment {
    std::string id;
    int first_k = 0; // inclusive channel range
    int last_k = 0;
    double summed_r_i = 0.0;
};

struct AllocationPlan {
    std::vector<Assignment> assignments; // in service order
    int ports_used_c = 0;
    int ports_used_l = 0;
    std::vector<std::string> unmet;
    // Caveat attached to every plan: per-channel lower bounds are summed
    // even though entanglement rates are not strictly additive.
    std::string summed_r_i_note;
};

// Greedy port-constrained provisioning: requests in (priority desc, id asc)
// order each take the smallest contiguous block of unassigned channels
// whose summed r_i meets the target (leftmost such block on ties) and
// consume one port per band. Requests that cannot be met are listed.
AllocationPlan allocate(std::vector<AllocationRequest> requests,
                        const std::vector<EntanglementReport>& channel_reports,
                        int c_ports, int l_ports);

} // namespace flexent
