#include "flexent/allocator.hpp"

#include <algorithm>
#include <set>

#include "flexent/errors.hpp"

namespace flexent {

AllocationPlan allocate(std::vector<AllocationRequest> requests,
                        const std::vector<EntanglementReport>& channel_reports,
                        int c_ports, int l_ports) {
    if (c_ports < 0 || l_ports < 0)
        throw ValidationError("allocate: port counts must be nonnegative");
    if (channel_reports.empty())
        throw ValidationError("allocate: no channel reports to allocate from");
    {
        std::set<std::string> ids;
        for (const auto& r : requests) {
            if (r.id.empty())
                throw ValidationError("allocate: request with empty id");
            if (!(r.target_ebr >= 0.0))
                throw ValidationError("allocate: request '" + r.id +
                                      "' has a negative EBR target");
            if (!ids.insert(r.id).second)
                throw ValidationError("allocate: duplicate request id '" + r.id + "'");
        }
    }

    // rates indexed by channel order; contiguity is in plan order
    std::vector<double> r_i;
    std::vector<int> ks;
    {
        std::vector<const EntanglementReport*> sorted;
        sorted.reserve(channel_reports.size());
        for (const auto& rep : channel_reports) sorted.push_back(&rep);
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto* a, const auto* b) { return a->k < b->k; });
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i]->k == sorted[i - 1]->k)
                throw ValidationError("allocate: duplicate channel report for k=" +
                                      std::to_string(sorted[i]->k));
        for (const auto* rep : sorted) {
            r_i.push_back(rep->r_i);
            ks.push_back(rep->k);
        }
    }
    const int n = static_cast<int>(r_i.size());

    std::sort(requests.begin(), requests.end(), [](const auto& a, const auto& b) {
        if (a.priority != b.priority) return a.priority > b.priority;
        return a.id < b.id;
    });

    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i)
        prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + r_i[static_cast<std::size_t>(i)];
    auto window_sum = [&](int first, int len) {
        return prefix[static_cast<std::size_t>(first + len)] - prefix[static_cast<std::size_t>(first)];
    };

    AllocationPlan plan;
    plan.summed_r_i_note =
        "summed r_i treats per-channel lower bounds as additive; the "
        "aggregate is an estimate, not a guarantee";
    std::vector<bool> taken(static_cast<std::size_t>(n), false);

    for (const auto& req : requests) {
        if (plan.ports_used_c >= c_ports || plan.ports_used_l >= l_ports) {
            plan.unmet.push_back(req.id);
            continue;
        }
        int found_first = -1, found_len = 0;
        for (int len = 1; len <= n && found_first < 0; ++len) {
            for (int first = 0; first + len <= n; ++first) {
                bool free = true;
                for (int i = first; i < first + len; ++i)
                    if (taken[static_cast<std::size_t>(i)]) {
                        free = false;
                        break;
                    }
                if (free && window_sum(first, len) >= req.target_ebr) {
                    found_first = first;
                    found_len = len;
                    break;
                }
            }
        }
        if (found_first < 0) {
            plan.unmet.push_back(req.id);
            continue;
        }
        for (int i = found_first; i < found_first + found_len; ++i)
            taken[static_cast<std::size_t>(i)] = true;
        plan.assignments.push_back({req.id, ks[static_cast<std::size_t>(found_first)],
                                    ks[static_cast<std::size_t>(found_first + found_len - 1)],
                                    window_sum(found_first, found_len)});
        ++plan.ports_used_c;
        ++plan.ports_used_l;
    }
    return plan;
}

} // namespace flexent
