#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "flexent/allocator.hpp"
#include "flexent/errors.hpp"
#include "flexent/rng.hpp"

using namespace flexent;

namespace {

std::vector<EntanglementReport> uniform_channels(int n, double r_i) {
    std::vector<EntanglementReport> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        EntanglementReport rep;
        rep.k = k;
        rep.r_i = r_i;
        rep.r_n = r_i * 1.2;
        out.push_back(rep);
    }
    return out;
}

// Independent feasibility check: replay the plan and verify every grant.
void check_plan_integrity(const AllocationPlan& plan,
                          const std::vector<AllocationRequest>& requests,
                          const std::vector<EntanglementReport>& channels,
                          int c_ports, int l_ports) {
    std::set<int> taken;
    double target_of = 0.0;
    for (const Assignment& a : plan.assignments) {
        REQUIRE(a.first_k >= channels.front().k);
        REQUIRE(a.last_k <= channels.back().k);
        REQUIRE(a.first_k <= a.last_k);
        double sum = 0.0;
        for (int k = a.first_k; k <= a.last_k; ++k) {
            CHECK(taken.insert(k).second); // no double assignment
            sum += channels[static_cast<std::size_t>(k - 1)].r_i;
        }
        CHECK(a.summed_r_i == doctest::Approx(sum).epsilon(1e-12));
        target_of = 0.0;
        for (const AllocationRequest& r : requests)
            if (r.id == a.id) target_of = r.target_ebr;
        CHECK(sum >= target_of - 1e-9);
    }
    CHECK(plan.ports_used_c == static_cast<int>(plan.assignments.size()));
    CHECK(plan.ports_used_l == static_cast<int>(plan.assignments.size()));
    CHECK(plan.ports_used_c <= c_ports);
    CHECK(plan.ports_used_l <= l_ports);
    CHECK(plan.assignments.size() + plan.unmet.size() == requests.size());
    CHECK_FALSE(plan.summed_r_i_note.empty());
}

} // namespace

TEST_CASE("single request grabs one sufficient channel") {
    const auto channels = uniform_channels(150, 1158.0);
    const AllocationPlan plan =
        allocate({{"alice", 1000.0, 0}}, channels, 9, 20);
    REQUIRE(plan.assignments.size() == 1);
    CHECK(plan.assignments[0].id == "alice");
    CHECK(plan.assignments[0].first_k == 1);
    CHECK(plan.assignments[0].last_k == 1);
    CHECK(plan.assignments[0].summed_r_i == doctest::Approx(1158.0));
    CHECK(plan.ports_used_c == 1);
    CHECK(plan.ports_used_l == 1);
    CHECK(plan.unmet.empty());
}

TEST_CASE("ten equal requests against nine c-band ports") {
    const auto channels = uniform_channels(150, 1158.0);
    std::vector<AllocationRequest> reqs;
    for (int i = 0; i < 10; ++i)
        reqs.push_back({"tenant-" + std::to_string(i), 1000.0, 5});
    const AllocationPlan plan = allocate(reqs, channels, 9, 20);
    CHECK(plan.assignments.size() == 9);
    REQUIRE(plan.unmet.size() == 1);
    CHECK(plan.unmet[0] == "tenant-9"); // lexicographically last at equal priority
    CHECK(plan.ports_used_c == 9);
    check_plan_integrity(plan, reqs, channels, 9, 20);
}

TEST_CASE("high target spans five contiguous channels") {
    const auto channels = uniform_channels(150, 1158.0);
    const AllocationPlan plan = allocate({{"bulk", 5000.0, 0}}, channels, 9, 20);
    REQUIRE(plan.assignments.size() == 1);
    CHECK(plan.assignments[0].first_k == 1);
    CHECK(plan.assignments[0].last_k == 5); // 4x1158 = 4632 < 5000 <= 5x1158
    CHECK(plan.assignments[0].summed_r_i == doctest::Approx(5790.0));
}

TEST_CASE("input validation") {
    const auto channels = uniform_channels(10, 100.0);
    CHECK_THROWS_AS(allocate({{"a", 50.0, 0}, {"a", 60.0, 1}}, channels, 2, 2),
                    ValidationError);
    CHECK_THROWS_AS(allocate({{"a", -1.0, 0}}, channels, 2, 2), ValidationError);
    CHECK_THROWS_AS(allocate({{"", 1.0, 0}}, channels, 2, 2), ValidationError);
    CHECK_THROWS_AS(allocate({{"a", 1.0, 0}}, channels, -1, 2), ValidationError);
    CHECK_THROWS_AS(allocate({{"a", 1.0, 0}}, channels, 2, -1), ValidationError);
    CHECK_THROWS_AS(allocate({{"a", 1.0, 0}}, {}, 2, 2), ValidationError);

    auto dup = channels;
    dup[3].k = dup[2].k;
    CHECK_THROWS_AS(allocate({{"a", 1.0, 0}}, dup, 2, 2), ValidationError);
}

TEST_CASE("service order is priority desc then id asc") {
    const auto channels = uniform_channels(20, 100.0);
    const std::vector<AllocationRequest> reqs = {
        {"zeta", 100.0, 1},
        {"beta", 100.0, 7},
        {"alpha", 100.0, 7},
        {"omega", 100.0, 3},
    };
    const AllocationPlan plan = allocate(reqs, channels, 9, 20);
    REQUIRE(plan.assignments.size() == 4);
    CHECK(plan.assignments[0].id == "alpha");
    CHECK(plan.assignments[1].id == "beta");
    CHECK(plan.assignments[2].id == "omega");
    CHECK(plan.assignments[3].id == "zeta");
    // earlier service gets the leftmost block
    CHECK(plan.assignments[0].first_k == 1);
    CHECK(plan.assignments[1].first_k == 2);
}

TEST_CASE("equal-priority outcome is independent of input order") {
    const auto channels = uniform_channels(30, 100.0);
    std::vector<AllocationRequest> reqs = {
        {"a", 150.0, 2}, {"b", 250.0, 2}, {"c", 90.0, 2}, {"d", 410.0, 2},
    };
    const AllocationPlan base = allocate(reqs, channels, 4, 4);
    std::sort(reqs.begin(), reqs.end(),
              [](const auto& x, const auto& y) { return x.id > y.id; });
    const AllocationPlan perm = allocate(reqs, channels, 4, 4);
    REQUIRE(base.assignments.size() == perm.assignments.size());
    for (std::size_t i = 0; i < base.assignments.size(); ++i) {
        CHECK(base.assignments[i].id == perm.assignments[i].id);
        CHECK(base.assignments[i].first_k == perm.assignments[i].first_k);
        CHECK(base.assignments[i].last_k == perm.assignments[i].last_k);
    }
}

TEST_CASE("smallest sufficient window wins, leftmost on ties") {
    // channels: 1..3 weak, 4 strong, 5..8 weak
    std::vector<EntanglementReport> channels = uniform_channels(8, 10.0);
    channels[3].r_i = 100.0; // k=4
    const AllocationPlan plan = allocate({{"x", 95.0, 0}}, channels, 4, 4);
    REQUIRE(plan.assignments.size() == 1);
    // single channel k=4 beats any multi-channel window
    CHECK(plan.assignments[0].first_k == 4);
    CHECK(plan.assignments[0].last_k == 4);

    // all-uniform: two-channel windows tie everywhere, leftmost chosen
    const auto uni = uniform_channels(8, 10.0);
    const AllocationPlan plan2 = allocate({{"x", 15.0, 0}}, uni, 4, 4);
    REQUIRE(plan2.assignments.size() == 1);
    CHECK(plan2.assignments[0].first_k == 1);
    CHECK(plan2.assignments[0].last_k == 2);
}

TEST_CASE("port exhaustion is checked before spectrum") {
    const auto channels = uniform_channels(50, 100.0);
    std::vector<AllocationRequest> reqs;
    for (int i = 0; i < 5; ++i)
        reqs.push_back({"r" + std::to_string(i), 100.0, 10 - i});

    const AllocationPlan c_poor = allocate(reqs, channels, 3, 20);
    CHECK(c_poor.assignments.size() == 3);
    CHECK(c_poor.unmet.size() == 2);
    CHECK(c_poor.ports_used_c == 3);

    const AllocationPlan l_poor = allocate(reqs, channels, 20, 2);
    CHECK(l_poor.assignments.size() == 2);
    CHECK(l_poor.unmet.size() == 3);
    CHECK(l_poor.ports_used_l == 2);
}

TEST_CASE("later low-priority requests can still fit around earlier grants") {
    // big request takes a wide block; a small one should still find room
    std::vector<EntanglementReport> channels = uniform_channels(10, 50.0);
    const std::vector<AllocationRequest> reqs = {
        {"big", 300.0, 9},   // needs 6 channels
        {"small", 40.0, 1},  // needs 1
    };
    const AllocationPlan plan = allocate(reqs, channels, 4, 4);
    REQUIRE(plan.assignments.size() == 2);
    CHECK(plan.assignments[0].id == "big");
    CHECK(plan.assignments[0].last_k - plan.assignments[0].first_k + 1 == 6);
    CHECK(plan.assignments[1].id == "small");
    CHECK(plan.unmet.empty());
    check_plan_integrity(plan, reqs, channels, 4, 4);
}

TEST_CASE("infeasible targets land in unmet without consuming ports") {
    const auto channels = uniform_channels(10, 10.0);
    const std::vector<AllocationRequest> reqs = {
        {"greedy", 1e6, 9},
        {"modest", 15.0, 1},
    };
    const AllocationPlan plan = allocate(reqs, channels, 4, 4);
    REQUIRE(plan.assignments.size() == 1);
    CHECK(plan.assignments[0].id == "modest");
    REQUIRE(plan.unmet.size() == 1);
    CHECK(plan.unmet[0] == "greedy");
    CHECK(plan.ports_used_c == 1);
}

TEST_CASE("randomized instances: integrity, pigeonhole, port monotonicity") {
    Rng rng(0xa110cu);
    for (int trial = 0; trial < 30; ++trial) {
        const int n_ch = 10 + static_cast<int>(rng.uniform_index(60));
        std::vector<EntanglementReport> channels = uniform_channels(n_ch, 0.0);
        for (auto& c : channels) c.r_i = rng.uniform(5.0, 200.0);

        const int n_req = 1 + static_cast<int>(rng.uniform_index(12));
        std::vector<AllocationRequest> reqs;
        for (int i = 0; i < n_req; ++i)
            reqs.push_back({"req-" + std::to_string(i),
                            rng.uniform(10.0, 900.0),
                            static_cast<int>(rng.uniform_index(5))});
        const int c_ports = 1 + static_cast<int>(rng.uniform_index(9));
        const int l_ports = 1 + static_cast<int>(rng.uniform_index(20));

        const AllocationPlan plan = allocate(reqs, channels, c_ports, l_ports);
        check_plan_integrity(plan, reqs, channels, c_ports, l_ports);

        // pigeonhole: grants never exceed ports or requests
        const auto granted = static_cast<int>(plan.assignments.size());
        CHECK(granted <= std::min({c_ports, l_ports, n_req}));

        // monotonicity: one more port of each kind never hurts
        const AllocationPlan more = allocate(reqs, channels, c_ports + 1, l_ports + 1);
        CHECK(more.assignments.size() >= plan.assignments.size());
        CHECK(more.unmet.size() <= plan.unmet.size());
        // every id served under the tight budget is served under the loose one
        std::set<std::string> loose_ids;
        for (const auto& a : more.assignments) loose_ids.insert(a.id);
        for (const auto& a : plan.assignments) CHECK(loose_ids.count(a.id) == 1);
    }
}
