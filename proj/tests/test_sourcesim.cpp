#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "flexent/errors.hpp"
#include "flexent/flexgrid.hpp"
#include "flexent/qcore.hpp"
#include "flexent/rng.hpp"
#include "flexent/sourcesim.hpp"
#include "oracles.hpp"

using namespace flexent;

namespace {

SourceModel bell_source() {
    SourceModel m;
    m.alpha = Complex(1.0 / std::sqrt(2.0), 0.0);
    m.beta = Complex(1.0 / std::sqrt(2.0), 0.0);
    m.visibility = 1.0;
    m.pair_rate = 1000.0;
    m.singles_rate_s = 0.0;
    m.singles_rate_i = 0.0;
    return m;
}

WssSpec paper_c() { return {191.325, 196.150, 9, 0.012, 0.0}; }
WssSpec paper_l() { return {186.075, 191.075, 20, 0.012, 0.0}; }

} // namespace

TEST_CASE("source model validation") {
    SourceModel m = bell_source();
    CHECK_NOTHROW(m.validate());
    m.alpha = Complex(1.0, 0.0);
    CHECK_THROWS_AS(m.validate(), ValidationError); // norm 1.5
    m = bell_source();
    m.visibility = 1.5;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = bell_source();
    m.pair_rate = -1.0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = bell_source();
    ComplexMatrix not_unitary = ComplexMatrix::Identity(2, 2) * Complex(2.0, 0.0);
    m.explicit_rotation = std::make_pair(not_unitary, ComplexMatrix::Identity(2, 2).eval());
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("accidental rate definition") {
    SourceModel m = bell_source();
    m.singles_rate_s = 118915.0;
    m.singles_rate_i = 118915.0;
    m.coincidence_window_s = 1e-9;
    // 118915^2 * 1e-9
    CHECK(accidental_rate(m) == doctest::Approx(14.140777225).epsilon(1e-9));
}

TEST_CASE("channel state: ideal, product, werner") {
    SourceModel m = bell_source();
    const DensityMatrix ideal = channel_state(m, 1);
    CHECK(fidelity_with_pure(bell_phi_plus(), ideal) == doctest::Approx(1.0).epsilon(1e-12));

    m.alpha = Complex(1.0, 0.0);
    m.beta = Complex(0.0, 0.0);
    const DensityMatrix hh = channel_state(m, 1);
    CHECK(std::abs(hh(0, 0) - Complex(1.0, 0.0)) < 1e-12); // |HH><HH|

    m = bell_source();
    m.visibility = 0.97333;
    const DensityMatrix w = channel_state(m, 1);
    CHECK(fidelity_with_pure(bell_phi_plus(), w) == doctest::Approx(0.98).epsilon(1e-5));
    CHECK((w.matrix() - oracle::werner(0.97333)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local rotation precedence and determinism") {
    SourceModel m = bell_source();
    m.local_rotation_seed = 99;
    const auto [ua1, ub1] = local_rotation(m, 7);
    const auto [ua2, ub2] = local_rotation(m, 7);
    CHECK((ua1 - ua2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ub1 - ub2).cwiseAbs().maxCoeff() == 0.0);
    const auto [ua3, ub3] = local_rotation(m, 8);
    CHECK((ua1 - ua3).cwiseAbs().maxCoeff() > 1e-6); // different channel
    CHECK((ua1 - ub1).cwiseAbs().maxCoeff() > 1e-6); // A and B streams differ

    Rng r(5);
    const ComplexMatrix u = sample_haar_unitary(r, 2);
    m.explicit_rotation = std::make_pair(u, u);
    const auto [ua4, ub4] = local_rotation(m, 7);
    CHECK((ua4 - u).cwiseAbs().maxCoeff() == 0.0); // explicit wins over seed
}

TEST_CASE("rotation preserves the spectrum") {
    SourceModel m = bell_source();
    m.visibility = 0.9;
    const Eigen::VectorXd base = oracle::eig_vals(channel_state(m, 1).matrix());
    m.local_rotation_seed = 4242;
    for (int k = 1; k <= 5; ++k) {
        const Eigen::VectorXd rotated = oracle::eig_vals(channel_state(m, k).matrix());
        CHECK((rotated - base).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("simulate_counts validation") {
    SourceModel m = bell_source();
    const auto settings = all_settings();
    Rng rng(1);
    CHECK_THROWS_AS(simulate_counts(m, 1, settings, 0.0, rng), ValidationError);
    std::vector<MeasurementSetting> short_list(settings.begin(), settings.end() - 1);
    CHECK_THROWS_AS(simulate_counts(m, 1, short_list, 1.0, rng), ValidationError);
    std::vector<MeasurementSetting> dup(settings.begin(), settings.end());
    dup[35] = dup[0];
    CHECK_THROWS_AS(simulate_counts(m, 1, dup, 1.0, rng), ValidationError);
}

TEST_CASE("simulate_counts determinism under fixed seed") {
    SourceModel m = bell_source();
    m.singles_rate_s = 1000.0;
    m.singles_rate_i = 1000.0;
    const auto settings = all_settings();
    Rng r1(123), r2(123);
    const auto a = simulate_counts(m, 1, settings, 10.0, r1);
    const auto b = simulate_counts(m, 1, settings, 10.0, r2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].counts == b[i].counts);
}

TEST_CASE("count means follow the projection law") {
    // phi+ without accidentals: (H,H) -> R t/2, (H,V) -> 0, (R,R) -> 0,
    // (R,L) -> R t/2; empirical means vs 5 sigma bands
    SourceModel m = bell_source();
    const auto settings = all_settings();
    const double t = 1.0;
    const int reps = 400;
    std::map<std::pair<Analyzer, Analyzer>, double> sums;
    Rng rng(2024);
    for (int rep = 0; rep < reps; ++rep)
        for (const auto& rec : simulate_counts(m, 1, settings, t, rng))
            sums[{rec.setting.a, rec.setting.b}] += static_cast<double>(rec.counts);

    const double full = m.pair_rate * t * reps;
    auto mean_of = [&](Analyzer a, Analyzer b) { return sums[{a, b}]; };
    const double half_sigma = 5.0 * std::sqrt(full / 2.0);
    CHECK(std::abs(mean_of(Analyzer::H, Analyzer::H) - full / 2.0) < half_sigma);
    CHECK(std::abs(mean_of(Analyzer::R, Analyzer::L) - full / 2.0) < half_sigma);
    CHECK(std::abs(mean_of(Analyzer::D, Analyzer::D) - full / 2.0) < half_sigma);
    CHECK(mean_of(Analyzer::H, Analyzer::V) == 0.0);
    CHECK(mean_of(Analyzer::R, Analyzer::R) == 0.0);
}

TEST_CASE("projectors within one basis pair resolve the pair rate") {
    // the four outcomes of a fixed local basis pair partition the events
    SourceModel m = bell_source();
    m.visibility = 0.7;
    m.local_rotation_seed = 31;
    const DensityMatrix rho = channel_state(m, 3);
    const std::array<std::array<Analyzer, 2>, 3> bases = {
        {{Analyzer::H, Analyzer::V}, {Analyzer::D, Analyzer::A}, {Analyzer::R, Analyzer::L}}};
    for (const auto& ba : bases)
        for (const auto& bb : bases) {
            double p_sum = 0.0;
            for (const Analyzer a : ba)
                for (const Analyzer b : bb)
                    p_sum += (projector({a, b}) * rho.matrix()).trace().real();
            CHECK(p_sum == doctest::Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("accidentals add a uniform floor") {
    SourceModel m = bell_source();
    m.pair_rate = 0.0;
    m.singles_rate_s = 50000.0;
    m.singles_rate_i = 40000.0; // acc = 2.0/s
    const auto settings = all_settings();
    const double t = 5.0;
    Rng rng(88);
    double total = 0.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep)
        for (const auto& rec : simulate_counts(m, 1, settings, t, rng))
            total += static_cast<double>(rec.counts);
    const double expect = 36.0 * t * accidental_rate(m) * reps;
    CHECK(std::abs(total - expect) < 5.0 * std::sqrt(expect));
}

TEST_CASE("jsi pattern labels") {
    CHECK(jsi_pattern_from_label("banded") == JsiPattern::Banded);
    CHECK(jsi_pattern_from_label("full") == JsiPattern::Full);
    CHECK_THROWS_AS(jsi_pattern_from_label("diag"), UsageError);
}

TEST_CASE("banded scan covers diagonal band plus one far point per row") {
    SourceModel m = bell_source();
    m.singles_rate_s = 1000.0;
    m.singles_rate_i = 1000.0;
    const auto plan = build_channel_plan(383.0, 25.0, 20, paper_c(), paper_l());
    Rng rng(9);
    const JsiScan scan = simulate_jsi(m, plan, paper_c(), paper_l(), JsiPattern::Banded,
                                      1.0, rng);
    CHECK(scan.pattern == "banded");
    std::map<int, std::vector<int>> rows;
    for (const auto& e : scan.entries) rows[e.sig_ch].push_back(e.idl_ch);
    REQUIRE(rows.size() == 20);
    for (const auto& [i, cols] : rows) {
        int near = 0, far = 0;
        for (const int j : cols) {
            REQUIRE(j >= 1);
            REQUIRE(j <= 20);
            (std::abs(j - i) <= 2 ? near : far)++;
        }
        const int expect_near = std::min(20, i + 2) - std::max(1, i - 2) + 1;
        CHECK(near == expect_near);
        CHECK(far == 1);
    }
}

TEST_CASE("full scan covers the whole grid") {
    SourceModel m = bell_source();
    m.singles_rate_s = 1000.0;
    m.singles_rate_i = 1000.0;
    const auto plan = build_channel_plan(383.0, 25.0, 8, paper_c(), paper_l());
    Rng rng(10);
    const JsiScan scan =
        simulate_jsi(m, plan, paper_c(), paper_l(), JsiPattern::Full, 1.0, rng);
    CHECK(scan.pattern == "full");
    CHECK(scan.entries.size() == 64);
}

TEST_CASE("jsi coincidence means follow the leakage window law") {
    SourceModel m = bell_source();
    m.pair_rate = 2000.0;
    m.singles_rate_s = 30000.0;
    m.singles_rate_i = 30000.0; // acc = 0.9/s
    const auto plan = build_channel_plan(383.0, 25.0, 12, paper_c(), paper_l());
    const WssSpec c = paper_c(), l = paper_l();
    const double t = 1.0;
    const int reps = 500;

    std::map<std::pair<int, int>, double> sums;
    Rng rng(303);
    for (int rep = 0; rep < reps; ++rep)
        for (const auto& e :
             simulate_jsi(m, plan, c, l, JsiPattern::Full, t, rng).entries)
            sums[{e.sig_ch, e.idl_ch}] += static_cast<double>(e.coinc);

    const double acc = accidental_rate(m);
    for (const auto& [cell, total] : sums) {
        const auto [i, j] = cell;
        double weight = 0.0;
        for (int mm = 1; mm <= 12; ++mm)
            weight += filter_weight(c, i - mm) * filter_weight(l, j - mm);
        const double mu = reps * t * (m.pair_rate * weight + acc);
        CHECK(std::abs(total - mu) < 5.0 * std::sqrt(std::max(mu, 1.0)) + 1e-9);
    }
}

TEST_CASE("jsi sideband symmetry in expectation") {
    // CAR(i,i+1) ~ CAR(i+1,i): both single-neighbor leaks
    SourceModel m = bell_source();
    m.pair_rate = 5000.0;
    m.singles_rate_s = 100000.0;
    m.singles_rate_i = 100000.0;
    const auto plan = build_channel_plan(383.0, 25.0, 10, paper_c(), paper_l());
    Rng rng(404);
    double up = 0.0, down = 0.0;
    const int reps = 300;
    for (int rep = 0; rep < reps; ++rep)
        for (const auto& e :
             simulate_jsi(m, plan, paper_c(), paper_l(), JsiPattern::Full, 1.0, rng)
                 .entries) {
            if (e.idl_ch == e.sig_ch + 1) up += static_cast<double>(e.coinc);
            if (e.idl_ch == e.sig_ch - 1) down += static_cast<double>(e.coinc);
        }
    CHECK(std::abs(up - down) / (up + down) < 0.05);
}

TEST_CASE("fixed seed gives bit-identical jsi output") {
    SourceModel m = bell_source();
    m.singles_rate_s = 1000.0;
    m.singles_rate_i = 1000.0;
    const auto plan = build_channel_plan(383.0, 25.0, 15, paper_c(), paper_l());
    Rng r1(77), r2(77);
    const auto a = simulate_jsi(m, plan, paper_c(), paper_l(), JsiPattern::Banded, 1.0, r1);
    const auto b = simulate_jsi(m, plan, paper_c(), paper_l(), JsiPattern::Banded, 1.0, r2);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].idl_ch == b.entries[i].idl_ch);
        CHECK(a.entries[i].coinc == b.entries[i].coinc);
        CHECK(a.entries[i].singles_s == b.entries[i].singles_s);
    }
}

TEST_CASE("car arithmetic and failure modes") {
    CHECK(car(100, 10000, 10000, 1e-9, 1.0) ==
          doctest::Approx(100.0 / (1e8 * 1e-9)).epsilon(1e-12));
    // pure accidentals -> exactly 1
    CHECK(car(200, 100000, 200000, 1e-8, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // 100x accidentals -> 100
    CHECK(car(20000, 100000, 200000, 1e-8, 1.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK_THROWS_AS(car(10, 0, 100, 1e-9, 1.0), ValidationError);
    CHECK_THROWS_AS(car(10, 100, 0, 1e-9, 1.0), ValidationError);
    CHECK_THROWS_AS(car(10, 100, 100, 0.0, 1.0), ValidationError);
}

TEST_CASE("calibrated diagonal car lands near 100") {
    // defaults: pair 1400/s, singles 118915/s, 1 ns window, 1 s integration
    SourceModel m = bell_source();
    m.pair_rate = 1400.0;
    m.singles_rate_s = 118915.0;
    m.singles_rate_i = 118915.0;
    const auto plan = build_channel_plan(383.0, 25.0, 40, paper_c(), paper_l());
    Rng rng(505);
    const JsiScan scan =
        simulate_jsi(m, plan, paper_c(), paper_l(), JsiPattern::Banded, 1.0, rng);
    double car_sum = 0.0;
    int n_diag = 0;
    for (const auto& e : scan.entries)
        if (e.sig_ch == e.idl_ch) {
            car_sum += car(e.coinc, e.singles_s, e.singles_i, 1e-9, e.integration_s);
            ++n_diag;
        }
    REQUIRE(n_diag == 40);
    CHECK(car_sum / n_diag == doctest::Approx(100.0).epsilon(0.10));
}
