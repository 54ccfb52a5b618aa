#include <doctest.h>

#include <map>
#include <set>

#include "occsim/activity.hpp"
#include "occsim/distribution.hpp"
#include "occsim/rng.hpp"
#include "support/helpers.hpp"

using namespace occsim;

TEST_CASE("activity alphabet and projection") {
    CHECK(kAllStates.size() == 7);
    for (const auto s : kAllStates) {
        CHECK(parse_state(state_token(s)) == s);
        const auto p = project_state(s);
        CHECK((p == ActivityState::Sleep || p == ActivityState::Away || p == ActivityState::HomeActive));
        CHECK(project_state(p) == p);
    }
    CHECK(project_state(ActivityState::Cooking) == ActivityState::HomeActive);
    CHECK(project_state(ActivityState::Laundry) == ActivityState::HomeActive);
    CHECK(project_state(ActivityState::Sleep) == ActivityState::Sleep);
    CHECK(project_state(ActivityState::Away) == ActivityState::Away);
    CHECK(is_event_state(ActivityState::PersonalHygiene));
    CHECK_FALSE(is_event_state(ActivityState::HomeActive));
    CHECK(is_active_at_home(ActivityState::Dishwashing));
    CHECK_FALSE(is_active_at_home(ActivityState::Sleep));
    CHECK_FALSE(parse_state("napping").has_value());
    CHECK(parse_day_type("WE") == DayType::Weekend);
    CHECK_FALSE(parse_day_type("holiday").has_value());
    CHECK(kStepsPerDay * kMinutesPerStep == kMinutesPerDay);
}

TEST_CASE("philox known answers") {
    // Reference vectors from the Random123 distribution (kat_vectors).
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a = Rng::stream(42, {1, 2, 3});
    Rng b = Rng::stream(42, {1, 2, 3});
    Rng c = Rng::stream(42, {1, 2, 4});
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs |= x != c.next_u64();
    }
    CHECK(differs);
    CHECK(a.position() == 100);
    a.uniform();
    CHECK(a.position() == 101);

    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(derive_seed(7, i));
    CHECK(seeds.size() == 10000);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("rng uniform and below") {
    Rng r(123);
    double sum = 0.0;
    const int n = 200000;
    std::array<int, 6> counts{};
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        ++counts[r.below(6)];
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    for (const int c : counts) CHECK(static_cast<double>(c) / n == doctest::Approx(1.0 / 6).epsilon(0.03));
    for (int i = 0; i < 100; ++i) CHECK(r.below(1) == 0);
}

TEST_CASE("empirical distribution construction") {
    const auto d = EmpiricalDistribution::from_weighted({{30, 1}, {15, 2}, {30, 1}}, "min");
    CHECK(d.support() == std::vector<double>{15, 30});
    CHECK(d.probs()[0] == doctest::Approx(0.5));
    CHECK(d.probs()[1] == doctest::Approx(0.5));
    CHECK(d.cdf(14) == 0.0);
    CHECK(d.cdf(15) == doctest::Approx(0.5));
    CHECK(d.cdf(100) == doctest::Approx(1.0));
    CHECK(d.mean() == doctest::Approx(22.5));
    CHECK(d.min_value() == 15);
    CHECK(d.max_value() == 30);
    CHECK(EmpiricalDistribution::from_weighted({{5, 0}}).empty());
    CHECK_THROWS_AS(EmpiricalDistribution::from_table({2, 1}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(EmpiricalDistribution::from_table({1, 2}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(EmpiricalDistribution::from_table({1, 2}, {-0.5, 1.5}), std::invalid_argument);
    Rng r(1);
    CHECK_THROWS(EmpiricalDistribution{}.sample(r));
}

TEST_CASE("sampling frequencies") {
    Rng r(9);
    const auto point = EmpiricalDistribution::point(9.0, "min");
    for (int i = 0; i < 100; ++i) CHECK(point.sample(r) == 9.0);

    const auto coin = EmpiricalDistribution::from_table({0, 1}, {0.5, 0.5});
    int ones = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ones += coin.sample(r) == 1.0;
    CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 0.01);

    const auto skew = EmpiricalDistribution::from_table({1, 2, 3}, {0.2, 0.3, 0.5});
    std::map<double, int> hist;
    for (int i = 0; i < n; ++i) ++hist[skew.sample(r)];
    CHECK(std::abs(hist[1] / double(n) - 0.2) < 0.01);
    CHECK(std::abs(hist[2] / double(n) - 0.3) < 0.01);
    CHECK(std::abs(hist[3] / double(n) - 0.5) < 0.01);
}

TEST_CASE("distribution files and bundles") {
    testing::TempDir dir("dist");
    const auto d = EmpiricalDistribution::from_table({1.5, 2.25, 7}, {0.125, 0.375, 0.5}, "gal/min");
    save_distribution(d, dir / "x.dist");
    CHECK(load_distribution(dir / "x.dist") == d);
    CHECK_THROWS_AS(load_distribution(dir / "missing"), std::runtime_error);

    DistributionBundle b;
    b.set("shower.flow", d);
    CHECK(b.contains("shower.flow"));
    try {
        b.get("bath.flow");
        FAIL("expected out_of_range");
    } catch (const std::out_of_range& e) {
        CHECK(std::string(e.what()).find("bath.flow") != std::string::npos);
    }
}
