#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include "occsim/household.hpp"
#include "occsim/synth.hpp"
#include "support/helpers.hpp"

using namespace occsim;
using testing::TempDir;

namespace {

constexpr std::int64_t kYear = 365 * 1440;

DistributionBundle point_bundle() {
    DistributionBundle b;
    for (const auto& name : required_bundle_channels()) b.set(name, EmpiricalDistribution::point(1.0));
    return b;
}

std::vector<OccupantDaySchedule> days_of(std::vector<DayStates> states) {
    std::vector<OccupantDaySchedule> out;
    for (std::size_t d = 0; d < states.size(); ++d) out.push_back({states[d], d});
    return out;
}

std::vector<Interval> random_intervals(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<std::int64_t> start(0, 2000);
    std::uniform_int_distribution<std::int64_t> len(1, 90);
    std::vector<Interval> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = start(gen);
        out.push_back({s, s + len(gen)});
    }
    return out;
}

} // namespace

TEST_CASE("activity intervals in minutes of year") {
    const auto year = days_of({testing::runs({{'H', 10}, {'C', 2}, {'H', 96}}).states,
                               testing::runs({{'C', 1}, {'H', 94}, {'C', 96}}).states});
    const auto iv = activity_intervals(year, ActivityState::Cooking);
    REQUIRE(iv.size() == 3);
    CHECK(iv[0] == Interval{150, 180});
    CHECK(iv[1] == Interval{1440, 1455});
    CHECK(iv[2] == Interval{1440 + 95 * 15, 2880});
}

TEST_CASE("shared appliance intervals merge") {
    const std::int64_t six = 120; // 6:00 a.m. is two hours after the day boundary
    const auto m = merge_shared_events({{{six, six + 30}}, {{six + 15, six + 45}}}, Appliance::CookingRange);
    REQUIRE(m.size() == 1);
    CHECK(m[0] == Interval{six, six + 45});

    const auto abut = merge_shared_events({{{0, 30}}, {{30, 60}}}, Appliance::Dishwasher);
    REQUIRE(abut.size() == 1);
    CHECK(abut[0] == Interval{0, 60});

    const auto apart = merge_shared_events({{{0, 30}}, {{31, 60}}}, Appliance::ClothesWasher);
    CHECK(apart.size() == 2);
    CHECK(merge_shared_events({}, Appliance::CookingRange).empty());
    CHECK_THROWS_AS(merge_shared_events({}, Appliance::ClothesDryer), std::invalid_argument);
}

TEST_CASE("merging agrees with the union oracle") {
    std::mt19937_64 gen(10);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::vector<Interval>> lists(1 + trial % 5);
        for (auto& l : lists) l = random_intervals(gen, trial % 13);
        const auto merged = merge_shared_events(lists, Appliance::CookingRange);
        CHECK(merged == testing::union_oracle(lists));
        for (std::size_t i = 1; i < merged.size(); ++i) CHECK(merged[i - 1].end < merged[i].start);
    }
}

TEST_CASE("appliance events from merged intervals") {
    auto bundle = point_bundle();
    bundle.set("cooking_range.power.duration", EmpiricalDistribution::point(30));
    bundle.set("clothes_washer.power.duration", EmpiricalDistribution::point(44.5));
    bundle.set("clothes_washer.water.duration", EmpiricalDistribution::point(12));
    bundle.set("clothes_washer.water.flow", EmpiricalDistribution::point(2.5));
    bundle.set("clothes_dryer.power.duration", EmpiricalDistribution::point(60));
    bundle.set("clothes_dryer.power.level", EmpiricalDistribution::point(0.8));
    Rng rng(1);

    const auto cook = attach_appliance_events(ActivityState::Cooking, {{100, 145}}, bundle, rng, kYear);
    REQUIRE(cook.size() == 1);
    CHECK(cook[0].appliance == Appliance::CookingRange);
    CHECK(cook[0].start == 100);
    CHECK(cook[0].power_duration == 30);
    CHECK(cook[0].power_level == 1.0);
    CHECK(cook[0].water_duration == 0.0);

    const auto dish = attach_appliance_events(ActivityState::Dishwashing, {{0, 15}, {500, 530}}, bundle, rng, kYear);
    REQUIRE(dish.size() == 2);
    CHECK(dish[1].appliance == Appliance::Dishwasher);
    CHECK(dish[1].water_duration == 1.0);
    CHECK(dish[1].water_flow == 1.0);

    const auto wash = attach_appliance_events(ActivityState::Laundry, {{1000, 1060}}, bundle, rng, kYear);
    REQUIRE(wash.size() == 2);
    CHECK(wash[0].appliance == Appliance::ClothesWasher);
    CHECK(wash[0].water_duration == 12);
    CHECK(wash[0].water_flow == 2.5);
    CHECK(wash[1].appliance == Appliance::ClothesDryer);
    CHECK(wash[1].start == 1045); // washer power ends at 1044.5
    CHECK(wash[1].power_duration == 60);
    CHECK(wash[1].power_level == 0.8);
    CHECK(wash[1].water_duration == 0.0);

    // A dryer that would start after the last minute of the year is dropped.
    const auto late = attach_appliance_events(ActivityState::Laundry, {{kYear - 15, kYear}}, bundle, rng, kYear);
    CHECK(late.size() == 1);

    CHECK_THROWS_AS(attach_appliance_events(ActivityState::Sleep, {}, bundle, rng, kYear), std::invalid_argument);
    DistributionBundle partial;
    try {
        attach_appliance_events(ActivityState::Cooking, {{0, 15}}, partial, rng, kYear);
        FAIL("expected a missing channel");
    } catch (const std::out_of_range& e) {
        CHECK(std::string(e.what()).find("cooking_range.power") != std::string::npos);
    }
}

TEST_CASE("hygiene water placement") {
    auto bundle = point_bundle();
    bundle.set("shower.duration", EmpiricalDistribution::point(9));
    bundle.set("shower.flow", EmpiricalDistribution::point(2));
    bundle.set("bath.duration", EmpiricalDistribution::point(20));
    Rng rng(3);
    std::vector<std::vector<Interval>> hyg = {{}, {}};
    for (int i = 0; i < 500; ++i) hyg[i % 2].push_back({i * 100, i * 100 + 60});

    const auto showers = attach_hygiene_water(hyg, bundle, 1.0, rng);
    REQUIRE(showers.size() == 500);
    std::set<std::int64_t> offsets;
    for (const auto& e : showers) {
        CHECK(e.fixture == Fixture::Shower);
        CHECK(e.duration == 9);
        CHECK(e.flow == 2);
        REQUIRE(e.occupant.has_value());
        const auto base = (e.start / 100) * 100;
        CHECK(e.start - base <= 51);
        CHECK(e.start >= base);
        CHECK(*e.occupant == static_cast<std::size_t>((e.start / 100) % 2));
        offsets.insert(e.start - base);
    }
    CHECK(offsets.size() > 40);
    CHECK(*offsets.begin() == 0);
    CHECK(*offsets.rbegin() == 51);

    const auto baths = attach_hygiene_water(hyg, bundle, 0.0, rng);
    for (const auto& e : baths) CHECK(e.fixture == Fixture::Bath);

    // Longer than the window: clipped to it.
    bundle.set("shower.duration", EmpiricalDistribution::point(90));
    const auto clipped = attach_hygiene_water({{{0, 15}}}, bundle, 1.0, rng);
    CHECK(clipped.at(0).start == 0);
    CHECK(clipped.at(0).duration == 15);
}

TEST_CASE("shower share follows the configured fraction") {
    const auto bundle = synth_bundle();
    Rng rng(4);
    std::vector<std::vector<Interval>> hyg(1);
    for (std::int64_t i = 0; i < 100000; ++i) hyg[0].push_back({i * 60, i * 60 + 30});
    const auto ev = attach_hygiene_water(hyg, bundle, 0.921, rng);
    const auto showers = std::count_if(ev.begin(), ev.end(), [](const WaterEvent& e) { return e.fixture == Fixture::Shower; });
    CHECK(std::abs(static_cast<double>(showers) / 100000.0 - 0.921) < 0.005);
}

TEST_CASE("sink events are gated on someone home and awake") {
    auto bundle = point_bundle();
    bundle.set("sink.onset", EmpiricalDistribution::point(40));
    bundle.set("sink.count", EmpiricalDistribution::point(1));
    Rng rng(2);
    OccupancyTrace trace;
    trace.active_any.assign(365 * 96, 0);
    trace.present_fraction.assign(365 * 96, 0.0);
    CHECK(generate_sink_events(trace, bundle, rng).empty());

    for (std::size_t d = 0; d < 365; ++d) trace.active_any[d * 96 + 40] = 1;
    const auto ev = generate_sink_events(trace, bundle, rng);
    REQUIRE(ev.size() == 365);
    for (std::size_t d = 0; d < 365; ++d) {
        CHECK(ev[d].fixture == Fixture::Sink);
        CHECK(ev[d].start >= static_cast<std::int64_t>(d * 1440 + 600));
        CHECK(ev[d].start < static_cast<std::int64_t>(d * 1440 + 615));
        CHECK_FALSE(ev[d].occupant.has_value());
    }
}

TEST_CASE("occupancy fraction") {
    const auto away = days_of({testing::uniform_day('A').states});
    const auto sleep = days_of({testing::uniform_day('S').states});
    const auto cook = days_of({testing::runs({{'A', 10}, {'C', 96}}).states});
    const auto t = occupancy_fraction({away, sleep, cook});
    CHECK(t.occupants == 3);
    CHECK(t.present_fraction[0] == doctest::Approx(1.0 / 3));
    CHECK(t.present_fraction[50] == doctest::Approx(2.0 / 3));
    CHECK(t.active_any[0] == 0);
    CHECK(t.active_any[50] == 1);
    const auto awake = occupancy_fraction({away, sleep, cook}, OccupancyMode::Awake);
    CHECK(awake.present_fraction[0] == 0.0);
    CHECK(awake.present_fraction[50] == doctest::Approx(1.0 / 3));
    CHECK(occupancy_fraction({away}).present_fraction[5] == 0.0);
    CHECK(occupancy_fraction({sleep}).present_fraction[5] == 1.0);
    CHECK_THROWS_AS(occupancy_fraction({}), std::invalid_argument);
}

TEST_CASE("modulation") {
    std::vector<double> ref(96, 0.8);
    ref[0] = 0.2;
    std::vector<double> f(96, 0.5);
    auto out = modulate_schedule(ref, f);
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK(out[0] == doctest::Approx(0.2));

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    std::vector<double> r(96);
    for (auto& x : r) x = u(gen);
    const double lo = *std::min_element(r.begin(), r.end());
    std::vector<double> ones(96 * 3, 1.0), zeros(96 * 3, 0.0), mid(96 * 3);
    for (auto& x : mid) x = std::uniform_real_distribution<double>(0, 1)(gen);
    const auto full = modulate_schedule(r, ones);
    const auto empty = modulate_schedule(r, zeros);
    const auto partial = modulate_schedule(r, mid);
    for (std::size_t i = 0; i < full.size(); ++i) {
        CHECK(full[i] == r[i % 96]);
        CHECK(empty[i] == lo);
        CHECK(partial[i] >= lo);
        CHECK(partial[i] <= r[i % 96]);
    }
    CHECK_THROWS_AS(modulate_schedule(r, std::vector<double>(95)), std::invalid_argument);
    CHECK_THROWS_AS(modulate_schedule(std::vector<double>(50), ones), std::invalid_argument);
}

TEST_CASE("vacation window") {
    HouseholdActivity h;
    std::vector<DayStates> st(30, testing::uniform_day('H').states);
    h.occupant_days = {days_of(st), days_of(st)};
    h.trace = occupancy_fraction(h.occupant_days);
    const std::int64_t lo = 10 * 1440;
    h.appliance_events = {{Appliance::CookingRange, lo - 1, 30, 1, 0, 0},
                          {Appliance::CookingRange, lo, 30, 1, 0, 0},
                          {Appliance::CookingRange, 17 * 1440, 30, 1, 0, 0}};
    h.water_events = {{Fixture::Sink, lo + 5, 1, 1, std::nullopt}, {Fixture::Shower, 17 * 1440 - 1, 5, 2, 0}};
    apply_vacation(h, {10, 17});
    REQUIRE(h.appliance_events.size() == 2);
    CHECK(h.appliance_events[0].start == lo - 1);
    CHECK(h.appliance_events[1].start == 17 * 1440);
    CHECK(h.water_events.empty());
    const auto zeros = std::count(h.trace.present_fraction.begin(), h.trace.present_fraction.end(), 0.0);
    CHECK(zeros == 672);
    for (std::size_t i = 10 * 96; i < 17 * 96; ++i) CHECK(h.trace.present_fraction[i] == 0.0);
    CHECK(h.occupant_days[1][16].states[50] == ActivityState::Away);
    CHECK(h.occupant_days[1][17].states[50] == ActivityState::HomeActive);

    CHECK_THROWS_AS(apply_vacation(h, {5, 4}), std::invalid_argument);
    CHECK_THROWS_AS(apply_vacation(h, {25, 31}), std::invalid_argument);
}

TEST_CASE("household composition sampling") {
    HouseholdConfig cfg;
    cfg.occupant_count = EmpiricalDistribution::from_table({1, 2, 3}, {0.2, 0.5, 0.3});
    cfg.cluster_shares_wd = {0.36, 0.21, 0.21, 0.22};
    cfg.cluster_shares_we = {1.0};
    Rng rng(6);
    std::array<int, 4> sizes{};
    std::array<double, 4> wd{};
    double occupants = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto h = sample_household(cfg, rng);
        REQUIRE(h.occupants.size() == h.n);
        ++sizes[h.n];
        for (std::size_t k = 0; k < h.n; ++k) {
            CHECK(h.occupants[k].occupant_id == k);
            CHECK(h.occupants[k].weekend_cluster == 0);
            ++wd[h.occupants[k].weekday_cluster];
            ++occupants;
        }
    }
    CHECK(std::abs(sizes[1] / double(n) - 0.2) < 0.01);
    CHECK(std::abs(sizes[2] / double(n) - 0.5) < 0.01);
    for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(wd[c] / occupants - cfg.cluster_shares_wd[c]) < 0.01);
}

TEST_CASE("household config validation and files") {
    TempDir dir("hh");
    HouseholdConfig cfg;
    const SimCalendar cal{0, 365};
    CHECK_THROWS_AS(cfg.validate(cal), std::invalid_argument); // no occupant count
    cfg.occupant_count = EmpiricalDistribution::from_table({1, 2}, {0.5, 0.5});
    cfg.validate(cal);
    cfg.vacation = VacationWindow{300, 310};
    cfg.validate(cal);
    cfg.vacation = VacationWindow{360, 370};
    CHECK_THROWS_AS(cfg.validate(cal), std::invalid_argument);
    cfg.vacation = VacationWindow{300, 310};
    cfg.shower_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(cal), std::invalid_argument);
    cfg.shower_fraction = 0.9;
    cfg.cluster_shares_wd = {0.5, 0.4};
    CHECK_THROWS_AS(cfg.validate(cal), std::invalid_argument);
    cfg.cluster_shares_wd = {0.5, 0.5};
    cfg.occupancy_mode = OccupancyMode::Awake;

    save_household_config(cfg, dir / "h.cfg");
    const auto back = load_household_config(dir / "h.cfg");
    CHECK(back.wd_shares_given);
    CHECK(back.config.occupant_count.support() == cfg.occupant_count.support());
    CHECK(back.config.occupant_count.probs() == cfg.occupant_count.probs());
    CHECK(back.config.cluster_shares_wd == cfg.cluster_shares_wd);
    CHECK(back.config.vacation->start_day == 300);
    CHECK(back.config.occupancy_mode == OccupancyMode::Awake);
    CHECK(back.config.shower_fraction == 0.9);

    save_household_config(cfg, dir / "noshares.cfg", false);
    const auto bare = load_household_config(dir / "noshares.cfg");
    CHECK_FALSE(bare.wd_shares_given);
    CHECK_FALSE(bare.we_shares_given);

    std::ofstream(dir / "bad.cfg") << "occupant_count = 1:1\nmystery = 3\n";
    CHECK_THROWS_AS(load_household_config(dir / "bad.cfg"), std::runtime_error);
}
