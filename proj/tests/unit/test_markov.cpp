#include <doctest.h>

#include <random>

#include "occsim/markov.hpp"
#include "occsim/synth.hpp"
#include "support/helpers.hpp"

using namespace occsim;
using testing::runs;
using testing::uniform_day;

namespace {
std::size_t idx(const TPMSet& tpm, ActivityState s) { return *tpm.index_of_state(s); }
} // namespace

TEST_CASE("single all-sleep sequence") {
    std::vector<StateSequence> data = {uniform_day('S')};
    const auto tpm = estimate_tpm(data, full_alphabet());
    CHECK(tpm.steps() == 96);
    CHECK(tpm.transitions() == 95);
    const auto s = idx(tpm, ActivityState::Sleep);
    CHECK(tpm.initial()[s] == 1.0);
    for (std::size_t t = 0; t < 95; ++t)
        for (std::size_t i = 0; i < tpm.size(); ++i)
            for (std::size_t j = 0; j < tpm.size(); ++j) CHECK(tpm.at(t, i, j) == (i == j ? 1.0 : 0.0));
    CHECK(tpm.max_stochastic_error() == 0.0);
}

TEST_CASE("transition counts with weights") {
    auto a = runs({{'H', 11}, {'C', 96}});
    auto b = runs({{'H', 11}, {'A', 96}});
    std::vector<StateSequence> data = {a, b};
    auto tpm = estimate_tpm(data, full_alphabet());
    const auto h = idx(tpm, ActivityState::HomeActive);
    CHECK(tpm.at(10, h, idx(tpm, ActivityState::Cooking)) == 0.5);
    CHECK(tpm.at(10, h, idx(tpm, ActivityState::Away)) == 0.5);
    CHECK(tpm.at(9, h, h) == 1.0);

    data[0].weight = 2.0;
    tpm = estimate_tpm(data, full_alphabet());
    CHECK(tpm.at(10, h, idx(tpm, ActivityState::Cooking)) == doctest::Approx(2.0 / 3.0));
    CHECK(tpm.at(10, h, idx(tpm, ActivityState::Away)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("fallback policies") {
    std::vector<StateSequence> data = {uniform_day('S')};
    const auto uni = estimate_tpm(data, full_alphabet(), {FallbackPolicy::Uniform, 0.0});
    const auto a = idx(uni, ActivityState::Away);
    for (std::size_t j = 0; j < uni.size(); ++j) CHECK(uni.at(5, a, j) == doctest::Approx(1.0 / 7.0));
    CHECK(uni.at(5, idx(uni, ActivityState::Sleep), idx(uni, ActivityState::Sleep)) == 1.0);

    const auto lap = estimate_tpm(data, full_alphabet(), {FallbackPolicy::Laplace, 1.0});
    const auto s = idx(lap, ActivityState::Sleep);
    CHECK(lap.at(5, s, s) == doctest::Approx(2.0 / 8.0));
    CHECK(lap.at(5, a, a) == doctest::Approx(1.0 / 7.0));
    CHECK(lap.max_stochastic_error() < 1e-12);

    const auto lap0 = estimate_tpm(data, full_alphabet(), {FallbackPolicy::Laplace, 0.0});
    CHECK(lap0.at(5, a, a) == 1.0);
}

TEST_CASE("estimate_tpm preconditions") {
    std::vector<StateSequence> none;
    CHECK_THROWS_AS(estimate_tpm(none, full_alphabet()), std::invalid_argument);
    std::vector<StateSequence> mixed = {uniform_day('S'), runs({{'S', 96}}, 1.0, DayType::Weekend)};
    CHECK_THROWS_AS(estimate_tpm(mixed, full_alphabet()), std::invalid_argument);
    std::vector<StateSequence> zero = {uniform_day('S', 0.0)};
    CHECK_THROWS_AS(estimate_tpm(zero, full_alphabet()), std::invalid_argument);
    std::vector<StateSequence> cooking = {uniform_day('C')};
    const std::vector<ActivityState> two = {ActivityState::Sleep, ActivityState::Away};
    CHECK_THROWS_AS(estimate_tpm(cooking, two), std::invalid_argument);
}

TEST_CASE("presence chain projects event states") {
    std::vector<StateSequence> data = {runs({{'S', 20}, {'C', 4}, {'A', 96}})};
    const auto tpm = estimate_tpm(data, presence_alphabet());
    CHECK(tpm.size() == 3);
    const auto h = idx(tpm, ActivityState::HomeActive);
    CHECK(tpm.at(19, idx(tpm, ActivityState::Sleep), h) == 1.0);
    CHECK(tpm.at(23, h, idx(tpm, ActivityState::Away)) == 1.0);
}

TEST_CASE("forward marginals equal empirical marginals") {
    std::mt19937_64 gen(99);
    std::vector<StateSequence> data;
    for (int i = 0; i < 300; ++i) data.push_back(testing::random_sequence(gen));
    for (const auto& alphabet : {full_alphabet(), presence_alphabet()}) {
        const auto tpm = estimate_tpm(data, alphabet);
        CHECK(tpm.max_stochastic_error() < 1e-9);
        const auto fwd = forward_marginals(tpm);
        const auto emp = empirical_marginals(data, alphabet);
        for (std::size_t t = 0; t < 96; ++t)
            for (std::size_t i = 0; i < alphabet.size(); ++i) CHECK(std::abs(fwd[t][i] - emp[t][i]) < 1e-9);
    }
}

TEST_CASE("run statistics from a single laundry run") {
    std::vector<StateSequence> data = {runs({{'H', 40}, {'L', 4}, {'H', 96}})};
    const auto st = estimate_statistics(data, ActivityState::Laundry);
    CHECK(st.onset.support() == std::vector<double>{40});
    CHECK(st.duration.support() == std::vector<double>{60});
    CHECK(st.occurrences.support() == std::vector<double>{1});
    CHECK(st.run_count == 1);
    CHECK(st.daily_profile[41] == 1.0);
    CHECK(st.daily_profile[44] == 0.0);
}

TEST_CASE("two runs in one day") {
    std::vector<StateSequence> data = {runs({{'H', 10}, {'C', 2}, {'H', 38}, {'C', 3}, {'H', 96}})};
    const auto st = estimate_statistics(data, ActivityState::Cooking);
    CHECK(st.occurrences.support() == std::vector<double>{2});
    CHECK(st.duration.support() == std::vector<double>{30, 45});
    CHECK(st.duration.probs()[0] == doctest::Approx(0.5));
    CHECK(st.onset.support() == std::vector<double>{10, 50});

    std::vector<StateSequence> sleep = {uniform_day('S')};
    const auto ss = estimate_statistics(sleep, ActivityState::Sleep);
    for (const double p : ss.daily_profile) CHECK(p == 1.0);
    CHECK(ss.duration.support() == std::vector<double>{1440}); // open run kept at its observed length

    const auto none = estimate_statistics(sleep, ActivityState::Laundry);
    CHECK(none.occurrences.support() == std::vector<double>{0});
    CHECK(none.duration.empty());
    CHECK(none.onset.empty());
    std::vector<StateSequence> empty;
    CHECK_THROWS_AS(estimate_statistics(empty, ActivityState::Sleep), std::invalid_argument);
}

TEST_CASE("run statistics agree with a run-scan oracle") {
    std::mt19937_64 gen(8);
    std::vector<StateSequence> data;
    for (int i = 0; i < 1000; ++i) data.push_back(testing::random_sequence(gen));
    for (const auto a : kAllStates) {
        const auto st = estimate_statistics(data, a);
        std::vector<std::pair<double, double>> occ, dur, onset;
        std::size_t runs_total = 0;
        for (const auto& s : data) {
            const auto r = testing::run_scan_oracle(s, a);
            occ.emplace_back(static_cast<double>(r.starts.size()), s.weight);
            for (std::size_t k = 0; k < r.starts.size(); ++k) {
                onset.emplace_back(static_cast<double>(r.starts[k]), s.weight);
                dur.emplace_back(static_cast<double>(r.lengths[k] * 15), s.weight);
            }
            runs_total += r.starts.size();
        }
        CHECK(st.run_count == runs_total);
        CHECK(st.occurrences == EmpiricalDistribution::from_weighted(occ, st.occurrences.unit()));
        CHECK(st.duration == EmpiricalDistribution::from_weighted(dur, st.duration.unit()));
        CHECK(st.onset == EmpiricalDistribution::from_weighted(onset, st.onset.unit()));
        for (const double p : st.daily_profile) CHECK((p >= 0.0 && p <= 1.0 + 1e-12));
    }
}

TEST_CASE("model recovery through the chain") {
    // Hand-built chain on 3 states; simulate straight draws and re-estimate.
    const std::vector<ActivityState> alpha = {ActivityState::Sleep, ActivityState::Away, ActivityState::HomeActive};
    TPMSet truth(alpha, 96);
    truth.initial() = {0.6, 0.1, 0.3};
    for (std::size_t t = 0; t < 95; ++t) {
        const double x = static_cast<double>(t) / 95.0;
        const double rows[3][3] = {{0.8 - 0.3 * x, 0.1, 0.1 + 0.3 * x},
                                   {0.1, 0.7, 0.2},
                                   {0.15 + 0.1 * x, 0.25 - 0.1 * x, 0.6}};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) truth.at(t, i, j) = rows[i][j];
    }
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0, 1);
    auto draw = [&](std::span<const double> p) {
        double x = u(gen), acc = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (x < (acc += p[j])) return j;
        return p.size() - 1;
    };
    std::vector<StateSequence> data(20000);
    for (auto& s : data) {
        std::size_t cur = draw(truth.initial());
        s.states[0] = alpha[cur];
        for (std::size_t t = 0; t < 95; ++t) s.states[t + 1] = alpha[cur = draw(truth.row(t, cur))];
    }
    const auto est = estimate_tpm(data, alpha);
    const auto marg = forward_marginals(truth);
    for (std::size_t t = 0; t < 95; ++t)
        for (std::size_t i = 0; i < 3; ++i) {
            if (marg[t][i] * 20000 < 500) continue;
            for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(est.at(t, i, j) - truth.at(t, i, j)) < 0.02);
        }
}

TEST_CASE("tpm and library files round trip") {
    testing::TempDir dir("tpm");
    const auto corpus = synth_corpus({.n_diaries = 300, .seed = 4});
    std::vector<StateSequence> wd, we;
    for (const auto& d : corpus.diaries) (d.day_type == DayType::Weekday ? wd : we).push_back(resample_to_sequence(d));

    auto tpm = estimate_tpm(wd, full_alphabet());
    tpm.cluster_id = 3;
    save_tpm(tpm, dir / "x.tpm");
    const auto back = load_tpm(dir / "x.tpm");
    CHECK(back.cluster_id == 3);
    CHECK(back.alphabet() == tpm.alphabet());
    for (std::size_t t = 0; t < 95; ++t)
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j) CHECK(std::abs(back.at(t, i, j) - tpm.at(t, i, j)) < 1e-11);

    ClusterModel cm;
    cm.day_type = DayType::Weekday;
    cm.modes = {uniform_day('A').states, uniform_day('H').states};
    cm.shares = {0.5, 0.5};
    const auto models = train_clustered(wd, cm);
    REQUIRE(models.size() == 2);
    BehaviorLibrary lib;
    for (const auto& m : models) lib.add(m);
    lib.set_shares(DayType::Weekday, {0.4, 0.6});
    save_library(lib, dir / "lib");
    const auto lib2 = load_library(dir / "lib");
    CHECK(lib2.cluster_count(DayType::Weekday) == 2);
    CHECK(lib2.shares(DayType::Weekday) == std::vector<double>{0.4, 0.6});
    const auto& m1 = lib2.get(DayType::Weekday, 1);
    CHECK(m1.stats[index_of(ActivityState::Cooking)].duration ==
          models[1].stats[index_of(ActivityState::Cooking)].duration);
    CHECK(m1.presence.size() == 3);
    CHECK_THROWS_AS(lib2.get(DayType::Weekend, 0), std::out_of_range);

    std::filesystem::remove(dir / "lib" / "WD.c1.full.tpm");
    try {
        load_library(dir / "lib");
        FAIL("expected missing file error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("WD.c1.full.tpm") != std::string::npos);
    }
}
