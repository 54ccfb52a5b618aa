#include "occsim/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "occsim/pipeline.hpp"
#include "text.hpp"

namespace occsim {

namespace {

struct Peak {
    double center; // step
    double amplitude;
};

std::vector<Peak> hazard_peaks(ActivityState a) {
    switch (a) {
    case ActivityState::Cooking: return {{12, 0.12}, {32, 0.10}, {58, 0.15}};
    case ActivityState::Dishwashing: return {{16, 0.06}, {36, 0.05}, {64, 0.10}};
    case ActivityState::Laundry: return {{24, 0.03}, {44, 0.03}, {66, 0.02}};
    case ActivityState::PersonalHygiene: return {{10, 0.15}, {20, 0.05}, {72, 0.08}};
    default: return {};
    }
}

std::array<double, 3> presence_target(std::size_t cluster, DayType d, std::size_t t) {
    const ActivityState dom = planted_dominant(cluster, d, t);
    std::array<double, 3> p{0.05, 0.05, 0.05}; // sleep, away, active
    p[dom == ActivityState::Sleep ? 0 : dom == ActivityState::Away ? 1 : 2] = 0.9;
    return p;
}

ActivityState draw_presence(std::size_t cluster, DayType d, std::size_t t, Rng& rng) {
    const auto p = presence_target(cluster, d, t);
    const double u = rng.uniform();
    if (u < p[0]) return ActivityState::Sleep;
    if (u < p[0] + p[1]) return ActivityState::Away;
    return ActivityState::HomeActive;
}

} // namespace

std::vector<double> planted_durations(ActivityState activity) {
    switch (activity) {
    case ActivityState::Cooking: return {15, 30, 45, 60};
    case ActivityState::Dishwashing: return {15, 30, 45};
    case ActivityState::Laundry: return {15, 30, 60, 90, 120};
    case ActivityState::PersonalHygiene: return {15, 30, 45, 60};
    default: return {};
    }
}

double planted_hazard(ActivityState activity, std::size_t t) {
    if (t < 2 || t > 80) return 0.0;
    double h = 0.0;
    for (const auto& p : hazard_peaks(activity)) {
        const double z = (static_cast<double>(t) - p.center) / 3.0;
        h += p.amplitude * std::exp(-0.5 * z * z);
    }
    return h;
}

ActivityState planted_dominant(std::size_t cluster, DayType day_type, std::size_t t) {
    const bool we = day_type == DayType::Weekend;
    const std::size_t shift = we ? 4 : 0;
    auto pick = [&](std::size_t wake, std::size_t away_from, std::size_t away_to, std::size_t bed) {
        if (t < wake + shift || t >= bed) return ActivityState::Sleep;
        if (t >= away_from && t < away_to) return ActivityState::Away;
        return ActivityState::HomeActive;
    };
    switch (cluster) {
    case 0: return we ? pick(12, 24, 44, 76) : pick(12, 16, 53, 76);   // day away, evening home
    case 1: return pick(4, 0, 0, 72);                                  // mostly home, early riser
    case 2: return we ? pick(12, 24, 85, 88) : pick(12, 16, 85, 88);   // day away, evening away
    case 3: return pick(16, 0, 0, 80);                                 // mostly home
    default: throw std::invalid_argument("synth: cluster index out of range");
    }
}

StateSequence synth_sequence(std::size_t cluster, DayType day_type, Rng& rng) {
    StateSequence seq;
    seq.day_type = day_type;
    auto& s = seq.states;
    s[0] = draw_presence(cluster, day_type, 0, rng);
    std::size_t t = 0;
    while (t + 1 < kStepsPerDay) {
        const ActivityState cur = s[t];
        if (cur == ActivityState::HomeActive) {
            double u = rng.uniform();
            std::optional<ActivityState> event;
            for (const auto e : kEventStates) {
                const double h = planted_hazard(e, t);
                if (u < h) {
                    event = e;
                    break;
                }
                u -= h;
            }
            if (event) {
                const auto durations = planted_durations(*event);
                const double minutes = durations[rng.below(durations.size())];
                const auto len = static_cast<std::size_t>(minutes) / kMinutesPerStep;
                const std::size_t end = std::min(t + 1 + len, kStepsPerDay);
                for (std::size_t i = t + 1; i < end; ++i) s[i] = *event;
                t = end - 1;
                if (t + 1 < kStepsPerDay)
                    s[t + 1] = rng.uniform() < kSynthExitHome ? ActivityState::HomeActive
                                                              : draw_presence(cluster, day_type, t + 1, rng);
                ++t;
                continue;
            }
        }
        s[t + 1] = rng.uniform() < kSynthPersistence ? cur : draw_presence(cluster, day_type, t + 1, rng);
        ++t;
    }
    return seq;
}

RawDiary expand_to_minutes(const StateSequence& seq, Rng& rng) {
    RawDiary d;
    d.respondent_id = seq.respondent_id;
    d.day_type = seq.day_type;
    d.weight = seq.weight;
    for (std::size_t k = 0; k < kStepsPerDay; ++k) {
        const std::size_t base = k * kMinutesPerStep;
        for (std::size_t m = 0; m < kMinutesPerStep; ++m) d.minutes[base + m] = seq.states[k];
        // Transitions land a few minutes into the window: the leading minutes
        // still carry the previous state, never enough to win the window.
        if (k > 0) {
            const auto lead = rng.below(6);
            for (std::size_t m = 0; m < lead; ++m) d.minutes[base + m] = seq.states[k - 1];
        }
    }
    return d;
}

SynthCorpus synth_corpus(const SynthOptions& options) {
    if (options.cluster_shares.size() != kSynthClusters)
        throw std::invalid_argument("synth: cluster shares need one entry per planted cluster");
    SynthCorpus corpus;
    corpus.diaries.reserve(options.n_diaries);
    for (std::size_t i = 0; i < options.n_diaries; ++i) {
        Rng rng = Rng::stream(options.seed, {i});
        const DayType dt = rng.uniform() < options.weekend_fraction ? DayType::Weekend : DayType::Weekday;
        const std::size_t cluster = sample_index(options.cluster_shares, rng);
        StateSequence seq = synth_sequence(cluster, dt, rng);
        seq.respondent_id = "r" + std::to_string(i);
        seq.weight = options.random_weights ? 0.5 + rng.uniform() : 1.0;
        corpus.diaries.push_back(expand_to_minutes(seq, rng));
        corpus.planted_cluster.push_back(cluster);
    }
    return corpus;
}

namespace {

std::vector<std::string_view> codes_for(ActivityState s) {
    switch (s) {
    case ActivityState::Sleep: return {"010101", "010102"};
    case ActivityState::Away: return {"050101", "070104", "120312"};
    case ActivityState::HomeActive: return {"120303", "020101", "130101"}; // 130101 is left unmapped
    case ActivityState::Cooking: return {"020201"};
    case ActivityState::Dishwashing: return {"020203"};
    case ActivityState::Laundry: return {"020102"};
    case ActivityState::PersonalHygiene: return {"010201"};
    }
    return {};
}

} // namespace

ActivityCodeMap synth_code_map() {
    ActivityCodeMap map(ActivityState::HomeActive);
    for (const auto s : kAllStates)
        for (const auto code : codes_for(s))
            if (code != "130101") map.add(std::string(code), s);
    return map;
}

void write_coded_diaries(const std::vector<RawDiary>& diaries, const std::filesystem::path& path, std::uint64_t seed) {
    auto out = text::open_output(path);
    out << "respondent_id,day_type,weight";
    for (std::size_t m = 0; m < kMinutesPerDay; ++m) out << ",m" << m;
    out << '\n';
    std::string row;
    for (std::size_t i = 0; i < diaries.size(); ++i) {
        const auto& d = diaries[i];
        Rng rng = Rng::stream(seed, {0xC0DE, i});
        row = d.respondent_id + "," + std::string(day_type_token(d.day_type)) + "," + text::fmt(d.weight, "%.17g");
        std::size_t m = 0;
        while (m < kMinutesPerDay) {
            // One code per contiguous run, as a diary would record it.
            const auto s = d.minutes[m];
            const auto codes = codes_for(s);
            const auto code = codes[rng.below(codes.size())];
            for (; m < kMinutesPerDay && d.minutes[m] == s; ++m) {
                row.push_back(',');
                row += code;
            }
        }
        row.push_back('\n');
        out << row;
    }
    text::close_output(out, path);
}

DistributionBundle synth_bundle() {
    DistributionBundle b;
    auto table = [](std::vector<double> v, std::vector<double> p, const char* unit) {
        return EmpiricalDistribution::from_table(std::move(v), std::move(p), unit);
    };
    b.set("shower.duration", table({5, 7, 9, 11, 14}, {0.15, 0.25, 0.3, 0.2, 0.1}, "min"));
    b.set("shower.flow", table({1.6, 1.9, 2.2}, {0.3, 0.5, 0.2}, "gal/min"));
    b.set("bath.duration", table({8, 10, 12}, {0.3, 0.4, 0.3}, "min"));
    b.set("bath.flow", table({3.0, 4.0}, {0.5, 0.5}, "gal/min"));
    std::vector<double> onset_steps;
    std::vector<double> onset_w;
    double total = 0.0;
    for (std::size_t t = 8; t <= 84; ++t) {
        const double w = 1.0 + 2.0 * std::exp(-0.5 * std::pow((static_cast<double>(t) - 14.0) / 4.0, 2)) +
                         2.5 * std::exp(-0.5 * std::pow((static_cast<double>(t) - 60.0) / 6.0, 2));
        onset_steps.push_back(static_cast<double>(t));
        onset_w.push_back(w);
        total += w;
    }
    for (auto& w : onset_w) w /= total;
    b.set("sink.onset", table(onset_steps, onset_w, "step"));
    b.set("sink.count", table({2, 4, 6, 8, 10}, {0.1, 0.25, 0.3, 0.2, 0.15}, "count"));
    b.set("sink.duration", table({0.5, 1, 2, 3}, {0.4, 0.3, 0.2, 0.1}, "min"));
    b.set("sink.flow", table({0.5, 1.0, 1.5}, {0.3, 0.5, 0.2}, "gal/min"));
    b.set("cooking_range.power.duration", table({10, 20, 30, 45, 60}, {0.2, 0.3, 0.25, 0.15, 0.1}, "min"));
    b.set("cooking_range.power.level", table({0.4, 0.7, 1.0}, {0.4, 0.4, 0.2}, "fraction"));
    b.set("dishwasher.power.duration", table({60, 90, 120}, {0.3, 0.5, 0.2}, "min"));
    b.set("dishwasher.power.level", table({0.6, 0.8, 1.0}, {0.3, 0.4, 0.3}, "fraction"));
    b.set("dishwasher.water.duration", table({10, 15, 20}, {0.3, 0.4, 0.3}, "min"));
    b.set("dishwasher.water.flow", table({0.4, 0.6}, {0.5, 0.5}, "gal/min"));
    b.set("clothes_washer.power.duration", table({30, 45, 60}, {0.3, 0.4, 0.3}, "min"));
    b.set("clothes_washer.power.level", table({0.5, 0.8, 1.0}, {0.3, 0.4, 0.3}, "fraction"));
    b.set("clothes_washer.water.duration", table({10, 15, 20}, {0.3, 0.4, 0.3}, "min"));
    b.set("clothes_washer.water.flow", table({1.0, 1.5, 2.0}, {0.3, 0.4, 0.3}, "gal/min"));
    b.set("clothes_dryer.power.duration", table({45, 60, 75}, {0.3, 0.4, 0.3}, "min"));
    b.set("clothes_dryer.power.level", table({0.8, 1.0}, {0.5, 0.5}, "fraction"));
    return b;
}

ReferenceSchedules synth_references() {
    ReferenceSchedules r;
    for (const auto d : {DayType::Weekday, DayType::Weekend}) {
        const double shift = d == DayType::Weekend ? 4.0 : 0.0;
        for (std::size_t t = 0; t < kStepsPerDay; ++t) {
            const double x = static_cast<double>(t);
            auto bump = [&](double c, double w) { return std::exp(-0.5 * std::pow((x - c - shift) / w, 2)); };
            r.at(EndUse::Lighting, d)[t] = 0.1 + 0.35 * bump(12, 4) + 0.8 * bump(68, 8);
            r.at(EndUse::PlugLoads, d)[t] = 0.3 + 0.2 * bump(14, 5) + 0.4 * bump(64, 10);
            r.at(EndUse::CeilingFan, d)[t] = 0.05 + 0.6 * bump(48, 12);
        }
    }
    return r;
}

HouseholdConfig synth_household_config() {
    HouseholdConfig c;
    c.occupant_count = EmpiricalDistribution::from_table({1, 2, 3, 4, 5}, {0.28, 0.35, 0.16, 0.13, 0.08}, "persons");
    return c;
}

void write_synth_project(const std::filesystem::path& dir, const SynthOptions& options, std::size_t n_households,
                         std::size_t n_days) {
    std::filesystem::create_directories(dir);
    const auto corpus = synth_corpus(options);
    write_coded_diaries(corpus.diaries, dir / "diaries.csv", options.seed);
    save_code_map(synth_code_map(), dir / "codes.csv");
    save_distribution_bundle(synth_bundle(), dir / "bundle");
    save_reference_schedules(synth_references(), dir / "reference");
    save_household_config(synth_household_config(), dir / "household.cfg", false);

    ProjectConfig cfg;
    cfg.diaries = "diaries.csv";
    cfg.code_map = "codes.csv";
    cfg.bundle = "bundle";
    cfg.reference = "reference";
    cfg.household_config = "household.cfg";
    cfg.output = "out";
    cfg.seed = options.seed;
    cfg.n_households = n_households;
    cfg.calendar.n_days = n_days;
    cfg.k_min = 3;
    cfg.k_max = 6;
    cfg.repeats = 3;
    save_project_config(cfg, dir / "project.cfg");
}

} // namespace occsim
