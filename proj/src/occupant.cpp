#include "occsim/occupant.hpp"

#include <cmath>
#include <stdexcept>

#include "text.hpp"

namespace occsim {

std::optional<Approach> parse_approach(int value) {
    if (value < 1 || value > 3) return std::nullopt;
    return static_cast<Approach>(value);
}

std::optional<int> parse_weekday(std::string_view name) {
    constexpr std::array<std::string_view, 7> full = {"monday", "tuesday",  "wednesday", "thursday",
                                                      "friday", "saturday", "sunday"};
    for (std::size_t i = 0; i < full.size(); ++i)
        if (name == full[i] || name == full[i].substr(0, 3)) return static_cast<int>(i);
    return std::nullopt;
}

std::size_t duration_steps(double minutes) {
    const double steps = std::ceil(minutes / static_cast<double>(kMinutesPerStep));
    return steps < 1.0 ? 1 : static_cast<std::size_t>(steps);
}

namespace {

std::size_t draw(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (probs[j] <= 0.0) continue;
        acc += probs[j];
        last = j;
        if (u < acc) return j;
    }
    return last;
}

// Draw from `row` conditioned on leaving state `self`.
std::optional<std::size_t> draw_leaving(std::span<const double> row, std::size_t self, Rng& rng) {
    double leave = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (j != self) leave += row[j];
    if (leave <= 1e-12) return std::nullopt;
    const double u = rng.uniform() * leave;
    double acc = 0.0;
    std::size_t last = self;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j == self || row[j] <= 0.0) continue;
        acc += row[j];
        last = j;
        if (u < acc) return j;
    }
    return last;
}

} // namespace

OccupantDaySchedule simulate_day_approach3(const TPMSet& tpm, const ActivityStatisticsSet& stats, Rng& rng,
                                           std::vector<HeldBlock>* blocks) {
    if (tpm.steps() != kStepsPerDay) throw std::invalid_argument("approach 3: chain must span 96 steps");
    const auto home = tpm.index_of_state(ActivityState::HomeActive);
    if (!home) throw std::invalid_argument("approach 3: chain alphabet lacks HomeActive");

    OccupantDaySchedule day;
    const auto& alpha = tpm.alphabet();
    std::size_t t = 0;
    std::size_t cur = draw(tpm.initial(), rng);
    while (true) {
        const ActivityState s = alpha[cur];
        if (is_event_state(s)) {
            const auto& dist = stats[index_of(s)].duration;
            // An event the training data never timed holds for one step.
            const double minutes = dist.empty() ? static_cast<double>(kMinutesPerStep) : dist.sample(rng);
            const std::size_t end = std::min(t + duration_steps(minutes), kStepsPerDay);
            for (std::size_t i = t; i < end; ++i) day.states[i] = s;
            if (blocks) blocks->push_back({s, t, minutes, end - t});
            if (end == kStepsPerDay) break;
            const auto next = draw_leaving(tpm.row(end - 1, cur), cur, rng);
            cur = next ? *next : *home;
            t = end;
        } else {
            day.states[t] = s;
            if (t + 1 == kStepsPerDay) break;
            cur = draw(tpm.row(t, cur), rng);
            ++t;
        }
    }
    return day;
}

OccupantDaySchedule simulate_day_approach2(const TPMSet& tpm, Rng& rng) {
    if (tpm.steps() != kStepsPerDay) throw std::invalid_argument("approach 2: chain must span 96 steps");
    OccupantDaySchedule day;
    std::size_t cur = draw(tpm.initial(), rng);
    day.states[0] = tpm.alphabet()[cur];
    for (std::size_t t = 0; t + 1 < kStepsPerDay; ++t) {
        cur = draw(tpm.row(t, cur), rng);
        day.states[t + 1] = tpm.alphabet()[cur];
    }
    return day;
}

Approach1Day simulate_day_approach1(const TPMSet& presence, const ActivityStatisticsSet& stats, Rng& rng) {
    Approach1Day out;
    out.schedule = simulate_day_approach2(presence, rng);
    auto& states = out.schedule.states;
    for (auto& s : states) s = project_state(s);
    std::array<bool, kStepsPerDay> taken{};

    for (const auto activity : kEventStates) {
        const auto& st = stats[index_of(activity)];
        if (st.occurrences.empty()) continue;
        const auto count = static_cast<std::size_t>(std::llround(st.occurrences.sample(rng)));
        out.sampled_occurrences += count;
        for (std::size_t n = 0; n < count; ++n) {
            bool placed = false;
            for (std::size_t attempt = 0; attempt < kPlacementRetries && !st.onset.empty(); ++attempt) {
                const double onset_value = st.onset.sample(rng);
                const double minutes = st.duration.empty() ? static_cast<double>(kMinutesPerStep)
                                                           : st.duration.sample(rng);
                if (onset_value < 0.0 || onset_value >= static_cast<double>(kStepsPerDay)) continue;
                const auto onset = static_cast<std::size_t>(onset_value);
                const std::size_t end = std::min(onset + duration_steps(minutes), kStepsPerDay);
                bool ok = true;
                for (std::size_t i = onset; i < end && ok; ++i)
                    ok = states[i] == ActivityState::HomeActive && !taken[i];
                if (!ok) continue;
                for (std::size_t i = onset; i < end; ++i) {
                    states[i] = activity;
                    taken[i] = true;
                }
                placed = true;
                break;
            }
            if (!placed) ++out.placement_failures;
        }
    }
    return out;
}

std::vector<OccupantDaySchedule> simulate_year(const OccupantProfile& profile, const BehaviorLibrary& library,
                                               const SimCalendar& calendar, Approach approach,
                                               std::uint64_t occupant_seed) {
    std::vector<OccupantDaySchedule> year;
    year.reserve(calendar.n_days);
    for (std::size_t d = 0; d < calendar.n_days; ++d) {
        const DayType dt = calendar.day_type(d);
        const std::size_t cluster = dt == DayType::Weekday ? profile.weekday_cluster : profile.weekend_cluster;
        const BehaviorModel& model = library.get(dt, cluster);
        Rng rng = Rng::stream(occupant_seed, {d});
        OccupantDaySchedule day;
        switch (approach) {
        case Approach::MarkovWithEventSampling:
            day = simulate_day_approach1(model.presence, model.stats, rng).schedule;
            break;
        case Approach::PureMarkov:
            day = simulate_day_approach2(model.full, rng);
            break;
        case Approach::MarkovWithDurations:
            day = simulate_day_approach3(model.full, model.stats, rng);
            break;
        }
        day.day_index = d;
        year.push_back(day);
    }
    return year;
}

void write_occupant_days(const std::vector<OccupantDaySchedule>& days, const SimCalendar& calendar,
                         const std::filesystem::path& path) {
    auto out = text::open_output(path);
    out << "day,day_type";
    for (std::size_t t = 0; t < kStepsPerDay; ++t) out << ",s" << t;
    out << '\n';
    for (const auto& d : days) {
        out << d.day_index << ',' << day_type_token(calendar.day_type(d.day_index));
        for (const auto s : d.states) out << ',' << state_token(s);
        out << '\n';
    }
    text::close_output(out, path);
}

} // namespace occsim
