#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "occsim/markov.hpp"
#include "occsim/rng.hpp"

namespace occsim {

enum class Approach {
    MarkovWithEventSampling = 1, // presence chain + sampled count/onset/duration
    PureMarkov = 2,              // full-alphabet chain at every step
    MarkovWithDurations = 3,     // full-alphabet chain + sampled event durations
};

std::optional<Approach> parse_approach(int value);

/// Day 0 is `start_weekday` (0 = Monday ... 6 = Sunday).
struct SimCalendar {
    int start_weekday = 0;
    std::size_t n_days = 365;

    DayType day_type(std::size_t day) const {
        return (static_cast<std::size_t>(start_weekday) + day) % 7 >= 5 ? DayType::Weekend : DayType::Weekday;
    }
};

/// "monday".."sunday" or "mon".."sun", case-sensitive lower case.
std::optional<int> parse_weekday(std::string_view name);

struct OccupantProfile {
    std::size_t occupant_id = 0;
    std::size_t weekday_cluster = 0;
    std::size_t weekend_cluster = 0;
};

struct OccupantDaySchedule {
    DayStates states{};
    std::size_t day_index = 0;
};

/// One duration-sampled block emitted by the Approach 3 simulator.
struct HeldBlock {
    ActivityState activity = ActivityState::Cooking;
    std::size_t start_step = 0;
    double sampled_minutes = 0.0;
    std::size_t steps = 0; // after clipping at the end of the day
};

/// Steps occupied by an event of `minutes`: ceil(minutes / 15), at least 1.
std::size_t duration_steps(double minutes);

/// Full-alphabet chain with duration sampling for event activities. On
/// entering an event the block is held for its sampled duration and the
/// chain resumes from the event's row at the block's last step with the
/// self-transition removed.
OccupantDaySchedule simulate_day_approach3(const TPMSet& tpm, const ActivityStatisticsSet& stats, Rng& rng,
                                           std::vector<HeldBlock>* blocks = nullptr);

/// Plain chain draw at every step.
OccupantDaySchedule simulate_day_approach2(const TPMSet& tpm, Rng& rng);

struct Approach1Day {
    OccupantDaySchedule schedule;
    std::size_t sampled_occurrences = 0;
    std::size_t placement_failures = 0;
};

inline constexpr std::size_t kPlacementRetries = 20;

/// Presence chain plus independently sampled events placed inside
/// HomeActive periods without overlap.
Approach1Day simulate_day_approach1(const TPMSet& presence, const ActivityStatisticsSet& stats, Rng& rng);

/// One schedule per calendar day; day d draws from Rng::stream(occupant_seed, {d}).
std::vector<OccupantDaySchedule> simulate_year(const OccupantProfile& profile, const BehaviorLibrary& library,
                                               const SimCalendar& calendar, Approach approach,
                                               std::uint64_t occupant_seed);

/// Debug dump: `day,day_type,<96 tokens>` per line.
void write_occupant_days(const std::vector<OccupantDaySchedule>& days, const SimCalendar& calendar,
                         const std::filesystem::path& path);

} // namespace occsim
