#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "occsim/distribution.hpp"
#include "occsim/occupant.hpp"

namespace occsim {

enum class Appliance { CookingRange, Dishwasher, ClothesWasher, ClothesDryer };
enum class Fixture { Shower, Bath, Sink, DishwasherWater, ClothesWasherWater };

std::string_view appliance_token(Appliance a); // "cooking_range", ...
std::string_view fixture_token(Fixture f);

/// Half-open interval in minutes of the simulation year. Minute 0 is
/// 4:00 a.m. on day 0.
struct Interval {
    std::int64_t start = 0;
    std::int64_t end = 0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct ApplianceEvent {
    Appliance appliance = Appliance::CookingRange;
    std::int64_t start = 0;      // minute of year
    double power_duration = 0.0; // minutes
    double power_level = 0.0;    // fraction of appliance peak, (0, 1]
    double water_duration = 0.0; // minutes; 0 for dryer and range
    double water_flow = 0.0;     // volume per minute
};

struct WaterEvent {
    Fixture fixture = Fixture::Shower;
    std::int64_t start = 0; // minute of year
    double duration = 0.0;  // minutes
    double flow = 0.0;      // volume per minute
    std::optional<std::size_t> occupant; // set for hygiene events
};

/// Which occupants count toward the modulation fraction.
enum class OccupancyMode {
    Present, // everyone not Away, sleeping included
    Awake,   // only occupants at home and not asleep
};

struct OccupancyTrace {
    std::size_t occupants = 0;
    std::vector<double> present_fraction; // per 15-minute step of the year
    std::vector<std::uint8_t> active_any; // someone home and awake
};

/// [start_day, end_day) in simulation days.
struct VacationWindow {
    std::size_t start_day = 0;
    std::size_t end_day = 0;
};

struct HouseholdConfig {
    EmpiricalDistribution occupant_count; // no default: supplied by the user
    std::vector<double> cluster_shares_wd = default_cluster_shares();
    std::vector<double> cluster_shares_we = default_cluster_shares();
    std::optional<VacationWindow> vacation;
    double shower_fraction = 0.921;
    OccupancyMode occupancy_mode = OccupancyMode::Present;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate(const SimCalendar& calendar) const;
};

/// Text config, `key = value` lines:
///   occupant_count = 1:0.3, 2:0.4, 3:0.3
///   cluster_shares_wd = 0.36, 0.21, 0.21, 0.22
///   cluster_shares_we = ...
///   vacation = <start_day>, <end_day>
///   shower_fraction = 0.921
///   occupancy_mode = present | awake
/// Keys not given keep their defaults. `wd_shares_given` and
/// `we_shares_given` report whether the file set each share vector.
struct HouseholdConfigFile {
    HouseholdConfig config;
    bool wd_shares_given = false;
    bool we_shares_given = false;
};
HouseholdConfigFile load_household_config(const std::filesystem::path& path);
/// With `write_shares` false the share vectors are left out, so a loader
/// falls back to trained shares.
void save_household_config(const HouseholdConfig& config, const std::filesystem::path& path,
                           bool write_shares = true);

struct SampledHousehold {
    std::size_t n = 0;
    std::vector<OccupantProfile> occupants;
};

/// Occupant count from the count distribution; each occupant's weekday and
/// weekend cluster drawn independently from the share vectors.
SampledHousehold sample_household(const HouseholdConfig& config, Rng& rng);

/// Index drawn from a probability vector.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

/// Maximal runs of `activity` in an occupant's year, in minutes of year.
std::vector<Interval> activity_intervals(const std::vector<OccupantDaySchedule>& year, ActivityState activity);

/// Union of the occupants' activity intervals for a shared appliance.
/// Overlapping and abutting intervals collapse. Only the range, dishwasher
/// and clothes washer are shared; other appliances throw std::invalid_argument.
std::vector<Interval> merge_shared_events(const std::vector<std::vector<Interval>>& per_occupant, Appliance appliance);

/// Appliance (and appliance water) events for merged household intervals of
/// Cooking, Dishwashing or Laundry. Laundry spawns a washer event and a
/// dryer event that starts when the washer's power draw ends. Throws
/// std::out_of_range naming any missing channel distribution.
std::vector<ApplianceEvent> attach_appliance_events(ActivityState activity, const std::vector<Interval>& intervals,
                                                    const DistributionBundle& bundle, Rng& rng,
                                                    std::int64_t year_minutes);

/// One shower or bath per hygiene interval, placed uniformly at one-minute
/// resolution inside the interval.
std::vector<WaterEvent> attach_hygiene_water(const std::vector<std::vector<Interval>>& per_occupant_hygiene,
                                             const DistributionBundle& bundle, double shower_fraction, Rng& rng);

/// Sink draws per day from `sink.count`, each at a `sink.onset` step that
/// must have someone home and awake; failed onsets are redrawn up to
/// kPlacementRetries times.
std::vector<WaterEvent> generate_sink_events(const OccupancyTrace& trace, const DistributionBundle& bundle, Rng& rng);

OccupancyTrace occupancy_fraction(const std::vector<std::vector<OccupantDaySchedule>>& occupants,
                                  OccupancyMode mode = OccupancyMode::Present);

/// x_min(day) + (x_ref - x_min(day)) * fraction, evaluated as
/// x_ref * fraction + x_min * (1 - fraction) so both endpoints are exact.
/// A 96-value reference tiles over every day.
std::vector<double> modulate_schedule(std::span<const double> reference, std::span<const double> fraction);

/// Everything simulated for one household.
struct HouseholdActivity {
    std::vector<OccupantProfile> profiles;
    std::vector<std::vector<OccupantDaySchedule>> occupant_days;
    std::vector<ApplianceEvent> appliance_events;
    std::vector<WaterEvent> water_events;
    OccupancyTrace trace;
    OccupancyMode mode = OccupancyMode::Present;
};

/// Forces every occupant Away inside the window, drops events that start
/// inside it and recomputes the occupancy trace.
void apply_vacation(HouseholdActivity& household, const VacationWindow& window);

/// Every channel name a complete distribution bundle provides.
std::vector<std::string> required_bundle_channels();

} // namespace occsim
