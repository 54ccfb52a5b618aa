#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "occsim/distribution.hpp"
#include "occsim/household.hpp"

namespace occsim {

/// Schedule file columns, in file order.
enum class Channel : std::size_t {
    Occupants,
    Lighting,
    PlugLoads,
    CeilingFan,
    CookingRange,
    DishwasherPower,
    ClothesWasherPower,
    ClothesDryerPower,
    DishwasherWater,
    ClothesWasherWater,
    Showers,
    Baths,
    Sinks,
};

inline constexpr std::size_t kNumChannels = 13;

std::string_view channel_name(Channel c);
inline constexpr std::size_t channel_index(Channel c) { return static_cast<std::size_t>(c); }

using ChannelColumns = std::array<std::vector<double>, kNumChannels>;

/// Normalized per-step columns for one household year.
struct HouseholdScheduleYear {
    std::size_t n_days = 0;
    ChannelColumns columns;
    std::array<double, kNumChannels> peaks{}; // divisor applied to each column (1 for occupants)

    std::size_t n_steps() const { return n_days * kStepsPerDay; }
    const std::vector<double>& column(Channel c) const { return columns[channel_index(c)]; }
};

/// Minute-overlap rasterization onto 15-minute steps. Each event adds
/// overlap_minutes * magnitude to every step it touches; anything past the
/// end of the year is dropped. Only event channels are filled; the others
/// come back as zero series.
ChannelColumns rasterize_events(const std::vector<WaterEvent>& water, const std::vector<ApplianceEvent>& appliances,
                                std::size_t n_days);

/// Divides every channel except occupants by its annual maximum; all-zero
/// channels stay zero with peak 0.
HouseholdScheduleYear normalize_columns(ChannelColumns raw, std::size_t n_days);

/// `# peak,<channel>,<value>` lines, a header of column names, then one row
/// per step with six decimals.
void write_schedule_file(const HouseholdScheduleYear& schedule, const std::filesystem::path& path);
HouseholdScheduleYear read_schedule_file(const std::filesystem::path& path);

enum class EndUse { Lighting = 0, PlugLoads = 1, CeilingFan = 2 };
std::string_view end_use_name(EndUse u);

/// 96-step reference profiles per (end use, day type).
struct ReferenceSchedules {
    std::array<std::array<std::array<double, kStepsPerDay>, 2>, 3> values{};

    std::span<const double> get(EndUse u, DayType d) const {
        return values[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)];
    }
    std::array<double, kStepsPerDay>& at(EndUse u, DayType d) {
        return values[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)];
    }
};

/// Reference directory: one `<end_use>.<WD|WE>.csv` file of 96 `step,value`
/// lines per end use and day type. Every day must have a nonzero value.
ReferenceSchedules load_reference_schedules(const std::filesystem::path& dir);
void save_reference_schedules(const ReferenceSchedules& refs, const std::filesystem::path& dir);

/// Year-long reference for an end use following the calendar's day types.
std::vector<double> tile_reference(const ReferenceSchedules& refs, EndUse use, const SimCalendar& calendar);

/// Bundle directory: one distribution file per channel, named after the channel.
DistributionBundle load_distribution_bundle(const std::filesystem::path& dir);
void save_distribution_bundle(const DistributionBundle& bundle, const std::filesystem::path& dir);

} // namespace occsim
