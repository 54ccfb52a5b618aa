#pragma once

#include <cstdint>

#include "occsim/household.hpp"
#include "occsim/markov.hpp"
#include "occsim/schedule_io.hpp"

namespace occsim {

struct GeneratorInputs {
    const BehaviorLibrary* library = nullptr;
    const DistributionBundle* bundle = nullptr;
    const ReferenceSchedules* references = nullptr;
    HouseholdConfig config;
    SimCalendar calendar;
    Approach approach = Approach::MarkovWithDurations;
};

struct GeneratedHousehold {
    HouseholdActivity activity;
    ChannelColumns raw; // unnormalized channels, occupants and modulated end uses included
    HouseholdScheduleYear schedule;
};

/// Fixed stream layout under the household seed.
namespace streams {
inline constexpr std::uint64_t kComposition = 1;
inline constexpr std::uint64_t kOccupants = 2;
inline constexpr std::uint64_t kAppliances = 3;
inline constexpr std::uint64_t kHygiene = 4;
inline constexpr std::uint64_t kSinks = 5;
} // namespace streams

std::uint64_t occupant_seed(std::uint64_t household_seed, std::size_t occupant);

/// Household simulation up to (but excluding) rasterization.
HouseholdActivity simulate_household(const GeneratorInputs& inputs, std::uint64_t household_seed);

/// Full household: activity, appliance and water events, modulated end uses
/// and the normalized schedule.
GeneratedHousehold generate_household(const GeneratorInputs& inputs, std::uint64_t household_seed);

} // namespace occsim
