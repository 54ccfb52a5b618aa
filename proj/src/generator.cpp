#include "occsim/generator.hpp"

#include <algorithm>
#include <stdexcept>

namespace occsim {

std::uint64_t occupant_seed(std::uint64_t household_seed, std::size_t occupant) {
    return derive_seed(derive_seed(household_seed, streams::kOccupants), occupant);
}

HouseholdActivity simulate_household(const GeneratorInputs& inputs, std::uint64_t household_seed) {
    if (!inputs.library || !inputs.bundle) throw std::invalid_argument("generate_household: library and bundle are required");
    inputs.config.validate(inputs.calendar);

    HouseholdActivity hh;
    hh.mode = inputs.config.occupancy_mode;
    Rng composition = Rng::stream(household_seed, {streams::kComposition});
    hh.profiles = sample_household(inputs.config, composition).occupants;
    for (std::size_t i = 0; i < hh.profiles.size(); ++i)
        hh.occupant_days.push_back(simulate_year(hh.profiles[i], *inputs.library, inputs.calendar, inputs.approach,
                                                 occupant_seed(household_seed, i)));

    // Away states first, so no activity interval reaches into the window.
    if (inputs.config.vacation) apply_vacation(hh, *inputs.config.vacation);

    const auto year_minutes = static_cast<std::int64_t>(inputs.calendar.n_days * kMinutesPerDay);
    Rng appliance_rng = Rng::stream(household_seed, {streams::kAppliances});
    const std::array<std::pair<ActivityState, Appliance>, 3> shared = {{
        {ActivityState::Cooking, Appliance::CookingRange},
        {ActivityState::Dishwashing, Appliance::Dishwasher},
        {ActivityState::Laundry, Appliance::ClothesWasher},
    }};
    for (const auto& [activity, appliance] : shared) {
        std::vector<std::vector<Interval>> per_occupant;
        for (const auto& year : hh.occupant_days) per_occupant.push_back(activity_intervals(year, activity));
        const auto merged = merge_shared_events(per_occupant, appliance);
        auto events = attach_appliance_events(activity, merged, *inputs.bundle, appliance_rng, year_minutes);
        hh.appliance_events.insert(hh.appliance_events.end(), events.begin(), events.end());
    }

    std::vector<std::vector<Interval>> hygiene;
    for (const auto& year : hh.occupant_days) hygiene.push_back(activity_intervals(year, ActivityState::PersonalHygiene));
    Rng hygiene_rng = Rng::stream(household_seed, {streams::kHygiene});
    hh.water_events = attach_hygiene_water(hygiene, *inputs.bundle, inputs.config.shower_fraction, hygiene_rng);

    hh.trace = occupancy_fraction(hh.occupant_days, hh.mode);
    Rng sink_rng = Rng::stream(household_seed, {streams::kSinks});
    auto sinks = generate_sink_events(hh.trace, *inputs.bundle, sink_rng);
    hh.water_events.insert(hh.water_events.end(), sinks.begin(), sinks.end());

    if (inputs.config.vacation) apply_vacation(hh, *inputs.config.vacation);
    return hh;
}

GeneratedHousehold generate_household(const GeneratorInputs& inputs, std::uint64_t household_seed) {
    if (!inputs.references) throw std::invalid_argument("generate_household: reference schedules are required");
    GeneratedHousehold out;
    out.activity = simulate_household(inputs, household_seed);
    const auto& hh = out.activity;
    out.raw = rasterize_events(hh.water_events, hh.appliance_events, inputs.calendar.n_days);
    out.raw[channel_index(Channel::Occupants)] = hh.trace.present_fraction;
    const std::array<std::pair<EndUse, Channel>, 3> modulated = {{
        {EndUse::Lighting, Channel::Lighting},
        {EndUse::PlugLoads, Channel::PlugLoads},
        {EndUse::CeilingFan, Channel::CeilingFan},
    }};
    for (const auto& [use, channel] : modulated) {
        const auto reference = tile_reference(*inputs.references, use, inputs.calendar);
        out.raw[channel_index(channel)] = modulate_schedule(reference, hh.trace.present_fraction);
    }
    out.schedule = normalize_columns(out.raw, inputs.calendar.n_days);
    return out;
}

} // namespace occsim
