#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace occsim {

// Canonical activity alphabet. The numeric values are stable and used as
// indices throughout (TPM alphabets, statistics tables, file tokens).
enum class ActivityState : std::uint8_t {
    Sleep = 0,
    Away = 1,
    HomeActive = 2,
    Cooking = 3,
    Dishwashing = 4,
    Laundry = 5,
    PersonalHygiene = 6,
};

inline constexpr std::size_t kNumActivityStates = 7;
inline constexpr std::size_t kStepsPerDay = 96;
inline constexpr std::size_t kMinutesPerDay = 1440;
inline constexpr std::size_t kMinutesPerStep = 15;

inline constexpr std::array<ActivityState, kNumActivityStates> kAllStates = {
    ActivityState::Sleep,   ActivityState::Away,        ActivityState::HomeActive,
    ActivityState::Cooking, ActivityState::Dishwashing, ActivityState::Laundry,
    ActivityState::PersonalHygiene,
};

inline constexpr std::array<ActivityState, 3> kPresenceStates = {
    ActivityState::Sleep, ActivityState::Away, ActivityState::HomeActive};

// Activities whose duration is sampled rather than governed by the chain.
inline constexpr std::array<ActivityState, 4> kEventStates = {
    ActivityState::Cooking, ActivityState::Dishwashing, ActivityState::Laundry,
    ActivityState::PersonalHygiene};

enum class DayType : std::uint8_t { Weekday = 0, Weekend = 1 };

inline constexpr std::size_t index_of(ActivityState s) { return static_cast<std::size_t>(s); }

inline constexpr ActivityState project_state(ActivityState s) {
    switch (s) {
    case ActivityState::Sleep:
    case ActivityState::Away:
        return s;
    default:
        return ActivityState::HomeActive;
    }
}

inline constexpr bool is_event_state(ActivityState s) {
    return s == ActivityState::Cooking || s == ActivityState::Dishwashing ||
           s == ActivityState::Laundry || s == ActivityState::PersonalHygiene;
}

// Home and awake: HomeActive or any event activity.
inline constexpr bool is_active_at_home(ActivityState s) {
    return s != ActivityState::Sleep && s != ActivityState::Away;
}

std::string_view state_token(ActivityState s);
std::optional<ActivityState> parse_state(std::string_view token);

std::string_view day_type_token(DayType d); // "WD" / "WE"
std::optional<DayType> parse_day_type(std::string_view token);

} // namespace occsim
