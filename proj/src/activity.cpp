#include "occsim/activity.hpp"

namespace occsim {

namespace {
constexpr std::array<std::string_view, kNumActivityStates> kTokens = {
    "sleep", "away", "active", "cooking", "dishwashing", "laundry", "hygiene"};
}

std::string_view state_token(ActivityState s) { return kTokens[index_of(s)]; }

std::optional<ActivityState> parse_state(std::string_view token) {
    for (std::size_t i = 0; i < kTokens.size(); ++i) {
        if (kTokens[i] == token) return static_cast<ActivityState>(i);
    }
    return std::nullopt;
}

std::string_view day_type_token(DayType d) { return d == DayType::Weekday ? "WD" : "WE"; }

std::optional<DayType> parse_day_type(std::string_view token) {
    if (token == "WD") return DayType::Weekday;
    if (token == "WE") return DayType::Weekend;
    return std::nullopt;
}

} // namespace occsim
