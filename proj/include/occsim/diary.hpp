#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "occsim/activity.hpp"

namespace occsim {

/// Raw activity code -> canonical state. Codes not in the table resolve to
/// the default state.
class ActivityCodeMap {
public:
    explicit ActivityCodeMap(ActivityState default_state = ActivityState::HomeActive)
        : default_state_(default_state) {}

    /// Throws std::invalid_argument if `code` is already mapped to a different state.
    void add(const std::string& code, ActivityState state);
    /// Returns nullptr for unknown codes.
    const ActivityState* find(std::string_view code) const;
    ActivityState default_state() const { return default_state_; }
    void set_default(ActivityState s) { default_state_ = s; }
    std::size_t size() const { return map_.size(); }
    const std::map<std::string, ActivityState, std::less<>>& entries() const { return map_; }

    /// Identity map over the canonical tokens (sleep, away, active, ...).
    static ActivityCodeMap canonical(ActivityState default_state = ActivityState::HomeActive);

private:
    std::map<std::string, ActivityState, std::less<>> map_;
    ActivityState default_state_;
};

/// `raw_code,canonical_state` lines plus one `DEFAULT,<state>` line.
ActivityCodeMap load_code_map(const std::filesystem::path& path);
void save_code_map(const ActivityCodeMap& map, const std::filesystem::path& path);

/// One respondent-day at one-minute resolution, minute 0 = 4:00 a.m.
struct RawDiary {
    std::string respondent_id;
    DayType day_type = DayType::Weekday;
    double weight = 1.0;
    std::array<ActivityState, kMinutesPerDay> minutes{};
};

/// One occupant-day at 15-minute resolution, step 0 = 4:00 a.m.
struct StateSequence {
    std::string respondent_id;
    DayType day_type = DayType::Weekday;
    double weight = 1.0;
    std::array<ActivityState, kStepsPerDay> states{};

    friend bool operator==(const StateSequence&, const StateSequence&) = default;
};

struct RecordError {
    std::size_t line = 0;   // 1-based line in the file
    std::size_t record = 0; // 0-based data record index
    std::string message;
};

struct DiaryParseResult {
    std::vector<RawDiary> diaries;
    std::vector<RecordError> errors;
    std::size_t unknown_codes = 0;
};

/// Parses a diary file (`respondent_id,day_type,weight,<1440 codes>` per
/// line after one header line). Bad records are reported, not fatal; an
/// unreadable file throws std::runtime_error.
DiaryParseResult parse_diaries(const std::filesystem::path& path, const ActivityCodeMap& code_map);

/// Writes diaries with canonical tokens as codes.
void write_diaries(const std::vector<RawDiary>& diaries, const std::filesystem::path& path);

/// Majority state of each 15-minute window; ties go to the state that
/// occurs first within the window.
StateSequence resample_to_sequence(const RawDiary& diary);

/// Maps every state onto {Sleep, Away, HomeActive}.
StateSequence project_to_presence(const StateSequence& seq);

/// Sequence file: header line, then `respondent_id,day_type,weight,<96 tokens>`.
void write_sequences(const std::vector<StateSequence>& seqs, const std::filesystem::path& path);
std::vector<StateSequence> read_sequences(const std::filesystem::path& path);

/// Reads either a raw diary file (resampled on the fly, needs `code_map`)
/// or a sequence file, detected from the column count of the header.
/// Throws std::runtime_error if any record is malformed.
std::vector<StateSequence> load_sequences(const std::filesystem::path& path, const ActivityCodeMap* code_map);

std::vector<StateSequence> filter_day_type(const std::vector<StateSequence>& seqs, DayType day_type);

} // namespace occsim
