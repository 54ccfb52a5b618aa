#include "occsim/diary.hpp"

#include <stdexcept>

#include "text.hpp"

namespace occsim {

void ActivityCodeMap::add(const std::string& code, ActivityState state) {
    const auto [it, inserted] = map_.emplace(code, state);
    if (!inserted && it->second != state)
        throw std::invalid_argument("activity code '" + code + "' mapped to both '" +
                                    std::string(state_token(it->second)) + "' and '" +
                                    std::string(state_token(state)) + "'");
}

const ActivityState* ActivityCodeMap::find(std::string_view code) const {
    const auto it = map_.find(code);
    return it == map_.end() ? nullptr : &it->second;
}

ActivityCodeMap ActivityCodeMap::canonical(ActivityState default_state) {
    ActivityCodeMap m(default_state);
    for (const auto s : kAllStates) m.add(std::string(state_token(s)), s);
    return m;
}

ActivityCodeMap load_code_map(const std::filesystem::path& path) {
    auto in = text::open_input(path);
    ActivityCodeMap m;
    bool have_default = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto f = text::split(t);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (f.size() != 2) throw std::runtime_error(where + ": expected raw_code,canonical_state");
        const auto state = parse_state(f[1]);
        if (!state) throw std::runtime_error(where + ": unknown canonical state '" + std::string(f[1]) + "'");
        if (f[0] == "DEFAULT") {
            if (have_default) throw std::runtime_error(where + ": duplicate DEFAULT line");
            m.set_default(*state);
            have_default = true;
        } else {
            try {
                m.add(std::string(f[0]), *state);
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error(where + ": " + e.what());
            }
        }
    }
    if (!have_default) throw std::runtime_error(path.string() + ": missing DEFAULT line");
    return m;
}

void save_code_map(const ActivityCodeMap& map, const std::filesystem::path& path) {
    auto out = text::open_output(path);
    for (const auto& [code, state] : map.entries()) out << code << ',' << state_token(state) << '\n';
    out << "DEFAULT," << state_token(map.default_state()) << '\n';
    text::close_output(out, path);
}

DiaryParseResult parse_diaries(const std::filesystem::path& path, const ActivityCodeMap& code_map) {
    auto in = text::open_input(path);
    DiaryParseResult result;
    std::string line;
    if (!std::getline(in, line)) return result; // header only / empty file

    std::vector<std::string_view> f;
    std::size_t line_no = 1;
    std::size_t record = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const std::size_t this_record = record++;
        auto fail = [&](std::string msg) {
            result.errors.push_back({line_no, this_record, std::move(msg)});
        };
        text::split(line, ',', f);
        if (f.size() < 3) {
            fail("expected respondent_id,day_type,weight,<1440 codes>");
            continue;
        }
        if (f.size() - 3 != kMinutesPerDay) {
            fail("expected 1440 minute codes, found " + std::to_string(f.size() - 3));
            continue;
        }
        const auto day_type = parse_day_type(f[1]);
        if (!day_type) {
            fail("day_type must be WD or WE, found '" + std::string(f[1]) + "'");
            continue;
        }
        const auto weight = text::to_double(f[2]);
        if (!weight) {
            fail("weight is not a number: '" + std::string(f[2]) + "'");
            continue;
        }
        if (*weight < 0.0) {
            fail("negative weight " + std::string(f[2]));
            continue;
        }
        RawDiary d;
        d.respondent_id = std::string(f[0]);
        d.day_type = *day_type;
        d.weight = *weight;
        std::size_t unknown = 0;
        for (std::size_t m = 0; m < kMinutesPerDay; ++m) {
            if (const auto* s = code_map.find(f[3 + m])) {
                d.minutes[m] = *s;
            } else {
                d.minutes[m] = code_map.default_state();
                ++unknown;
            }
        }
        result.unknown_codes += unknown;
        result.diaries.push_back(std::move(d));
    }
    return result;
}

void write_diaries(const std::vector<RawDiary>& diaries, const std::filesystem::path& path) {
    auto out = text::open_output(path);
    out << "respondent_id,day_type,weight";
    for (std::size_t m = 0; m < kMinutesPerDay; ++m) out << ",m" << m;
    out << '\n';
    for (const auto& d : diaries) {
        out << d.respondent_id << ',' << day_type_token(d.day_type) << ',' << text::fmt(d.weight, "%.17g");
        for (const auto s : d.minutes) out << ',' << state_token(s);
        out << '\n';
    }
    text::close_output(out, path);
}

StateSequence resample_to_sequence(const RawDiary& diary) {
    StateSequence seq;
    seq.respondent_id = diary.respondent_id;
    seq.day_type = diary.day_type;
    seq.weight = diary.weight;
    for (std::size_t step = 0; step < kStepsPerDay; ++step) {
        std::array<int, kNumActivityStates> count{};
        std::array<int, kNumActivityStates> first{};
        first.fill(static_cast<int>(kMinutesPerStep));
        for (std::size_t m = 0; m < kMinutesPerStep; ++m) {
            const auto i = index_of(diary.minutes[step * kMinutesPerStep + m]);
            if (count[i]++ == 0) first[i] = static_cast<int>(m);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < kNumActivityStates; ++i) {
            if (count[i] > count[best] || (count[i] == count[best] && first[i] < first[best])) best = i;
        }
        seq.states[step] = static_cast<ActivityState>(best);
    }
    return seq;
}

StateSequence project_to_presence(const StateSequence& seq) {
    StateSequence out = seq;
    for (auto& s : out.states) s = project_state(s);
    return out;
}

void write_sequences(const std::vector<StateSequence>& seqs, const std::filesystem::path& path) {
    auto out = text::open_output(path);
    out << "respondent_id,day_type,weight";
    for (std::size_t t = 0; t < kStepsPerDay; ++t) out << ",s" << t;
    out << '\n';
    for (const auto& s : seqs) {
        out << s.respondent_id << ',' << day_type_token(s.day_type) << ',' << text::fmt(s.weight, "%.17g");
        for (const auto st : s.states) out << ',' << state_token(st);
        out << '\n';
    }
    text::close_output(out, path);
}

std::vector<StateSequence> read_sequences(const std::filesystem::path& path) {
    auto in = text::open_input(path);
    std::vector<StateSequence> seqs;
    std::string line;
    if (!std::getline(in, line)) return seqs;
    std::vector<std::string_view> f;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        text::split(line, ',', f);
        if (f.size() != 3 + kStepsPerDay) throw std::runtime_error(where + ": expected 96 state tokens");
        StateSequence s;
        s.respondent_id = std::string(f[0]);
        const auto dt = parse_day_type(f[1]);
        if (!dt) throw std::runtime_error(where + ": bad day_type");
        s.day_type = *dt;
        s.weight = text::require_double(f[2], where);
        if (s.weight < 0.0) throw std::runtime_error(where + ": negative weight");
        for (std::size_t t = 0; t < kStepsPerDay; ++t) {
            const auto st = parse_state(f[3 + t]);
            if (!st) throw std::runtime_error(where + ": unknown state token '" + std::string(f[3 + t]) + "'");
            s.states[t] = *st;
        }
        seqs.push_back(std::move(s));
    }
    return seqs;
}

std::vector<StateSequence> load_sequences(const std::filesystem::path& path, const ActivityCodeMap* code_map) {
    std::size_t columns = 0;
    {
        auto in = text::open_input(path);
        std::string header;
        std::getline(in, header);
        columns = text::split(header).size();
    }
    if (columns == 3 + kStepsPerDay) return read_sequences(path);
    if (columns != 3 + kMinutesPerDay)
        throw std::runtime_error(path.string() + ": header has " + std::to_string(columns) +
                                 " columns; expected a diary (1443) or sequence (99) file");
    const ActivityCodeMap fallback = ActivityCodeMap::canonical();
    const auto parsed = parse_diaries(path, code_map ? *code_map : fallback);
    if (!parsed.errors.empty()) {
        const auto& e = parsed.errors.front();
        throw std::runtime_error(path.string() + ":" + std::to_string(e.line) + ": " + e.message + " (" +
                                 std::to_string(parsed.errors.size()) + " bad records)");
    }
    std::vector<StateSequence> seqs;
    seqs.reserve(parsed.diaries.size());
    for (const auto& d : parsed.diaries) seqs.push_back(resample_to_sequence(d));
    return seqs;
}

std::vector<StateSequence> filter_day_type(const std::vector<StateSequence>& seqs, DayType day_type) {
    std::vector<StateSequence> out;
    for (const auto& s : seqs)
        if (s.day_type == day_type) out.push_back(s);
    return out;
}

} // namespace occsim
