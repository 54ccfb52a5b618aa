#include "occsim/schedule_io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "text.hpp"

namespace occsim {

namespace {

constexpr std::array<std::string_view, kNumChannels> kChannelNames = {
    "occupants",          "lighting",           "plug_loads",       "ceiling_fan",     "cooking_range",
    "dishwasher_power",   "clothes_washer_power", "clothes_dryer_power", "dishwasher_water",
    "clothes_washer_water", "showers",          "baths",            "sinks",
};

Channel power_channel(Appliance a) {
    switch (a) {
    case Appliance::CookingRange: return Channel::CookingRange;
    case Appliance::Dishwasher: return Channel::DishwasherPower;
    case Appliance::ClothesWasher: return Channel::ClothesWasherPower;
    case Appliance::ClothesDryer: return Channel::ClothesDryerPower;
    }
    return Channel::CookingRange;
}

Channel water_channel(Fixture f) {
    switch (f) {
    case Fixture::Shower: return Channel::Showers;
    case Fixture::Bath: return Channel::Baths;
    case Fixture::Sink: return Channel::Sinks;
    case Fixture::DishwasherWater: return Channel::DishwasherWater;
    case Fixture::ClothesWasherWater: return Channel::ClothesWasherWater;
    }
    return Channel::Sinks;
}

void deposit(std::vector<double>& series, double start, double duration, double magnitude) {
    if (!(duration > 0.0) || magnitude == 0.0) return;
    const double step = static_cast<double>(kMinutesPerStep);
    const double year_end = static_cast<double>(series.size()) * step;
    const double lo = std::max(0.0, start);
    const double hi = std::min(year_end, start + duration);
    if (hi <= lo) return;
    auto k = static_cast<std::size_t>(std::floor(lo / step));
    for (; k < series.size() && static_cast<double>(k) * step < hi; ++k) {
        const double overlap = std::min(hi, static_cast<double>(k + 1) * step) - std::max(lo, static_cast<double>(k) * step);
        if (overlap > 0.0) series[k] += overlap * magnitude;
    }
}

} // namespace

std::string_view channel_name(Channel c) { return kChannelNames[channel_index(c)]; }

ChannelColumns rasterize_events(const std::vector<WaterEvent>& water, const std::vector<ApplianceEvent>& appliances,
                                std::size_t n_days) {
    ChannelColumns cols;
    for (auto& c : cols) c.assign(n_days * kStepsPerDay, 0.0);
    for (const auto& e : appliances) {
        const auto start = static_cast<double>(e.start);
        deposit(cols[channel_index(power_channel(e.appliance))], start, e.power_duration, e.power_level);
        if (e.water_duration > 0.0) {
            const Channel wc = e.appliance == Appliance::Dishwasher ? Channel::DishwasherWater : Channel::ClothesWasherWater;
            deposit(cols[channel_index(wc)], start, e.water_duration, e.water_flow);
        }
    }
    for (const auto& e : water)
        deposit(cols[channel_index(water_channel(e.fixture))], static_cast<double>(e.start), e.duration, e.flow);
    return cols;
}

HouseholdScheduleYear normalize_columns(ChannelColumns raw, std::size_t n_days) {
    HouseholdScheduleYear s;
    s.n_days = n_days;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        auto& col = raw[c];
        if (col.empty()) col.assign(n_days * kStepsPerDay, 0.0);
        if (col.size() != n_days * kStepsPerDay)
            throw std::invalid_argument("normalize_columns: column '" + std::string(kChannelNames[c]) +
                                        "' has the wrong length");
        if (c == channel_index(Channel::Occupants)) {
            s.peaks[c] = 1.0;
        } else {
            const double peak = *std::max_element(col.begin(), col.end());
            s.peaks[c] = peak > 0.0 ? peak : 0.0;
            if (peak > 0.0)
                for (auto& v : col) v /= peak;
        }
        s.columns[c] = std::move(col);
    }
    return s;
}

void write_schedule_file(const HouseholdScheduleYear& schedule, const std::filesystem::path& path) {
    auto out = text::open_output(path);
    for (std::size_t c = 0; c < kNumChannels; ++c)
        out << "# peak," << kChannelNames[c] << ',' << text::fmt(schedule.peaks[c], "%.17g") << '\n';
    for (std::size_t c = 0; c < kNumChannels; ++c) out << (c ? "," : "") << kChannelNames[c];
    out << '\n';
    std::string row;
    char buf[32];
    for (std::size_t i = 0; i < schedule.n_steps(); ++i) {
        row.clear();
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            if (c) row.push_back(',');
            std::snprintf(buf, sizeof buf, "%.6f", schedule.columns[c][i]);
            row += buf;
        }
        row.push_back('\n');
        out << row;
    }
    text::close_output(out, path);
}

HouseholdScheduleYear read_schedule_file(const std::filesystem::path& path) {
    auto in = text::open_input(path);
    HouseholdScheduleYear s;
    std::string line;
    bool have_header = false;
    std::vector<std::string_view> f;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (t.front() == '#') {
            text::split(t.substr(1), ',', f);
            if (f.size() == 3 && f[0] == "peak") {
                for (std::size_t c = 0; c < kNumChannels; ++c)
                    if (kChannelNames[c] == f[1]) s.peaks[c] = text::require_double(f[2], where);
            }
            continue;
        }
        text::split(t, ',', f);
        if (f.size() != kNumChannels) throw std::runtime_error(where + ": expected 13 columns");
        if (!have_header) {
            for (std::size_t c = 0; c < kNumChannels; ++c)
                if (f[c] != kChannelNames[c]) throw std::runtime_error(where + ": unexpected column '" + std::string(f[c]) + "'");
            have_header = true;
            continue;
        }
        for (std::size_t c = 0; c < kNumChannels; ++c) s.columns[c].push_back(text::require_double(f[c], where));
    }
    if (!have_header) throw std::runtime_error(path.string() + ": missing header row");
    const std::size_t rows = s.columns[0].size();
    if (rows % kStepsPerDay != 0) throw std::runtime_error(path.string() + ": row count is not a whole number of days");
    s.n_days = rows / kStepsPerDay;
    return s;
}

std::string_view end_use_name(EndUse u) {
    switch (u) {
    case EndUse::Lighting: return "lighting";
    case EndUse::PlugLoads: return "plug_loads";
    case EndUse::CeilingFan: return "ceiling_fan";
    }
    return "?";
}

namespace {
constexpr std::array<EndUse, 3> kEndUses = {EndUse::Lighting, EndUse::PlugLoads, EndUse::CeilingFan};

std::filesystem::path reference_path(const std::filesystem::path& dir, EndUse u, DayType d) {
    return dir / (std::string(end_use_name(u)) + "." + std::string(day_type_token(d)) + ".csv");
}
} // namespace

ReferenceSchedules load_reference_schedules(const std::filesystem::path& dir) {
    ReferenceSchedules refs;
    for (const auto u : kEndUses) {
        for (const auto d : {DayType::Weekday, DayType::Weekend}) {
            const auto path = reference_path(dir, u, d);
            if (!std::filesystem::exists(path)) throw std::runtime_error("missing reference schedule '" + path.string() + "'");
            auto in = text::open_input(path);
            auto& values = refs.at(u, d);
            std::array<bool, kStepsPerDay> seen{};
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                const auto t = text::trim(line);
                if (t.empty() || t.front() == '#') continue;
                const std::string where = path.string() + ":" + std::to_string(line_no);
                const auto f = text::split(t);
                if (f.size() != 2) throw std::runtime_error(where + ": expected step,value");
                if (f[0] == "step") continue;
                const auto step = text::to_int(f[0]);
                if (!step || *step < 0 || *step >= static_cast<long long>(kStepsPerDay))
                    throw std::runtime_error(where + ": step must be in [0, 95]");
                const double v = text::require_double(f[1], where);
                if (v < 0.0) throw std::runtime_error(where + ": reference values must be nonnegative");
                values[static_cast<std::size_t>(*step)] = v;
                seen[static_cast<std::size_t>(*step)] = true;
            }
            if (std::find(seen.begin(), seen.end(), false) != seen.end())
                throw std::runtime_error(path.string() + ": every step 0..95 needs a value");
            if (*std::max_element(values.begin(), values.end()) <= 0.0)
                throw std::runtime_error(path.string() + ": reference day is all zero");
        }
    }
    return refs;
}

void save_reference_schedules(const ReferenceSchedules& refs, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto u : kEndUses) {
        for (const auto d : {DayType::Weekday, DayType::Weekend}) {
            const auto path = reference_path(dir, u, d);
            auto out = text::open_output(path);
            out << "step,value\n";
            const auto v = refs.get(u, d);
            for (std::size_t t = 0; t < kStepsPerDay; ++t) out << t << ',' << text::fmt(v[t], "%.17g") << '\n';
            text::close_output(out, path);
        }
    }
}

std::vector<double> tile_reference(const ReferenceSchedules& refs, EndUse use, const SimCalendar& calendar) {
    std::vector<double> out;
    out.reserve(calendar.n_days * kStepsPerDay);
    for (std::size_t d = 0; d < calendar.n_days; ++d) {
        const auto day = refs.get(use, calendar.day_type(d));
        out.insert(out.end(), day.begin(), day.end());
    }
    return out;
}

DistributionBundle load_distribution_bundle(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw std::runtime_error("distribution bundle '" + dir.string() + "' is not a directory");
    DistributionBundle bundle;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) bundle.set(p.filename().string(), load_distribution(p));
    return bundle;
}

void save_distribution_bundle(const DistributionBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, dist] : bundle.all()) save_distribution(dist, dir / name);
}

} // namespace occsim
