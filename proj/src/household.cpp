#include "occsim/household.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "text.hpp"

namespace occsim {

std::string_view appliance_token(Appliance a) {
    switch (a) {
    case Appliance::CookingRange: return "cooking_range";
    case Appliance::Dishwasher: return "dishwasher";
    case Appliance::ClothesWasher: return "clothes_washer";
    case Appliance::ClothesDryer: return "clothes_dryer";
    }
    return "?";
}

std::string_view fixture_token(Fixture f) {
    switch (f) {
    case Fixture::Shower: return "shower";
    case Fixture::Bath: return "bath";
    case Fixture::Sink: return "sink";
    case Fixture::DishwasherWater: return "dishwasher";
    case Fixture::ClothesWasherWater: return "clothes_washer";
    }
    return "?";
}

std::vector<std::string> required_bundle_channels() {
    std::vector<std::string> names = {"shower.duration", "shower.flow", "bath.duration", "bath.flow",
                                      "sink.onset",      "sink.count",  "sink.duration", "sink.flow"};
    for (const auto a : {Appliance::CookingRange, Appliance::Dishwasher, Appliance::ClothesWasher,
                         Appliance::ClothesDryer}) {
        const std::string base(appliance_token(a));
        names.push_back(base + ".power.duration");
        names.push_back(base + ".power.level");
        if (a == Appliance::Dishwasher || a == Appliance::ClothesWasher) {
            names.push_back(base + ".water.duration");
            names.push_back(base + ".water.flow");
        }
    }
    return names;
}

namespace {

void check_probability_vector(const std::vector<double>& v, const std::string& what) {
    if (v.empty()) throw std::invalid_argument(what + " is empty");
    double total = 0.0;
    for (const double p : v) {
        if (!(p >= 0.0)) throw std::invalid_argument(what + " has a negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument(what + " does not sum to 1");
}

std::vector<double> parse_list(std::string_view value, const std::string& where) {
    std::vector<double> out;
    for (const auto f : text::split(value)) out.push_back(text::require_double(f, where));
    return out;
}

} // namespace

void HouseholdConfig::validate(const SimCalendar& calendar) const {
    if (occupant_count.empty()) throw std::invalid_argument("household config: occupant_count distribution is required");
    for (const double v : occupant_count.support())
        if (v < 1.0 || v != std::floor(v))
            throw std::invalid_argument("household config: occupant counts must be positive integers");
    check_probability_vector(cluster_shares_wd, "household config: cluster_shares_wd");
    check_probability_vector(cluster_shares_we, "household config: cluster_shares_we");
    if (!(shower_fraction >= 0.0 && shower_fraction <= 1.0))
        throw std::invalid_argument("household config: shower_fraction must lie in [0, 1]");
    if (vacation) {
        if (vacation->end_day < vacation->start_day)
            throw std::invalid_argument("household config: vacation ends before it starts");
        if (vacation->end_day > calendar.n_days)
            throw std::invalid_argument("household config: vacation extends past the calendar");
    }
}

HouseholdConfigFile load_household_config(const std::filesystem::path& path) {
    auto in = text::open_input(path);
    HouseholdConfigFile file;
    auto& cfg = file.config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw std::runtime_error(where + ": expected key = value");
        const auto key = text::trim(t.substr(0, eq));
        const auto value = text::trim(t.substr(eq + 1));
        if (key == "occupant_count") {
            std::vector<std::pair<double, double>> obs;
            for (const auto item : text::split(value)) {
                const auto colon = item.find(':');
                if (colon == std::string_view::npos) throw std::runtime_error(where + ": expected count:probability");
                obs.emplace_back(text::require_double(item.substr(0, colon), where),
                                 text::require_double(item.substr(colon + 1), where));
            }
            cfg.occupant_count = EmpiricalDistribution::from_weighted(std::move(obs), "occupants");
        } else if (key == "cluster_shares_wd") {
            cfg.cluster_shares_wd = parse_list(value, where);
            file.wd_shares_given = true;
        } else if (key == "cluster_shares_we") {
            cfg.cluster_shares_we = parse_list(value, where);
            file.we_shares_given = true;
        } else if (key == "vacation") {
            const auto v = parse_list(value, where);
            if (v.size() != 2 || v[0] < 0 || v[1] < 0) throw std::runtime_error(where + ": vacation = start_day, end_day");
            cfg.vacation = VacationWindow{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
        } else if (key == "shower_fraction") {
            cfg.shower_fraction = text::require_double(value, where);
        } else if (key == "occupancy_mode") {
            if (value == "present") cfg.occupancy_mode = OccupancyMode::Present;
            else if (value == "awake") cfg.occupancy_mode = OccupancyMode::Awake;
            else throw std::runtime_error(where + ": occupancy_mode must be present or awake");
        } else {
            throw std::runtime_error(where + ": unknown key '" + std::string(key) + "'");
        }
    }
    return file;
}

void save_household_config(const HouseholdConfig& config, const std::filesystem::path& path, bool write_shares) {
    auto out = text::open_output(path);
    auto list = [&](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << text::fmt(v[i], "%.17g");
    };
    out << "occupant_count = ";
    for (std::size_t i = 0; i < config.occupant_count.size(); ++i)
        out << (i ? ", " : "") << text::fmt(config.occupant_count.support()[i], "%.17g") << ':'
            << text::fmt(config.occupant_count.probs()[i], "%.17g");
    out << '\n';
    if (write_shares) {
        out << "cluster_shares_wd = ";
        list(config.cluster_shares_wd);
        out << "\ncluster_shares_we = ";
        list(config.cluster_shares_we);
        out << '\n';
    }
    out << "shower_fraction = " << text::fmt(config.shower_fraction, "%.17g") << '\n';
    out << "occupancy_mode = " << (config.occupancy_mode == OccupancyMode::Present ? "present" : "awake") << '\n';
    if (config.vacation) out << "vacation = " << config.vacation->start_day << ", " << config.vacation->end_day << '\n';
    text::close_output(out, path);
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        acc += probs[i];
        last = i;
        if (u < acc) return i;
    }
    return last;
}

SampledHousehold sample_household(const HouseholdConfig& config, Rng& rng) {
    SampledHousehold h;
    h.n = static_cast<std::size_t>(std::llround(config.occupant_count.sample(rng)));
    for (std::size_t i = 0; i < h.n; ++i) {
        OccupantProfile p;
        p.occupant_id = i;
        p.weekday_cluster = sample_index(config.cluster_shares_wd, rng);
        p.weekend_cluster = sample_index(config.cluster_shares_we, rng);
        h.occupants.push_back(p);
    }
    return h;
}

std::vector<Interval> activity_intervals(const std::vector<OccupantDaySchedule>& year, ActivityState activity) {
    std::vector<Interval> out;
    for (const auto& day : year) {
        const auto base = static_cast<std::int64_t>(day.day_index * kMinutesPerDay);
        std::size_t t = 0;
        while (t < kStepsPerDay) {
            if (day.states[t] != activity) {
                ++t;
                continue;
            }
            const std::size_t start = t;
            while (t < kStepsPerDay && day.states[t] == activity) ++t;
            out.push_back({base + static_cast<std::int64_t>(start * kMinutesPerStep),
                           base + static_cast<std::int64_t>(t * kMinutesPerStep)});
        }
    }
    return out;
}

std::vector<Interval> merge_shared_events(const std::vector<std::vector<Interval>>& per_occupant, Appliance appliance) {
    if (appliance == Appliance::ClothesDryer)
        throw std::invalid_argument("merge_shared_events: only range, dishwasher and clothes washer activity is shared");
    std::vector<Interval> all;
    for (const auto& list : per_occupant) all.insert(all.end(), list.begin(), list.end());
    std::sort(all.begin(), all.end(),
              [](const Interval& a, const Interval& b) { return a.start != b.start ? a.start < b.start : a.end < b.end; });
    std::vector<Interval> merged;
    for (const auto& iv : all) {
        if (!merged.empty() && iv.start <= merged.back().end) merged.back().end = std::max(merged.back().end, iv.end);
        else merged.push_back(iv);
    }
    return merged;
}

std::vector<ApplianceEvent> attach_appliance_events(ActivityState activity, const std::vector<Interval>& intervals,
                                                    const DistributionBundle& bundle, Rng& rng,
                                                    std::int64_t year_minutes) {
    Appliance primary;
    bool water = false;
    switch (activity) {
    case ActivityState::Cooking: primary = Appliance::CookingRange; break;
    case ActivityState::Dishwashing: primary = Appliance::Dishwasher; water = true; break;
    case ActivityState::Laundry: primary = Appliance::ClothesWasher; water = true; break;
    default:
        throw std::invalid_argument("attach_appliance_events: no appliance for activity '" +
                                    std::string(state_token(activity)) + "'");
    }
    const std::string base(appliance_token(primary));
    const auto& power_duration = bundle.get(base + ".power.duration");
    const auto& power_level = bundle.get(base + ".power.level");
    const EmpiricalDistribution* water_duration = water ? &bundle.get(base + ".water.duration") : nullptr;
    const EmpiricalDistribution* water_flow = water ? &bundle.get(base + ".water.flow") : nullptr;
    const bool laundry = activity == ActivityState::Laundry;
    const EmpiricalDistribution* dryer_duration = laundry ? &bundle.get("clothes_dryer.power.duration") : nullptr;
    const EmpiricalDistribution* dryer_level = laundry ? &bundle.get("clothes_dryer.power.level") : nullptr;

    std::vector<ApplianceEvent> events;
    for (const auto& iv : intervals) {
        ApplianceEvent e;
        e.appliance = primary;
        e.start = iv.start;
        e.power_duration = power_duration.sample(rng);
        e.power_level = power_level.sample(rng);
        if (water) {
            e.water_duration = water_duration->sample(rng);
            e.water_flow = water_flow->sample(rng);
        }
        events.push_back(e);
        if (laundry) {
            ApplianceEvent dryer;
            dryer.appliance = Appliance::ClothesDryer;
            dryer.start = e.start + static_cast<std::int64_t>(std::ceil(e.power_duration));
            dryer.power_duration = dryer_duration->sample(rng);
            dryer.power_level = dryer_level->sample(rng);
            if (dryer.start < year_minutes) events.push_back(dryer);
        }
    }
    return events;
}

std::vector<WaterEvent> attach_hygiene_water(const std::vector<std::vector<Interval>>& per_occupant_hygiene,
                                             const DistributionBundle& bundle, double shower_fraction, Rng& rng) {
    const auto& shower_duration = bundle.get("shower.duration");
    const auto& shower_flow = bundle.get("shower.flow");
    const auto& bath_duration = bundle.get("bath.duration");
    const auto& bath_flow = bundle.get("bath.flow");
    std::vector<WaterEvent> out;
    for (std::size_t occ = 0; occ < per_occupant_hygiene.size(); ++occ) {
        for (const auto& iv : per_occupant_hygiene[occ]) {
            WaterEvent e;
            e.occupant = occ;
            const bool shower = rng.uniform() < shower_fraction;
            e.fixture = shower ? Fixture::Shower : Fixture::Bath;
            e.duration = std::max(1.0, (shower ? shower_duration : bath_duration).sample(rng));
            e.flow = (shower ? shower_flow : bath_flow).sample(rng);
            const auto length = static_cast<double>(iv.end - iv.start);
            if (e.duration >= length) {
                e.start = iv.start;
                e.duration = length;
            } else {
                const auto slots = static_cast<std::uint64_t>(std::floor(length - e.duration)) + 1;
                e.start = iv.start + static_cast<std::int64_t>(rng.below(slots));
            }
            out.push_back(e);
        }
    }
    return out;
}

std::vector<WaterEvent> generate_sink_events(const OccupancyTrace& trace, const DistributionBundle& bundle, Rng& rng) {
    const auto& onset = bundle.get("sink.onset");
    const auto& count = bundle.get("sink.count");
    const auto& duration = bundle.get("sink.duration");
    const auto& flow = bundle.get("sink.flow");
    const std::size_t n_days = trace.active_any.size() / kStepsPerDay;
    std::vector<WaterEvent> out;
    for (std::size_t d = 0; d < n_days; ++d) {
        const auto draws = static_cast<std::size_t>(std::max(0LL, std::llround(count.sample(rng))));
        for (std::size_t i = 0; i < draws; ++i) {
            for (std::size_t attempt = 0; attempt < kPlacementRetries; ++attempt) {
                const double step_value = onset.sample(rng);
                if (step_value < 0.0 || step_value >= static_cast<double>(kStepsPerDay)) continue;
                const auto step = static_cast<std::size_t>(step_value);
                if (!trace.active_any[d * kStepsPerDay + step]) continue;
                WaterEvent e;
                e.fixture = Fixture::Sink;
                e.start = static_cast<std::int64_t>(d * kMinutesPerDay + step * kMinutesPerStep + rng.below(kMinutesPerStep));
                e.duration = std::max(1.0, duration.sample(rng));
                e.flow = flow.sample(rng);
                out.push_back(e);
                break;
            }
        }
    }
    return out;
}

OccupancyTrace occupancy_fraction(const std::vector<std::vector<OccupantDaySchedule>>& occupants, OccupancyMode mode) {
    if (occupants.empty()) throw std::invalid_argument("occupancy_fraction: household has no occupants");
    OccupancyTrace trace;
    trace.occupants = occupants.size();
    const std::size_t n_days = occupants.front().size();
    const std::size_t steps = n_days * kStepsPerDay;
    std::vector<std::size_t> counted(steps, 0);
    trace.active_any.assign(steps, 0);
    for (const auto& year : occupants) {
        if (year.size() != n_days) throw std::invalid_argument("occupancy_fraction: occupants cover different day counts");
        for (const auto& day : year) {
            for (std::size_t t = 0; t < kStepsPerDay; ++t) {
                const std::size_t i = day.day_index * kStepsPerDay + t;
                const ActivityState s = day.states[t];
                const bool active = is_active_at_home(s);
                if (mode == OccupancyMode::Present ? s != ActivityState::Away : active) ++counted[i];
                if (active) trace.active_any[i] = 1;
            }
        }
    }
    trace.present_fraction.resize(steps);
    const auto n = static_cast<double>(occupants.size());
    for (std::size_t i = 0; i < steps; ++i) trace.present_fraction[i] = static_cast<double>(counted[i]) / n;
    return trace;
}

std::vector<double> modulate_schedule(std::span<const double> reference, std::span<const double> fraction) {
    if (fraction.size() % kStepsPerDay != 0)
        throw std::invalid_argument("modulate_schedule: fraction must cover whole days");
    const bool tiled = reference.size() == kStepsPerDay;
    if (!tiled && reference.size() != fraction.size())
        throw std::invalid_argument("modulate_schedule: reference must have 96 values or match the fraction length");
    std::vector<double> out(fraction.size());
    for (std::size_t day = 0; day < fraction.size() / kStepsPerDay; ++day) {
        const auto ref = tiled ? reference : reference.subspan(day * kStepsPerDay, kStepsPerDay);
        const double floor_value = *std::min_element(ref.begin(), ref.end());
        for (std::size_t t = 0; t < kStepsPerDay; ++t) {
            const std::size_t i = day * kStepsPerDay + t;
            const double f = fraction[i];
            // Rounding can step a hair outside [floor, ref]; the clamp leaves both endpoints exact.
            out[i] = std::clamp(ref[t] * f + floor_value * (1.0 - f), floor_value, ref[t]);
        }
    }
    return out;
}

void apply_vacation(HouseholdActivity& household, const VacationWindow& window) {
    if (window.end_day < window.start_day) throw std::invalid_argument("apply_vacation: window ends before it starts");
    const std::size_t n_days = household.occupant_days.empty() ? 0 : household.occupant_days.front().size();
    if (window.end_day > n_days) throw std::invalid_argument("apply_vacation: window extends past the calendar");
    if (window.start_day == window.end_day) return;

    for (auto& year : household.occupant_days)
        for (auto& day : year)
            if (day.day_index >= window.start_day && day.day_index < window.end_day) day.states.fill(ActivityState::Away);
    const auto lo = static_cast<std::int64_t>(window.start_day * kMinutesPerDay);
    const auto hi = static_cast<std::int64_t>(window.end_day * kMinutesPerDay);
    auto inside = [&](std::int64_t start) { return start >= lo && start < hi; };
    std::erase_if(household.appliance_events, [&](const ApplianceEvent& e) { return inside(e.start); });
    std::erase_if(household.water_events, [&](const WaterEvent& e) { return inside(e.start); });
    if (!household.occupant_days.empty()) household.trace = occupancy_fraction(household.occupant_days, household.mode);
}

} // namespace occsim
