#include "occsim/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "text.hpp"

namespace occsim {

double ks_statistic(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return 1.0;
    std::vector<double> xs = a.support();
    xs.insert(xs.end(), b.support().begin(), b.support().end());
    std::sort(xs.begin(), xs.end());
    double sup = 0.0;
    for (const double x : xs) sup = std::max(sup, std::abs(a.cdf(x) - b.cdf(x)));
    return std::min(sup, 1.0);
}

ChiSquareResult chi_square_pooled(std::span<const double> observed, std::span<const double> expected,
                                  double min_expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_pooled: length mismatch");
    std::vector<double> obs;
    std::vector<double> exp;
    double o_acc = 0.0;
    double e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (o_acc > 0.0 || e_acc > 0.0) {
        if (obs.empty()) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }
    ChiSquareResult r;
    if (obs.size() < 2) return r;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double d = obs[i] - exp[i];
        r.statistic += d * d / exp[i];
    }
    r.dof = obs.size() - 1;
    r.p_value = r.statistic > 0.0 ? boost::math::gamma_q(static_cast<double>(r.dof) / 2.0, r.statistic / 2.0) : 1.0;
    return r;
}

ChiSquareResult occurrence_chi_square(const ActivityStatistics& sim, const ActivityStatistics& ref) {
    if (sim.occurrences.empty() || ref.occurrences.empty()) return {};
    std::vector<double> bins = sim.occurrences.support();
    bins.insert(bins.end(), ref.occurrences.support().begin(), ref.occurrences.support().end());
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
    auto mass = [](const EmpiricalDistribution& d, double x) {
        const auto& s = d.support();
        const auto it = std::lower_bound(s.begin(), s.end(), x);
        return it != s.end() && *it == x ? d.probs()[static_cast<std::size_t>(it - s.begin())] : 0.0;
    };
    const double n = sim.total_weight;
    std::vector<double> observed;
    std::vector<double> expected;
    for (const double x : bins) {
        observed.push_back(mass(sim.occurrences, x) * n);
        expected.push_back(mass(ref.occurrences, x) * n);
    }
    return chi_square_pooled(observed, expected);
}

double profile_mad(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("profile_mad: profiles must be non-empty and aligned");
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
    return total / static_cast<double>(a.size());
}

ComparisonReport compare_behavior(std::span<const StateSequence> sim_days, const ActivityStatisticsSet& ref_stats,
                                  DayType day_type) {
    if (sim_days.empty()) throw std::invalid_argument("compare_behavior: no simulated days");
    if (ref_stats[0].sequence_count == 0) throw std::invalid_argument("compare_behavior: empty reference statistics");
    const auto sim_stats = estimate_all_statistics(sim_days);
    ComparisonReport report;
    report.day_type = day_type;
    for (const auto s : kAllStates) {
        const auto& sim = sim_stats[index_of(s)];
        const auto& ref = ref_stats[index_of(s)];
        auto& c = report.activities[index_of(s)];
        c.activity = s;
        c.sim_days = sim.sequence_count;
        c.ref_days = ref.sequence_count;
        c.sim_runs = sim.run_count;
        c.ref_runs = ref.run_count;
        c.applicable = sim.run_count > 0 || ref.run_count > 0;
        c.ks_duration = ks_statistic(sim.duration, ref.duration);
        c.ks_onset = ks_statistic(sim.onset, ref.onset);
        c.occurrence_chi2_p = occurrence_chi_square(sim, ref).p_value;
        c.profile_mad = profile_mad(sim.daily_profile, ref.daily_profile);
    }
    return report;
}

void write_report(std::span<const ComparisonReport> reports, const std::filesystem::path& path) {
    auto out = text::open_output(path);
    out << "metric,activity,value\n";
    for (const auto& r : reports) {
        const std::string suffix = "_" + std::string(day_type_token(r.day_type));
        for (const auto& c : r.activities) {
            const auto act = state_token(c.activity);
            auto row = [&](std::string_view metric, double v, bool na = false) {
                out << metric << suffix << ',' << act << ',' << (na ? std::string("NA") : text::fmt(v, "%.17g")) << '\n';
            };
            row("ks_duration", c.ks_duration, !c.applicable);
            row("ks_onset", c.ks_onset, !c.applicable);
            row("occurrence_chi2_p", c.occurrence_chi2_p, !c.applicable);
            row("profile_mad", c.profile_mad);
            row("sim_days", static_cast<double>(c.sim_days));
            row("ref_days", static_cast<double>(c.ref_days));
            row("sim_runs", static_cast<double>(c.sim_runs));
            row("ref_runs", static_cast<double>(c.ref_runs));
        }
    }
    text::close_output(out, path);
}

void print_summary(std::span<const ComparisonReport> reports, std::ostream& os) {
    char line[160];
    for (const auto& r : reports) {
        os << "day type " << day_type_token(r.day_type) << '\n';
        std::snprintf(line, sizeof line, "  %-10s %8s %8s %8s %8s %9s %9s\n", "activity", "ks_dur", "ks_on", "chi2_p",
                      "mad", "sim_runs", "ref_runs");
        os << line;
        for (const auto& c : r.activities) {
            if (!c.applicable) {
                std::snprintf(line, sizeof line, "  %-10s %8s %8s %8s %8.4f %9zu %9zu\n",
                              std::string(state_token(c.activity)).c_str(), "NA", "NA", "NA", c.profile_mad,
                              c.sim_runs, c.ref_runs);
            } else {
                std::snprintf(line, sizeof line, "  %-10s %8.4f %8.4f %8.4f %8.4f %9zu %9zu\n",
                              std::string(state_token(c.activity)).c_str(), c.ks_duration, c.ks_onset,
                              c.occurrence_chi2_p, c.profile_mad, c.sim_runs, c.ref_runs);
            }
            os << line;
        }
    }
}

ProfileBand band(const std::vector<std::vector<double>>& profiles) {
    if (profiles.size() < 2) throw std::invalid_argument("band: at least two profiles are required");
    const std::size_t steps = profiles.front().size();
    for (const auto& p : profiles)
        if (p.size() != steps) throw std::invalid_argument("band: profiles differ in length");
    const auto n = static_cast<double>(profiles.size());
    ProfileBand b;
    b.mean.assign(steps, 0.0);
    b.se.assign(steps, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        double sum = 0.0;
        for (const auto& p : profiles) sum += p[t];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& p : profiles) ss += (p[t] - mean) * (p[t] - mean);
        b.mean[t] = mean;
        b.se[t] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    b.lower.resize(steps);
    b.upper.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        b.lower[t] = b.mean[t] - 1.96 * b.se[t];
        b.upper[t] = b.mean[t] + 1.96 * b.se[t];
    }
    return b;
}

double coverage(std::span<const double> sim_profile, const ProfileBand& band) {
    if (sim_profile.size() != band.mean.size() || sim_profile.empty())
        throw std::invalid_argument("coverage: profile and band must be aligned");
    std::size_t inside = 0;
    for (std::size_t t = 0; t < sim_profile.size(); ++t)
        if (sim_profile[t] >= band.lower[t] && sim_profile[t] <= band.upper[t]) ++inside;
    return static_cast<double>(inside) / static_cast<double>(sim_profile.size());
}

} // namespace occsim
