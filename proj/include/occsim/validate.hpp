#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "occsim/markov.hpp"

namespace occsim {

/// Two-sample Kolmogorov-Smirnov statistic: sup |F_a(x) - F_b(x)| over the
/// union of supports. Both sides empty gives 0; exactly one empty gives 1.
double ks_statistic(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Chi-square goodness of fit of observed counts against expected counts on
/// a shared ascending set of bins. Adjacent bins are pooled from the low end
/// until each pooled expected count reaches 5; a short remainder joins the
/// last pooled bin. Fewer than two bins gives p = 1.
struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};
ChiSquareResult chi_square_pooled(std::span<const double> observed, std::span<const double> expected,
                                  double min_expected = 5.0);

/// Occurrence-count test: simulated per-day counts (scaled to the simulated
/// weight) against the reference count distribution.
ChiSquareResult occurrence_chi_square(const ActivityStatistics& sim, const ActivityStatistics& ref);

/// Mean absolute difference of two 96-step profiles.
double profile_mad(std::span<const double> a, std::span<const double> b);

struct ActivityComparison {
    ActivityState activity = ActivityState::Sleep;
    bool applicable = true; // false when neither side has a single run
    double ks_duration = 0.0;
    double ks_onset = 0.0;
    double occurrence_chi2_p = 1.0;
    double profile_mad = 0.0;
    std::size_t sim_days = 0;
    std::size_t ref_days = 0;
    std::size_t sim_runs = 0;
    std::size_t ref_runs = 0;
};

struct ComparisonReport {
    DayType day_type = DayType::Weekday;
    std::array<ActivityComparison, kNumActivityStates> activities;

    const ActivityComparison& operator[](ActivityState s) const { return activities[index_of(s)]; }
};

/// Reduces the simulated days with estimate_statistics and compares them
/// activity by activity. Throws std::invalid_argument if either side is empty.
ComparisonReport compare_behavior(std::span<const StateSequence> sim_days, const ActivityStatisticsSet& ref_stats,
                                  DayType day_type = DayType::Weekday);

/// `metric,activity,value` rows; metric names carry the day type suffix
/// (e.g. `ks_duration_WD`). Non-applicable metrics are written as `NA`.
void write_report(std::span<const ComparisonReport> reports, const std::filesystem::path& path);
void print_summary(std::span<const ComparisonReport> reports, std::ostream& os);

struct ProfileBand {
    std::vector<double> mean;
    std::vector<double> se;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Per-step mean and standard error (sample sd / sqrt(n)) across homes,
/// with mean -/+ 1.96 SE bounds. Needs at least two equal-length profiles.
ProfileBand band(const std::vector<std::vector<double>>& profiles);

/// Fraction of steps where lower <= sim <= upper.
double coverage(std::span<const double> sim_profile, const ProfileBand& band);

} // namespace occsim
