#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "occsim/rng.hpp"

namespace occsim {

/// Discrete value -> probability table sampled by inverse CDF. Used for
/// durations, onsets, daily counts, flow rates and power levels; the unit is
/// carried for file round trips only.
///
/// A default-constructed distribution is empty (no observations). Every
/// non-empty distribution has a strictly increasing support and
/// probabilities summing to one.
class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;

    /// Builds from (value, weight) observations. Duplicate values are merged,
    /// weights are normalized. Zero total weight yields an empty distribution.
    static EmpiricalDistribution from_weighted(std::vector<std::pair<double, double>> observations,
                                               std::string unit = {});
    static EmpiricalDistribution from_values(const std::vector<double>& values, std::string unit = {});
    /// Single value with probability one.
    static EmpiricalDistribution point(double value, std::string unit = {});
    /// Explicit table; throws std::invalid_argument if not a valid distribution.
    static EmpiricalDistribution from_table(std::vector<double> support, std::vector<double> probs,
                                            std::string unit = {});

    bool empty() const { return support_.empty(); }
    std::size_t size() const { return support_.size(); }
    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }
    const std::string& unit() const { return unit_; }

    /// P(X <= x).
    double cdf(double x) const;
    double mean() const;
    double min_value() const;
    double max_value() const;

    /// Draws one support value. Throws std::logic_error when empty.
    double sample(Rng& rng) const;

    friend bool operator==(const EmpiricalDistribution&, const EmpiricalDistribution&) = default;

private:
    std::vector<double> support_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
    std::string unit_;
};

/// File format: first line `unit,<unit>`, then `value,probability` lines.
void save_distribution(const EmpiricalDistribution& dist, const std::filesystem::path& path);
EmpiricalDistribution load_distribution(const std::filesystem::path& path);

/// Named distributions for the appliance and fixture channels, e.g.
/// `shower.duration` or `clothes_washer.power.level`.
class DistributionBundle {
public:
    void set(const std::string& name, EmpiricalDistribution dist) { dists_[name] = std::move(dist); }
    bool contains(const std::string& name) const { return dists_.count(name) != 0; }
    /// Throws std::out_of_range naming the channel when absent.
    const EmpiricalDistribution& get(const std::string& name) const;
    const std::map<std::string, EmpiricalDistribution>& all() const { return dists_; }

private:
    std::map<std::string, EmpiricalDistribution> dists_;
};

} // namespace occsim
