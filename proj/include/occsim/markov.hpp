#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "occsim/clustering.hpp"
#include "occsim/diary.hpp"
#include "occsim/distribution.hpp"

namespace occsim {

/// Row treatment for states never observed at a given step.
enum class FallbackPolicy {
    Absorbing, // self-transition with probability one
    Uniform,   // equal mass on every state
    Laplace,   // add-alpha smoothing on every row; unobserved rows fall back to absorbing if alpha == 0
};

struct TrainingOptions {
    FallbackPolicy fallback = FallbackPolicy::Absorbing;
    double alpha = 0.0;
};

/// Time-inhomogeneous first-order chain over one day: an initial
/// distribution for step 0 and one row-stochastic matrix per transition
/// t -> t+1.
class TPMSet {
public:
    TPMSet() = default;
    TPMSet(std::vector<ActivityState> alphabet, std::size_t steps);

    std::size_t cluster_id = 0;
    DayType day_type = DayType::Weekday;

    const std::vector<ActivityState>& alphabet() const { return alphabet_; }
    std::size_t size() const { return alphabet_.size(); }
    std::size_t steps() const { return steps_; }
    std::size_t transitions() const { return steps_ == 0 ? 0 : steps_ - 1; }

    std::optional<std::size_t> index_of_state(ActivityState s) const;

    std::vector<double>& initial() { return initial_; }
    const std::vector<double>& initial() const { return initial_; }

    double& at(std::size_t t, std::size_t from, std::size_t to) { return data_[(t * size() + from) * size() + to]; }
    double at(std::size_t t, std::size_t from, std::size_t to) const {
        return data_[(t * size() + from) * size() + to];
    }
    std::span<const double> row(std::size_t t, std::size_t from) const {
        return {data_.data() + (t * size() + from) * size(), size()};
    }

    /// Largest |row sum - 1| over the initial vector and every row; negative
    /// entries count as infinite deviation.
    double max_stochastic_error() const;

private:
    std::vector<ActivityState> alphabet_;
    std::size_t steps_ = 0;
    std::vector<double> initial_;
    std::vector<double> data_;
};

std::vector<ActivityState> full_alphabet();
std::vector<ActivityState> presence_alphabet();

/// Weighted maximum-likelihood estimate. States outside `alphabet` are
/// projected onto the presence states when the alphabet is the presence
/// alphabet; otherwise they are an error. Throws on empty input.
TPMSet estimate_tpm(std::span<const StateSequence> sequences, std::span<const ActivityState> alphabet,
                    const TrainingOptions& options = {});

/// Per-step state marginals implied by (initial, matrices); steps() x size().
std::vector<std::vector<double>> forward_marginals(const TPMSet& tpm);

/// Per-step weighted state frequencies of the data, on the tpm's alphabet.
std::vector<std::vector<double>> empirical_marginals(std::span<const StateSequence> sequences,
                                                     std::span<const ActivityState> alphabet);

struct ActivityStatistics {
    ActivityState activity = ActivityState::Sleep;
    EmpiricalDistribution duration;    // minutes, multiples of 15
    EmpiricalDistribution onset;       // step index of run start
    EmpiricalDistribution occurrences; // runs per day, including zero
    std::array<double, kStepsPerDay> daily_profile{};
    double total_weight = 0.0;
    std::size_t sequence_count = 0;
    std::size_t run_count = 0;
};

using ActivityStatisticsSet = std::array<ActivityStatistics, kNumActivityStates>;

/// Maximal runs of `activity`: starts, lengths and per-day counts, all
/// weighted by the sequence weight. Runs touching step 95 keep their
/// truncated length.
ActivityStatistics estimate_statistics(std::span<const StateSequence> sequences, ActivityState activity);
ActivityStatisticsSet estimate_all_statistics(std::span<const StateSequence> sequences);

inline double sample(const EmpiricalDistribution& dist, Rng& rng) { return dist.sample(rng); }

/// Everything the simulator needs for one (day type, cluster).
struct BehaviorModel {
    std::size_t cluster_id = 0;
    DayType day_type = DayType::Weekday;
    TPMSet full;     // 7-state chain
    TPMSet presence; // 3-state chain
    ActivityStatisticsSet stats;
};

BehaviorModel train_behavior_model(std::span<const StateSequence> sequences, std::size_t cluster_id,
                                   const TrainingOptions& options = {});

/// Trained models for both day types, keyed by (day type, cluster).
class BehaviorLibrary {
public:
    void add(BehaviorModel model);
    void set_shares(DayType d, std::vector<double> shares) { shares_[d] = std::move(shares); }

    /// Throws std::out_of_range naming the missing (day type, cluster).
    const BehaviorModel& get(DayType d, std::size_t cluster) const;
    bool contains(DayType d, std::size_t cluster) const { return models_.count({d, cluster}) != 0; }
    const std::vector<double>& shares(DayType d) const;
    std::size_t cluster_count(DayType d) const;
    const std::map<std::pair<DayType, std::size_t>, BehaviorModel>& models() const { return models_; }

private:
    std::map<std::pair<DayType, std::size_t>, BehaviorModel> models_;
    std::map<DayType, std::vector<double>> shares_;
};

/// Assigns each sequence of the model's day type to its nearest mode and
/// trains one BehaviorModel per cluster. Throws if a cluster has no data.
std::vector<BehaviorModel> train_clustered(std::span<const StateSequence> sequences, const ClusterModel& clusters,
                                           const TrainingOptions& options = {});

void save_tpm(const TPMSet& tpm, const std::filesystem::path& path);
TPMSet load_tpm(const std::filesystem::path& path);

void save_library(const BehaviorLibrary& library, const std::filesystem::path& dir);
/// Throws std::runtime_error naming the first missing file.
BehaviorLibrary load_library(const std::filesystem::path& dir);

} // namespace occsim
