#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "occsim/diary.hpp"

namespace occsim {

using DayStates = std::array<ActivityState, kStepsPerDay>;

/// k modal presence sequences with weighted population shares.
struct ClusterModel {
    DayType day_type = DayType::Weekday;
    std::vector<DayStates> modes;
    std::vector<double> shares;
    std::vector<std::string> names; // optional, one per mode when present

    std::size_t k() const { return modes.size(); }
};

struct ClusterAssignment {
    std::vector<std::size_t> labels;
};

/// Shares of the four weekday behavior clusters shipped as defaults.
std::vector<double> default_cluster_shares();
std::vector<std::string> default_cluster_names();

/// Categorical matching dissimilarity: number of steps whose states differ.
int sequence_distance(std::span<const ActivityState> a, std::span<const ActivityState> b);
inline int sequence_distance(const StateSequence& a, const StateSequence& b) {
    return sequence_distance(a.states, b.states);
}

struct KModesOptions {
    std::size_t k = 4;
    std::uint64_t seed = 0;
    std::size_t max_iter = 100;
    bool weighted = true; // respondent weights in mode recomputation and shares
};

struct KModesResult {
    ClusterModel model;
    ClusterAssignment assignment;
    std::vector<double> cost_history; // total within-cluster distance after each assignment pass
    std::size_t iterations = 0;
    bool converged = false;
};

/// k-modes on the presence projection of `data`. Deterministic given the
/// seed. Throws std::invalid_argument when k < 2 or k exceeds the number of
/// distinct presence sequences.
KModesResult kmodes(std::span<const StateSequence> data, const KModesOptions& options);

/// Mean silhouette over all points with the matching dissimilarity on
/// presence projections.
/// Points in singleton clusters contribute 0, as do points with a = b = 0.
double silhouette(std::span<const StateSequence> data, std::span<const std::size_t> labels);

/// Same score from an explicit row-major n x n distance matrix.
double silhouette_from_distances(std::span<const double> distances, std::size_t n,
                                 std::span<const std::size_t> labels);

struct SelectKOptions {
    std::size_t k_min = 3;
    std::size_t k_max = 10;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
    double epsilon = 0.01;
    std::size_t max_iter = 100;
    bool weighted = true;
};

struct SelectKRow {
    std::size_t k = 0;
    std::vector<double> scores; // one per repeat
    double mean = 0.0;
};

struct SelectKResult {
    std::size_t best_k = 0;
    std::vector<SelectKRow> table;
    KModesResult best; // highest-scoring repeat at best_k
};

/// Picks the largest k whose mean silhouette is within epsilon of the best mean.
SelectKResult select_k(std::span<const StateSequence> data, const SelectKOptions& options);

/// Seed of repeat `repeat` at cluster count `k`.
std::uint64_t kmodes_run_seed(std::uint64_t base, std::size_t k, std::size_t repeat);

/// Nearest mode on the presence projection; ties go to the lowest index.
std::size_t assign_cluster(const StateSequence& seq, const ClusterModel& model);

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel load_cluster_model(const std::filesystem::path& path);

} // namespace occsim
