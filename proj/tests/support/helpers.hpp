#pragma once

// Fixtures and independent reference implementations used by the tests.
// Nothing here calls into the code under test except for plain data types.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "occsim/activity.hpp"
#include "occsim/diary.hpp"
#include "occsim/household.hpp"

namespace testing {

using occsim::ActivityState;

inline ActivityState state_of(char c) {
    switch (c) {
    case 'S': return ActivityState::Sleep;
    case 'A': return ActivityState::Away;
    case 'H': return ActivityState::HomeActive;
    case 'C': return ActivityState::Cooking;
    case 'D': return ActivityState::Dishwashing;
    case 'L': return ActivityState::Laundry;
    case 'P': return ActivityState::PersonalHygiene;
    }
    throw std::invalid_argument("unknown state letter");
}

/// Builds a 96-step sequence from (letter, steps) runs; the last run is
/// stretched to fill the day.
inline occsim::StateSequence runs(std::vector<std::pair<char, std::size_t>> parts, double weight = 1.0,
                                  occsim::DayType dt = occsim::DayType::Weekday) {
    occsim::StateSequence s;
    s.weight = weight;
    s.day_type = dt;
    std::size_t t = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::size_t n = i + 1 == parts.size() ? occsim::kStepsPerDay - t : parts[i].second;
        for (std::size_t k = 0; k < n && t < occsim::kStepsPerDay; ++k) s.states[t++] = state_of(parts[i].first);
    }
    return s;
}

inline occsim::StateSequence uniform_day(char c, double weight = 1.0) { return runs({{c, 96}}, weight); }

/// Random sequence with sticky runs, drawn with the standard library engine.
inline occsim::StateSequence random_sequence(std::mt19937_64& gen, bool presence_only = false) {
    occsim::StateSequence s;
    std::uniform_int_distribution<int> pick(0, presence_only ? 2 : 6);
    std::bernoulli_distribution stay(0.8);
    auto cur = static_cast<ActivityState>(pick(gen));
    for (auto& x : s.states) {
        if (!stay(gen)) cur = static_cast<ActivityState>(pick(gen));
        x = cur;
    }
    s.weight = 0.5 + std::uniform_real_distribution<double>(0, 1)(gen);
    return s;
}

/// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("occsim_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// ---- oracles ----

/// Two-sample KS from raw weighted samples: sup over all sample points of
/// the difference of right-continuous ECDFs.
inline double ks_oracle(const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b) {
    auto ecdf = [](const std::vector<std::pair<double, double>>& s, double x) {
        double below = 0.0, total = 0.0;
        for (const auto& [v, w] : s) {
            total += w;
            if (v <= x) below += w;
        }
        return below / total;
    };
    double sup = 0.0;
    for (const auto& [x, w] : a) sup = std::max(sup, std::abs(ecdf(a, x) - ecdf(b, x)));
    for (const auto& [x, w] : b) sup = std::max(sup, std::abs(ecdf(a, x) - ecdf(b, x)));
    return sup;
}

/// Interval union by marking minutes on a bitmap.
inline std::vector<occsim::Interval> union_oracle(const std::vector<std::vector<occsim::Interval>>& lists) {
    std::int64_t hi = 0;
    for (const auto& l : lists)
        for (const auto& iv : l) hi = std::max(hi, iv.end);
    // A merged union treats abutting intervals as one, so mark the gaps
    // between touching intervals as covered via half-minute resolution.
    std::vector<char> cover(static_cast<std::size_t>(2 * hi + 2), 0);
    for (const auto& l : lists)
        for (const auto& iv : l)
            for (std::int64_t m = 2 * iv.start; m <= 2 * iv.end; ++m) cover[static_cast<std::size_t>(m)] = 1;
    std::vector<occsim::Interval> out;
    std::size_t i = 0;
    while (i < cover.size()) {
        if (!cover[i]) {
            ++i;
            continue;
        }
        const std::size_t s = i;
        while (i < cover.size() && cover[i]) ++i;
        out.push_back({static_cast<std::int64_t>(s / 2), static_cast<std::int64_t>((i - 1) / 2)});
    }
    return out;
}

/// Maximal runs of `a` by a character scan over a string rendering.
struct RunScan {
    std::vector<std::size_t> starts;
    std::vector<std::size_t> lengths;
};
inline RunScan run_scan_oracle(const occsim::StateSequence& s, ActivityState a) {
    std::string text;
    for (const auto x : s.states) text.push_back(x == a ? '1' : '0');
    RunScan r;
    std::size_t pos = 0;
    while ((pos = text.find('1', pos)) != std::string::npos) {
        const auto end = text.find('0', pos);
        const std::size_t stop = end == std::string::npos ? text.size() : end;
        r.starts.push_back(pos);
        r.lengths.push_back(stop - pos);
        pos = stop;
    }
    return r;
}

/// Matching dissimilarity between two presence projections.
inline int hamming_presence(const occsim::StateSequence& a, const occsim::StateSequence& b) {
    int d = 0;
    for (std::size_t t = 0; t < occsim::kStepsPerDay; ++t)
        d += occsim::project_state(a.states[t]) != occsim::project_state(b.states[t]);
    return d;
}

/// Silhouette straight from the definition over a full distance matrix.
inline double silhouette_oracle(const std::vector<std::vector<double>>& dist, const std::vector<std::size_t>& labels) {
    const std::size_t n = labels.size();
    const std::size_t k = *std::max_element(labels.begin(), labels.end()) + 1;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sum(k, 0.0);
        std::vector<double> cnt(k, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum[labels[j]] += dist[i][j];
            cnt[labels[j]] += 1.0;
        }
        if (cnt[labels[i]] == 0.0) continue; // singleton
        const double a = sum[labels[i]] / cnt[labels[i]];
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != labels[i] && cnt[c] > 0.0) b = std::min(b, sum[c] / cnt[c]);
        const double m = std::max(a, b);
        total += m == 0.0 ? 0.0 : (b - a) / m;
    }
    return total / static_cast<double>(n);
}

/// Minimum total within-cluster distance to the best mode over every
/// labeling of the points into k non-empty clusters. Each cluster's cost
/// uses the per-step majority (unweighted) mode, the optimum for a fixed
/// labeling under matching dissimilarity.
inline int exhaustive_kmodes_cost(const std::vector<occsim::StateSequence>& pts, std::size_t k) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> lab(n, 0);
    int best = std::numeric_limits<int>::max();
    while (true) {
        std::vector<int> used(k, 0);
        for (const auto l : lab) used[l] = 1;
        if (std::count(used.begin(), used.end(), 1) == static_cast<long>(k)) {
            int cost = 0;
            for (std::size_t c = 0; c < k; ++c) {
                for (std::size_t t = 0; t < occsim::kStepsPerDay; ++t) {
                    std::array<int, 7> cnt{};
                    int members = 0;
                    for (std::size_t i = 0; i < n; ++i)
                        if (lab[i] == c) {
                            ++cnt[occsim::index_of(occsim::project_state(pts[i].states[t]))];
                            ++members;
                        }
                    cost += members - *std::max_element(cnt.begin(), cnt.end());
                }
            }
            best = std::min(best, cost);
        }
        std::size_t i = 0;
        while (i < n && ++lab[i] == k) lab[i++] = 0;
        if (i == n) break;
    }
    return best;
}

} // namespace testing
