#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "occsim/diary.hpp"
#include "occsim/household.hpp"
#include "occsim/schedule_io.hpp"

namespace occsim {

/// Synthetic diary factory with planted structure.
///
/// Presence follows a per-step chain: keep the current presence state with
/// probability kSynthPersistence, otherwise draw from a cluster- and
/// time-dependent target. From HomeActive an event starts with a
/// time-varying hazard; its length is drawn uniformly from the planted
/// duration set and the step after it is HomeActive with probability
/// kSynthExitHome, otherwise a fresh presence draw.
inline constexpr double kSynthPersistence = 0.85;
inline constexpr double kSynthExitHome = 0.8;
inline constexpr std::size_t kSynthClusters = 4;

/// Planted durations in minutes for an event state; empty for presence states.
std::vector<double> planted_durations(ActivityState activity);

/// Probability that an occupant at HomeActive on step t starts `activity`
/// on step t + 1.
double planted_hazard(ActivityState activity, std::size_t t);

/// Presence state the cluster's target puts most mass on at step t.
ActivityState planted_dominant(std::size_t cluster, DayType day_type, std::size_t t);

/// One occupant-day from a planted cluster.
StateSequence synth_sequence(std::size_t cluster, DayType day_type, Rng& rng);

/// Expands steps to minutes, moving up to five minutes of each window to a
/// neighbouring step's state so the resampled sequence is unchanged.
RawDiary expand_to_minutes(const StateSequence& seq, Rng& rng);

struct SynthOptions {
    std::size_t n_diaries = 2000;
    double weekend_fraction = 2.0 / 7.0;
    std::uint64_t seed = 1;
    std::vector<double> cluster_shares = default_cluster_shares();
    bool random_weights = true; // survey-style weights in [0.5, 1.5]
};

struct SynthCorpus {
    std::vector<RawDiary> diaries;
    std::vector<std::size_t> planted_cluster;
};

SynthCorpus synth_corpus(const SynthOptions& options);

/// Survey-like raw codes. Some HomeActive minutes use codes absent from the
/// map so the default state is exercised.
ActivityCodeMap synth_code_map();
void write_coded_diaries(const std::vector<RawDiary>& diaries, const std::filesystem::path& path, std::uint64_t seed);

DistributionBundle synth_bundle();
ReferenceSchedules synth_references();
HouseholdConfig synth_household_config();

/// Writes a ready-to-run project: diaries.csv, codes.csv, bundle/,
/// reference/, household.cfg and project.cfg.
void write_synth_project(const std::filesystem::path& dir, const SynthOptions& options, std::size_t n_households = 4,
                         std::size_t n_days = 7);

} // namespace occsim
