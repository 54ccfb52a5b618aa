#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "occsim/clustering.hpp"
#include "occsim/generator.hpp"
#include "occsim/validate.hpp"

namespace occsim {

enum class Stage { Config = 2, Ingest = 3, Cluster = 4, Train = 5, Simulate = 6, Validate = 7 };
std::string_view stage_name(Stage s);

/// A failure attributed to a pipeline stage; exit_code() is the process
/// exit status for it.
class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& message)
        : std::runtime_error(std::string(stage_name(stage)) + ": " + message), stage_(stage) {}
    Stage stage() const { return stage_; }
    int exit_code() const { return static_cast<int>(stage_); }

private:
    Stage stage_;
};

/// Project file, `key = value` lines with `#` comments. Relative paths are
/// resolved against the directory holding the file.
///
///   diaries = diaries.csv
///   code_map = codes.csv          (optional; canonical tokens otherwise)
///   bundle = bundle
///   reference = reference
///   household_config = household.cfg
///   output = out
///   seed = 42                     (optional; drawn from entropy otherwise)
///   n_households = 10
///   start_weekday = monday
///   n_days = 365
///   approach = 3
///   k_range = 3:10
///   repeats = 10
///   epsilon = 0.01
///   threads = 0                   (0 = hardware concurrency)
struct ProjectConfig {
    std::filesystem::path diaries;
    std::filesystem::path code_map;
    std::filesystem::path bundle;
    std::filesystem::path reference;
    std::filesystem::path household_config;
    std::filesystem::path output;
    std::optional<std::uint64_t> seed;
    std::size_t n_households = 1;
    SimCalendar calendar;
    Approach approach = Approach::MarkovWithDurations;
    std::size_t k_min = 3;
    std::size_t k_max = 10;
    std::size_t repeats = 10;
    double epsilon = 0.01;
    std::size_t threads = 0;

    /// Throws StageError(Config) naming the first unusable field or path.
    void validate() const;
};

/// Throws StageError(Config) on unreadable files, unknown keys or bad values.
ProjectConfig load_project_config(const std::filesystem::path& path);
void save_project_config(const ProjectConfig& config, const std::filesystem::path& path);

/// Fixed artifact names inside an output directory.
namespace artifacts {
inline constexpr const char* kSequences = "sequences.csv";
inline constexpr const char* kClustersWD = "model.wd.clusters";
inline constexpr const char* kClustersWE = "model.we.clusters";
inline constexpr const char* kTpms = "tpms";
inline constexpr const char* kHouseholds = "households";
inline constexpr const char* kBehavior = "behavior.csv";
inline constexpr const char* kValidation = "validation.csv";
inline constexpr const char* kPartial = ".partial";
} // namespace artifacts

std::filesystem::path household_file_name(std::size_t index);

/// Diary or sequence file to sequences; `code_map` may be empty.
std::vector<StateSequence> run_ingest(const std::filesystem::path& diaries, const std::filesystem::path& code_map);

ClusterModel run_cluster(const std::vector<StateSequence>& sequences, DayType day_type, const SelectKOptions& options);

BehaviorLibrary run_train(const std::vector<StateSequence>& sequences, const std::vector<ClusterModel>& clusters,
                          const TrainingOptions& options = {});

/// Household config with any share vector the file left unset taken from
/// the library's trained cluster shares.
HouseholdConfig resolve_shares(const HouseholdConfigFile& file, const BehaviorLibrary& library);

struct SimulateOptions {
    std::size_t n_households = 1;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    bool write_behavior = true;
};

/// Generates households 0..n-1 with seeds derive_seed(seed, i) and writes
/// `households/household_<i>.csv` plus the simulated occupant-days
/// (`behavior.csv`) under `out`.
void run_simulate(const GeneratorInputs& inputs, const SimulateOptions& options, const std::filesystem::path& out);

/// Reads `behavior.csv` under `sim_dir` and compares it per day type with
/// the reference sequences. Day types without both sides are skipped.
std::vector<ComparisonReport> run_validate(const std::filesystem::path& sim_dir,
                                           const std::vector<StateSequence>& reference);

/// Whole pipeline from a project config. Returns the exit status; errors
/// are reported on `err`. A `.partial` marker stays in the output
/// directory unless every stage succeeds.
int run_pipeline(const ProjectConfig& config, std::ostream& log, std::ostream& err);

} // namespace occsim
