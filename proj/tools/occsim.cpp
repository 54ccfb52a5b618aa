// occsim: occupant behavior and household schedule generator.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>

#include "occsim/pipeline.hpp"
#include "occsim/synth.hpp"

namespace fs = std::filesystem;
using namespace occsim;

namespace {

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::uint64_t seed_or_entropy(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    const auto s = entropy_seed();
    std::cout << "seed: " << s << '\n';
    return s;
}

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) throw std::runtime_error(what + " '" + p.string() + "' not found");
}

std::pair<std::size_t, std::size_t> parse_k_range(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            const auto k = std::stoul(s);
            return {k, k};
        }
        return {std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("k range must look like 3:10");
    }
}

DayType day_type_arg(const std::string& s) {
    const auto d = parse_day_type(s);
    if (!d) throw std::invalid_argument("day type must be WD or WE");
    return *d;
}

template <class F>
int guarded(Stage stage, F&& f) {
    try {
        f();
        return 0;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << stage_name(stage) << ": " << e.what() << '\n';
        return static_cast<int>(stage);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic occupant behavior and household schedule generator"};
    app.require_subcommand(1);
    int status = 0;

    // ingest
    std::string in_diaries, in_codes, in_out;
    auto* ingest = app.add_subcommand("ingest", "Resample raw diaries to 15-minute state sequences");
    ingest->add_option("--diaries", in_diaries, "Raw diary file (or sequence file)")->required();
    ingest->add_option("--codes", in_codes, "Activity code map; canonical state tokens if omitted");
    ingest->add_option("--out", in_out, "Sequence file to write")->required();
    ingest->callback([&] {
        status = guarded(Stage::Ingest, [&] {
            const auto seqs = run_ingest(in_diaries, in_codes);
            write_sequences(seqs, in_out);
            std::cout << "wrote " << seqs.size() << " sequences to " << in_out << '\n';
        });
    });

    // cluster
    std::string cl_input, cl_codes, cl_out, cl_day = "WD", cl_range = "3:10";
    std::size_t cl_repeats = 10;
    double cl_eps = 0.01;
    std::optional<std::uint64_t> cl_seed;
    auto* cluster = app.add_subcommand("cluster", "Select k and cluster presence sequences of one day type");
    cluster->add_option("--input", cl_input, "Diary or sequence file")->required();
    cluster->add_option("--codes", cl_codes, "Activity code map for raw diaries");
    cluster->add_option("--day-type", cl_day, "WD or WE")->capture_default_str();
    cluster->add_option("--k-range", cl_range, "Candidate cluster counts lo:hi")->capture_default_str();
    cluster->add_option("--repeats", cl_repeats, "Seeded restarts per k")->capture_default_str();
    cluster->add_option("--epsilon", cl_eps, "Silhouette tolerance for preferring larger k")->capture_default_str();
    cluster->add_option("--seed", cl_seed, "Base seed; drawn from entropy and printed if omitted");
    cluster->add_option("--out", cl_out, "Cluster model file to write")->required();
    cluster->callback([&] {
        status = guarded(Stage::Cluster, [&] {
            const auto seqs = run_ingest(cl_input, cl_codes);
            SelectKOptions opts;
            std::tie(opts.k_min, opts.k_max) = parse_k_range(cl_range);
            opts.repeats = cl_repeats;
            opts.epsilon = cl_eps;
            opts.seed = seed_or_entropy(cl_seed);
            const auto model = run_cluster(seqs, day_type_arg(cl_day), opts);
            save_cluster_model(model, cl_out);
            std::cout << "k = " << model.modes.size() << ", shares:";
            for (const double s : model.shares) std::cout << ' ' << s;
            std::cout << '\n';
        });
    });

    // train
    std::string tr_diaries, tr_codes, tr_out, tr_fallback = "absorbing";
    std::vector<std::string> tr_clusters;
    double tr_alpha = 1.0;
    auto* train = app.add_subcommand("train", "Estimate chains and activity statistics per cluster");
    train->add_option("--diaries", tr_diaries, "Diary or sequence file")->required();
    train->add_option("--codes", tr_codes, "Activity code map for raw diaries");
    train->add_option("--clusters", tr_clusters, "Cluster model files (one per day type)")->required();
    train->add_option("--fallback", tr_fallback, "Unobserved-row policy: absorbing, uniform or laplace")
        ->capture_default_str();
    train->add_option("--alpha", tr_alpha, "Smoothing constant for --fallback laplace")->capture_default_str();
    train->add_option("--out", tr_out, "Model directory to write")->required();
    train->callback([&] {
        status = guarded(Stage::Train, [&] {
            std::vector<ClusterModel> models;
            for (const auto& p : tr_clusters) {
                require_file(p, "cluster model file");
                models.push_back(load_cluster_model(p));
            }
            TrainingOptions opts;
            if (tr_fallback == "absorbing") opts.fallback = FallbackPolicy::Absorbing;
            else if (tr_fallback == "uniform") opts.fallback = FallbackPolicy::Uniform;
            else if (tr_fallback == "laplace") {
                opts.fallback = FallbackPolicy::Laplace;
                opts.alpha = tr_alpha;
            } else throw std::invalid_argument("unknown fallback '" + tr_fallback + "'");
            const auto seqs = run_ingest(tr_diaries, tr_codes);
            const auto lib = run_train(seqs, models, opts);
            save_library(lib, tr_out);
            std::cout << "trained " << lib.models().size() << " behavior models into " << tr_out << '\n';
        });
    });

    // simulate
    std::string sm_tpms, sm_bundle, sm_ref, sm_hh, sm_out, sm_weekday = "monday";
    int sm_approach = 3;
    std::size_t sm_households = 1, sm_days = 365, sm_threads = 0;
    std::optional<std::uint64_t> sm_seed;
    auto* simulate = app.add_subcommand("simulate", "Generate household schedule files");
    simulate->add_option("--tpms", sm_tpms, "Trained model directory")->required();
    simulate->add_option("--bundle", sm_bundle, "Distribution bundle directory")->required();
    simulate->add_option("--reference", sm_ref, "Reference schedule directory")->required();
    simulate->add_option("--household-config", sm_hh, "Household config file")->required();
    simulate->add_option("--approach", sm_approach, "1: presence chain plus sampled events, 2: pure chain, "
                                                    "3: chain plus sampled durations")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    simulate->add_option("--households", sm_households, "Number of households")->capture_default_str();
    simulate->add_option("--days", sm_days, "Days to simulate")->capture_default_str();
    simulate->add_option("--start-weekday", sm_weekday, "Weekday of day 0")->capture_default_str();
    simulate->add_option("--threads", sm_threads, "Worker threads, 0 for all cores")->capture_default_str();
    simulate->add_option("--seed", sm_seed, "Base seed; drawn from entropy and printed if omitted");
    simulate->add_option("--out", sm_out, "Output directory")->required();
    simulate->callback([&] {
        status = guarded(Stage::Simulate, [&] {
            require_file(fs::path(sm_tpms) / "library.csv", "trained model index");
            require_file(sm_bundle, "distribution bundle");
            require_file(sm_ref, "reference schedule directory");
            require_file(sm_hh, "household config");
            const auto library = load_library(sm_tpms);
            const auto bundle = load_distribution_bundle(sm_bundle);
            const auto refs = load_reference_schedules(sm_ref);
            const auto weekday = parse_weekday(sm_weekday);
            if (!weekday) throw std::invalid_argument("unknown weekday '" + sm_weekday + "'");
            GeneratorInputs inputs;
            inputs.library = &library;
            inputs.bundle = &bundle;
            inputs.references = &refs;
            inputs.config = resolve_shares(load_household_config(sm_hh), library);
            inputs.calendar = {*weekday, sm_days};
            inputs.approach = *parse_approach(sm_approach);
            const auto seed = seed_or_entropy(sm_seed);
            run_simulate(inputs, {sm_households, seed, sm_threads, true}, sm_out);
            std::cout << "wrote " << sm_households << " household schedules to "
                      << (fs::path(sm_out) / artifacts::kHouseholds).string() << '\n';
        });
    });

    // simulate-occupant
    std::string so_tpms, so_out, so_weekday = "monday";
    int so_approach = 3;
    std::size_t so_days = 7, so_wd = 0, so_we = 0;
    std::optional<std::uint64_t> so_seed;
    auto* occupant = app.add_subcommand("simulate-occupant", "Dump one occupant's simulated days");
    occupant->add_option("--tpms", so_tpms, "Trained model directory")->required();
    occupant->add_option("--approach", so_approach, "Simulation approach 1..3")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    occupant->add_option("--weekday-cluster", so_wd, "Weekday cluster index")->capture_default_str();
    occupant->add_option("--weekend-cluster", so_we, "Weekend cluster index")->capture_default_str();
    occupant->add_option("--days", so_days, "Days to simulate")->capture_default_str();
    occupant->add_option("--start-weekday", so_weekday, "Weekday of day 0")->capture_default_str();
    occupant->add_option("--seed", so_seed, "Occupant seed; drawn from entropy and printed if omitted");
    occupant->add_option("--out", so_out, "Output file")->required();
    occupant->callback([&] {
        status = guarded(Stage::Simulate, [&] {
            require_file(fs::path(so_tpms) / "library.csv", "trained model index");
            const auto library = load_library(so_tpms);
            const auto weekday = parse_weekday(so_weekday);
            if (!weekday) throw std::invalid_argument("unknown weekday '" + so_weekday + "'");
            const SimCalendar calendar{*weekday, so_days};
            const auto days = simulate_year({0, so_wd, so_we}, library, calendar, *parse_approach(so_approach),
                                            seed_or_entropy(so_seed));
            write_occupant_days(days, calendar, so_out);
        });
    });

    // validate
    std::string va_sim, va_ref, va_codes, va_out;
    auto* validate = app.add_subcommand("validate", "Compare simulated behavior with the training diaries");
    validate->add_option("--sim", va_sim, "Simulation output directory (holding behavior.csv)")->required();
    validate->add_option("--reference", va_ref, "Reference diary or sequence file")->required();
    validate->add_option("--codes", va_codes, "Activity code map for raw diaries");
    validate->add_option("--out", va_out, "Report file (default <sim>/validation.csv)");
    validate->callback([&] {
        status = guarded(Stage::Validate, [&] {
            const auto reference = run_ingest(va_ref, va_codes);
            const auto reports = run_validate(va_sim, reference);
            const fs::path out = va_out.empty() ? fs::path(va_sim) / artifacts::kValidation : fs::path(va_out);
            write_report(reports, out);
            print_summary(reports, std::cout);
        });
    });

    // synth
    std::string sy_out;
    std::size_t sy_diaries = 2000, sy_households = 4, sy_days = 7;
    std::optional<std::uint64_t> sy_seed;
    auto* synth = app.add_subcommand("synth", "Write a synthetic project with planted clusters");
    synth->add_option("--out", sy_out, "Project directory")->required();
    synth->add_option("--diaries", sy_diaries, "Synthetic occupant-days")->capture_default_str();
    synth->add_option("--households", sy_households, "n_households in the project config")->capture_default_str();
    synth->add_option("--days", sy_days, "n_days in the project config")->capture_default_str();
    synth->add_option("--seed", sy_seed, "Seed for the diaries and the project; entropy if omitted");
    synth->callback([&] {
        status = guarded(Stage::Config, [&] {
            SynthOptions opts;
            opts.n_diaries = sy_diaries;
            opts.seed = seed_or_entropy(sy_seed);
            write_synth_project(sy_out, opts, sy_households, sy_days);
            std::cout << "wrote synthetic project to " << sy_out << '\n';
        });
    });

    // run
    std::string rn_config;
    std::optional<std::uint64_t> rn_seed;
    auto* run = app.add_subcommand("run", "Run every stage from a project config");
    run->add_option("--config", rn_config, "Project config file")->required();
    run->add_option("--seed", rn_seed, "Overrides the config seed");
    run->callback([&] {
        try {
            auto cfg = load_project_config(rn_config);
            if (rn_seed) cfg.seed = rn_seed;
            status = run_pipeline(cfg, std::cout, std::cerr);
        } catch (const StageError& e) {
            std::cerr << "error: " << e.what() << '\n';
            status = e.exit_code();
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(Stage::Config);
    }
    return status;
}
