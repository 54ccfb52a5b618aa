#include "occsim/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "text.hpp"

namespace occsim {

namespace fs = std::filesystem;

std::string_view stage_name(Stage s) {
    switch (s) {
    case Stage::Config: return "config";
    case Stage::Ingest: return "ingest";
    case Stage::Cluster: return "cluster";
    case Stage::Train: return "train";
    case Stage::Simulate: return "simulate";
    case Stage::Validate: return "validate";
    }
    return "?";
}

void ProjectConfig::validate() const {
    auto fail = [](const std::string& m) { throw StageError(Stage::Config, m); };
    auto need_file = [&](const fs::path& p, const char* key) {
        if (p.empty()) fail(std::string("missing required key '") + key + "'");
        if (!fs::is_regular_file(p)) fail(std::string(key) + " file '" + p.string() + "' not found");
    };
    auto need_dir = [&](const fs::path& p, const char* key) {
        if (p.empty()) fail(std::string("missing required key '") + key + "'");
        if (!fs::is_directory(p)) fail(std::string(key) + " directory '" + p.string() + "' not found");
    };
    need_file(diaries, "diaries");
    if (!code_map.empty()) need_file(code_map, "code_map");
    need_dir(bundle, "bundle");
    need_dir(reference, "reference");
    need_file(household_config, "household_config");
    if (output.empty()) fail("missing required key 'output'");
    if (n_households < 1) fail("n_households must be at least 1");
    if (calendar.n_days < 1) fail("n_days must be at least 1");
    if (calendar.start_weekday < 0 || calendar.start_weekday > 6) fail("start_weekday out of range");
    if (k_min < 2 || k_max < k_min) fail("k_range must be lo:hi with 2 <= lo <= hi");
    if (repeats < 1) fail("repeats must be at least 1");
    if (!(epsilon >= 0.0)) fail("epsilon must be nonnegative");
}

ProjectConfig load_project_config(const fs::path& path) {
    auto fail = [&](const std::string& m) { throw StageError(Stage::Config, m); };
    std::ifstream in;
    try {
        in = text::open_input(path);
    } catch (const std::exception& e) {
        fail(e.what());
    }
    const fs::path base = path.parent_path();
    auto resolve = [&](std::string_view v) {
        fs::path p{std::string(v)};
        return p.is_absolute() ? p : base / p;
    };
    ProjectConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) fail(where + ": expected key = value");
        const auto key = text::trim(t.substr(0, eq));
        const auto value = text::trim(t.substr(eq + 1));
        auto count = [&](const char* what) {
            const auto v = text::to_u64(value);
            if (!v) fail(where + ": " + what + " must be a nonnegative integer");
            return static_cast<std::size_t>(*v);
        };
        if (key == "diaries") cfg.diaries = resolve(value);
        else if (key == "code_map") cfg.code_map = value.empty() ? fs::path{} : resolve(value);
        else if (key == "bundle") cfg.bundle = resolve(value);
        else if (key == "reference") cfg.reference = resolve(value);
        else if (key == "household_config") cfg.household_config = resolve(value);
        else if (key == "output") cfg.output = resolve(value);
        else if (key == "seed") {
            const auto v = text::to_u64(value);
            if (!v) fail(where + ": seed must be an unsigned 64-bit integer");
            cfg.seed = *v;
        } else if (key == "n_households") cfg.n_households = count("n_households");
        else if (key == "n_days") cfg.calendar.n_days = count("n_days");
        else if (key == "start_weekday") {
            const auto w = parse_weekday(value);
            if (!w) fail(where + ": unknown weekday '" + std::string(value) + "'");
            cfg.calendar.start_weekday = *w;
        } else if (key == "approach") {
            const auto a = parse_approach(static_cast<int>(count("approach")));
            if (!a) fail(where + ": approach must be 1, 2 or 3");
            cfg.approach = *a;
        } else if (key == "k_range") {
            const auto colon = value.find(':');
            const auto lo = text::to_u64(value.substr(0, colon));
            const auto hi = colon == std::string_view::npos ? lo : text::to_u64(value.substr(colon + 1));
            if (!lo || !hi) fail(where + ": k_range must be lo:hi");
            cfg.k_min = static_cast<std::size_t>(*lo);
            cfg.k_max = static_cast<std::size_t>(*hi);
        } else if (key == "repeats") cfg.repeats = count("repeats");
        else if (key == "epsilon") {
            const auto v = text::to_double(value);
            if (!v) fail(where + ": epsilon must be a number");
            cfg.epsilon = *v;
        } else if (key == "threads") cfg.threads = count("threads");
        else fail(where + ": unknown key '" + std::string(key) + "'");
    }
    return cfg;
}

void save_project_config(const ProjectConfig& config, const fs::path& path) {
    static constexpr std::array<std::string_view, 7> days = {"monday", "tuesday",  "wednesday", "thursday",
                                                             "friday", "saturday", "sunday"};
    auto out = text::open_output(path);
    out << "diaries = " << config.diaries.generic_string() << '\n';
    if (!config.code_map.empty()) out << "code_map = " << config.code_map.generic_string() << '\n';
    out << "bundle = " << config.bundle.generic_string() << '\n';
    out << "reference = " << config.reference.generic_string() << '\n';
    out << "household_config = " << config.household_config.generic_string() << '\n';
    out << "output = " << config.output.generic_string() << '\n';
    if (config.seed) out << "seed = " << *config.seed << '\n';
    out << "n_households = " << config.n_households << '\n';
    out << "start_weekday = " << days[static_cast<std::size_t>(config.calendar.start_weekday)] << '\n';
    out << "n_days = " << config.calendar.n_days << '\n';
    out << "approach = " << static_cast<int>(config.approach) << '\n';
    out << "k_range = " << config.k_min << ':' << config.k_max << '\n';
    out << "repeats = " << config.repeats << '\n';
    out << "epsilon = " << text::fmt(config.epsilon, "%.17g") << '\n';
    out << "threads = " << config.threads << '\n';
    text::close_output(out, path);
}

fs::path household_file_name(std::size_t index) { return "household_" + std::to_string(index) + ".csv"; }

std::vector<StateSequence> run_ingest(const fs::path& diaries, const fs::path& code_map) {
    if (!fs::is_regular_file(diaries)) throw std::runtime_error("diary file '" + diaries.string() + "' not found");
    ActivityCodeMap map = ActivityCodeMap::canonical();
    if (!code_map.empty()) map = load_code_map(code_map);
    auto seqs = load_sequences(diaries, &map);
    if (seqs.empty()) throw std::runtime_error("diary file '" + diaries.string() + "' holds no records");
    return seqs;
}

ClusterModel run_cluster(const std::vector<StateSequence>& sequences, DayType day_type, const SelectKOptions& options) {
    const auto subset = filter_day_type(sequences, day_type);
    if (subset.empty())
        throw std::runtime_error("no " + std::string(day_type_token(day_type)) + " sequences to cluster");
    SelectKOptions opts = options;
    opts.seed = derive_seed(derive_seed(options.seed, 0xC1u), static_cast<std::uint64_t>(day_type));
    auto result = select_k(subset, opts);
    result.best.model.day_type = day_type;
    return result.best.model;
}

BehaviorLibrary run_train(const std::vector<StateSequence>& sequences, const std::vector<ClusterModel>& clusters,
                          const TrainingOptions& options) {
    BehaviorLibrary library;
    for (const auto& model : clusters) {
        const auto subset = filter_day_type(sequences, model.day_type);
        for (auto& m : train_clustered(subset, model, options)) library.add(std::move(m));
        library.set_shares(model.day_type, model.shares);
    }
    return library;
}

HouseholdConfig resolve_shares(const HouseholdConfigFile& file, const BehaviorLibrary& library) {
    HouseholdConfig cfg = file.config;
    for (const auto d : {DayType::Weekday, DayType::Weekend}) {
        auto& shares = d == DayType::Weekday ? cfg.cluster_shares_wd : cfg.cluster_shares_we;
        const bool given = d == DayType::Weekday ? file.wd_shares_given : file.we_shares_given;
        const std::size_t k = library.cluster_count(d);
        if (!given) {
            shares = library.shares(d);
        } else if (shares.size() != k) {
            throw std::invalid_argument("household config lists " + std::to_string(shares.size()) + " " +
                                        std::string(day_type_token(d)) + " cluster shares but the trained library has " +
                                        std::to_string(k) + " clusters");
        }
    }
    return cfg;
}

void run_simulate(const GeneratorInputs& inputs, const SimulateOptions& options, const fs::path& out) {
    if (options.n_households < 1) throw std::invalid_argument("simulate: at least one household is required");
    inputs.config.validate(inputs.calendar);
    const fs::path dir = out / artifacts::kHouseholds;
    fs::create_directories(dir);

    std::vector<std::vector<StateSequence>> behavior(options.write_behavior ? options.n_households : 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < options.n_households; i = next++) {
            try {
                const auto hh = generate_household(inputs, derive_seed(options.seed, i));
                write_schedule_file(hh.schedule, dir / household_file_name(i));
                if (options.write_behavior) {
                    auto& rows = behavior[i];
                    for (std::size_t o = 0; o < hh.activity.occupant_days.size(); ++o) {
                        for (const auto& day : hh.activity.occupant_days[o]) {
                            StateSequence s;
                            s.respondent_id = "h" + std::to_string(i) + "o" + std::to_string(o);
                            s.day_type = inputs.calendar.day_type(day.day_index);
                            s.states = day.states;
                            rows.push_back(std::move(s));
                        }
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = options.n_households;
            }
        }
    };
    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, options.n_households);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);

    if (options.write_behavior) {
        std::vector<StateSequence> all;
        for (auto& rows : behavior)
            for (auto& s : rows) all.push_back(std::move(s));
        write_sequences(all, out / artifacts::kBehavior);
    }
}

std::vector<ComparisonReport> run_validate(const fs::path& sim_dir, const std::vector<StateSequence>& reference) {
    const fs::path behavior = sim_dir / artifacts::kBehavior;
    if (!fs::is_regular_file(behavior))
        throw std::runtime_error("simulated behavior file '" + behavior.string() + "' not found");
    const auto sim = read_sequences(behavior);
    std::vector<ComparisonReport> reports;
    for (const auto d : {DayType::Weekday, DayType::Weekend}) {
        const auto s = filter_day_type(sim, d);
        const auto r = filter_day_type(reference, d);
        if (s.empty() || r.empty()) continue;
        reports.push_back(compare_behavior(s, estimate_all_statistics(r), d));
    }
    if (reports.empty()) throw std::runtime_error("no day type has both simulated and reference days");
    return reports;
}

namespace {

template <class F>
auto stage(Stage s, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(s, e.what());
    }
}

} // namespace

int run_pipeline(const ProjectConfig& input, std::ostream& log, std::ostream& err) {
    try {
        ProjectConfig config = input;
        config.validate();
        if (!config.seed) {
            config.seed = std::random_device{}() * 0x100000000ull + std::random_device{}();
            log << "seed: " << *config.seed << '\n';
        }
        const std::uint64_t seed = *config.seed;
        const fs::path out = config.output;
        const fs::path marker = out / artifacts::kPartial;
        stage(Stage::Config, [&] {
            fs::create_directories(out);
            auto m = text::open_output(marker);
            m << "incomplete run\n";
            text::close_output(m, marker);
            return 0;
        });

        // Every stage hands its successor the artifact as read back from
        // disk, so running the subcommands one by one gives the same result.
        const auto sequences = stage(Stage::Ingest, [&] {
            write_sequences(run_ingest(config.diaries, config.code_map), out / artifacts::kSequences);
            return read_sequences(out / artifacts::kSequences);
        });
        log << "ingest: " << sequences.size() << " occupant-days\n";

        const auto clusters = stage(Stage::Cluster, [&] {
            SelectKOptions opts;
            opts.k_min = config.k_min;
            opts.k_max = config.k_max;
            opts.repeats = config.repeats;
            opts.epsilon = config.epsilon;
            opts.seed = seed;
            std::vector<ClusterModel> models;
            for (const auto d : {DayType::Weekday, DayType::Weekend}) {
                const auto path = out / (d == DayType::Weekday ? artifacts::kClustersWD : artifacts::kClustersWE);
                save_cluster_model(run_cluster(sequences, d, opts), path);
                models.push_back(load_cluster_model(path));
            }
            return models;
        });
        log << "cluster: k = " << clusters[0].modes.size() << " (WD), " << clusters[1].modes.size() << " (WE)\n";

        const auto library = stage(Stage::Train, [&] {
            save_library(run_train(sequences, clusters), out / artifacts::kTpms);
            return load_library(out / artifacts::kTpms);
        });
        log << "train: " << library.models().size() << " behavior models\n";

        stage(Stage::Simulate, [&] {
            const auto bundle = load_distribution_bundle(config.bundle);
            const auto refs = load_reference_schedules(config.reference);
            GeneratorInputs inputs;
            inputs.library = &library;
            inputs.bundle = &bundle;
            inputs.references = &refs;
            inputs.config = resolve_shares(load_household_config(config.household_config), library);
            inputs.calendar = config.calendar;
            inputs.approach = config.approach;
            run_simulate(inputs, {config.n_households, seed, config.threads, true}, out);
            return 0;
        });
        log << "simulate: " << config.n_households << " households\n";

        stage(Stage::Validate, [&] {
            const auto reports = run_validate(out, sequences);
            write_report(reports, out / artifacts::kValidation);
            print_summary(reports, log);
            return 0;
        });

        fs::remove(marker);
        return 0;
    } catch (const StageError& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    }
}

} // namespace occsim
