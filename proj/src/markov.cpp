#include "occsim/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "text.hpp"

namespace occsim {

TPMSet::TPMSet(std::vector<ActivityState> alphabet, std::size_t steps)
    : alphabet_(std::move(alphabet)), steps_(steps), initial_(alphabet_.size(), 0.0),
      data_((steps == 0 ? 0 : steps - 1) * alphabet_.size() * alphabet_.size(), 0.0) {}

std::optional<std::size_t> TPMSet::index_of_state(ActivityState s) const {
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (alphabet_[i] == s) return i;
    return std::nullopt;
}

double TPMSet::max_stochastic_error() const {
    auto check = [](std::span<const double> v) {
        double sum = 0.0;
        for (const double p : v) {
            if (!(p >= 0.0 && p <= 1.0)) return std::numeric_limits<double>::infinity();
            sum += p;
        }
        return std::abs(sum - 1.0);
    };
    double worst = check(initial_);
    for (std::size_t t = 0; t < transitions(); ++t)
        for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, check(row(t, i)));
    return worst;
}

std::vector<ActivityState> full_alphabet() { return {kAllStates.begin(), kAllStates.end()}; }
std::vector<ActivityState> presence_alphabet() { return {kPresenceStates.begin(), kPresenceStates.end()}; }

namespace {

// State -> alphabet index, projecting onto presence states for the 3-state chain.
std::array<int, kNumActivityStates> alphabet_lookup(std::span<const ActivityState> alphabet) {
    std::array<int, kNumActivityStates> idx;
    idx.fill(-1);
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        if (idx[index_of(alphabet[i])] != -1) throw std::invalid_argument("alphabet contains duplicate states");
        idx[index_of(alphabet[i])] = static_cast<int>(i);
    }
    const bool presence = alphabet.size() == 3 && idx[index_of(ActivityState::Sleep)] >= 0 &&
                          idx[index_of(ActivityState::Away)] >= 0 && idx[index_of(ActivityState::HomeActive)] >= 0;
    if (presence)
        for (const auto s : kAllStates)
            if (idx[index_of(s)] < 0) idx[index_of(s)] = idx[index_of(project_state(s))];
    return idx;
}

int lookup(const std::array<int, kNumActivityStates>& idx, ActivityState s) {
    const int i = idx[index_of(s)];
    if (i < 0)
        throw std::invalid_argument("state '" + std::string(state_token(s)) + "' is not in the chain alphabet");
    return i;
}

double total_weight_of(std::span<const StateSequence> sequences) {
    double total = 0.0;
    for (const auto& s : sequences) total += s.weight;
    return total;
}

} // namespace

TPMSet estimate_tpm(std::span<const StateSequence> sequences, std::span<const ActivityState> alphabet,
                    const TrainingOptions& options) {
    if (sequences.empty()) throw std::invalid_argument("estimate_tpm: no training sequences");
    if (alphabet.empty()) throw std::invalid_argument("estimate_tpm: empty alphabet");
    const double total = total_weight_of(sequences);
    if (!(total > 0.0)) throw std::invalid_argument("estimate_tpm: total sequence weight is zero");
    if (options.alpha < 0.0) throw std::invalid_argument("estimate_tpm: alpha must be >= 0");

    const auto idx = alphabet_lookup(alphabet);
    TPMSet tpm({alphabet.begin(), alphabet.end()}, kStepsPerDay);
    tpm.day_type = sequences.front().day_type;
    const std::size_t S = tpm.size();

    for (const auto& seq : sequences) {
        if (seq.day_type != tpm.day_type) throw std::invalid_argument("estimate_tpm: mixed day types");
        int prev = lookup(idx, seq.states[0]);
        tpm.initial()[static_cast<std::size_t>(prev)] += seq.weight;
        for (std::size_t t = 0; t + 1 < kStepsPerDay; ++t) {
            const int next = lookup(idx, seq.states[t + 1]);
            tpm.at(t, static_cast<std::size_t>(prev), static_cast<std::size_t>(next)) += seq.weight;
            prev = next;
        }
    }
    for (auto& p : tpm.initial()) p /= total;

    const double alpha = options.fallback == FallbackPolicy::Laplace ? options.alpha : 0.0;
    for (std::size_t t = 0; t < tpm.transitions(); ++t) {
        for (std::size_t i = 0; i < S; ++i) {
            double row_total = 0.0;
            for (std::size_t j = 0; j < S; ++j) row_total += tpm.at(t, i, j);
            if (alpha > 0.0) {
                const double denom = row_total + alpha * static_cast<double>(S);
                for (std::size_t j = 0; j < S; ++j) tpm.at(t, i, j) = (tpm.at(t, i, j) + alpha) / denom;
            } else if (row_total > 0.0) {
                for (std::size_t j = 0; j < S; ++j) tpm.at(t, i, j) /= row_total;
            } else if (options.fallback == FallbackPolicy::Uniform) {
                for (std::size_t j = 0; j < S; ++j) tpm.at(t, i, j) = 1.0 / static_cast<double>(S);
            } else {
                tpm.at(t, i, i) = 1.0;
            }
        }
    }
    return tpm;
}

std::vector<std::vector<double>> forward_marginals(const TPMSet& tpm) {
    std::vector<std::vector<double>> m(tpm.steps(), std::vector<double>(tpm.size(), 0.0));
    if (tpm.steps() == 0) return m;
    m[0] = tpm.initial();
    for (std::size_t t = 0; t < tpm.transitions(); ++t)
        for (std::size_t i = 0; i < tpm.size(); ++i) {
            if (m[t][i] == 0.0) continue;
            for (std::size_t j = 0; j < tpm.size(); ++j) m[t + 1][j] += m[t][i] * tpm.at(t, i, j);
        }
    return m;
}

std::vector<std::vector<double>> empirical_marginals(std::span<const StateSequence> sequences,
                                                     std::span<const ActivityState> alphabet) {
    const auto idx = alphabet_lookup(alphabet);
    std::vector<std::vector<double>> m(kStepsPerDay, std::vector<double>(alphabet.size(), 0.0));
    const double total = total_weight_of(sequences);
    if (!(total > 0.0)) throw std::invalid_argument("empirical_marginals: total sequence weight is zero");
    for (const auto& seq : sequences)
        for (std::size_t t = 0; t < kStepsPerDay; ++t)
            m[t][static_cast<std::size_t>(lookup(idx, seq.states[t]))] += seq.weight;
    for (auto& row : m)
        for (auto& v : row) v /= total;
    return m;
}

ActivityStatistics estimate_statistics(std::span<const StateSequence> sequences, ActivityState activity) {
    if (sequences.empty()) throw std::invalid_argument("estimate_statistics: no sequences");
    const double total = total_weight_of(sequences);
    if (!(total > 0.0)) throw std::invalid_argument("estimate_statistics: total sequence weight is zero");

    ActivityStatistics st;
    st.activity = activity;
    st.total_weight = total;
    st.sequence_count = sequences.size();
    std::vector<std::pair<double, double>> durations, onsets, counts;
    for (const auto& seq : sequences) {
        std::size_t runs = 0;
        std::size_t t = 0;
        while (t < kStepsPerDay) {
            if (seq.states[t] != activity) {
                ++t;
                continue;
            }
            const std::size_t start = t;
            while (t < kStepsPerDay && seq.states[t] == activity) {
                st.daily_profile[t] += seq.weight;
                ++t;
            }
            onsets.emplace_back(static_cast<double>(start), seq.weight);
            durations.emplace_back(static_cast<double>((t - start) * kMinutesPerStep), seq.weight);
            ++runs;
        }
        counts.emplace_back(static_cast<double>(runs), seq.weight);
        st.run_count += runs;
    }
    for (auto& p : st.daily_profile) p /= total;
    st.duration = EmpiricalDistribution::from_weighted(std::move(durations), "minutes");
    st.onset = EmpiricalDistribution::from_weighted(std::move(onsets), "step");
    st.occurrences = EmpiricalDistribution::from_weighted(std::move(counts), "count");
    return st;
}

ActivityStatisticsSet estimate_all_statistics(std::span<const StateSequence> sequences) {
    ActivityStatisticsSet set;
    for (const auto s : kAllStates) set[index_of(s)] = estimate_statistics(sequences, s);
    return set;
}

BehaviorModel train_behavior_model(std::span<const StateSequence> sequences, std::size_t cluster_id,
                                   const TrainingOptions& options) {
    BehaviorModel m;
    m.cluster_id = cluster_id;
    const auto full = full_alphabet();
    const auto presence = presence_alphabet();
    m.full = estimate_tpm(sequences, full, options);
    m.presence = estimate_tpm(sequences, presence, options);
    m.full.cluster_id = m.presence.cluster_id = cluster_id;
    m.day_type = m.full.day_type;
    m.stats = estimate_all_statistics(sequences);
    return m;
}

void BehaviorLibrary::add(BehaviorModel model) {
    const auto key = std::make_pair(model.day_type, model.cluster_id);
    models_[key] = std::move(model);
}

const BehaviorModel& BehaviorLibrary::get(DayType d, std::size_t cluster) const {
    const auto it = models_.find({d, cluster});
    if (it == models_.end())
        throw std::out_of_range("no behavior model for day type " + std::string(day_type_token(d)) + " cluster " +
                                std::to_string(cluster));
    return it->second;
}

const std::vector<double>& BehaviorLibrary::shares(DayType d) const {
    const auto it = shares_.find(d);
    if (it == shares_.end())
        throw std::out_of_range("no cluster shares for day type " + std::string(day_type_token(d)));
    return it->second;
}

std::size_t BehaviorLibrary::cluster_count(DayType d) const {
    std::size_t n = 0;
    for (const auto& [key, _] : models_)
        if (key.first == d) ++n;
    return n;
}

std::vector<BehaviorModel> train_clustered(std::span<const StateSequence> sequences, const ClusterModel& clusters,
                                           const TrainingOptions& options) {
    std::vector<std::vector<StateSequence>> groups(clusters.k());
    for (const auto& s : sequences)
        if (s.day_type == clusters.day_type) groups[assign_cluster(s, clusters)].push_back(s);
    std::vector<BehaviorModel> out;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].empty())
            throw std::invalid_argument("cluster " + std::to_string(c) + " (" +
                                        std::string(day_type_token(clusters.day_type)) + ") has no training sequences");
        out.push_back(train_behavior_model(groups[c], c, options));
    }
    return out;
}

void save_tpm(const TPMSet& tpm, const std::filesystem::path& path) {
    auto out = text::open_output(path);
    out << "cluster," << tpm.cluster_id << ",day_type," << day_type_token(tpm.day_type) << ",alphabet";
    for (const auto s : tpm.alphabet()) out << ',' << state_token(s);
    out << '\n';
    auto write_row = [&](std::span<const double> row) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << text::fmt(row[j], "%.12g");
        out << '\n';
    };
    write_row(tpm.initial());
    for (std::size_t t = 0; t < tpm.transitions(); ++t)
        for (std::size_t i = 0; i < tpm.size(); ++i) write_row(tpm.row(t, i));
    text::close_output(out, path);
}

TPMSet load_tpm(const std::filesystem::path& path) {
    auto in = text::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty TPM file");
    const auto head = text::split(text::trim(line));
    if (head.size() < 7 || head[0] != "cluster" || head[2] != "day_type" || head[4] != "alphabet")
        throw std::runtime_error(path.string() + ": bad TPM header");
    std::vector<ActivityState> alphabet;
    for (std::size_t i = 5; i < head.size(); ++i) {
        const auto s = parse_state(head[i]);
        if (!s) throw std::runtime_error(path.string() + ": unknown state '" + std::string(head[i]) + "'");
        alphabet.push_back(*s);
    }
    const auto cluster = text::to_int(head[1]);
    const auto day_type = parse_day_type(head[3]);
    if (!cluster || *cluster < 0 || !day_type) throw std::runtime_error(path.string() + ": bad TPM header");

    TPMSet tpm(alphabet, kStepsPerDay);
    tpm.cluster_id = static_cast<std::size_t>(*cluster);
    tpm.day_type = *day_type;
    const std::size_t S = alphabet.size();
    std::size_t line_no = 1;
    std::vector<std::string_view> f;
    auto read_row = [&](auto&& sink) {
        do {
            if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": truncated TPM file");
            ++line_no;
        } while (text::trim(line).empty());
        text::split(text::trim(line), ',', f);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (f.size() != S) throw std::runtime_error(where + ": expected " + std::to_string(S) + " values");
        for (std::size_t j = 0; j < S; ++j) sink(j, text::require_double(f[j], where));
    };
    read_row([&](std::size_t j, double v) { tpm.initial()[j] = v; });
    for (std::size_t t = 0; t < tpm.transitions(); ++t)
        for (std::size_t i = 0; i < S; ++i) read_row([&](std::size_t j, double v) { tpm.at(t, i, j) = v; });
    if (tpm.max_stochastic_error() > 1e-9) throw std::runtime_error(path.string() + ": rows are not stochastic");
    return tpm;
}

namespace {

std::string model_prefix(DayType d, std::size_t cluster) {
    return std::string(day_type_token(d)) + ".c" + std::to_string(cluster);
}

} // namespace

void save_library(const BehaviorLibrary& library, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        const auto path = dir / "library.csv";
        auto out = text::open_output(path);
        for (const auto d : {DayType::Weekday, DayType::Weekend}) {
            const std::size_t k = library.cluster_count(d);
            if (k == 0) continue;
            out << "day_type," << day_type_token(d) << ",k," << k << ",shares";
            for (const double s : library.shares(d)) out << ',' << text::fmt(s, "%.17g");
            out << '\n';
        }
        text::close_output(out, path);
    }
    for (const auto& [key, m] : library.models()) {
        const std::string prefix = model_prefix(key.first, key.second);
        save_tpm(m.full, dir / (prefix + ".full.tpm"));
        save_tpm(m.presence, dir / (prefix + ".presence.tpm"));
        const auto counts_path = dir / (prefix + ".stats.csv");
        auto counts = text::open_output(counts_path);
        counts << "activity,total_weight,sequence_count,run_count\n";
        for (const auto& st : m.stats) {
            const std::string base = prefix + "." + std::string(state_token(st.activity));
            save_distribution(st.duration, dir / (base + ".duration"));
            save_distribution(st.onset, dir / (base + ".onset"));
            save_distribution(st.occurrences, dir / (base + ".occurrences"));
            counts << state_token(st.activity) << ',' << text::fmt(st.total_weight, "%.17g") << ','
                   << st.sequence_count << ',' << st.run_count << '\n';
        }
        text::close_output(counts, counts_path);
        const auto profile_path = dir / (prefix + ".profile.csv");
        auto prof = text::open_output(profile_path);
        prof << "step";
        for (const auto s : kAllStates) prof << ',' << state_token(s);
        prof << '\n';
        for (std::size_t t = 0; t < kStepsPerDay; ++t) {
            prof << t;
            for (const auto& st : m.stats) prof << ',' << text::fmt(st.daily_profile[t], "%.17g");
            prof << '\n';
        }
        text::close_output(prof, profile_path);
    }
}

BehaviorLibrary load_library(const std::filesystem::path& dir) {
    const auto index = dir / "library.csv";
    if (!std::filesystem::exists(index)) throw std::runtime_error("missing model index '" + index.string() + "'");
    BehaviorLibrary lib;
    auto in = text::open_input(index);
    std::string line;
    while (std::getline(in, line)) {
        const auto t = text::trim(line);
        if (t.empty()) continue;
        const auto f = text::split(t);
        if (f.size() < 5 || f[0] != "day_type" || f[2] != "k" || f[4] != "shares")
            throw std::runtime_error(index.string() + ": bad line '" + std::string(t) + "'");
        const auto d = parse_day_type(f[1]);
        const auto k = text::to_int(f[3]);
        if (!d || !k || *k < 1 || f.size() != 5 + static_cast<std::size_t>(*k))
            throw std::runtime_error(index.string() + ": bad line '" + std::string(t) + "'");
        std::vector<double> shares;
        for (std::size_t i = 5; i < f.size(); ++i) shares.push_back(text::require_double(f[i], index.string()));
        lib.set_shares(*d, shares);
        for (std::size_t c = 0; c < static_cast<std::size_t>(*k); ++c) {
            const std::string prefix = model_prefix(*d, c);
            auto need = [&](const std::string& name) {
                const auto p = dir / name;
                if (!std::filesystem::exists(p)) throw std::runtime_error("missing model file '" + p.string() + "'");
                return p;
            };
            BehaviorModel m;
            m.cluster_id = c;
            m.day_type = *d;
            m.full = load_tpm(need(prefix + ".full.tpm"));
            m.presence = load_tpm(need(prefix + ".presence.tpm"));
            for (const auto s : kAllStates) {
                auto& st = m.stats[index_of(s)];
                st.activity = s;
                const std::string base = prefix + "." + std::string(state_token(s));
                st.duration = load_distribution(need(base + ".duration"));
                st.onset = load_distribution(need(base + ".onset"));
                st.occurrences = load_distribution(need(base + ".occurrences"));
            }
            {
                const auto p = need(prefix + ".stats.csv");
                auto cin = text::open_input(p);
                std::getline(cin, line);
                while (std::getline(cin, line)) {
                    const auto cf = text::split(text::trim(line));
                    if (cf.size() != 4) continue;
                    const auto s = parse_state(cf[0]);
                    if (!s) throw std::runtime_error(p.string() + ": unknown activity");
                    auto& st = m.stats[index_of(*s)];
                    st.total_weight = text::require_double(cf[1], p.string());
                    st.sequence_count = static_cast<std::size_t>(text::to_int(cf[2]).value_or(0));
                    st.run_count = static_cast<std::size_t>(text::to_int(cf[3]).value_or(0));
                }
            }
            {
                const auto p = need(prefix + ".profile.csv");
                auto pin = text::open_input(p);
                std::getline(pin, line);
                std::size_t step = 0;
                while (std::getline(pin, line) && step < kStepsPerDay) {
                    const auto pf = text::split(text::trim(line));
                    if (pf.size() != 1 + kNumActivityStates) throw std::runtime_error(p.string() + ": bad profile row");
                    for (std::size_t i = 0; i < kNumActivityStates; ++i)
                        m.stats[i].daily_profile[step] = text::require_double(pf[1 + i], p.string());
                    ++step;
                }
                if (step != kStepsPerDay) throw std::runtime_error(p.string() + ": expected 96 profile rows");
            }
            lib.add(std::move(m));
        }
    }
    return lib;
}

} // namespace occsim
