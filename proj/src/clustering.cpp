#include "occsim/clustering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "occsim/rng.hpp"
#include "text.hpp"

namespace occsim {

namespace {

// Presence sequences packed at 2 bits per step: Sleep=0, Away=1, HomeActive=2.
using Packed = std::array<std::uint64_t, 3>;
constexpr std::uint64_t kLowBits = 0x5555555555555555ull;

std::uint64_t presence_code(ActivityState s) {
    switch (project_state(s)) {
    case ActivityState::Sleep: return 0;
    case ActivityState::Away: return 1;
    default: return 2;
    }
}

constexpr std::array<ActivityState, 3> kCodeState = {ActivityState::Sleep, ActivityState::Away,
                                                     ActivityState::HomeActive};

Packed pack(std::span<const ActivityState> states) {
    Packed p{};
    for (std::size_t t = 0; t < kStepsPerDay; ++t) p[t / 32] |= presence_code(states[t]) << (2 * (t % 32));
    return p;
}

std::uint64_t code_at(const Packed& p, std::size_t t) { return (p[t / 32] >> (2 * (t % 32))) & 3u; }

int packed_distance(const Packed& a, const Packed& b) {
    int d = 0;
    for (std::size_t w = 0; w < 3; ++w) {
        const std::uint64_t x = a[w] ^ b[w];
        d += std::popcount((x | (x >> 1)) & kLowBits);
    }
    return d;
}

DayStates unpack(const Packed& p) {
    DayStates s{};
    for (std::size_t t = 0; t < kStepsPerDay; ++t) s[t] = kCodeState[code_at(p, t)];
    return s;
}

struct Assignment {
    std::vector<std::size_t> labels;
    std::vector<int> dist;
};

Assignment assign_all(const std::vector<Packed>& points, const std::vector<Packed>& modes) {
    Assignment a;
    a.labels.resize(points.size());
    a.dist.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        int best = packed_distance(points[i], modes[0]);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < modes.size(); ++c) {
            const int d = packed_distance(points[i], modes[c]);
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        a.labels[i] = arg;
        a.dist[i] = best;
    }
    return a;
}

// Re-seeds empty clusters from the point farthest from its current mode.
void repair_empty(const std::vector<Packed>& points, std::vector<Packed>& modes, Assignment& a) {
    while (true) {
        std::vector<std::size_t> sizes(modes.size(), 0);
        for (const auto l : a.labels) ++sizes[l];
        const auto empty = std::find(sizes.begin(), sizes.end(), 0u);
        if (empty == sizes.end()) return;
        std::size_t far = 0;
        for (std::size_t i = 1; i < points.size(); ++i)
            if (a.dist[i] > a.dist[far]) far = i;
        if (a.dist[far] == 0) throw std::logic_error("kmodes: cannot repair empty cluster");
        modes[static_cast<std::size_t>(empty - sizes.begin())] = points[far];
        a = assign_all(points, modes);
    }
}

double total_cost(const Assignment& a, const std::vector<double>& w) {
    double c = 0.0;
    for (std::size_t i = 0; i < a.dist.size(); ++i) c += w[i] * a.dist[i];
    return c;
}

std::vector<Packed> recompute_modes(const std::vector<Packed>& points, const std::vector<double>& w,
                                    const Assignment& a, const std::vector<Packed>& current) {
    const std::size_t k = current.size();
    std::vector<std::array<std::array<double, 3>, kStepsPerDay>> counts(k);
    for (auto& c : counts)
        for (auto& row : c) row.fill(0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& c = counts[a.labels[i]];
        for (std::size_t t = 0; t < kStepsPerDay; ++t) c[t][code_at(points[i], t)] += w[i];
    }
    std::vector<Packed> modes(k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t t = 0; t < kStepsPerDay; ++t) {
            const auto& row = counts[c][t];
            // Keep the current symbol on ties so the iteration cannot cycle.
            std::uint64_t best = code_at(current[c], t);
            for (std::uint64_t s = 0; s < 3; ++s)
                if (row[s] > row[best]) best = s;
            modes[c][t / 32] |= best << (2 * (t % 32));
        }
    }
    return modes;
}

} // namespace

std::vector<double> default_cluster_shares() { return {0.36, 0.21, 0.21, 0.22}; }

std::vector<std::string> default_cluster_names() {
    return {"day away, evening home", "mostly home, early riser", "day away, evening away", "mostly home"};
}

int sequence_distance(std::span<const ActivityState> a, std::span<const ActivityState> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("sequence_distance: length mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

KModesResult kmodes(std::span<const StateSequence> data, const KModesOptions& options) {
    const std::size_t n = data.size();
    const std::size_t k = options.k;
    if (k < 2) throw std::invalid_argument("kmodes: k must be at least 2");
    if (n < k) throw std::invalid_argument("kmodes: fewer data points than clusters");

    std::vector<Packed> points(n);
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        points[i] = pack(data[i].states);
        if (options.weighted) w[i] = data[i].weight;
    }
    const std::set<Packed> distinct(points.begin(), points.end());
    if (k > distinct.size())
        throw std::invalid_argument("kmodes: k = " + std::to_string(k) + " exceeds the " +
                                    std::to_string(distinct.size()) + " distinct sequences");

    // Greedy k-means++ seeding: each later mode is the best of a few
    // candidates drawn proportional to weighted squared distance from the
    // nearest mode so far, judged by the potential it leaves behind.
    Rng rng = Rng::stream(options.seed, {0x6b6d6f646573ull});
    auto pick = [&](const std::vector<double>& mass) {
        const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
        double u = rng.uniform() * total;
        for (std::size_t i = 0; i < n; ++i) {
            if (mass[i] <= 0.0) continue;
            if (u < mass[i]) return i;
            u -= mass[i];
        }
        for (std::size_t i = n; i-- > 0;)
            if (mass[i] > 0.0) return i;
        return std::size_t{0};
    };
    std::vector<Packed> modes;
    {
        std::vector<double> base = w;
        if (std::accumulate(base.begin(), base.end(), 0.0) <= 0.0) base.assign(n, 1.0);
        modes.push_back(points[pick(base)]);
        std::vector<int> nearest(n);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = packed_distance(points[i], modes[0]);
        const std::size_t candidates = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
        std::vector<double> mass(n);
        std::vector<int> trial(n), best_nearest(n);
        while (modes.size() < k) {
            for (std::size_t i = 0; i < n; ++i) mass[i] = base[i] * nearest[i] * static_cast<double>(nearest[i]);
            if (std::accumulate(mass.begin(), mass.end(), 0.0) <= 0.0)
                for (std::size_t i = 0; i < n; ++i) mass[i] = nearest[i] > 0 ? 1.0 : 0.0;
            double best_potential = 0.0;
            std::size_t best = n;
            for (std::size_t c = 0; c < candidates; ++c) {
                const std::size_t cand = pick(mass);
                double potential = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    trial[i] = std::min(nearest[i], packed_distance(points[i], points[cand]));
                    potential += base[i] * trial[i] * static_cast<double>(trial[i]);
                }
                if (best == n || potential < best_potential) {
                    best = cand;
                    best_potential = potential;
                    best_nearest.swap(trial);
                }
            }
            modes.push_back(points[best]);
            nearest.swap(best_nearest);
        }
    }

    KModesResult result;
    Assignment a = assign_all(points, modes);
    repair_empty(points, modes, a);
    result.cost_history.push_back(total_cost(a, w));
    while (result.iterations < options.max_iter) {
        ++result.iterations;
        auto updated = recompute_modes(points, w, a, modes);
        if (updated == modes) {
            result.converged = true;
            break;
        }
        modes = std::move(updated);
        a = assign_all(points, modes);
        repair_empty(points, modes, a);
        result.cost_history.push_back(total_cost(a, w));
    }

    result.model.day_type = data.front().day_type;
    for (const auto& m : modes) result.model.modes.push_back(unpack(m));
    std::vector<double> mass(k, 0.0);
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    const bool use_counts = total <= 0.0;
    if (use_counts) total = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) mass[a.labels[i]] += use_counts ? 1.0 : w[i];
    for (auto& m : mass) m /= total;
    result.model.shares = std::move(mass);
    result.assignment.labels = std::move(a.labels);
    return result;
}

double silhouette_from_distances(std::span<const double> distances, std::size_t n,
                                 std::span<const std::size_t> labels) {
    if (distances.size() != n * n || labels.size() != n)
        throw std::invalid_argument("silhouette: distance matrix and labels must match");
    const std::size_t k = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    if (k < 2) throw std::invalid_argument("silhouette: undefined for fewer than 2 clusters");
    std::vector<std::size_t> sizes(k, 0);
    for (const auto l : labels) ++sizes[l];
    if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end())
        throw std::invalid_argument("silhouette: every cluster must be non-empty");

    double sum = 0.0;
    std::vector<double> acc(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = labels[i];
        if (sizes[own] == 1) continue;
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) acc[labels[j]] += distances[i * n + j];
        const double a = acc[own] / static_cast<double>(sizes[own] - 1);
        double b = INFINITY;
        for (std::size_t c = 0; c < k; ++c)
            if (c != own) b = std::min(b, acc[c] / static_cast<double>(sizes[c]));
        const double m = std::max(a, b);
        if (m > 0.0) sum += (b - a) / m;
    }
    return sum / static_cast<double>(n);
}

double silhouette(std::span<const StateSequence> data, std::span<const std::size_t> labels) {
    const std::size_t n = data.size();
    if (labels.size() != n) throw std::invalid_argument("silhouette: one label per sequence required");
    const std::size_t k = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    if (k < 2) throw std::invalid_argument("silhouette: undefined for fewer than 2 clusters");
    std::vector<std::size_t> sizes(k, 0);
    for (const auto l : labels) ++sizes[l];
    if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end())
        throw std::invalid_argument("silhouette: every cluster must be non-empty");

    // Mean matching distance to a cluster follows from its per-step state
    // counts: sum_t (|C| - count_C[t][x_t]).
    std::vector<std::array<std::array<std::uint32_t, kNumActivityStates>, kStepsPerDay>> counts(k);
    for (auto& c : counts)
        for (auto& row : c) row.fill(0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < kStepsPerDay; ++t) ++counts[labels[i]][t][index_of(project_state(data[i].states[t]))];

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = labels[i];
        if (sizes[own] == 1) continue;
        double a = 0.0;
        double b = INFINITY;
        for (std::size_t c = 0; c < k; ++c) {
            std::uint64_t matches = 0;
            for (std::size_t t = 0; t < kStepsPerDay; ++t) matches += counts[c][t][index_of(project_state(data[i].states[t]))];
            const double total = static_cast<double>(sizes[c] * kStepsPerDay - matches);
            if (c == own) a = total / static_cast<double>(sizes[c] - 1);
            else b = std::min(b, total / static_cast<double>(sizes[c]));
        }
        const double m = std::max(a, b);
        if (m > 0.0) sum += (b - a) / m;
    }
    return sum / static_cast<double>(n);
}

std::uint64_t kmodes_run_seed(std::uint64_t base, std::size_t k, std::size_t repeat) {
    return derive_seed(derive_seed(base, k), repeat);
}

SelectKResult select_k(std::span<const StateSequence> data, const SelectKOptions& options) {
    if (options.repeats < 1) throw std::invalid_argument("select_k: repeats must be at least 1");
    if (options.k_min < 2 || options.k_max < options.k_min)
        throw std::invalid_argument("select_k: need 2 <= k_min <= k_max");
    SelectKResult result;
    std::vector<KModesResult> best_runs;
    for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
        SelectKRow row;
        row.k = k;
        KModesResult best_run;
        double best_score = -INFINITY;
        for (std::size_t r = 0; r < options.repeats; ++r) {
            KModesOptions ko;
            ko.k = k;
            ko.seed = kmodes_run_seed(options.seed, k, r);
            ko.max_iter = options.max_iter;
            ko.weighted = options.weighted;
            auto run = kmodes(data, ko);
            const double s = silhouette(data, run.assignment.labels);
            row.scores.push_back(s);
            if (s > best_score) {
                best_score = s;
                best_run = std::move(run);
            }
        }
        row.mean = std::accumulate(row.scores.begin(), row.scores.end(), 0.0) /
                   static_cast<double>(row.scores.size());
        result.table.push_back(std::move(row));
        best_runs.push_back(std::move(best_run));
    }
    double top = -INFINITY;
    for (const auto& row : result.table) top = std::max(top, row.mean);
    std::size_t pick = 0;
    for (std::size_t i = 0; i < result.table.size(); ++i)
        if (result.table[i].mean >= top - options.epsilon) pick = i;
    result.best_k = result.table[pick].k;
    result.best = std::move(best_runs[pick]);
    return result;
}

std::size_t assign_cluster(const StateSequence& seq, const ClusterModel& model) {
    if (model.modes.empty()) throw std::invalid_argument("assign_cluster: empty cluster model");
    const Packed p = pack(seq.states);
    std::size_t arg = 0;
    int best = packed_distance(p, pack(model.modes[0]));
    for (std::size_t c = 1; c < model.modes.size(); ++c) {
        const int d = packed_distance(p, pack(model.modes[c]));
        if (d < best) {
            best = d;
            arg = c;
        }
    }
    return arg;
}

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path) {
    if (model.shares.size() != model.k()) throw std::invalid_argument("cluster model: one share per mode required");
    auto out = text::open_output(path);
    out << "k," << model.k() << '\n';
    out << "day_type," << day_type_token(model.day_type) << '\n';
    out << "shares";
    for (const double s : model.shares) out << ',' << text::fmt(s, "%.17g");
    out << '\n';
    if (!model.names.empty()) {
        out << "names";
        for (const auto& nm : model.names) out << '|' << nm;
        out << '\n';
    }
    for (const auto& mode : model.modes) {
        for (std::size_t t = 0; t < kStepsPerDay; ++t) out << (t ? "," : "") << state_token(mode[t]);
        out << '\n';
    }
    text::close_output(out, path);
}

ClusterModel load_cluster_model(const std::filesystem::path& path) {
    auto in = text::open_input(path);
    ClusterModel model;
    std::size_t k = 0;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> f;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (t.starts_with("names|")) {
            text::split(t.substr(6), '|', f);
            for (const auto nm : f) model.names.emplace_back(nm);
            continue;
        }
        text::split(t, ',', f);
        if (f[0] == "k" && f.size() == 2) {
            const auto v = text::to_int(f[1]);
            if (!v || *v < 1) throw std::runtime_error(where + ": bad k");
            k = static_cast<std::size_t>(*v);
        } else if (f[0] == "day_type" && f.size() == 2) {
            const auto d = parse_day_type(f[1]);
            if (!d) throw std::runtime_error(where + ": bad day_type");
            model.day_type = *d;
        } else if (f[0] == "shares") {
            for (std::size_t i = 1; i < f.size(); ++i) model.shares.push_back(text::require_double(f[i], where));
        } else {
            if (f.size() != kStepsPerDay) throw std::runtime_error(where + ": mode line must have 96 tokens");
            DayStates mode{};
            for (std::size_t s = 0; s < kStepsPerDay; ++s) {
                const auto st = parse_state(f[s]);
                if (!st) throw std::runtime_error(where + ": unknown state '" + std::string(f[s]) + "'");
                mode[s] = *st;
            }
            model.modes.push_back(mode);
        }
    }
    if (k == 0 || model.modes.size() != k || model.shares.size() != k)
        throw std::runtime_error(path.string() + ": header k does not match modes/shares");
    if (!model.names.empty() && model.names.size() != k)
        throw std::runtime_error(path.string() + ": names count does not match k");
    const double total = std::accumulate(model.shares.begin(), model.shares.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error(path.string() + ": shares do not sum to 1");
    return model;
}

} // namespace occsim
