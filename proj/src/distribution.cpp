#include "occsim/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "text.hpp"

namespace occsim {

EmpiricalDistribution EmpiricalDistribution::from_weighted(
    std::vector<std::pair<double, double>> observations, std::string unit) {
    EmpiricalDistribution d;
    d.unit_ = std::move(unit);
    std::sort(observations.begin(), observations.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (const auto& [value, weight] : observations) {
        if (!std::isfinite(value) || !(weight >= 0.0) || !std::isfinite(weight))
            throw std::invalid_argument("distribution observation must be finite with weight >= 0");
        if (weight == 0.0) continue;
        if (!d.support_.empty() && d.support_.back() == value) {
            d.probs_.back() += weight;
        } else {
            d.support_.push_back(value);
            d.probs_.push_back(weight);
        }
        total += weight;
    }
    if (total <= 0.0) {
        d.support_.clear();
        d.probs_.clear();
        return d;
    }
    double running = 0.0;
    d.cumulative_.reserve(d.probs_.size());
    for (auto& p : d.probs_) {
        p /= total;
        running += p;
        d.cumulative_.push_back(running);
    }
    d.cumulative_.back() = 1.0;
    return d;
}

EmpiricalDistribution EmpiricalDistribution::from_values(const std::vector<double>& values,
                                                         std::string unit) {
    std::vector<std::pair<double, double>> obs;
    obs.reserve(values.size());
    for (const double v : values) obs.emplace_back(v, 1.0);
    return from_weighted(std::move(obs), std::move(unit));
}

EmpiricalDistribution EmpiricalDistribution::point(double value, std::string unit) {
    return from_weighted({{value, 1.0}}, std::move(unit));
}

EmpiricalDistribution EmpiricalDistribution::from_table(std::vector<double> support,
                                                        std::vector<double> probs, std::string unit) {
    if (support.size() != probs.size() || support.empty())
        throw std::invalid_argument("distribution table: support and probabilities must be non-empty and aligned");
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (i > 0 && !(support[i] > support[i - 1]))
            throw std::invalid_argument("distribution table: support must be strictly increasing");
        if (!(probs[i] >= 0.0)) throw std::invalid_argument("distribution table: negative probability");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("distribution table: probabilities sum to " + std::to_string(total));
    // Probabilities are kept as given so saved tables reload bit-exactly.
    EmpiricalDistribution d;
    d.unit_ = std::move(unit);
    double running = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (probs[i] == 0.0) continue;
        if (!std::isfinite(support[i])) throw std::invalid_argument("distribution table: non-finite value");
        d.support_.push_back(support[i]);
        d.probs_.push_back(probs[i]);
        d.cumulative_.push_back(running += probs[i]);
    }
    if (d.support_.empty()) throw std::invalid_argument("distribution table: no positive probability");
    d.cumulative_.back() = 1.0;
    return d;
}

double EmpiricalDistribution::cdf(double x) const {
    const auto it = std::upper_bound(support_.begin(), support_.end(), x);
    if (it == support_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double EmpiricalDistribution::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) m += support_[i] * probs_[i];
    return m;
}

double EmpiricalDistribution::min_value() const {
    if (empty()) throw std::logic_error("min of empty distribution");
    return support_.front();
}

double EmpiricalDistribution::max_value() const {
    if (empty()) throw std::logic_error("max of empty distribution");
    return support_.back();
}

double EmpiricalDistribution::sample(Rng& rng) const {
    if (empty()) throw std::logic_error("cannot sample an empty distribution");
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                           support_.size() - 1);
    return support_[idx];
}

void save_distribution(const EmpiricalDistribution& dist, const std::filesystem::path& path) {
    auto out = text::open_output(path);
    out << "unit," << dist.unit() << '\n';
    for (std::size_t i = 0; i < dist.size(); ++i)
        out << text::fmt(dist.support()[i], "%.17g") << ',' << text::fmt(dist.probs()[i], "%.17g") << '\n';
    text::close_output(out, path);
}

EmpiricalDistribution load_distribution(const std::filesystem::path& path) {
    auto in = text::open_input(path);
    std::string line;
    std::string unit;
    std::vector<std::pair<double, double>> obs;
    std::vector<std::string_view> fields;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        text::split(t, ',', fields);
        if (first && fields[0] == "unit") {
            unit = fields.size() > 1 ? std::string(fields[1]) : std::string();
            first = false;
            continue;
        }
        first = false;
        if (fields.size() != 2)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected value,probability");
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const double p = text::require_double(fields[1], where);
        if (p < 0.0) throw std::runtime_error(where + ": negative probability");
        obs.emplace_back(text::require_double(fields[0], where), p);
    }
    bool table = !obs.empty();
    double total = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        total += obs[i].second;
        if (i > 0 && !(obs[i].first > obs[i - 1].first)) table = false;
    }
    if (table && std::abs(total - 1.0) <= 1e-9) {
        std::vector<double> support, probs;
        for (const auto& [v, p] : obs) {
            support.push_back(v);
            probs.push_back(p);
        }
        return EmpiricalDistribution::from_table(std::move(support), std::move(probs), unit);
    }
    return EmpiricalDistribution::from_weighted(std::move(obs), unit);
}

const EmpiricalDistribution& DistributionBundle::get(const std::string& name) const {
    const auto it = dists_.find(name);
    if (it == dists_.end()) throw std::out_of_range("missing distribution for channel '" + name + "'");
    return it->second;
}

} // namespace occsim
