#include "armsynth/tpe.hpp"

#include "armsynth/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace armsynth {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double scott_bandwidth(const std::vector<double>& values) {
    const auto m = static_cast<double>(values.size());
    if (values.size() < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (m - 1.0));
    return 1.059 * sd * std::pow(m, -0.2);
}

}  // namespace

// ---------------------------------------------------------------------------
// ParzenEstimator

ParzenEstimator::ParzenEstimator(const ParamSpace& space, const std::vector<const ParamVector*>& samples,
                                 double bandwidth_floor, std::vector<double> weights) {
    const std::size_t m = samples.size();
    if (weights.empty()) weights.assign(m, 1.0);
    if (weights.size() != m) throw ContractViolation("ParzenEstimator: one weight per sample");
    const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (m > 0 && !(total_weight > 0.0)) throw ContractViolation("ParzenEstimator: weights must not all be zero");
    for (double& w : weights) w *= static_cast<double>(m) / total_weight;
    component_weights_ = weights;
    component_weights_.push_back(1.0);  // prior
    const double log_total = std::log(static_cast<double>(m) + 1.0);

    dims_.resize(space.size());
    for (std::size_t d = 0; d < space.size(); ++d) {
        const auto& spec = space[d];
        Dim& dim = dims_[d];
        dim.categorical = spec.categorical;
        dim.range = spec.range;
        if (spec.categorical) {
            const auto k = static_cast<std::size_t>(spec.categories);
            std::vector<double> counts(k, 1.0);  // Laplace prior
            for (std::size_t i = 0; i < m; ++i) counts[static_cast<std::size_t>((*samples[i])[d])] += weights[i];
            const double total = static_cast<double>(m + k);
            dim.mass.resize(k);
            for (std::size_t c = 0; c < k; ++c) dim.mass[c] = counts[c] / total;
            continue;
        }
        const double width = spec.range.width();
        if (!(width > 0.0)) continue;  // collapsed interval: always range.lo
        std::vector<double> values;
        values.reserve(m);
        for (const auto* s : samples) values.push_back((*s)[d]);
        dim.sigma = std::clamp(scott_bandwidth(values), bandwidth_floor * width, width);
        dim.means = values;
        dim.means.push_back(0.5 * (spec.range.lo + spec.range.hi));
        dim.sigmas.assign(values.size(), dim.sigma);
        dim.sigmas.push_back(width);
        dim.log_norm.resize(dim.means.size());
        for (std::size_t j = 0; j < dim.means.size(); ++j) {
            const double mu = dim.means[j];
            const double sg = dim.sigmas[j];
            const double z = normal_cdf((spec.range.hi - mu) / sg) - normal_cdf((spec.range.lo - mu) / sg);
            dim.log_norm[j] = std::log(sg) + kLogSqrt2Pi + std::log(std::max(z, 1e-300)) + log_total -
                              std::log(component_weights_[j]);
        }
    }
}

ParamVector ParzenEstimator::sample(Rng& rng) const {
    ParamVector x(dims_.size(), 0.0);
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        const Dim& dim = dims_[d];
        if (dim.categorical) {
            std::discrete_distribution<int> pick(dim.mass.begin(), dim.mass.end());
            x[d] = static_cast<double>(pick(rng));
            continue;
        }
        if (dim.means.empty()) {
            x[d] = dim.range.lo;
            continue;
        }
        std::discrete_distribution<std::size_t> pick(component_weights_.begin(), component_weights_.end());
        const std::size_t j = pick(rng);
        std::normal_distribution<double> normal(dim.means[j], dim.sigmas[j]);
        double v = dim.means[j];
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const double draw = normal(rng);
            if (draw >= dim.range.lo && draw <= dim.range.hi) {
                v = draw;
                break;
            }
        }
        x[d] = v;
    }
    return x;
}

double ParzenEstimator::log_density(const ParamVector& x) const {
    double total = 0.0;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        const Dim& dim = dims_[d];
        if (dim.categorical) {
            total += std::log(dim.mass[static_cast<std::size_t>(x[d])]);
            continue;
        }
        if (dim.means.empty()) continue;
        double peak = -std::numeric_limits<double>::infinity();
        thread_local std::vector<double> terms;
        terms.resize(dim.means.size());
        for (std::size_t j = 0; j < dim.means.size(); ++j) {
            const double z = (x[d] - dim.means[j]) / dim.sigmas[j];
            terms[j] = -0.5 * z * z - dim.log_norm[j];
            peak = std::max(peak, terms[j]);
        }
        double sum = 0.0;
        for (double t : terms) sum += std::exp(t - peak);
        total += peak + std::log(sum);
    }
    return total;
}

// ---------------------------------------------------------------------------
// TpeSampler

TpeSampler::TpeSampler(ParamSpace space, SamplerSettings settings)
    : space_(std::move(space)), settings_(settings), rng_(derive_seed(settings.seed, {0x545045})) {
    if (!(settings_.gamma > 0.0 && settings_.gamma < 1.0)) throw ContractViolation("sampler: gamma must be in (0, 1)");
    if (settings_.n_candidates < 1) throw ContractViolation("sampler: n_candidates must be >= 1");
}

ParamVector TpeSampler::sample_uniform() {
    ParamVector x(space_.size());
    for (std::size_t d = 0; d < space_.size(); ++d) {
        const auto& spec = space_[d];
        x[d] = spec.categorical ? static_cast<double>(uniform_index(rng_, spec.categories))
                                : uniform(rng_, spec.range.lo, spec.range.hi);
    }
    return x;
}

ParamVector TpeSampler::sample_startup(const Validator& valid) {
    ParamVector x = sample_uniform();
    if (!valid) return x;
    for (int attempt = 1; attempt < settings_.max_rejections && !valid(x); ++attempt) x = sample_uniform();
    return x;
}

std::pair<std::vector<int>, std::vector<int>> TpeSampler::split(const std::vector<Observation>& history,
                                                                double gamma) {
    std::vector<int> feasible;
    for (std::size_t i = 0; i < history.size(); ++i)
        if (history[i].objectives.feasible) feasible.push_back(static_cast<int>(i));
    if (feasible.empty()) return {};
    bool all_equal = true;
    for (const auto& o : history)
        if (o.objectives.e_x != history.front().objectives.e_x || o.objectives.e_tau != history.front().objectives.e_tau ||
            o.objectives.feasible != history.front().objectives.feasible)
            all_equal = false;
    if (all_equal) return {};

    std::vector<ObjectiveVector> points;
    points.reserve(feasible.size());
    for (int i : feasible)
        points.push_back({history[static_cast<std::size_t>(i)].objectives.e_x,
                          history[static_cast<std::size_t>(i)].objectives.e_tau, true, {}});
    const auto ranks = nondominated_sort(points);
    const auto n_good = std::min(
        feasible.size(),
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(history.size())))));

    std::vector<std::vector<int>> by_rank;  // positions within `feasible`
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        const auto r = static_cast<std::size_t>(ranks[k]);
        if (by_rank.size() <= r) by_rank.resize(r + 1);
        by_rank[r].push_back(static_cast<int>(k));
    }
    std::vector<char> is_good(history.size(), 0);
    std::size_t taken = 0;
    for (const auto& level : by_rank) {
        if (taken >= n_good) break;
        if (taken + level.size() <= n_good) {
            for (int k : level) is_good[static_cast<std::size_t>(feasible[static_cast<std::size_t>(k)])] = 1;
            taken += level.size();
            continue;
        }
        const auto crowd = crowding_distance(points, level);
        std::vector<std::size_t> order(level.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
        for (std::size_t q = 0; taken < n_good; ++q, ++taken)
            is_good[static_cast<std::size_t>(feasible[static_cast<std::size_t>(level[order[q]])])] = 1;
    }
    std::pair<std::vector<int>, std::vector<int>> out;
    for (std::size_t i = 0; i < history.size(); ++i) (is_good[i] ? out.first : out.second).push_back(static_cast<int>(i));
    return out;
}

std::vector<double> TpeSampler::good_weights(const std::vector<Observation>& history, const std::vector<int>& good) {
    std::vector<ObjectiveVector> points;
    points.reserve(good.size());
    ObjectiveVector ref{0.0, 0.0, true, {}};
    for (int i : good) {
        const auto& o = history[static_cast<std::size_t>(i)].objectives;
        points.push_back({o.e_x, o.e_tau, true, {}});
        ref.e_x = std::max(ref.e_x, o.e_x);
        ref.e_tau = std::max(ref.e_tau, o.e_tau);
    }
    ref.e_x = std::max(1.1 * ref.e_x, ref.e_x + 1e-12);
    ref.e_tau = std::max(1.1 * ref.e_tau, ref.e_tau + 1e-12);
    auto w = hypervolume_contributions(points, ref);
    const double top = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
    for (double& v : w) v = top > 0.0 ? std::max(v / top, kMinWeight) : 1.0;
    return w;
}

ParamVector TpeSampler::ask_from(const std::vector<Observation>& history, const Validator& valid) {
    if (settings_.uniform_only || static_cast<int>(history.size()) < settings_.n_startup) return sample_startup(valid);
    const auto [good, bad] = split(history, settings_.gamma);
    if (good.empty()) return sample_startup(valid);

    std::vector<const ParamVector*> good_samples, bad_samples;
    for (int i : good) good_samples.push_back(&history[static_cast<std::size_t>(i)].params);
    for (int i : bad) bad_samples.push_back(&history[static_cast<std::size_t>(i)].params);
    const ParzenEstimator l(space_, good_samples, settings_.bandwidth_floor, good_weights(history, good));
    const ParzenEstimator g(space_, bad_samples, settings_.bandwidth_floor);

    ParamVector best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < settings_.n_candidates; ++c) {
        ParamVector x = l.sample(rng_);
        const double score = l.log_density(x) - g.log_density(x);
        if (best.empty() || score > best_score) {
            best_score = score;
            best = std::move(x);
        }
    }
    return best;
}

ParamVector TpeSampler::ask(const Validator& valid) { return ask_from(observations_, valid); }

std::vector<ParamVector> TpeSampler::ask_batch(int k, const Validator& valid) {
    std::vector<ParamVector> out;
    if (k <= 0) return out;
    std::vector<Observation> history = observations_;
    for (int i = 0; i < k; ++i) {
        out.push_back(ask_from(history, valid));
        ObjectiveVector lie;
        lie.feasible = true;
        bool any = false;
        for (const auto& o : observations_) {
            if (!o.objectives.feasible) continue;
            lie.e_x = any ? std::max(lie.e_x, o.objectives.e_x) : o.objectives.e_x;
            lie.e_tau = any ? std::max(lie.e_tau, o.objectives.e_tau) : o.objectives.e_tau;
            any = true;
        }
        if (!any) {
            lie.feasible = false;
            lie.e_x = lie.e_tau = std::numeric_limits<double>::max();
        }
        history.push_back({out.back(), lie});
    }
    return out;
}

void TpeSampler::tell(ParamVector params, const ObjectiveVector& objectives) {
    if (params.size() != space_.size()) throw ContractViolation("sampler: parameter vector has the wrong length");
    observations_.push_back({std::move(params), {objectives.e_x, objectives.e_tau, objectives.feasible, {}}});
}

}  // namespace armsynth
