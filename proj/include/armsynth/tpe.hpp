#pragma once

#include "armsynth/objectives.hpp"
#include "armsynth/rng.hpp"
#include "armsynth/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace armsynth {

/// One search dimension. Categorical values are stored as integral doubles
/// 0..categories-1 in a ParamVector.
struct ParamDim {
    std::string name;
    bool categorical{false};
    int categories{0};
    Interval range{};

    static ParamDim make_categorical(std::string name, int categories) {
        return {std::move(name), true, categories, {0.0, static_cast<double>(categories - 1)}};
    }
    static ParamDim make_continuous(std::string name, Interval range) { return {std::move(name), false, 0, range}; }
};

using ParamSpace = std::vector<ParamDim>;
using ParamVector = std::vector<double>;

struct SamplerSettings {
    double gamma{0.10};
    int n_startup{50};
    int n_candidates{24};
    std::uint64_t seed{0};
    double bandwidth_floor{0.01};  // fraction of the dimension's range
    int max_rejections{100};
    bool uniform_only{false};  // random-search baseline: every ask is a start-up sample
};

struct Observation {
    ParamVector params;
    ObjectiveVector objectives;
};

/// Factorized Parzen density over a ParamSpace: for continuous dimensions a
/// mixture of normals truncated to the range (one component per sample plus
/// a wide prior component of weight 1), for categorical dimensions a
/// Laplace-smoothed weighted frequency table. Sample weights default to 1 and
/// are rescaled to average 1.
class ParzenEstimator {
public:
    ParzenEstimator(const ParamSpace& space, const std::vector<const ParamVector*>& samples, double bandwidth_floor,
                    std::vector<double> weights = {});

    ParamVector sample(Rng& rng) const;
    double log_density(const ParamVector& x) const;

    const std::vector<double>& categorical_mass(std::size_t dim) const { return dims_[dim].mass; }
    double bandwidth(std::size_t dim) const { return dims_[dim].sigma; }

private:
    struct Dim {
        bool categorical{false};
        Interval range{};
        std::vector<double> means;       // continuous; last entry is the prior
        std::vector<double> sigmas;      // continuous, per component
        std::vector<double> log_norm;    // continuous, log(sigma * sqrt(2 pi) * Z / w) per component
        std::vector<double> mass;        // categorical
        double sigma{0.0};
    };
    std::vector<Dim> dims_;
    std::vector<double> component_weights_;  // samples then prior
};

/// Multi-objective TPE over a mixed categorical/continuous space. Observed
/// trials are split into a "good" set (lowest nondomination ranks filling a
/// gamma quantile, crowding distance breaking ties inside the boundary rank)
/// and a "bad" set (everything else, including every infeasible trial).
/// Good samples are weighted by their exclusive hypervolume contribution
/// within the good set. Candidates drawn from the good density are scored by
/// l(x)/g(x).
class TpeSampler {
public:
    using Validator = std::function<bool(const ParamVector&)>;

    TpeSampler(ParamSpace space, SamplerSettings settings);

    /// Next point. During start-up (fewer than n_startup observations) the
    /// point is uniform; if `valid` is given it is rejection-resampled up to
    /// max_rejections times.
    ParamVector ask(const Validator& valid = {});

    /// k points for parallel evaluation. Points after the first see the
    /// earlier pending ones as observations at the current worst feasible
    /// objectives (constant liar).
    std::vector<ParamVector> ask_batch(int k, const Validator& valid = {});

    void tell(ParamVector params, const ObjectiveVector& objectives);

    const std::vector<Observation>& observations() const { return observations_; }
    const ParamSpace& space() const { return space_; }
    const SamplerSettings& settings() const { return settings_; }

    /// Indices of the good and bad sets for a given history. Both empty when
    /// the split degenerates (no feasible trial, or all objectives equal).
    static std::pair<std::vector<int>, std::vector<int>> split(const std::vector<Observation>& history, double gamma);

    /// Weights of the good set: hypervolume contributions relative to the
    /// largest one (reference 1.1 x the componentwise max), clipped below at
    /// kMinWeight.
    static std::vector<double> good_weights(const std::vector<Observation>& history, const std::vector<int>& good);
    static constexpr double kMinWeight = 1e-12;

    ParamVector sample_uniform();

private:
    ParamVector ask_from(const std::vector<Observation>& history, const Validator& valid);
    ParamVector sample_startup(const Validator& valid);

    ParamSpace space_;
    SamplerSettings settings_;
    std::vector<Observation> observations_;
    Rng rng_;
};

}  // namespace armsynth
