#pragma once

#include "armsynth/design_space.hpp"
#include "armsynth/objectives.hpp"
#include "armsynth/pareto.hpp"
#include "armsynth/tpe.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace armsynth {

/// Flat encoding of a genotype for the sampler:
/// general  [a_x, a_y, a_z, (orientation, direction, length) per joint]
/// module   [a_x, a_y, a_z, connection per joint]
class GenotypeCodec {
public:
    explicit GenotypeCodec(SearchSpace space);

    const SearchSpace& space() const { return space_; }
    ParamSpace param_space() const;
    std::vector<std::string> field_names() const;

    ParamVector encode(const Genotype& g) const;
    Genotype decode(const ParamVector& x) const;

private:
    SearchSpace space_;
};

struct Trial {
    int id{0};
    std::uint64_t seed{0};
    Genotype params;
    ObjectiveVector objectives;
    int rank{0};
};

/// A trial handed out by ask() and waiting for its objectives.
struct PendingTrial {
    int id{0};
    std::uint64_t seed{0};
    Genotype params;
};

/// Seed of trial `id` in a campaign seeded with `seed`. Used for the IK
/// restarts of that trial.
std::uint64_t trial_seed(std::uint64_t seed, int id);

/// Ask/tell optimizer state for one campaign: the TPE sampler, the trial
/// history with nondomination ranks, the Pareto archive and hypervolume
/// progress.
class Study {
public:
    Study(SearchSpace space, SamplerSettings settings);

    /// Next design. Start-up samples are rejection-resampled against
    /// validate_genotype; later ones may be infeasible and get penalized.
    PendingTrial ask();

    /// k designs under the constant-liar convention. Ids are consecutive.
    std::vector<PendingTrial> ask_batch(int k);

    /// Records the objectives of a pending trial. Trials must be told in ask
    /// order; an id that was already told or skips ahead is a
    /// ContractViolation.
    const Trial& tell(const PendingTrial& pending, const ObjectiveVector& objectives);

    /// Appends a trial that was not handed out by ask() under a fresh id.
    const Trial& tell(const Genotype& params, const ObjectiveVector& objectives);

    const std::vector<Trial>& trials() const { return trials_; }
    const ParetoArchive& archive() const { return archive_; }
    const GenotypeCodec& codec() const { return codec_; }
    const SamplerSettings& settings() const { return sampler_.settings(); }
    int pending() const { return next_id_ - static_cast<int>(trials_.size()); }

    /// Current rank-0 feasible trials sorted by e_x. Empty (not an error)
    /// when no trial is feasible.
    std::vector<Trial> pareto_front() const;

    /// Frozen hypervolume reference, once established.
    const std::optional<ObjectiveVector>& reference() const { return archive_.reference; }

    /// Hypervolume after every tell (0 before the reference is frozen).
    const std::vector<double>& hypervolume_history() const { return hv_history_; }

    /// The reference freezes by itself once n_startup trials are told (at
    /// 1.1 x the componentwise max over the feasible ones, or at the first
    /// feasible trial after that). Campaigns shorter than n_startup call this
    /// at the end. No-op when already frozen or nothing is feasible.
    void freeze_reference();

private:
    const Trial& record(int id, std::uint64_t seed, const Genotype& params, const ObjectiveVector& objectives);

    GenotypeCodec codec_;
    TpeSampler sampler_;
    std::uint64_t seed_;
    std::vector<Trial> trials_;
    ParetoArchive archive_;
    std::vector<double> hv_history_;
    int next_id_{0};
};

}  // namespace armsynth
