#include "armsynth/study.hpp"

#include <algorithm>
#include <cmath>

namespace armsynth {

GenotypeCodec::GenotypeCodec(SearchSpace space) : space_(std::move(space)) { space_.check(); }

ParamSpace GenotypeCodec::param_space() const {
    ParamSpace out;
    static const char* kAxes[3] = {"a_x", "a_y", "a_z"};
    for (int a = 0; a < 3; ++a) out.push_back(ParamDim::make_continuous(kAxes[a], space_.base[a]));
    for (int j = 1; j <= space_.n_joint; ++j) {
        const std::string p = "j" + std::to_string(j) + "_";
        if (space_.kind == ConfigKind::general) {
            out.push_back(ParamDim::make_categorical(p + "orientation", kOrientationCount));
            out.push_back(ParamDim::make_categorical(p + "direction", kDirectionCount));
            out.push_back(ParamDim::make_continuous(p + "length", space_.link_length));
        } else {
            out.push_back(ParamDim::make_categorical(p + "connection", kConnectionCount));
        }
    }
    return out;
}

std::vector<std::string> GenotypeCodec::field_names() const {
    std::vector<std::string> names;
    for (const auto& d : param_space()) names.push_back(d.name);
    return names;
}

ParamVector GenotypeCodec::encode(const Genotype& g) const {
    check_structure(space_, g);
    ParamVector x{g.base_offset.x(), g.base_offset.y(), g.base_offset.z()};
    if (space_.kind == ConfigKind::general) {
        for (const auto& gene : g.joints) {
            x.push_back(gene.orientation);
            x.push_back(gene.direction);
            x.push_back(gene.length);
        }
    } else {
        for (int c : g.connections) x.push_back(c);
    }
    return x;
}

Genotype GenotypeCodec::decode(const ParamVector& x) const {
    const std::size_t per_joint = space_.kind == ConfigKind::general ? 3 : 1;
    if (x.size() != 3 + per_joint * static_cast<std::size_t>(space_.n_joint))
        throw MalformedGenotype("parameter vector length does not match the search space");
    auto index = [](double v) { return static_cast<int>(std::lround(v)); };
    Genotype g;
    g.base_offset = Vec3(x[0], x[1], x[2]);
    for (int j = 0; j < space_.n_joint; ++j) {
        const std::size_t o = 3 + per_joint * static_cast<std::size_t>(j);
        if (space_.kind == ConfigKind::general)
            g.joints.push_back({index(x[o]), index(x[o + 1]), x[o + 2]});
        else
            g.connections.push_back(index(x[o]));
    }
    check_structure(space_, g);
    return g;
}

std::uint64_t trial_seed(std::uint64_t seed, int id) {
    return derive_seed(seed, {0x747269616cULL, static_cast<std::uint64_t>(id)});
}

Study::Study(SearchSpace space, SamplerSettings settings)
    : codec_(std::move(space)), sampler_(codec_.param_space(), settings), seed_(settings.seed) {}

PendingTrial Study::ask() { return std::move(ask_batch(1).front()); }

std::vector<PendingTrial> Study::ask_batch(int k) {
    const auto valid = [this](const ParamVector& x) {
        return validate_genotype(codec_.space(), codec_.decode(x)).feasible();
    };
    std::vector<PendingTrial> out;
    for (auto& x : sampler_.ask_batch(k, valid)) {
        const int id = next_id_++;
        out.push_back({id, trial_seed(seed_, id), codec_.decode(x)});
    }
    return out;
}

const Trial& Study::tell(const PendingTrial& pending, const ObjectiveVector& objectives) {
    if (pending.id != static_cast<int>(trials_.size()) || pending.id >= next_id_)
        throw ContractViolation("tell: trial " + std::to_string(pending.id) + " is not the next pending trial");
    return record(pending.id, pending.seed, pending.params, objectives);
}

const Trial& Study::tell(const Genotype& params, const ObjectiveVector& objectives) {
    if (pending() != 0) throw ContractViolation("tell: asked trials are still pending");
    const int id = next_id_++;
    return record(id, trial_seed(seed_, id), params, objectives);
}

const Trial& Study::record(int id, std::uint64_t seed, const Genotype& params, const ObjectiveVector& objectives) {
    sampler_.tell(codec_.encode(params), objectives);
    trials_.push_back({id, seed, params, objectives, 0});

    std::vector<ObjectiveVector> points;
    points.reserve(trials_.size());
    for (const auto& t : trials_) points.push_back({t.objectives.e_x, t.objectives.e_tau, t.objectives.feasible, {}});
    const auto ranks = constrained_ranks(points);
    for (std::size_t i = 0; i < trials_.size(); ++i) trials_[i].rank = ranks[i];

    archive_.insert(id, objectives);
    if (static_cast<int>(trials_.size()) >= sampler_.settings().n_startup) freeze_reference();
    hv_history_.push_back(archive_.hypervolume());
    return trials_.back();
}

void Study::freeze_reference() {
    if (archive_.reference) return;
    const int window = std::min<int>(static_cast<int>(trials_.size()), std::max(sampler_.settings().n_startup, 0));
    std::optional<ObjectiveVector> ref;
    auto widen = [&](const ObjectiveVector& o) {
        if (!ref) ref = ObjectiveVector{o.e_x, o.e_tau, true, {}};
        ref->e_x = std::max(ref->e_x, o.e_x);
        ref->e_tau = std::max(ref->e_tau, o.e_tau);
    };
    for (int i = 0; i < window; ++i)
        if (trials_[static_cast<std::size_t>(i)].objectives.feasible) widen(trials_[static_cast<std::size_t>(i)].objectives);
    if (!ref)
        for (const auto& t : trials_)
            if (t.objectives.feasible) {
                widen(t.objectives);
                break;
            }
    if (!ref) return;
    ref->e_x = std::max(1.1 * ref->e_x, 1e-9);
    ref->e_tau = std::max(1.1 * ref->e_tau, 1e-9);
    archive_.reference = ref;
}

std::vector<Trial> Study::pareto_front() const {
    std::vector<Trial> out;
    for (const auto& entry : archive_.sorted()) out.push_back(trials_[static_cast<std::size_t>(entry.id)]);
    return out;
}

}  // namespace armsynth
