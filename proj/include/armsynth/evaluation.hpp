#pragma once

#include "armsynth/design_space.hpp"
#include "armsynth/kinematics.hpp"
#include "armsynth/objectives.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace armsynth {

struct TargetSet {
    std::string label;
    ConfigKind kind{ConfigKind::general};
    std::string preset;  // e.g. "target3"; selects the default base range
    std::vector<Pose> targets;
    BaseRange base_range{};
    double payload{0.0};  // kg at the tip

    std::size_t size() const { return targets.size(); }
};

/// Base-offset bounds used when a target document does not override them.
BaseRange default_base_range(ConfigKind kind, const std::string& preset);

/// Parses a target-set document (JSON):
///
///     { "label": "...", "config_kind": "general", "preset": "target3",
///       "targets": [ {"position": [x, y, z], "orientation": [w, x, y, z]} ],
///       "base_range": {"z": [-1.0, 0.0]}, "payload": 0.0 }
///
/// `orientation` (unit quaternion), `preset`, `base_range` and `payload` are
/// optional. Throws ParseError naming the offending field.
TargetSet load_targets(const std::string& document);
TargetSet load_targets_file(const std::filesystem::path& path);

/// Penalty magnitude for designs that violate the non-overlap constraint.
inline constexpr double kPenalty = 1e3;

/// Runs IK for every target and sums position errors and torque norms.
/// Restart seeds derive from `seed` and each target's coordinates, so the
/// result does not depend on target order.
ObjectiveVector evaluate(const KinematicModel& model, const TargetSet& targets, const IkOptions& ik,
                         std::uint64_t seed);

/// Same as evaluate, also returning the per-target IK solutions.
ObjectiveVector evaluate(const KinematicModel& model, const TargetSet& targets, const IkOptions& ik,
                         std::uint64_t seed, std::vector<IkResult>* solutions);

/// Finite objective for an infeasible design: sum of target norms + C_pen for
/// e_x and C_pen for e_tau. Throws ContractViolation for a feasible report.
ObjectiveVector penalize(const TargetSet& targets, const ValidationReport& report);

/// Seed used for the IK restarts of one target.
std::uint64_t target_seed(std::uint64_t seed, const Pose& target);

}  // namespace armsynth
