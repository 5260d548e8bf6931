#pragma once

#include <vector>

namespace armsynth {

struct TargetDiagnostics {
    double position_error{0.0};
    double torque_norm{0.0};
    bool converged{false};
};

/// The bi-objective value of one design: summed position error (m) and summed
/// joint-torque norm (N m) over all targets.
struct ObjectiveVector {
    double e_x{0.0};
    double e_tau{0.0};
    bool feasible{true};
    std::vector<TargetDiagnostics> per_target;
};

}  // namespace armsynth
