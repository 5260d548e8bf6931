#pragma once

#include "armsynth/types.hpp"

#include <string>
#include <vector>

namespace armsynth {

struct ObjectivePoint {
    int id{0};
    double e_x{0.0};
    double e_tau{0.0};
};

struct ScatterData {
    std::string title;
    std::vector<ObjectivePoint> trials;  // feasible trials
    std::vector<ObjectivePoint> front;   // sorted by e_x
    int infeasible{0};
};

/// (E_x, E_tau) scatter with auto-fit linear axes. Front members are drawn
/// in their own layer (`<g id="front">`) and joined by a staircase.
std::string scatter_svg(const ScatterData& data);

/// One front design: a polyline (base, joint origins, tip) per target pose.
struct Skeleton {
    std::string label;
    std::vector<std::vector<Vec3>> chains;
};

/// Panels of front designs, each drawn as a top view (x-y) and a side view
/// (x-z) with the targets marked.
std::string skeleton_svg(const std::string& title, const std::vector<Skeleton>& designs,
                         const std::vector<Vec3>& targets);

}  // namespace armsynth
