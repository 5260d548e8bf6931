#pragma once

#include "armsynth/design_space.hpp"

#include <filesystem>
#include <string>

namespace armsynth {

/// Serializes a model as URDF: a fixed `root_joint` from the implicit
/// `world` link to `base_link` at the base offset, then one revolute joint
/// and one box link per module. 2-space indentation, 17 significant digits,
/// fixed element order.
std::string export_urdf(const KinematicModel& model, const std::string& name);

/// Rebuilds a model from a document produced by export_urdf (or any single
/// serial chain with axis-aligned box links). Throws ParseError naming the
/// offending element/attribute.
KinematicModel parse_urdf(const std::string& text);
KinematicModel load_urdf(const std::filesystem::path& path);

/// URDF fixed-axis roll/pitch/yaw, R = Rz(yaw) Ry(pitch) Rx(roll).
Vec3 rpy_from_matrix(const Mat3& r);

/// Inverse of rpy_from_matrix. Angles within 1e-12 rad of a multiple of
/// 90 deg use exact sines and cosines so quarter-turn mountings round-trip
/// bit-exactly.
Mat3 matrix_from_rpy(const Vec3& rpy);

}  // namespace armsynth
