#pragma once

#include "armsynth/design_space.hpp"
#include "armsynth/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace armsynth {

/// World frame of one joint after its own rotation has been applied.
struct JointFrame {
    Mat3 rotation{Mat3::Identity()};
    Vec3 origin{Vec3::Zero()};
    Vec3 axis{Vec3::UnitY()};  // world
};

struct ChainPose {
    std::vector<JointFrame> joints;
    std::vector<Vec3> link_coms;  // world
    Pose tip;                     // end of the last link; orientation = last joint frame
};

/// Compositions between polar re-orthonormalizations of the running rotation.
inline constexpr int kReorthonormalizeEvery = 100;

/// Root-to-tip composition. Throws ContractViolation if theta has the wrong
/// length.
ChainPose forward_kinematics(const KinematicModel& model, const VecX& theta);

/// 6 x n geometric Jacobian about `point`: linear rows then angular rows.
MatX jacobian(const KinematicModel& model, const VecX& theta, const Vec3& point);
MatX jacobian(const ChainPose& pose, const Vec3& point);

/// Gravity-static joint torques: the moment of link weights (plus an optional
/// point payload at the tip) about each joint axis. Equals -dU/dtheta.
VecX gravity_torque(const KinematicModel& model, const VecX& theta, double payload = 0.0);
VecX gravity_torque(const KinematicModel& model, const ChainPose& pose, double payload = 0.0);

/// Rotation vector (axis * angle) of a rotation matrix.
Vec3 rotation_log(const Mat3& r);

/// Angle of achieved^T * target, radians.
double orientation_error(const Mat3& achieved, const Mat3& target);

struct IkOptions {
    double tol{1e-4};           // m
    double rot_tol{1e-2};       // rad
    int max_iter{200};
    int restarts{10};
    double damping_bias{1e-3};  // added to the squared weighted error
    double error_clamp{0.1};    // m, per step
    double rot_weight{0.5};     // weight of orientation rows relative to meters
    std::uint64_t seed{0};
};

struct IkResult {
    VecX angles;
    Pose achieved;
    double position_error{0.0};
    std::optional<double> orientation_error;
    VecX torque;
    bool converged{false};
    int iterations{0};
};

/// Damped least squares with error-proportional damping, joint clamping and
/// multi-start. The first start is the zero pose; later starts are uniform
/// within the joint limits, drawn from `opts.seed`. Never throws for
/// numerical trouble; reports a non-converged result instead.
IkResult solve_ik(const KinematicModel& model, const Pose& target, const IkOptions& opts, double payload = 0.0);

}  // namespace armsynth
