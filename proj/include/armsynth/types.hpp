#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace armsynth {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A genotype whose indices or shape do not fit its search space.
class MalformedGenotype : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input document failed schema validation. `field()` names the offending
/// key path (for example `targets[2].position`).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct Interval {
    double lo{0.0};
    double hi{0.0};

    double width() const noexcept { return hi - lo; }
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Per-axis box for the base offset a = (a_x, a_y, a_z).
struct BaseRange {
    Interval x{-1.0, 1.0};
    Interval y{-1.0, 1.0};
    Interval z{-1.0, 1.0};

    const Interval& operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
    Interval& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
    friend bool operator==(const BaseRange&, const BaseRange&) = default;
};

/// Position with an optional orientation. Position-only targets leave
/// `orientation` empty.
struct Pose {
    Vec3 position{Vec3::Zero()};
    std::optional<Mat3> orientation;
};

inline constexpr double kGravity = 9.81;

inline Vec3 gravity_vector() { return Vec3(0.0, 0.0, -kGravity); }

}  // namespace armsynth
