#pragma once

// Independent reference implementations used only by the tests.

#include "armsynth/design_space.hpp"
#include "armsynth/kinematics.hpp"
#include "armsynth/objectives.hpp"
#include "armsynth/rng.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

namespace oracle {

using armsynth::Mat3;
using armsynth::Vec3;
using armsynth::VecX;

/// Homogeneous-transform chain: T = Trans(a) * prod_i [Trans(t_i) Rot(R_i) AngleAxis(theta_i, axis_i)].
struct NaiveFrames {
    std::vector<Eigen::Isometry3d> joints;
    Vec3 tip;
};

inline NaiveFrames naive_fk(const armsynth::KinematicModel& m, const VecX& theta) {
    NaiveFrames out;
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.translate(m.base_offset);
    for (int i = 0; i < m.dof(); ++i) {
        const auto& j = m.joints[static_cast<std::size_t>(i)];
        Eigen::Isometry3d step = Eigen::Isometry3d::Identity();
        step.translate(j.translation);
        step.rotate(j.rotation);
        step.rotate(Eigen::AngleAxisd(theta[i], j.axis.normalized()));
        t = t * step;
        out.joints.push_back(t);
    }
    out.tip = m.dof() > 0 ? Vec3(t * m.links.back().end()) : Vec3(t.translation());
    return out;
}

/// Potential energy sum m_k g z_k of the links (plus a tip payload).
inline double potential_energy(const armsynth::KinematicModel& m, const VecX& theta, double payload = 0.0) {
    const auto f = naive_fk(m, theta);
    double u = 0.0;
    for (int i = 0; i < m.dof(); ++i) {
        const auto& link = m.links[static_cast<std::size_t>(i)];
        const Vec3 c = f.joints[static_cast<std::size_t>(i)] * link.com;
        u += link.mass * armsynth::kGravity * c.z();
    }
    u += payload * armsynth::kGravity * f.tip.z();
    return u;
}

inline bool dominates(const armsynth::ObjectiveVector& u, const armsynth::ObjectiveVector& v) {
    return u.e_x <= v.e_x && u.e_tau <= v.e_tau && (u.e_x < v.e_x || u.e_tau < v.e_tau);
}

/// Repeatedly peel off the points no remaining point dominates.
inline std::vector<int> peel_ranks(const std::vector<armsynth::ObjectiveVector>& pts) {
    const std::size_t n = pts.size();
    std::vector<int> rank(n, -1);
    std::size_t assigned = 0;
    for (int r = 0; assigned < n; ++r) {
        std::vector<std::size_t> layer;
        for (std::size_t i = 0; i < n; ++i) {
            if (rank[i] >= 0) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j)
                if (j != i && rank[j] < 0 && oracle::dominates(pts[j], pts[i])) dominated = true;
            if (!dominated) layer.push_back(i);
        }
        for (auto i : layer) rank[i] = r;
        assigned += layer.size();
    }
    return rank;
}

/// Monte-Carlo estimate of the dominated area inside [lo, ref]. Returns the
/// estimate and its standard error.
inline std::pair<double, double> mc_hypervolume(const std::vector<armsynth::ObjectiveVector>& front,
                                                const armsynth::ObjectiveVector& lo,
                                                const armsynth::ObjectiveVector& ref, long samples,
                                                armsynth::Rng& rng) {
    const double area = (ref.e_x - lo.e_x) * (ref.e_tau - lo.e_tau);
    long hits = 0;
    for (long s = 0; s < samples; ++s) {
        const double x = armsynth::uniform(rng, lo.e_x, ref.e_x);
        const double y = armsynth::uniform(rng, lo.e_tau, ref.e_tau);
        for (const auto& p : front)
            if (p.e_x <= x && p.e_tau <= y) {
                ++hits;
                break;
            }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {area * p, area * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

/// Axis-aligned or rotated box given by center, rotation (columns = box axes)
/// and half extents.
struct Box {
    Vec3 center;
    Mat3 rotation;
    Vec3 half;

    bool contains(const Vec3& p, double shrink) const {
        const Vec3 local = rotation.transpose() * (p - center);
        for (int k = 0; k < 3; ++k)
            if (std::abs(local[k]) >= half[k] - shrink) return false;
        return true;
    }
};

/// Untrimmed link boxes at the zero pose, built from the naive chain.
inline std::vector<Box> zero_pose_boxes(const armsynth::KinematicModel& m) {
    const auto f = naive_fk(m, VecX::Zero(m.dof()));
    std::vector<Box> boxes;
    for (int i = 0; i < m.dof(); ++i) {
        const auto& link = m.links[static_cast<std::size_t>(i)];
        const auto& t = f.joints[static_cast<std::size_t>(i)];
        boxes.push_back({t * link.com, t.rotation(), 0.5 * link.box});
    }
    return boxes;
}

/// Point-sampling overlap test: draws `samples` points in box i and counts
/// those strictly inside box j shrunk by `shrink`. For adjacent links the
/// cube of side `joint_cube` around their shared joint is excluded from
/// both boxes.
inline long sampled_overlap(const armsynth::KinematicModel& m, const std::vector<Box>& boxes, int i, int j,
                            double joint_cube, double shrink, long samples, armsynth::Rng& rng) {
    const Box& a = boxes[static_cast<std::size_t>(i)];
    const Box& b = boxes[static_cast<std::size_t>(j)];
    if ((a.center - b.center).norm() > a.half.norm() + b.half.norm()) return 0;
    const bool adjacent = (j == i + 1);
    Vec3 shared = Vec3::Zero();
    Mat3 cube_rot = Mat3::Identity();
    if (adjacent) {
        const auto f = naive_fk(m, VecX::Zero(m.dof()));
        shared = f.joints[static_cast<std::size_t>(j)].translation();
        cube_rot = f.joints[static_cast<std::size_t>(i)].rotation();
    }
    const Box cube{shared, cube_rot, Vec3::Constant(0.5 * joint_cube)};
    long hits = 0;
    for (long s = 0; s < samples; ++s) {
        Vec3 local;
        for (int k = 0; k < 3; ++k) local[k] = armsynth::uniform(rng, -a.half[k], a.half[k]);
        const Vec3 p = a.center + a.rotation * local;
        if (adjacent && cube.contains(p, -1e-12)) continue;
        if (b.contains(p, shrink)) ++hits;
    }
    return hits;
}

// Mounts are relative to the previous joint frame: the first joint turns its
// axis from +y to +z, every later one keeps +y, so all axes stay vertical.
inline void make_all_yaw(armsynth::Genotype& g, armsynth::Rng& rng) {
    std::vector<int> vertical, keep;
    for (int i = 0; i < armsynth::kOrientationCount; ++i) {
        const Vec3 y = armsynth::orientation_table()[static_cast<std::size_t>(i)] * Vec3::UnitY();
        if (y == Vec3::UnitZ()) vertical.push_back(i);
        if (y == Vec3::UnitY()) keep.push_back(i);
    }
    for (std::size_t j = 0; j < g.joints.size(); ++j) {
        const auto& pool = j == 0 ? vertical : keep;
        g.joints[j].orientation = pool[static_cast<std::size_t>(armsynth::uniform_index(rng, static_cast<int>(pool.size())))];
    }
}

inline std::filesystem::path data_dir() { return std::filesystem::path(ARMSYNTH_DATA_DIR); }

}  // namespace oracle
