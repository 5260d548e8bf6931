#include "armsynth/kinematics.hpp"

#include "armsynth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace armsynth {

namespace {

// R = I + sin K + (1 - cos) K^2 with K^2 = a a^T - I. Written out so that an
// exact unit axis keeps its own column exact.
Mat3 axis_rotation(const Vec3& a, double angle) {
    const double s = std::sin(angle);
    const double v = 1.0 - std::cos(angle);
    Mat3 k;
    k << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
    const Mat3 k2 = a * a.transpose() - Mat3::Identity();
    return Mat3::Identity() + s * k + v * k2;
}

Mat3 polar_projection(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 u = svd.matrixU();
        u.col(2) *= -1.0;
        r = u * svd.matrixV().transpose();
    }
    return r;
}

void check_length(const KinematicModel& model, const VecX& theta) {
    if (theta.size() != model.dof())
        throw ContractViolation("joint vector has " + std::to_string(theta.size()) + " entries, model has " +
                                std::to_string(model.dof()) + " joints");
}

void fk_into(const KinematicModel& model, const VecX& theta, ChainPose& out) {
    const auto n = model.joints.size();
    out.joints.resize(n);
    out.link_coms.resize(n);
    Mat3 r = Mat3::Identity();
    Vec3 p = model.base_offset;
    int compositions = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& j = model.joints[i];
        p = p + r * j.translation;
        const Mat3 mount = r * j.rotation;
        r = mount * axis_rotation(j.axis, theta[static_cast<Eigen::Index>(i)]);
        if (++compositions % kReorthonormalizeEvery == 0) r = polar_projection(r);
        auto& f = out.joints[i];
        f.rotation = r;
        f.origin = p;
        f.axis = mount * j.axis;
        out.link_coms[i] = p + r * model.links[i].com;
    }
    if (n > 0) {
        out.tip.position = p + r * model.links.back().end();
        out.tip.orientation = r;
    } else {
        out.tip.position = p;
        out.tip.orientation = r;
    }
}

void torque_into(const KinematicModel& model, const ChainPose& pose, double payload, VecX& tau) {
    const auto n = static_cast<Eigen::Index>(model.joints.size());
    tau.resize(n);
    const Vec3 g = gravity_vector();
    // Accumulate first mass moments tip-to-root: sum m_k c_k and sum m_k.
    Vec3 moment = payload * pose.tip.position;
    double mass = payload;
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        const auto ju = static_cast<std::size_t>(j);
        const double m = model.links[ju].mass;
        moment += m * pose.link_coms[ju];
        mass += m;
        const Vec3 r = moment - mass * pose.joints[ju].origin;
        tau[j] = pose.joints[ju].axis.dot(r.cross(g));
    }
}

}  // namespace

ChainPose forward_kinematics(const KinematicModel& model, const VecX& theta) {
    check_length(model, theta);
    ChainPose out;
    fk_into(model, theta, out);
    return out;
}

MatX jacobian(const ChainPose& pose, const Vec3& point) {
    const auto n = static_cast<Eigen::Index>(pose.joints.size());
    MatX j(6, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto& f = pose.joints[static_cast<std::size_t>(c)];
        j.block<3, 1>(0, c) = f.axis.cross(point - f.origin);
        j.block<3, 1>(3, c) = f.axis;
    }
    return j;
}

MatX jacobian(const KinematicModel& model, const VecX& theta, const Vec3& point) {
    return jacobian(forward_kinematics(model, theta), point);
}

VecX gravity_torque(const KinematicModel& model, const ChainPose& pose, double payload) {
    if (payload < 0.0) throw ContractViolation("payload must be >= 0");
    VecX tau;
    torque_into(model, pose, payload, tau);
    return tau;
}

VecX gravity_torque(const KinematicModel& model, const VecX& theta, double payload) {
    return gravity_torque(model, forward_kinematics(model, theta), payload);
}

Vec3 rotation_log(const Mat3& r) {
    const double cos_angle = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const double angle = std::acos(cos_angle);
    const Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    if (angle < 1e-6) return 0.5 * w;  // first order near identity
    if (std::abs(M_PI - angle) < 1e-6) {
        // Near a half turn: axis from the symmetric part.
        const Mat3 b = 0.5 * (r + Mat3::Identity());
        Eigen::Index k;
        b.diagonal().maxCoeff(&k);
        Vec3 axis = b.col(k) / std::sqrt(std::max(b(k, k), 1e-300));
        axis.normalize();
        if (axis.dot(w) < 0.0) axis = -axis;
        return angle * axis;
    }
    return (angle / (2.0 * std::sin(angle))) * w;
}

double orientation_error(const Mat3& achieved, const Mat3& target) {
    const Mat3 d = achieved.transpose() * target;
    return std::acos(std::clamp(0.5 * (d.trace() - 1.0), -1.0, 1.0));
}

namespace {

struct Attempt {
    VecX theta;
    double cost{std::numeric_limits<double>::infinity()};
    int iterations{0};
};

class DlsSolver {
public:
    DlsSolver(const KinematicModel& model, const Pose& target, const IkOptions& opts)
        : model_(model), target_(target), opts_(opts), n_(model.dof()), rows_(target.orientation ? 6 : 3) {
        jac_.resize(rows_, n_);
        err_.resize(rows_);
        weights_ = VecX::Ones(rows_);
        if (rows_ == 6) weights_.tail<3>().setConstant(opts.rot_weight);
        lower_.resize(n_);
        upper_.resize(n_);
        for (Eigen::Index i = 0; i < n_; ++i) {
            lower_[i] = model.joints[static_cast<std::size_t>(i)].lower;
            upper_[i] = model.joints[static_cast<std::size_t>(i)].upper;
        }
    }

    VecX clamp(VecX theta) const { return theta.cwiseMax(lower_).cwiseMin(upper_); }
    const VecX& lower() const { return lower_; }
    const VecX& upper() const { return upper_; }

    // Weighted squared residual at theta; fills pose_.
    double cost(const VecX& theta, double& pos_err, double& rot_err) {
        fk_into(model_, theta, pose_);
        const Vec3 dp = target_.position - pose_.tip.position;
        pos_err = dp.norm();
        double c = pos_err * pos_err;
        rot_err = 0.0;
        if (target_.orientation) {
            rot_err = orientation_error(*pose_.tip.orientation, *target_.orientation);
            c += opts_.rot_weight * rot_err * rot_err;
        }
        return c;
    }

    Attempt run(VecX theta) {
        Attempt a;
        double pos_err = 0.0, rot_err = 0.0;
        const double pos_goal = 1e-3 * opts_.tol;
        const double rot_goal = 1e-3 * opts_.rot_tol;
        int it = 0;
        for (; it < opts_.max_iter; ++it) {
            fk_into(model_, theta, pose_);
            Vec3 dp = target_.position - pose_.tip.position;
            pos_err = dp.norm();
            rot_err = 0.0;
            Vec3 dr = Vec3::Zero();
            if (target_.orientation) {
                dr = rotation_log(*target_.orientation * pose_.tip.orientation->transpose());
                rot_err = dr.norm();
            }
            if (!std::isfinite(pos_err) || !std::isfinite(rot_err)) break;
            if (pos_err < pos_goal && (!target_.orientation || rot_err < rot_goal)) break;
            if (pos_err > opts_.error_clamp) dp *= opts_.error_clamp / pos_err;
            err_.head<3>() = dp;
            if (rows_ == 6) err_.tail<3>() = dr;

            for (Eigen::Index c = 0; c < n_; ++c) {
                const auto& f = pose_.joints[static_cast<std::size_t>(c)];
                jac_.block<3, 1>(0, c) = f.axis.cross(pose_.tip.position - f.origin);
                if (rows_ == 6) jac_.block<3, 1>(3, c) = f.axis;
            }
            const VecX we = weights_.cwiseProduct(err_);
            const double damping = err_.dot(we) + opts_.damping_bias;
            hess_.noalias() = jac_.transpose() * weights_.asDiagonal() * jac_;
            hess_.diagonal().array() += damping;
            grad_.noalias() = jac_.transpose() * we;
            // Joints resting on a limit that the step would push further out
            // are held fixed and the step is solved again for the rest, so a
            // pinned joint does not stall the others.
            VecX step;
            bool ok = true;
            for (Eigen::Index pass = 0; pass <= n_; ++pass) {
                ldlt_.compute(hess_);
                if (ldlt_.info() != Eigen::Success) {
                    ok = false;
                    break;
                }
                step = ldlt_.solve(grad_);
                bool pinned = false;
                for (Eigen::Index i = 0; i < n_; ++i) {
                    const bool at_lower = theta[i] <= lower_[i] && step[i] < 0.0;
                    const bool at_upper = theta[i] >= upper_[i] && step[i] > 0.0;
                    if (!(at_lower || at_upper)) continue;
                    hess_.row(i).setZero();
                    hess_.col(i).setZero();
                    hess_(i, i) = 1.0;
                    grad_[i] = 0.0;
                    pinned = true;
                }
                if (!pinned) break;
            }
            if (!ok || !step.allFinite()) break;
            const VecX next = clamp(theta + step);
            const double moved = (next - theta).cwiseAbs().maxCoeff();
            theta = next;
            if (moved < 1e-12) {
                ++it;
                break;
            }
        }
        a.cost = cost(theta, pos_err, rot_err);
        if (!std::isfinite(a.cost)) a.cost = std::numeric_limits<double>::infinity();
        a.theta = std::move(theta);
        a.iterations = it;
        return a;
    }

private:
    const KinematicModel& model_;
    const Pose& target_;
    const IkOptions& opts_;
    Eigen::Index n_;
    Eigen::Index rows_;
    ChainPose pose_;
    MatX jac_;
    VecX err_, weights_, lower_, upper_, grad_;
    MatX hess_;
    Eigen::LDLT<MatX> ldlt_;
};

}  // namespace

IkResult solve_ik(const KinematicModel& model, const Pose& target, const IkOptions& opts, double payload) {
    if (!target.position.allFinite()) throw ContractViolation("solve_ik: target position must be finite");
    if (model.dof() == 0) throw ContractViolation("solve_ik: model has no joints");
    DlsSolver solver(model, target, opts);
    Rng rng(opts.seed);
    const int starts = std::max(1, opts.restarts);
    Attempt best;
    best.theta = solver.clamp(VecX::Zero(model.dof()));
    auto converged = [&](const VecX& theta) {
        const ChainPose p = forward_kinematics(model, theta);
        if ((target.position - p.tip.position).norm() >= opts.tol) return false;
        return !target.orientation || orientation_error(*p.tip.orientation, *target.orientation) < opts.rot_tol;
    };
    for (int s = 0; s < starts; ++s) {
        VecX init = VecX::Zero(model.dof());
        if (s > 0)
            for (Eigen::Index i = 0; i < init.size(); ++i) init[i] = uniform(rng, solver.lower()[i], solver.upper()[i]);
        Attempt a = solver.run(solver.clamp(init));
        if (a.cost < best.cost) best = std::move(a);
        if (converged(best.theta)) break;
    }

    IkResult result;
    const ChainPose pose = forward_kinematics(model, best.theta);
    result.angles = best.theta;
    result.achieved = pose.tip;
    result.position_error = (pose.tip.position - target.position).norm();
    if (target.orientation) result.orientation_error = orientation_error(*pose.tip.orientation, *target.orientation);
    torque_into(model, pose, payload, result.torque);
    result.converged = result.position_error < opts.tol &&
                       (!result.orientation_error || *result.orientation_error < opts.rot_tol);
    result.iterations = best.iterations;
    return result;
}

}  // namespace armsynth
