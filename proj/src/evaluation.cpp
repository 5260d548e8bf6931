#include "armsynth/evaluation.hpp"

#include "armsynth/rng.hpp"

#include "json.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

namespace armsynth {

namespace {

using nlohmann::json;

Vec3 read_vec3(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) throw ParseError(field, "expected [x, y, z]");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[static_cast<std::size_t>(i)].is_number()) throw ParseError(field, "expected numbers");
        out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    if (!out.allFinite()) throw ParseError(field, "non-finite coordinate");
    return out;
}

Interval read_interval(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ParseError(field, "expected [lo, hi]");
    Interval i{v[0].get<double>(), v[1].get<double>()};
    if (!(i.lo <= i.hi)) throw ParseError(field, "lo must not exceed hi");
    return i;
}

}  // namespace

BaseRange default_base_range(ConfigKind kind, const std::string& preset) {
    BaseRange r;  // [-1, 1] on every axis
    if (kind == ConfigKind::actuator_module) {
        r.x = {-1.0, 0.0};
        r.z = {-1.0, 0.0};
        return r;
    }
    if (preset == "target1") r.z = {-0.1, 0.1};
    else if (preset == "target2") r.x = {-1.0, 0.0};
    else if (preset == "target3") r.z = {-1.0, 0.0};
    return r;
}

TargetSet load_targets(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("target set is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("", "target set must be a JSON object");
    TargetSet set;
    set.label = doc.value("label", "");
    if (doc.contains("config_kind")) {
        if (!doc["config_kind"].is_string()) throw ParseError("config_kind", "expected a string");
        set.kind = config_kind_from_string(doc["config_kind"].get<std::string>());
    }
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string()) throw ParseError("preset", "expected a string");
        set.preset = doc["preset"].get<std::string>();
    }
    if (!doc.contains("targets") || !doc["targets"].is_array()) throw ParseError("targets", "missing array");
    const auto& targets = doc["targets"];
    if (targets.empty()) throw ParseError("targets", "at least one target is required");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::string field = "targets[" + std::to_string(i) + "]";
        const auto& t = targets[i];
        if (!t.is_object() || !t.contains("position")) throw ParseError(field + ".position", "missing");
        Pose pose;
        pose.position = read_vec3(t["position"], field + ".position");
        if (t.contains("orientation") && !t["orientation"].is_null()) {
            const auto& q = t["orientation"];
            if (!q.is_array() || q.size() != 4) throw ParseError(field + ".orientation", "expected [w, x, y, z]");
            Eigen::Quaterniond quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
            const double n = quat.norm();
            if (!(std::abs(n - 1.0) < 1e-6)) throw ParseError(field + ".orientation", "quaternion must be unit length");
            quat.normalize();
            pose.orientation = quat.toRotationMatrix();
        }
        set.targets.push_back(std::move(pose));
    }
    set.base_range = default_base_range(set.kind, set.preset);
    if (doc.contains("base_range")) {
        const auto& br = doc["base_range"];
        if (!br.is_object()) throw ParseError("base_range", "expected an object with x/y/z intervals");
        static const char* kAxes[3] = {"x", "y", "z"};
        for (int a = 0; a < 3; ++a)
            if (br.contains(kAxes[a]))
                set.base_range[a] = read_interval(br[kAxes[a]], std::string("base_range.") + kAxes[a]);
    }
    if (doc.contains("payload")) {
        if (!doc["payload"].is_number()) throw ParseError("payload", "expected a number");
        set.payload = doc["payload"].get<double>();
        if (!(set.payload >= 0.0)) throw ParseError("payload", "must be >= 0");
    }
    return set;
}

TargetSet load_targets_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open target file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_targets(ss.str());
}

std::uint64_t target_seed(std::uint64_t seed, const Pose& target) {
    std::uint64_t s = derive_seed(seed, {std::bit_cast<std::uint64_t>(target.position.x()),
                                         std::bit_cast<std::uint64_t>(target.position.y()),
                                         std::bit_cast<std::uint64_t>(target.position.z())});
    if (target.orientation)
        for (int i = 0; i < 9; ++i) s = mix64(s ^ std::bit_cast<std::uint64_t>((*target.orientation)(i / 3, i % 3)));
    return s;
}

ObjectiveVector evaluate(const KinematicModel& model, const TargetSet& targets, const IkOptions& ik,
                         std::uint64_t seed, std::vector<IkResult>* solutions) {
    ObjectiveVector out;
    out.feasible = true;
    out.per_target.reserve(targets.size());
    if (solutions) solutions->clear();
    for (const auto& target : targets.targets) {
        IkOptions opts = ik;
        opts.seed = target_seed(seed, target);
        IkResult r = solve_ik(model, target, opts, targets.payload);
        TargetDiagnostics d{r.position_error, r.torque.norm(), r.converged};
        out.e_x += d.position_error;
        out.e_tau += d.torque_norm;
        out.per_target.push_back(d);
        if (solutions) solutions->push_back(std::move(r));
    }
    return out;
}

ObjectiveVector evaluate(const KinematicModel& model, const TargetSet& targets, const IkOptions& ik,
                         std::uint64_t seed) {
    return evaluate(model, targets, ik, seed, nullptr);
}

ObjectiveVector penalize(const TargetSet& targets, const ValidationReport& report) {
    if (report.feasible()) throw ContractViolation("penalize: report is feasible");
    ObjectiveVector out;
    out.feasible = false;
    for (const auto& t : targets.targets) out.e_x += t.position.norm();
    out.e_x += kPenalty;
    out.e_tau = kPenalty;
    return out;
}

}  // namespace armsynth
