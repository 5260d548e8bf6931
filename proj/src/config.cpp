#include "armsynth/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace armsynth {

namespace {

using nlohmann::json;

json parse_document(const std::string& text, const std::string& what) {
    try {
        json doc = json::parse(text);
        if (!doc.is_object()) throw ParseError("", what + " must be a JSON object");
        return doc;
    } catch (const json::parse_error& e) {
        throw ParseError("", what + " is not valid JSON: " + e.what());
    }
}

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ParseError(prefix + it.key(), "unknown key");
}

double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ParseError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(field, "must be finite");
    return d;
}

double positive(const json& v, const std::string& field) {
    const double d = number(v, field);
    if (!(d > 0.0)) throw ParseError(field, "must be > 0");
    return d;
}

int integer(const json& v, const std::string& field, int min_value) {
    if (!v.is_number_integer()) throw ParseError(field, "expected an integer");
    const auto i = v.get<long long>();
    if (i < min_value || i > std::numeric_limits<int>::max())
        throw ParseError(field, "must be >= " + std::to_string(min_value));
    return static_cast<int>(i);
}

Interval interval(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2) throw ParseError(field, "expected [lo, hi]");
    Interval i{number(v[0], field + "[0]"), number(v[1], field + "[1]")};
    if (i.hi < i.lo) throw ParseError(field, "lo must not exceed hi");
    return i;
}

Vec3 vec3(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) throw ParseError(field, "expected [x, y, z]");
    return {number(v[0], field + "[0]"), number(v[1], field + "[1]"), number(v[2], field + "[2]")};
}

std::filesystem::path resolve(const json& v, const std::string& field, const std::filesystem::path& base_dir) {
    if (!v.is_string() || v.get<std::string>().empty()) throw ParseError(field, "expected a path");
    std::filesystem::path p(v.get<std::string>());
    return p.is_absolute() ? p : base_dir / p;
}

void read_ik(const json& v, IkOptions& ik) {
    if (!v.is_object()) throw ParseError("ik", "expected an object");
    reject_unknown(v, "ik.", {"tol", "rot_tol", "max_iter", "restarts", "damping_bias", "error_clamp", "rot_weight"});
    if (v.contains("tol")) ik.tol = positive(v["tol"], "ik.tol");
    if (v.contains("rot_tol")) ik.rot_tol = positive(v["rot_tol"], "ik.rot_tol");
    if (v.contains("max_iter")) ik.max_iter = integer(v["max_iter"], "ik.max_iter", 1);
    if (v.contains("restarts")) ik.restarts = integer(v["restarts"], "ik.restarts", 1);
    if (v.contains("damping_bias")) ik.damping_bias = positive(v["damping_bias"], "ik.damping_bias");
    if (v.contains("error_clamp")) ik.error_clamp = positive(v["error_clamp"], "ik.error_clamp");
    if (v.contains("rot_weight")) ik.rot_weight = positive(v["rot_weight"], "ik.rot_weight");
}

void read_sampler(const json& v, SamplerSettings& s, SamplerKind& kind) {
    if (!v.is_object()) throw ParseError("sampler", "expected an object");
    reject_unknown(v, "sampler.",
                   {"kind", "gamma", "n_startup", "n_candidates", "bandwidth_floor", "max_rejections"});
    if (v.contains("kind")) {
        const auto& k = v["kind"];
        if (k == "tpe") kind = SamplerKind::tpe;
        else if (k == "random") kind = SamplerKind::random;
        else throw ParseError("sampler.kind", "expected 'tpe' or 'random'");
    }
    if (v.contains("gamma")) {
        s.gamma = number(v["gamma"], "sampler.gamma");
        if (!(s.gamma > 0.0 && s.gamma < 1.0)) throw ParseError("sampler.gamma", "must be in (0, 1)");
    }
    if (v.contains("n_startup")) s.n_startup = integer(v["n_startup"], "sampler.n_startup", 0);
    if (v.contains("n_candidates")) s.n_candidates = integer(v["n_candidates"], "sampler.n_candidates", 1);
    if (v.contains("bandwidth_floor")) s.bandwidth_floor = positive(v["bandwidth_floor"], "sampler.bandwidth_floor");
    if (v.contains("max_rejections")) s.max_rejections = integer(v["max_rejections"], "sampler.max_rejections", 1);
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path, const std::string& field) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(field, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SpaceDocument parse_search_space(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_document(text, "search space");
    reject_unknown(doc, "", {"config_kind", "n_joint", "joint_limit_deg", "joint_limit_rad", "link_length_range", "link_cross_section",
                             "link_density", "module_dims", "connection_table", "base_range", "label"});
    SpaceDocument out;
    SearchSpace& s = out.space;
    if (doc.contains("config_kind")) {
        if (!doc["config_kind"].is_string()) throw ParseError("config_kind", "expected a string");
        s.kind = config_kind_from_string(doc["config_kind"].get<std::string>());
    }
    if (s.kind == ConfigKind::actuator_module) s.base = BaseRange{{-1.0, 0.0}, {-1.0, 1.0}, {-1.0, 0.0}};
    if (doc.contains("n_joint")) s.n_joint = integer(doc["n_joint"], "n_joint", 1);
    if (doc.contains("joint_limit_deg"))
        s.joint_limit = positive(doc["joint_limit_deg"], "joint_limit_deg") * 3.14159265358979323846 / 180.0;
    if (doc.contains("joint_limit_rad")) {
        if (doc.contains("joint_limit_deg")) throw ParseError("joint_limit_rad", "give the limit in degrees or radians, not both");
        s.joint_limit = positive(doc["joint_limit_rad"], "joint_limit_rad");
    }
    if (doc.contains("link_length_range")) {
        s.link_length = interval(doc["link_length_range"], "link_length_range");
        if (!(s.link_length.lo > 0.0)) throw ParseError("link_length_range", "lengths must be > 0");
    }
    if (doc.contains("link_cross_section")) s.link_cross_section = positive(doc["link_cross_section"], "link_cross_section");
    if (doc.contains("link_density")) s.link_density = positive(doc["link_density"], "link_density");
    if (doc.contains("module_dims")) {
        s.module_dims = vec3(doc["module_dims"], "module_dims");
        if (!(s.module_dims.minCoeff() > 0.0)) throw ParseError("module_dims", "must be > 0");
    }
    if (doc.contains("base_range")) {
        const auto& br = doc["base_range"];
        if (!br.is_object()) throw ParseError("base_range", "expected an object with x/y/z intervals");
        reject_unknown(br, "base_range.", {"x", "y", "z"});
        static const char* kAxes[3] = {"x", "y", "z"};
        for (int a = 0; a < 3; ++a)
            if (br.contains(kAxes[a])) s.base[a] = interval(br[kAxes[a]], std::string("base_range.") + kAxes[a]);
        out.has_base_range = true;
    }
    if (s.kind == ConfigKind::actuator_module) {
        if (!doc.contains("connection_table")) throw ParseError("connection_table", "required for the module kind");
        const auto path = resolve(doc["connection_table"], "connection_table", base_dir);
        s.connections = std::make_shared<const ConnectionTable>(load_connection_table(path));
    }
    try {
        s.check();
    } catch (const ContractViolation& e) {
        throw ParseError("", e.what());
    }
    return out;
}

SpaceDocument load_search_space(const std::filesystem::path& path) {
    return parse_search_space(read_text_file(path, "space"), path.parent_path());
}

std::string search_space_to_json(const SearchSpace& space, const std::string& table_file) {
    json doc;
    doc["config_kind"] = to_string(space.kind);
    doc["n_joint"] = space.n_joint;
    doc["joint_limit_rad"] = space.joint_limit;
    doc["link_length_range"] = {space.link_length.lo, space.link_length.hi};
    doc["link_cross_section"] = space.link_cross_section;
    doc["link_density"] = space.link_density;
    doc["module_dims"] = {space.module_dims.x(), space.module_dims.y(), space.module_dims.z()};
    doc["base_range"] = {{"x", {space.base.x.lo, space.base.x.hi}},
                         {"y", {space.base.y.lo, space.base.y.hi}},
                         {"z", {space.base.z.lo, space.base.z.hi}}};
    if (space.kind == ConfigKind::actuator_module) doc["connection_table"] = table_file;
    return doc.dump(2) + "\n";
}

std::string connection_table_to_json(const ConnectionTable& table) {
    json doc;
    doc["version"] = table.version;
    doc["rows"] = json::array();
    for (const auto& p : table.rows) {
        json rot = json::array();
        for (int r = 0; r < 3; ++r) rot.push_back({p.rotation(r, 0), p.rotation(r, 1), p.rotation(r, 2)});
        doc["rows"].push_back({{"id", p.id},
                               {"attachment", p.attachment},
                               {"meaning", p.meaning},
                               {"rotation", rot},
                               {"direction", {p.direction.x(), p.direction.y(), p.direction.z()}},
                               {"length", p.length}});
    }
    return doc.dump(2) + "\n";
}

CampaignConfig parse_campaign_config(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_document(text, "campaign config");
    reject_unknown(doc, "", {"space", "targets", "trials", "seed", "n_joint", "ik", "sampler", "batch", "jobs", "out",
                             "label"});
    CampaignConfig c;
    if (doc.contains("space")) c.space_path = resolve(doc["space"], "space", base_dir);
    if (doc.contains("targets")) c.targets_path = resolve(doc["targets"], "targets", base_dir);
    if (doc.contains("trials")) c.trials = integer(doc["trials"], "trials", 1);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ParseError("seed", "expected a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("n_joint")) {
        const auto& n = doc["n_joint"];
        if (n.is_array()) {
            if (n.empty()) throw ParseError("n_joint", "sweep list must not be empty");
            for (std::size_t i = 0; i < n.size(); ++i)
                c.n_joints.push_back(integer(n[i], "n_joint[" + std::to_string(i) + "]", 1));
        } else {
            c.n_joints.push_back(integer(n, "n_joint", 1));
        }
    }
    if (doc.contains("ik")) read_ik(doc["ik"], c.ik);
    if (doc.contains("sampler")) read_sampler(doc["sampler"], c.sampler, c.sampler_kind);
    if (doc.contains("batch")) c.batch = integer(doc["batch"], "batch", 1);
    if (doc.contains("jobs")) c.jobs = integer(doc["jobs"], "jobs", 1);
    if (doc.contains("out")) c.out = resolve(doc["out"], "out", base_dir);
    return c;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
    return parse_campaign_config(read_text_file(path, "config"), path.parent_path());
}

Genotype parse_genotype(const std::string& text) {
    const json doc = parse_document(text, "genotype");
    reject_unknown(doc, "", {"base_offset", "joints", "connections"});
    Genotype g;
    if (doc.contains("base_offset")) g.base_offset = vec3(doc["base_offset"], "base_offset");
    if (doc.contains("joints")) {
        const auto& joints = doc["joints"];
        if (!joints.is_array()) throw ParseError("joints", "expected an array");
        for (std::size_t i = 0; i < joints.size(); ++i) {
            const std::string f = "joints[" + std::to_string(i) + "]";
            const auto& j = joints[i];
            if (!j.is_object()) throw ParseError(f, "expected an object");
            for (const char* key : {"orientation", "direction", "length"})
                if (!j.contains(key)) throw ParseError(f + "." + key, "missing");
            g.joints.push_back({integer(j["orientation"], f + ".orientation", 0),
                                integer(j["direction"], f + ".direction", 0), positive(j["length"], f + ".length")});
        }
    }
    if (doc.contains("connections")) {
        const auto& conns = doc["connections"];
        if (!conns.is_array()) throw ParseError("connections", "expected an array");
        for (std::size_t i = 0; i < conns.size(); ++i)
            g.connections.push_back(integer(conns[i], "connections[" + std::to_string(i) + "]", 0));
    }
    if (g.joints.empty() == g.connections.empty())
        throw ParseError("joints", "exactly one of 'joints' or 'connections' must be a non-empty list");
    return g;
}

std::string genotype_to_json(const Genotype& g) {
    json doc;
    doc["base_offset"] = {g.base_offset.x(), g.base_offset.y(), g.base_offset.z()};
    if (!g.joints.empty()) {
        doc["joints"] = json::array();
        for (const auto& j : g.joints)
            doc["joints"].push_back({{"orientation", j.orientation}, {"direction", j.direction}, {"length", j.length}});
    } else {
        doc["connections"] = g.connections;
    }
    return doc.dump(2);
}

}  // namespace armsynth
