#include "armsynth/urdf.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace armsynth {

namespace {

namespace pt = boost::property_tree;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
    return buf;
}

std::string vec(const Vec3& v) { return num(v.x()) + " " + num(v.y()) + " " + num(v.z()); }

void exact_cos_sin(double angle, double& c, double& s) {
    const double quarter = std::acos(0.0);
    const double k = std::round(angle / quarter);
    if (std::abs(angle - k * quarter) < 1e-12) {
        static constexpr int kCos[4] = {1, 0, -1, 0};
        static constexpr int kSin[4] = {0, 1, 0, -1};
        const int idx = static_cast<int>(((static_cast<long long>(k) % 4) + 4) % 4);
        c = kCos[idx];
        s = kSin[idx];
    } else {
        c = std::cos(angle);
        s = std::sin(angle);
    }
}

void write_box_link(std::ostringstream& out, const std::string& name, const LinkSpec& link) {
    const std::string box = "      <origin xyz=\"" + vec(link.com) + "\" rpy=\"0 0 0\"/>\n"
                            "      <geometry>\n"
                            "        <box size=\"" + vec(link.box) + "\"/>\n"
                            "      </geometry>\n";
    out << "  <link name=\"" << name << "\">\n"
        << "    <inertial>\n"
        << "      <origin xyz=\"" << vec(link.com) << "\" rpy=\"0 0 0\"/>\n"
        << "      <mass value=\"" << num(link.mass) << "\"/>\n"
        << "      <inertia ixx=\"" << num(link.inertia_diagonal.x()) << "\" ixy=\"0\" ixz=\"0\" iyy=\""
        << num(link.inertia_diagonal.y()) << "\" iyz=\"0\" izz=\"" << num(link.inertia_diagonal.z()) << "\"/>\n"
        << "    </inertial>\n"
        << "    <visual>\n" << box << "    </visual>\n"
        << "    <collision>\n" << box << "    </collision>\n"
        << "  </link>\n";
}

// --- parsing helpers -------------------------------------------------------

std::string attr(const pt::ptree& node, const std::string& name, const std::string& field) {
    auto v = node.get_optional<std::string>("<xmlattr>." + name);
    if (!v) throw ParseError(field + "." + name, "missing attribute");
    return *v;
}

std::vector<double> numbers(const std::string& text, std::size_t count, const std::string& field) {
    std::vector<double> out;
    const char* p = text.c_str();
    while (*p) {
        while (*p == ' ' || *p == '\t' || *p == '\n' || *p == '\r') ++p;
        if (!*p) break;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) throw ParseError(field, "expected a number in '" + text + "'");
        if (!std::isfinite(v)) throw ParseError(field, "non-finite value");
        out.push_back(v);
        p = end;
    }
    if (out.size() != count)
        throw ParseError(field, "expected " + std::to_string(count) + " numbers, got " + std::to_string(out.size()));
    return out;
}

Vec3 vec3_attr(const pt::ptree& node, const std::string& name, const std::string& field, const Vec3& fallback,
               bool required) {
    auto v = node.get_optional<std::string>("<xmlattr>." + name);
    if (!v) {
        if (required) throw ParseError(field + "." + name, "missing attribute");
        return fallback;
    }
    const auto n = numbers(*v, 3, field + "." + name);
    return {n[0], n[1], n[2]};
}

double scalar_attr(const pt::ptree& node, const std::string& name, const std::string& field) {
    return numbers(attr(node, name, field), 1, field + "." + name)[0];
}

const pt::ptree& child(const pt::ptree& node, const std::string& name, const std::string& field) {
    auto c = node.get_child_optional(name);
    if (!c) throw ParseError(field + "." + name, "missing element");
    return *c;
}

struct RawJoint {
    std::string name, type, parent, child;
    Vec3 xyz{Vec3::Zero()}, rpy{Vec3::Zero()}, axis{Vec3::UnitY()};
    double lower{0.0}, upper{0.0};
};

LinkSpec parse_link(const pt::ptree& node, const std::string& field) {
    LinkSpec link;
    const auto& inertial = child(node, "inertial", field);
    link.mass = scalar_attr(child(inertial, "mass", field + ".inertial"), "value", field + ".inertial.mass");
    if (!(link.mass > 0.0)) throw ParseError(field + ".inertial.mass.value", "must be positive");
    const auto& inertia = child(inertial, "inertia", field + ".inertial");
    const std::string ifield = field + ".inertial.inertia";
    link.inertia_diagonal = {scalar_attr(inertia, "ixx", ifield), scalar_attr(inertia, "iyy", ifield),
                             scalar_attr(inertia, "izz", ifield)};
    if (auto o = inertial.get_child_optional("origin"))
        link.com = vec3_attr(*o, "xyz", field + ".inertial.origin", Vec3::Zero(), false);

    const auto& visual = child(node, "visual", field);
    const std::string vfield = field + ".visual";
    const Vec3 center = vec3_attr(child(visual, "origin", vfield), "xyz", vfield + ".origin", Vec3::Zero(), true);
    const auto& geometry = child(visual, "geometry", vfield);
    link.box = vec3_attr(child(geometry, "box", vfield + ".geometry"), "size", vfield + ".geometry.box", Vec3::Zero(),
                         true);
    int axis = -1;
    for (int i = 0; i < 3; ++i) {
        if (center[i] != 0.0) {
            if (axis >= 0) throw ParseError(vfield + ".origin.xyz", "link must run along a single frame axis");
            axis = i;
        }
    }
    if (axis < 0) throw ParseError(vfield + ".origin.xyz", "zero-length link");
    link.length = 2.0 * std::abs(center[axis]);
    link.direction = Vec3::Zero();
    link.direction[axis] = center[axis] > 0.0 ? 1.0 : -1.0;
    if (std::abs(link.box[axis] - link.length) > 1e-12)
        throw ParseError(vfield + ".geometry.box.size", "box length does not match the link origin offset");
    return link;
}

}  // namespace

Vec3 rpy_from_matrix(const Mat3& r) {
    const double pitch = std::atan2(-r(2, 0), std::sqrt(r(0, 0) * r(0, 0) + r(1, 0) * r(1, 0)));
    if (std::abs(std::abs(r(2, 0)) - 1.0) < 1e-12) {
        // Gimbal lock: fold the yaw into the roll.
        return {std::atan2(-r(1, 2), r(1, 1)) + 0.0, pitch, 0.0};
    }
    return {std::atan2(r(2, 1), r(2, 2)) + 0.0, pitch + 0.0, std::atan2(r(1, 0), r(0, 0)) + 0.0};
}

Mat3 matrix_from_rpy(const Vec3& rpy) {
    double cr, sr, cp, sp, cy, sy;
    exact_cos_sin(rpy.x(), cr, sr);
    exact_cos_sin(rpy.y(), cp, sp);
    exact_cos_sin(rpy.z(), cy, sy);
    Mat3 rx, ry, rz;
    rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
    ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
    rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
    return ((rz * ry * rx).array() + 0.0).matrix();
}

std::string export_urdf(const KinematicModel& model, const std::string& name) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<robot name=\"" << name << "\">\n";
    out << "  <link name=\"base_link\"/>\n";
    out << "  <joint name=\"root_joint\" type=\"fixed\">\n"
        << "    <parent link=\"world\"/>\n"
        << "    <child link=\"base_link\"/>\n"
        << "    <origin xyz=\"" << vec(model.base_offset) << "\" rpy=\"0 0 0\"/>\n"
        << "  </joint>\n";
    std::string parent = "base_link";
    for (int i = 0; i < model.dof(); ++i) {
        const auto& joint = model.joints[static_cast<std::size_t>(i)];
        const auto& link = model.links[static_cast<std::size_t>(i)];
        const std::string link_name = "link" + std::to_string(i + 1);
        write_box_link(out, link_name, link);
        out << "  <joint name=\"joint" << (i + 1) << "\" type=\"revolute\">\n"
            << "    <parent link=\"" << parent << "\"/>\n"
            << "    <child link=\"" << link_name << "\"/>\n"
            << "    <origin xyz=\"" << vec(joint.translation) << "\" rpy=\"" << vec(rpy_from_matrix(joint.rotation))
            << "\"/>\n"
            << "    <axis xyz=\"" << vec(joint.axis) << "\"/>\n"
            << "    <limit lower=\"" << num(joint.lower) << "\" upper=\"" << num(joint.upper)
            << "\" effort=\"1000\" velocity=\"1\"/>\n"
            << "  </joint>\n";
        parent = link_name;
    }
    out << "</robot>\n";
    return out.str();
}

KinematicModel parse_urdf(const std::string& text) {
    pt::ptree doc;
    try {
        std::istringstream in(text);
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("", std::string("not well-formed XML: ") + e.what());
    }
    auto robot = doc.get_child_optional("robot");
    if (!robot) throw ParseError("robot", "missing root element");

    std::map<std::string, LinkSpec> links;
    std::map<std::string, bool> bare_links;
    std::vector<RawJoint> joints;
    for (const auto& [tag, node] : *robot) {
        if (tag == "link") {
            const std::string name = attr(node, "name", "link");
            const std::string field = "link[" + name + "]";
            if (node.get_child_optional("visual")) {
                links[name] = parse_link(node, field);
            } else {
                bare_links[name] = true;
            }
        } else if (tag == "joint") {
            RawJoint j;
            j.name = attr(node, "name", "joint");
            const std::string field = "joint[" + j.name + "]";
            j.type = attr(node, "type", field);
            j.parent = attr(child(node, "parent", field), "link", field + ".parent");
            j.child = attr(child(node, "child", field), "link", field + ".child");
            if (auto o = node.get_child_optional("origin")) {
                j.xyz = vec3_attr(*o, "xyz", field + ".origin", Vec3::Zero(), false);
                j.rpy = vec3_attr(*o, "rpy", field + ".origin", Vec3::Zero(), false);
            }
            if (j.type == "revolute") {
                if (auto a = node.get_child_optional("axis")) j.axis = vec3_attr(*a, "xyz", field + ".axis", Vec3::UnitX(), true);
                else j.axis = Vec3::UnitX();  // URDF default
                const double n = j.axis.norm();
                if (!(n > 0.0)) throw ParseError(field + ".axis.xyz", "zero axis");
                if (std::abs(n - 1.0) > 1e-15) j.axis /= n;
                const auto& limit = child(node, "limit", field);
                j.lower = scalar_attr(limit, "lower", field + ".limit");
                j.upper = scalar_attr(limit, "upper", field + ".limit");
                if (!(j.lower < j.upper)) throw ParseError(field + ".limit", "lower must be below upper");
            } else if (j.type != "fixed") {
                throw ParseError(field + ".type", "unsupported joint type '" + j.type + "'");
            }
            joints.push_back(std::move(j));
        }
    }

    KinematicModel model;
    std::string current;
    const RawJoint* root = nullptr;
    for (const auto& j : joints)
        if (j.type == "fixed") {
            if (root) throw ParseError("joint[" + j.name + "]", "more than one fixed joint");
            root = &j;
        }
    if (root) {
        if (root->rpy.cwiseAbs().maxCoeff() > 1e-12)
            throw ParseError("joint[" + root->name + "].origin.rpy", "base rotation is not supported");
        model.base_offset = root->xyz;
        current = root->child;
    } else {
        current = "base_link";
    }

    std::map<std::string, const RawJoint*> by_parent;
    for (const auto& j : joints) {
        if (j.type != "revolute") continue;
        if (by_parent.count(j.parent))
            throw ParseError("joint[" + j.name + "].parent", "branching chains are not supported");
        by_parent[j.parent] = &j;
    }
    std::size_t used = 0;
    while (by_parent.count(current)) {
        const RawJoint& j = *by_parent[current];
        auto it = links.find(j.child);
        if (it == links.end()) throw ParseError("joint[" + j.name + "].child", "link '" + j.child + "' has no box geometry");
        JointSpec spec;
        spec.rotation = matrix_from_rpy(j.rpy);
        spec.translation = j.xyz;
        spec.axis = j.axis;
        spec.lower = j.lower;
        spec.upper = j.upper;
        model.joints.push_back(spec);
        model.links.push_back(it->second);
        current = j.child;
        ++used;
    }
    if (used == 0) throw ParseError("joint", "no revolute joint chain found");
    if (used != by_parent.size()) throw ParseError("joint", "revolute joints not connected to the base chain");
    return model;
}

KinematicModel load_urdf(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open model file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_urdf(ss.str());
}

}  // namespace armsynth
