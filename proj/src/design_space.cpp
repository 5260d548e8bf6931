#include "armsynth/design_space.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace armsynth {

namespace {

// Exact rotation by quarter_turns * 90 deg about world axis 0/1/2.
Mat3 quarter_turn(int axis, int quarter_turns) {
    static constexpr int kCos[4] = {1, 0, -1, 0};
    static constexpr int kSin[4] = {0, 1, 0, -1};
    const double c = kCos[quarter_turns & 3];
    const double s = kSin[quarter_turns & 3];
    Mat3 r = Mat3::Identity();
    switch (axis) {
        case 0: r << 1, 0, 0, 0, c, -s, 0, s, c; break;
        case 1: r << c, 0, s, 0, 1, 0, -s, 0, c; break;
        default: r << c, -s, 0, s, c, 0, 0, 0, 1; break;
    }
    // Normalize -0.0 entries so exported documents print plain zeros.
    return (r.array() + 0.0).matrix();
}

std::array<Mat3, kOrientationCount> build_orientations() {
    // Base mountings taking the local +y joint axis onto world x, y, z.
    const std::array<Mat3, 3> base = {quarter_turn(2, 3), Mat3::Identity(), quarter_turn(0, 1)};
    std::array<Mat3, kOrientationCount> out;
    for (int axis = 0; axis < 3; ++axis)
        for (int k = 0; k < 4; ++k) out[static_cast<std::size_t>(4 * axis + k)] = quarter_turn(axis, k) * base[axis];
    return out;
}

int dominant_axis(const Vec3& v) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    return best;
}

bool is_axis_unit(const Vec3& v) {
    const int a = dominant_axis(v);
    for (int i = 0; i < 3; ++i) {
        if (i == a ? std::abs(v[i]) != 1.0 : v[i] != 0.0) return false;
    }
    return true;
}

Vec3 box_extents(const Vec3& direction, double length, double cross) {
    Vec3 e = Vec3::Constant(cross);
    e[dominant_axis(direction)] = length;
    return e;
}

struct ZeroFrame {
    Mat3 rotation;
    Vec3 origin;
};

std::vector<ZeroFrame> zero_pose_frames(const KinematicModel& m) {
    std::vector<ZeroFrame> frames;
    frames.reserve(m.joints.size());
    Mat3 r = Mat3::Identity();
    Vec3 p = m.base_offset;
    for (const auto& j : m.joints) {
        p = p + r * j.translation;
        r = r * j.rotation;
        frames.push_back({r, p});
    }
    return frames;
}

WorldBox trimmed_box(const ZeroFrame& f, const LinkSpec& link, double trim_start, double trim_end) {
    const double start = std::min(trim_start, link.length);
    const double end = std::max(start, link.length - trim_end);
    WorldBox box;
    box.rotation = f.rotation;
    box.half_extents = 0.5 * link.box;
    box.half_extents[dominant_axis(link.direction)] = 0.5 * (end - start);
    box.center = f.origin + f.rotation * ((0.5 * (start + end)) * link.direction);
    return box;
}

LinkSpec make_link(const Vec3& direction, double length, double cross, double density) {
    LinkSpec link;
    link.length = length;
    link.direction = direction;
    link.box = box_extents(direction, length, cross);
    link.mass = density * link.box.prod();
    link.com = (0.5 * length) * direction;
    const Vec3 sq = link.box.cwiseProduct(link.box);
    link.inertia_diagonal = Vec3(sq.y() + sq.z(), sq.x() + sq.z(), sq.x() + sq.y()) * (link.mass / 12.0);
    return link;
}

}  // namespace

std::string to_string(ConfigKind kind) {
    return kind == ConfigKind::general ? "general" : "actuator_module";
}

ConfigKind config_kind_from_string(const std::string& text) {
    if (text == "general") return ConfigKind::general;
    if (text == "actuator_module" || text == "module") return ConfigKind::actuator_module;
    throw ParseError("config_kind", "expected 'general' or 'actuator_module', got '" + text + "'");
}

const std::array<Mat3, kOrientationCount>& orientation_table() {
    static const auto table = build_orientations();
    return table;
}

std::vector<Mat3> enumerate_orientations(ConfigKind kind) {
    if (kind != ConfigKind::general)
        throw ContractViolation("enumerate_orientations: only defined for the general configuration");
    const auto& t = orientation_table();
    return {t.begin(), t.end()};
}

const std::array<Vec3, kDirectionCount>& direction_table() {
    static const std::array<Vec3, kDirectionCount> table = {
        Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};
    return table;
}

// ---------------------------------------------------------------------------
// Connection table

ConnectionTable parse_connection_table(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("connection table is not valid JSON: ") + e.what());
    }
    ConnectionTable table;
    table.version = doc.value("version", "");
    if (!doc.contains("rows") || !doc["rows"].is_array()) throw ParseError("rows", "missing array");
    const auto& rows = doc["rows"];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "rows[" + std::to_string(i) + "]";
        ConnectionPattern p;
        try {
            p.id = row.at("id").get<int>();
            p.attachment = row.value("attachment", "");
            p.meaning = row.value("meaning", "");
            const auto& rot = row.at("rotation");
            if (!rot.is_array() || rot.size() != 3) throw ParseError(where + ".rotation", "expected 3x3 matrix");
            for (int r = 0; r < 3; ++r) {
                if (!rot[r].is_array() || rot[r].size() != 3)
                    throw ParseError(where + ".rotation", "expected 3x3 matrix");
                for (int c = 0; c < 3; ++c) p.rotation(r, c) = rot[r][c].get<double>();
            }
            const auto& dir = row.at("direction");
            if (!dir.is_array() || dir.size() != 3) throw ParseError(where + ".direction", "expected 3-vector");
            for (int c = 0; c < 3; ++c) p.direction[c] = dir[c].get<double>();
            p.length = row.at("length").get<double>();
        } catch (const json::exception& e) {
            throw ParseError(where, e.what());
        }
        if (p.id != static_cast<int>(i)) throw ParseError(where + ".id", "ids must be dense and ordered");
        const Mat3 err = p.rotation.transpose() * p.rotation - Mat3::Identity();
        if (err.cwiseAbs().maxCoeff() > 1e-9 || std::abs(p.rotation.determinant() - 1.0) > 1e-9)
            throw ParseError(where + ".rotation", "not a proper rotation");
        if (!is_axis_unit(p.direction)) throw ParseError(where + ".direction", "must be an axis-aligned unit vector");
        if (!(p.length > 0.0)) throw ParseError(where + ".length", "must be positive");
        table.rows.push_back(std::move(p));
    }
    if (table.rows.size() != static_cast<std::size_t>(kConnectionCount))
        throw ParseError("rows", "expected " + std::to_string(kConnectionCount) + " connection patterns, got " +
                                     std::to_string(table.rows.size()));
    return table;
}

ConnectionTable load_connection_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("connection_table", "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_connection_table(ss.str());
}

// ---------------------------------------------------------------------------
// Search space

SearchSpace SearchSpace::general(int n_joint) {
    SearchSpace s;
    s.n_joint = n_joint;
    return s;
}

SearchSpace SearchSpace::actuator_module(int n_joint, ConnectionTable table) {
    SearchSpace s;
    s.kind = ConfigKind::actuator_module;
    s.n_joint = n_joint;
    s.base = BaseRange{{-1.0, 0.0}, {-1.0, 1.0}, {-1.0, 0.0}};
    s.connections = std::make_shared<const ConnectionTable>(std::move(table));
    return s;
}

void SearchSpace::check() const {
    if (n_joint < 1) throw ContractViolation("search space: n_joint must be >= 1");
    if (!(joint_limit > 0.0)) throw ContractViolation("search space: joint_limit must be > 0");
    if (!(link_length.lo > 0.0) || link_length.hi < link_length.lo)
        throw ContractViolation("search space: link_length_range must be a subset of (0, inf)");
    for (int a = 0; a < 3; ++a)
        if (base[a].hi < base[a].lo) throw ContractViolation("search space: empty base range");
    if (!(link_density > 0.0)) throw ContractViolation("search space: link_density must be > 0");
    if (kind == ConfigKind::general && !(link_cross_section > 0.0))
        throw ContractViolation("search space: link_cross_section must be > 0");
    if (kind == ConfigKind::actuator_module) {
        if (!connections || connections->rows.size() != static_cast<std::size_t>(kConnectionCount))
            throw ContractViolation("search space: module kind needs a 26-row connection table");
        if (!(module_dims.minCoeff() > 0.0)) throw ContractViolation("search space: module_dims must be > 0");
    }
}

double SearchSpace::cross_section() const {
    return kind == ConfigKind::general ? link_cross_section : module_dims.x();
}

double KinematicModel::reach() const {
    double r = 0.0;
    for (const auto& l : links) r += l.length;
    return r;
}

// ---------------------------------------------------------------------------
// Genotypes

Genotype sample_genotype(const SearchSpace& space, Rng& rng) {
    Genotype g;
    for (int a = 0; a < 3; ++a) g.base_offset[a] = uniform(rng, space.base[a].lo, space.base[a].hi);
    for (int i = 0; i < space.n_joint; ++i) {
        if (space.kind == ConfigKind::general) {
            GeneralGene gene;
            gene.orientation = uniform_index(rng, kOrientationCount);
            gene.direction = uniform_index(rng, kDirectionCount);
            gene.length = uniform(rng, space.link_length.lo, space.link_length.hi);
            g.joints.push_back(gene);
        } else {
            g.connections.push_back(uniform_index(rng, kConnectionCount));
        }
    }
    return g;
}

void check_structure(const SearchSpace& space, const Genotype& g) {
    const auto n = static_cast<std::size_t>(space.n_joint);
    if (space.kind == ConfigKind::general) {
        if (g.joints.size() != n || !g.connections.empty())
            throw MalformedGenotype("genotype: expected " + std::to_string(n) + " general joint genes");
        for (std::size_t i = 0; i < n; ++i) {
            const auto& gene = g.joints[i];
            if (gene.orientation < 0 || gene.orientation >= kOrientationCount)
                throw MalformedGenotype("genotype: joints[" + std::to_string(i) + "].orientation out of table range");
            if (gene.direction < 0 || gene.direction >= kDirectionCount)
                throw MalformedGenotype("genotype: joints[" + std::to_string(i) + "].direction out of table range");
            if (!std::isfinite(gene.length) || !(gene.length > 0.0))
                throw MalformedGenotype("genotype: joints[" + std::to_string(i) + "].length must be positive");
        }
    } else {
        if (g.connections.size() != n || !g.joints.empty())
            throw MalformedGenotype("genotype: expected " + std::to_string(n) + " connection genes");
        const int rows = space.connections ? static_cast<int>(space.connections->rows.size()) : 0;
        for (std::size_t i = 0; i < n; ++i)
            if (g.connections[i] < 0 || g.connections[i] >= rows)
                throw MalformedGenotype("genotype: connections[" + std::to_string(i) + "] out of table range");
    }
    if (!g.base_offset.allFinite()) throw MalformedGenotype("genotype: base_offset must be finite");
}

KinematicModel decode(const SearchSpace& space, const Genotype& g) {
    check_structure(space, g);
    KinematicModel m;
    m.base_offset = g.base_offset;
    const double cross = space.cross_section();
    Vec3 previous_end = Vec3::Zero();
    for (int i = 0; i < space.n_joint; ++i) {
        JointSpec joint;
        Vec3 dir;
        double len = 0.0;
        if (space.kind == ConfigKind::general) {
            const auto& gene = g.joints[static_cast<std::size_t>(i)];
            joint.rotation = orientation_table()[static_cast<std::size_t>(gene.orientation)];
            dir = direction_table()[static_cast<std::size_t>(gene.direction)];
            len = gene.length;
        } else {
            const auto& row = space.connections->rows[static_cast<std::size_t>(g.connections[static_cast<std::size_t>(i)])];
            joint.rotation = row.rotation;
            dir = row.direction;
            len = row.length;
        }
        joint.translation = previous_end;
        joint.lower = -space.joint_limit;
        joint.upper = space.joint_limit;
        LinkSpec link = make_link(dir, len, cross, space.link_density);
        previous_end = link.end();
        m.joints.push_back(joint);
        m.links.push_back(link);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Overlap

WorldBox link_box(const KinematicModel& model, int index, double trim_start, double trim_end) {
    const auto frames = zero_pose_frames(model);
    return trimmed_box(frames.at(static_cast<std::size_t>(index)), model.links.at(static_cast<std::size_t>(index)),
                       trim_start, trim_end);
}

double penetration_depth(const WorldBox& a, const WorldBox& b) {
    const Vec3 delta = b.center - a.center;
    double depth = std::numeric_limits<double>::infinity();
    auto test = [&](const Vec3& axis) {
        const double n = axis.norm();
        if (n < 1e-9) return;
        const Vec3 u = axis / n;
        double ra = 0.0, rb = 0.0;
        for (int i = 0; i < 3; ++i) {
            ra += a.half_extents[i] * std::abs(a.rotation.col(i).dot(u));
            rb += b.half_extents[i] * std::abs(b.rotation.col(i).dot(u));
        }
        depth = std::min(depth, ra + rb - std::abs(delta.dot(u)));
    };
    for (int i = 0; i < 3; ++i) test(a.rotation.col(i));
    for (int i = 0; i < 3; ++i) test(b.rotation.col(i));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) test(a.rotation.col(i).cross(b.rotation.col(j)));
    return depth;
}

ValidationReport validate_genotype(const SearchSpace& space, const Genotype& g) {
    ValidationReport report;
    static const char* kAxis = "xyz";
    for (int a = 0; a < 3; ++a) {
        if (!space.base[a].contains(g.base_offset[a])) {
            report.violations.push_back(
                {ViolationKind::out_of_range, {}, 0.0, std::string("base_offset.") + kAxis[a] + " outside base range"});
        }
    }
    if (space.kind == ConfigKind::general) {
        for (std::size_t i = 0; i < g.joints.size(); ++i) {
            if (!space.link_length.contains(g.joints[i].length)) {
                report.violations.push_back({ViolationKind::out_of_range,
                                             {static_cast<int>(i) + 1},
                                             0.0,
                                             "link length outside link_length_range"});
            }
        }
    }

    const KinematicModel m = decode(space, g);
    const int n = m.dof();
    const double trim = 0.5 * space.cross_section();
    const auto frames = zero_pose_frames(m);
    auto box_of = [&](int i, double t0, double t1) {
        return trimmed_box(frames[static_cast<std::size_t>(i)], m.links[static_cast<std::size_t>(i)], t0, t1);
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1);
            // Adjacent links share a joint; the cube around it is common to
            // both, so each box gives up half a cross-section there.
            const WorldBox bi = box_of(i, 0.0, adjacent ? trim : 0.0);
            const WorldBox bj = box_of(j, adjacent ? trim : 0.0, 0.0);
            const double depth = penetration_depth(bi, bj);
            if (depth > kContactTolerance)
                report.violations.push_back({ViolationKind::overlap, {i + 1, j + 1}, depth, "link boxes interpenetrate"});
        }
    }
    return report;
}

}  // namespace armsynth
