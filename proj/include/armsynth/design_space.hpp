#pragma once

#include "armsynth/rng.hpp"
#include "armsynth/types.hpp"

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace armsynth {

enum class ConfigKind { general, actuator_module };

std::string to_string(ConfigKind kind);
ConfigKind config_kind_from_string(const std::string& text);

inline constexpr int kOrientationCount = 12;
inline constexpr int kDirectionCount = 6;
inline constexpr int kConnectionCount = 26;

/// The 12 joint mountings of the general configuration. Index
/// `4 * axis + quarter_turns` maps the local joint axis (+y) onto world axis
/// x, y or z (axis = 0, 1, 2) and then spins it by quarter_turns * 90 deg
/// about that axis. Entries are exactly 0 or +-1.
const std::array<Mat3, kOrientationCount>& orientation_table();

/// Returns the orientation table; only defined for the general kind.
std::vector<Mat3> enumerate_orientations(ConfigKind kind);

/// +x, -x, +y, -y, +z, -z.
const std::array<Vec3, kDirectionCount>& direction_table();

/// One row of the actuator-module connection table: how the next module is
/// mounted (rotation relative to the current joint frame), and which way
/// and how far the connecting link runs.
struct ConnectionPattern {
    int id{0};
    std::string attachment;
    std::string meaning;
    Mat3 rotation{Mat3::Identity()};
    Vec3 direction{Vec3::UnitX()};
    double length{0.0};
};

struct ConnectionTable {
    std::string version;
    std::vector<ConnectionPattern> rows;
};

/// Loads a connection table document (JSON). Throws ParseError.
ConnectionTable load_connection_table(const std::filesystem::path& path);
ConnectionTable parse_connection_table(const std::string& text);

/// Parameter grammar for one campaign. n_joint is fixed per campaign.
struct SearchSpace {
    ConfigKind kind{ConfigKind::general};
    int n_joint{3};
    Interval link_length{0.1, 0.6};
    BaseRange base{};
    double joint_limit{1.5707963267948966};
    double link_cross_section{0.15};
    double link_density{1000.0};
    Vec3 module_dims{0.07, 0.07, 0.115};
    std::shared_ptr<const ConnectionTable> connections;

    static SearchSpace general(int n_joint);
    static SearchSpace actuator_module(int n_joint, ConnectionTable table);

    /// Throws ContractViolation when an invariant does not hold.
    void check() const;

    /// Edge length of the square link cross-section for this kind.
    double cross_section() const;
};

struct GeneralGene {
    int orientation{0};
    int direction{0};
    double length{0.1};

    friend bool operator==(const GeneralGene&, const GeneralGene&) = default;
};

/// One sampled design. For the general kind `joints` holds n_joint genes and
/// `connections` is empty; for the module kind the reverse.
struct Genotype {
    Vec3 base_offset{Vec3::Zero()};
    std::vector<GeneralGene> joints;
    std::vector<int> connections;

    std::size_t size() const { return joints.empty() ? connections.size() : joints.size(); }
    friend bool operator==(const Genotype& a, const Genotype& b) {
        return a.base_offset == b.base_offset && a.joints == b.joints && a.connections == b.connections;
    }
};

struct JointSpec {
    Mat3 rotation{Mat3::Identity()};     // fixed mounting relative to the parent joint frame
    Vec3 translation{Vec3::Zero()};      // parent joint origin -> this joint origin, parent frame
    Vec3 axis{Vec3::UnitY()};            // unit, own frame
    double lower{-1.5707963267948966};
    double upper{1.5707963267948966};
};

struct LinkSpec {
    double length{0.0};
    Vec3 direction{Vec3::UnitX()};       // unit, own joint frame
    Vec3 box{Vec3::Zero()};              // full extents along the joint-frame axes
    double mass{0.0};
    Vec3 com{Vec3::Zero()};              // joint frame
    Vec3 inertia_diagonal{Vec3::Zero()}; // solid cuboid, about com, joint-frame axes

    Vec3 end() const { return length * direction; }
};

/// Decoded serial chain. Joint i carries link i; the base is a fixed joint at
/// the world origin translated by `base_offset`.
struct KinematicModel {
    Vec3 base_offset{Vec3::Zero()};
    std::vector<JointSpec> joints;
    std::vector<LinkSpec> links;

    int dof() const { return static_cast<int>(joints.size()); }
    double reach() const;
};

enum class ViolationKind { overlap, out_of_range };

struct Violation {
    ViolationKind kind{ViolationKind::overlap};
    std::vector<int> joints;  // 1-based link/joint indices involved
    double depth{0.0};        // penetration depth in meters (overlap only)
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool feasible() const { return violations.empty(); }
};

/// Contact allowed between link boxes before a pair counts as overlapping.
inline constexpr double kContactTolerance = 1e-3;

Genotype sample_genotype(const SearchSpace& space, Rng& rng);

/// Throws MalformedGenotype if the shape or any categorical index is wrong.
void check_structure(const SearchSpace& space, const Genotype& g);

ValidationReport validate_genotype(const SearchSpace& space, const Genotype& g);

KinematicModel decode(const SearchSpace& space, const Genotype& g);

/// Box of link `index` (0-based) at the zero pose, world frame, optionally
/// trimmed by `trim_start`/`trim_end` meters along the link direction.
struct WorldBox {
    Vec3 center{Vec3::Zero()};
    Mat3 rotation{Mat3::Identity()};
    Vec3 half_extents{Vec3::Zero()};
};

WorldBox link_box(const KinematicModel& model, int index, double trim_start, double trim_end);

/// Separating-axis test between two oriented boxes. Returns the smallest
/// overlap over all candidate axes; <= 0 means the boxes are separated or
/// touching.
double penetration_depth(const WorldBox& a, const WorldBox& b);

}  // namespace armsynth
