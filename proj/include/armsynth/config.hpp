#pragma once

#include "armsynth/design_space.hpp"
#include "armsynth/evaluation.hpp"
#include "armsynth/kinematics.hpp"
#include "armsynth/tpe.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace armsynth {

/// Search-space document (JSON). Every key is optional:
///
///     { "config_kind": "general", "n_joint": 3, "joint_limit_deg": 90,
///       "link_length_range": [0.1, 0.6], "link_cross_section": 0.15,
///       "link_density": 1000, "module_dims": [0.07, 0.07, 0.115],
///       "connection_table": "module_connections.json",
///       "base_range": {"x": [-1, 0]} }
///
/// "joint_limit_rad" may replace "joint_limit_deg". Relative table paths resolve against `base_dir`. `has_base_range` is set
/// when the document pins the base range itself; otherwise campaigns take it
/// from the target set.
struct SpaceDocument {
    SearchSpace space;
    bool has_base_range{false};
};

SpaceDocument parse_search_space(const std::string& text, const std::filesystem::path& base_dir);
SpaceDocument load_search_space(const std::filesystem::path& path);

/// Lossless search-space document with the base range pinned and the joint
/// limit stored in radians ("joint_limit_rad"). `table_file` names the
/// connection table for the module kind.
std::string search_space_to_json(const SearchSpace& space, const std::string& table_file);
std::string connection_table_to_json(const ConnectionTable& table);

enum class SamplerKind { tpe, random };

/// Campaign document (JSON):
///
///     { "space": "spaces/general.json", "targets": "targets/general_target3.json",
///       "trials": 2000, "seed": 7, "n_joint": [3, 4],
///       "ik": {"tol": 1e-4, "restarts": 10}, "sampler": {"gamma": 0.1},
///       "batch": 1, "jobs": 1, "out": "runs/target3" }
///
/// `space` and `targets` are only required by run_optimize; other commands
/// read a campaign document for its "ik" block alone.
struct CampaignConfig {
    std::filesystem::path space_path;
    std::filesystem::path targets_path;
    int trials{2000};
    std::uint64_t seed{0};
    std::vector<int> n_joints;  // empty: use the space document's n_joint
    IkOptions ik;
    SamplerSettings sampler;
    SamplerKind sampler_kind{SamplerKind::tpe};
    int batch{1};
    int jobs{1};
    std::filesystem::path out{"armsynth_out"};
};

CampaignConfig parse_campaign_config(const std::string& text, const std::filesystem::path& base_dir);
CampaignConfig load_campaign_config(const std::filesystem::path& path);

/// Genotype document: {"base_offset": [x, y, z], "joints": [{"orientation": 4,
/// "direction": 0, "length": 0.3}, ...]} or {"base_offset": [...],
/// "connections": [3, 17]}.
Genotype parse_genotype(const std::string& text);
std::string genotype_to_json(const Genotype& g);

std::string read_text_file(const std::filesystem::path& path, const std::string& field);

}  // namespace armsynth
