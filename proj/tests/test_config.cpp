#include "armsynth/config.hpp"

#include "doctest.h"
#include "oracles.hpp"

using namespace armsynth;

namespace {

template <class F>
std::string field_of(F f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.field();
    }
    return "<no error>";
}

std::string space_field(const std::string& doc) {
    return field_of([&] { parse_search_space(doc, oracle::data_dir()); });
}

std::string campaign_field(const std::string& doc) {
    return field_of([&] { parse_campaign_config(doc, "/base"); });
}

}  // namespace

TEST_CASE("search space: shipped fixtures and defaults") {
    const SpaceDocument general = load_search_space(oracle::data_dir() / "spaces" / "general.json");
    CHECK(general.space.kind == ConfigKind::general);
    CHECK(general.space.joint_limit == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(general.space.link_length == Interval{0.1, 0.6});
    CHECK(general.space.link_cross_section == 0.15);
    CHECK(general.space.link_density == 1000.0);
    CHECK_FALSE(general.has_base_range);

    const SpaceDocument module = load_search_space(oracle::data_dir() / "spaces" / "module.json");
    CHECK(module.space.kind == ConfigKind::actuator_module);
    REQUIRE(module.space.connections);
    CHECK(module.space.connections->rows.size() == 26);
    CHECK(module.space.module_dims == Vec3(0.07, 0.07, 0.115));
    CHECK(module.space.base.x == Interval{-1.0, 0.0});

    const SpaceDocument empty = parse_search_space("{}", ".");
    CHECK(empty.space.n_joint == 3);
    CHECK(empty.space.joint_limit == doctest::Approx(M_PI / 2));
}

TEST_CASE("search space: errors name the field") {
    CHECK(space_field(R"({"n_joints": 3})") == "n_joints");
    CHECK(space_field(R"({"n_joint": 0})") == "n_joint");
    CHECK(space_field(R"({"n_joint": 2.5})") == "n_joint");
    CHECK(space_field(R"({"link_length_range": [0.6, 0.1]})") == "link_length_range");
    CHECK(space_field(R"({"link_length_range": [0.0, 0.1]})") == "link_length_range");
    CHECK(space_field(R"({"joint_limit_deg": -5})") == "joint_limit_deg");
    CHECK(space_field(R"({"joint_limit_deg": 90, "joint_limit_rad": 1})") == "joint_limit_rad");
    CHECK(space_field(R"({"config_kind": "tree"})") == "config_kind");
    CHECK(space_field(R"({"config_kind": "actuator_module"})") == "connection_table");
    CHECK(space_field(R"({"config_kind": "actuator_module", "connection_table": "missing.json"})") ==
          "connection_table");
    CHECK(space_field(R"({"base_range": {"w": [0, 1]}})") == "base_range.w");
    CHECK(space_field(R"({"module_dims": [0.1, 0.1]})") == "module_dims");
    CHECK(space_field("not json") == "");
}

TEST_CASE("search space: serialized documents round-trip") {
    SpaceDocument doc = load_search_space(oracle::data_dir() / "spaces" / "module.json");
    doc.space.base.y = {-0.25, 0.75};
    doc.space.joint_limit = 1.234567890123;
    const std::string text = search_space_to_json(doc.space, "module_connections.json");
    const SpaceDocument back = parse_search_space(text, oracle::data_dir());
    CHECK(back.has_base_range);
    CHECK(back.space.base == doc.space.base);
    CHECK(back.space.joint_limit == doc.space.joint_limit);
    CHECK(back.space.kind == doc.space.kind);
    CHECK(back.space.module_dims == doc.space.module_dims);

    const ConnectionTable table = parse_connection_table(connection_table_to_json(*doc.space.connections));
    REQUIRE(table.rows.size() == 26);
    for (std::size_t i = 0; i < 26; ++i) {
        CHECK(table.rows[i].rotation == doc.space.connections->rows[i].rotation);
        CHECK(table.rows[i].direction == doc.space.connections->rows[i].direction);
        CHECK(table.rows[i].length == doc.space.connections->rows[i].length);
    }
}

TEST_CASE("campaign config: values, sweeps and relative paths") {
    const CampaignConfig c = parse_campaign_config(R"({
        "space": "spaces/general.json", "targets": "/abs/targets.json", "trials": 10, "seed": 18446744073709551615,
        "n_joint": [2, 4], "ik": {"tol": 1e-5, "restarts": 3}, "sampler": {"kind": "random", "gamma": 0.2},
        "batch": 4, "jobs": 2, "out": "runs/x", "label": "demo"})",
                                                   "/base");
    CHECK(c.space_path == std::filesystem::path("/base/spaces/general.json"));
    CHECK(c.targets_path == std::filesystem::path("/abs/targets.json"));
    CHECK(c.out == std::filesystem::path("/base/runs/x"));
    CHECK(c.trials == 10);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.n_joints == std::vector<int>{2, 4});
    CHECK(c.ik.tol == 1e-5);
    CHECK(c.ik.restarts == 3);
    CHECK(c.ik.max_iter == 200);
    CHECK(c.sampler_kind == SamplerKind::random);
    CHECK(c.sampler.gamma == 0.2);
    CHECK(c.batch == 4);
    CHECK(c.jobs == 2);

    const CampaignConfig single = parse_campaign_config(R"({"n_joint": 3})", ".");
    CHECK(single.n_joints == std::vector<int>{3});
    CHECK(single.trials == 2000);
    CHECK(single.sampler_kind == SamplerKind::tpe);
    CHECK(single.sampler.n_startup == 50);
    CHECK(single.sampler.n_candidates == 24);
    CHECK(single.sampler.gamma == 0.1);
}

TEST_CASE("campaign config: errors name the field") {
    CHECK(campaign_field(R"({"trials": 0})") == "trials");
    CHECK(campaign_field(R"({"seed": -1})") == "seed");
    CHECK(campaign_field(R"({"n_joint": []})") == "n_joint");
    CHECK(campaign_field(R"({"n_joint": [2, 0]})") == "n_joint[1]");
    CHECK(campaign_field(R"({"ik": {"tol": 0}})") == "ik.tol");
    CHECK(campaign_field(R"({"ik": {"tolerance": 1}})") == "ik.tolerance");
    CHECK(campaign_field(R"({"sampler": {"kind": "cmaes"}})") == "sampler.kind");
    CHECK(campaign_field(R"({"sampler": {"gamma": 1.0}})") == "sampler.gamma");
    CHECK(campaign_field(R"({"jobs": 0})") == "jobs");
    CHECK(campaign_field(R"({"space": ""})") == "space");
    CHECK(campaign_field(R"({"seeds": 1})") == "seeds");
    CHECK(field_of([] { load_campaign_config("/nonexistent/config.json"); }) == "config");
}

TEST_CASE("shipped campaign configs load") {
    for (const char* name :
         {"general_target1", "general_target2", "general_target3", "module_target1", "module_target2"}) {
        const CampaignConfig c = load_campaign_config(oracle::data_dir() / "campaigns" / (std::string(name) + ".json"));
        CHECK(std::filesystem::exists(c.space_path));
        CHECK(std::filesystem::exists(c.targets_path));
        CHECK_FALSE(c.n_joints.empty());
    }
}

TEST_CASE("genotype documents round-trip") {
    Rng rng(1);
    const SearchSpace space = SearchSpace::general(4);
    for (int s = 0; s < 20; ++s) {
        const Genotype g = sample_genotype(space, rng);
        CHECK(parse_genotype(genotype_to_json(g)) == g);
    }
    Genotype m;
    m.base_offset = Vec3(-0.5, 0.25, -0.125);
    m.connections = {0, 25, 7};
    CHECK(parse_genotype(genotype_to_json(m)) == m);
    CHECK(field_of([] { parse_genotype(R"({"base_offset": [0, 0]})"); }) == "base_offset");
    CHECK(field_of([] { parse_genotype(R"({"base_offset": [0, 0, 0]})"); }) != "<no error>");
    CHECK(field_of([] { parse_genotype(R"({"base_offset": [0, 0, 0], "joints": [{"orientation": 1}]})"); })
              .rfind("joints[0]", 0) == 0);
}
