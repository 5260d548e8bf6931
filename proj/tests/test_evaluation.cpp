#include "armsynth/design_space.hpp"
#include "armsynth/evaluation.hpp"
#include "armsynth/kinematics.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>

using namespace armsynth;

namespace {

TargetSet fixture(const std::string& name) { return load_targets_file(oracle::data_dir() / "targets" / (name + ".json")); }

std::string field_of(const std::string& doc) {
    try {
        load_targets(doc);
    } catch (const ParseError& e) {
        return e.field();
    }
    return "<no error>";
}

KinematicModel planar_two_link(double l1, double l2) {
    SearchSpace space = SearchSpace::general(2);
    Genotype g;
    g.joints = {{4, 0, l1}, {4, 0, l2}};
    return decode(space, g);
}

// Sum over targets of the closest tip distance on a 1 deg joint grid.
double grid_search_e_x(const KinematicModel& m, const TargetSet& targets) {
    std::vector<Vec3> tips;
    VecX t(2);
    for (int a = -90; a <= 90; ++a)
        for (int b = -90; b <= 90; ++b) {
            t << a * M_PI / 180.0, b * M_PI / 180.0;
            tips.push_back(oracle::naive_fk(m, t).tip);
        }
    double total = 0.0;
    for (const auto& target : targets.targets) {
        double best = 1e300;
        for (const auto& p : tips) best = std::min(best, (p - target.position).norm());
        total += best;
    }
    return total;
}

}  // namespace

TEST_CASE("fixtures: planar Target-3 set lies on z = 0.5") {
    const TargetSet t = fixture("general_target3");
    REQUIRE(t.size() >= 3);
    for (const auto& p : t.targets) CHECK(p.position.z() == 0.5);
    CHECK(t.base_range.z == Interval{-1.0, 0.0});
    CHECK(t.base_range.x == Interval{-1.0, 1.0});
}

TEST_CASE("fixtures: Target-1 set is not coplanar") {
    const TargetSet t = fixture("general_target1");
    REQUIRE(t.size() == 4);
    const Vec3 a = t.targets[1].position - t.targets[0].position;
    const Vec3 b = t.targets[2].position - t.targets[0].position;
    const Vec3 c = t.targets[3].position - t.targets[0].position;
    CHECK(std::abs(a.cross(b).dot(c)) > 1e-3);
    CHECK(t.base_range.z == Interval{-0.1, 0.1});
}

TEST_CASE("fixtures: default base ranges per task") {
    CHECK(fixture("general_target2").base_range.x == Interval{-1.0, 0.0});
    for (const char* name : {"module_target1", "module_target2"}) {
        const TargetSet t = fixture(name);
        CHECK(t.kind == ConfigKind::actuator_module);
        CHECK(t.base_range.x == Interval{-1.0, 0.0});
        CHECK(t.base_range.y == Interval{-1.0, 1.0});
    }
    const BaseRange plain = default_base_range(ConfigKind::general, "");
    for (int a = 0; a < 3; ++a) CHECK(plain[a] == Interval{-1.0, 1.0});
}

TEST_CASE("load_targets: schema errors name the field") {
    CHECK(field_of(R"({"targets": []})") == "targets");
    CHECK(field_of(R"({"label": "x"})") == "targets");
    CHECK(field_of(R"({"targets": [{"position": [1, 2]}]})") == "targets[0].position");
    CHECK(field_of(R"({"targets": [{"position": [0, 0, 0]}, {"pos": [1, 2, 3]}]})") == "targets[1].position");
    CHECK(field_of(R"({"targets": [{"position": [0, 0, 0], "orientation": [2, 0, 0, 0]}]})") ==
          "targets[0].orientation");
    CHECK(field_of(R"({"targets": [{"position": [0, 0, 0]}], "base_range": {"z": [1, 0]}})") == "base_range.z");
    CHECK(field_of(R"({"targets": [{"position": [0, 0, 0]}], "payload": -1})") == "payload");
    CHECK(field_of(R"({"targets": [{"position": [0, 0, 0]}], "config_kind": "tree"})") == "config_kind");
    CHECK(field_of("[1, 2") == "");
    CHECK_THROWS_AS(load_targets_file("/nonexistent.json"), ParseError);
}

TEST_CASE("load_targets: orientation quaternions and overrides") {
    const TargetSet t = load_targets(R"({"label": "q", "preset": "target3",
        "targets": [{"position": [0.1, 0.2, 0.3], "orientation": [0.7071067811865476, 0, 0, 0.7071067811865476]}],
        "base_range": {"y": [-0.5, 0.5]}, "payload": 1.5})");
    REQUIRE(t.targets[0].orientation.has_value());
    CHECK(((*t.targets[0].orientation) * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-12);
    CHECK(t.base_range.y == Interval{-0.5, 0.5});
    CHECK(t.base_range.z == Interval{-1.0, 0.0});
    CHECK(t.payload == 1.5);
    CHECK(t.label == "q");
}

TEST_CASE("evaluate: targets generated by the model itself are reached") {
    Rng rng(1);
    IkOptions ik;
    for (int s = 0; s < 20; ++s) {
        const SearchSpace space = SearchSpace::general(3);
        const KinematicModel m = decode(space, sample_genotype(space, rng));
        TargetSet set;
        for (int k = 0; k < 4; ++k) {
            VecX t(3);
            for (int i = 0; i < 3; ++i) t[i] = uniform(rng, -M_PI / 2, M_PI / 2);
            set.targets.push_back({forward_kinematics(m, t).tip.position, std::nullopt});
        }
        const ObjectiveVector o = evaluate(m, set, ik, 100 + static_cast<std::uint64_t>(s));
        CHECK(o.e_x < 4 * 1e-4);
        CHECK(o.feasible);
    }
}

TEST_CASE("evaluate: sums of per-target diagnostics") {
    Rng rng(2);
    const TargetSet set = fixture("general_target1");
    const SearchSpace space = SearchSpace::general(3);
    for (int s = 0; s < 10; ++s) {
        const KinematicModel m = decode(space, sample_genotype(space, rng));
        std::vector<IkResult> sol;
        const ObjectiveVector o = evaluate(m, set, IkOptions{}, 7, &sol);
        REQUIRE(o.per_target.size() == set.size());
        REQUIRE(sol.size() == set.size());
        double ex = 0.0, et = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            ex += o.per_target[i].position_error;
            et += o.per_target[i].torque_norm;
            CHECK(o.per_target[i].position_error == sol[i].position_error);
            CHECK(o.per_target[i].torque_norm == sol[i].torque.norm());
        }
        CHECK(o.e_x == ex);
        CHECK(o.e_tau == et);
        CHECK(o.e_x >= 0.0);
        CHECK(o.e_tau >= 0.0);
        // Deterministic given the seed.
        const ObjectiveVector again = evaluate(m, set, IkOptions{}, 7);
        CHECK(again.e_x == o.e_x);
        CHECK(again.e_tau == o.e_tau);
    }
}

TEST_CASE("evaluate: all-yaw models need no torque") {
    Rng rng(3);
    const TargetSet set = fixture("general_target3");
    for (int s = 0; s < 10; ++s) {
        const SearchSpace space = SearchSpace::general(2 + s % 3);
        Genotype g = sample_genotype(space, rng);
        oracle::make_all_yaw(g, rng);
        CHECK(evaluate(decode(space, g), set, IkOptions{}, 1).e_tau == 0.0);
    }
}

TEST_CASE("evaluate: a planar 2-link arm matches a grid-search oracle") {
    const TargetSet set = fixture("general_target1");
    for (auto [l1, l2] : {std::pair{0.5, 0.4}, std::pair{0.3, 0.3}, std::pair{0.6, 0.2}}) {
        const KinematicModel m = planar_two_link(l1, l2);
        const ObjectiveVector o = evaluate(m, set, IkOptions{}, 11);
        const double oracle_e_x = grid_search_e_x(m, set);
        CHECK(o.e_x > 0.0);
        CHECK(std::abs(o.e_x - oracle_e_x) < 5e-3);
    }
}

TEST_CASE("evaluate: invariant under target permutation") {
    Rng rng(4);
    TargetSet set = fixture("general_target3");
    const SearchSpace space = SearchSpace::general(3);
    for (int s = 0; s < 10; ++s) {
        const KinematicModel m = decode(space, sample_genotype(space, rng));
        const ObjectiveVector a = evaluate(m, set, IkOptions{}, 5);
        TargetSet shuffled = set;
        std::shuffle(shuffled.targets.begin(), shuffled.targets.end(), rng);
        const ObjectiveVector b = evaluate(m, shuffled, IkOptions{}, 5);
        CHECK(b.e_x == doctest::Approx(a.e_x).epsilon(1e-12));
        CHECK(b.e_tau == doctest::Approx(a.e_tau).epsilon(1e-12));
    }
}

TEST_CASE("evaluate: translating targets and base together keeps E_x") {
    Rng rng(5);
    const TargetSet set = fixture("general_target1");
    const SearchSpace space = SearchSpace::general(2);
    for (int s = 0; s < 10; ++s) {
        const Genotype g = sample_genotype(space, rng);
        const Vec3 shift(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        Genotype moved = g;
        moved.base_offset += shift;
        TargetSet shifted = set;
        for (auto& t : shifted.targets) t.position += shift;
        const double a = evaluate(decode(space, g), set, IkOptions{}, 9).e_x;
        const double b = evaluate(decode(space, moved), shifted, IkOptions{}, 9).e_x;
        CHECK(std::abs(a - b) < 1e-6);
    }
}

TEST_CASE("evaluate: listing a target twice never lowers the objectives") {
    Rng rng(6);
    const TargetSet set = fixture("general_target1");
    const SearchSpace space = SearchSpace::general(3);
    for (int s = 0; s < 10; ++s) {
        const KinematicModel m = decode(space, sample_genotype(space, rng));
        TargetSet twice = set;
        twice.targets.push_back(set.targets[static_cast<std::size_t>(s) % set.size()]);
        const ObjectiveVector a = evaluate(m, set, IkOptions{}, 3);
        const ObjectiveVector b = evaluate(m, twice, IkOptions{}, 3);
        CHECK(b.e_x >= a.e_x);
        CHECK(b.e_tau >= a.e_tau);
    }
}

TEST_CASE("penalize: fixed finite penalty above every feasible value") {
    const TargetSet set = fixture("general_target1");
    const SearchSpace space = SearchSpace::general(2);
    Genotype fold;
    fold.joints = {{4, 0, 0.4}, {4, 1, 0.3}};
    Genotype fold2;
    fold2.joints = {{8, 2, 0.5}, {4, 3, 0.6}};
    const ValidationReport r1 = validate_genotype(space, fold);
    const ValidationReport r2 = validate_genotype(space, fold2);
    REQUIRE_FALSE(r1.feasible());
    REQUIRE_FALSE(r2.feasible());
    const ObjectiveVector p1 = penalize(set, r1), p2 = penalize(set, r2);
    double norms = 0.0;
    for (const auto& t : set.targets) norms += t.position.norm();
    CHECK_FALSE(p1.feasible);
    CHECK(p1.e_x == doctest::Approx(norms + kPenalty).epsilon(1e-15));
    CHECK(p1.e_tau == kPenalty);
    CHECK(p1.e_x == p2.e_x);
    CHECK(p1.e_tau == p2.e_tau);

    Rng rng(7);
    for (int s = 0; s < 50; ++s) {
        const Genotype g = sample_genotype(space, rng);
        if (!validate_genotype(space, g).feasible()) continue;
        const ObjectiveVector o = evaluate(decode(space, g), set, IkOptions{}, 1);
        CHECK(o.feasible);
        CHECK(o.e_x < p1.e_x);
    }
    CHECK_THROWS_AS(penalize(set, ValidationReport{}), ContractViolation);
}

TEST_CASE("target seeds depend on the target, not on its position in the list") {
    Pose a{Vec3(0.1, 0.2, 0.3), std::nullopt}, b{Vec3(0.1, 0.2, 0.30000000000000004), std::nullopt};
    CHECK(target_seed(1, a) == target_seed(1, a));
    CHECK(target_seed(1, a) != target_seed(1, b));
    CHECK(target_seed(1, a) != target_seed(2, a));
}
