// Acceptance checks. `acceptance` runs all ten, `acceptance 4 7` runs a
// subset. One line per check; exit status 1 if any fails.
#include "armsynth/campaign.hpp"
#include "armsynth/config.hpp"
#include "armsynth/kinematics.hpp"
#include "armsynth/pareto.hpp"
#include "armsynth/urdf.hpp"

#include "json.hpp"
#include "oracles.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

using namespace armsynth;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ObjectiveVector ov(double x, double t) {
    ObjectiveVector o;
    o.e_x = x;
    o.e_tau = t;
    return o;
}

Vec3 random_unit(Rng& rng) {
    return Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)).normalized();
}

// Arbitrary chain with off-grid mounts, axes and centres of mass.
KinematicModel random_model(Rng& rng, int n) {
    KinematicModel m;
    m.base_offset = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    Vec3 prev_end = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
        Eigen::Quaterniond q(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        JointSpec j;
        j.rotation = q.normalized().toRotationMatrix();
        j.translation = prev_end;
        j.axis = random_unit(rng);
        LinkSpec l;
        l.length = uniform(rng, 0.1, 0.6);
        l.direction = random_unit(rng);
        l.box = Vec3(l.length, 0.15, 0.15);
        l.mass = uniform(rng, 0.5, 10.0);
        l.com = 0.5 * l.length * l.direction + 0.02 * random_unit(rng);
        prev_end = l.end();
        m.joints.push_back(j);
        m.links.push_back(l);
    }
    return m;
}

const ConnectionTable& module_table() {
    static const ConnectionTable table = load_connection_table(oracle::data_dir() / "module_connections.json");
    return table;
}

KinematicModel random_design(Rng& rng, int n, bool module) {
    const SearchSpace space = module ? SearchSpace::actuator_module(n, module_table()) : SearchSpace::general(n);
    return decode(space, sample_genotype(space, rng));
}

VecX random_pose(Rng& rng, const KinematicModel& m) {
    VecX t(m.dof());
    for (int i = 0; i < m.dof(); ++i) {
        const auto& j = m.joints[static_cast<std::size_t>(i)];
        t[i] = uniform(rng, j.lower, j.upper);
    }
    return t;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("armsynth_acceptance_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

CampaignConfig shipped(const std::string& name) {
    return load_campaign_config(oracle::data_dir() / "campaigns" / (name + ".json"));
}

// The campaign run_optimize would run for one joint count, minus the files.
CampaignSpec spec_for(const CampaignConfig& c, int n_joint, std::uint64_t seed, int trials, SamplerKind kind) {
    const SpaceDocument doc = load_search_space(c.space_path);
    CampaignSpec spec;
    spec.targets = load_targets_file(c.targets_path);
    spec.space = doc.space;
    spec.space.n_joint = n_joint;
    if (!doc.has_base_range) spec.space.base = spec.targets.base_range;
    spec.trials = trials;
    spec.seed = seed;
    spec.ik = c.ik;
    spec.sampler = c.sampler;
    spec.sampler_kind = kind;
    spec.batch = c.batch;
    spec.jobs = c.jobs;
    return spec;
}

Outcome statics_gradient() {
    Stopwatch clock;
    Rng rng(101);
    const double h = 1e-6;
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
        const KinematicModel m = (s % 2) ? random_model(rng, 1 + s % 6) : random_design(rng, 1 + s % 4, s % 4 == 2);
        const double payload = s % 3 == 0 ? uniform(rng, 0.0, 3.0) : 0.0;
        for (int p = 0; p < 10; ++p) {
            const VecX t = random_pose(rng, m);
            const VecX tau = gravity_torque(m, t, payload);
            for (int c = 0; c < m.dof(); ++c) {
                VecX tp = t, tm = t;
                tp[c] += h;
                tm[c] -= h;
                const double fd =
                    -(oracle::potential_energy(m, tp, payload) - oracle::potential_energy(m, tm, payload)) / (2 * h);
                worst = std::max(worst, std::abs(tau[c] - fd) / std::max(1.0, tau.cwiseAbs().maxCoeff()));
            }
        }
    }
    const double secs = clock.seconds();
    return {worst < 1e-6 && secs < 10.0,
            format("max relative deviation %.3g over 50 models x 10 poses, %.3f s", worst, secs)};
}

Outcome zero_torque() {
    Rng rng(102);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const int n = 1 + s % 6;
        SearchSpace space = SearchSpace::general(n);
        Genotype g = sample_genotype(space, rng);
        oracle::make_all_yaw(g, rng);
        const KinematicModel m = decode(space, g);
        worst = std::max(worst, gravity_torque(m, random_pose(rng, m), uniform(rng, 0.0, 5.0)).cwiseAbs().maxCoeff());
    }
    return {worst == 0.0, format("max |tau_j| = %g over 100 all-yaw chains", worst)};
}

Outcome cantilever() {
    SearchSpace space = SearchSpace::general(1);
    Genotype g;
    g.joints.push_back({4, 0, 0.4});
    const KinematicModel m = decode(space, g);
    const double tau = std::abs(gravity_torque(m, VecX::Zero(1))[0]);
    return {std::abs(m.links[0].mass - 9.0) < 1e-12 && std::abs(tau - 17.658) < 1e-9,
            format("mass %.6f kg, |tau| = %.12f N m", m.links[0].mass, tau)};
}

Outcome ik_round_trip() {
    Stopwatch clock;
    Rng rng(104);
    IkOptions opts;
    int solved = 0;
    constexpr int kCases = 500;
    for (int s = 0; s < kCases; ++s) {
        const KinematicModel m = random_design(rng, 2 + s % 3, s % 5 == 4);
        Pose target;
        target.position = forward_kinematics(m, random_pose(rng, m)).tip.position;
        opts.seed = static_cast<std::uint64_t>(s);
        if (solve_ik(m, target, opts).position_error < 1e-4) ++solved;
    }
    const double secs = clock.seconds();
    return {solved * 100 >= 95 * kCases && secs < 60.0,
            format("%d/%d targets within 1e-4 m, %.3f s", solved, kCases, secs)};
}

Outcome front_oracles() {
    int mismatches = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(1000 + seed);
        std::vector<ObjectiveVector> pts;
        for (int i = 0; i < 200; ++i) {
            double x = uniform(rng, 0, 1), t = uniform(rng, 0, 1);
            // Odd seeds use a coarse grid so ties and duplicates occur.
            if (seed % 2) {
                x = std::round(x * 10) / 10;
                t = std::round(t * 10) / 10;
            }
            pts.push_back(ov(x, t));
        }
        const auto ranks = oracle::peel_ranks(pts);
        if (nondominated_sort(pts) != ranks) ++mismatches;

        ParetoArchive archive;
        for (int i = 0; i < 200; ++i) archive.insert(i, pts[static_cast<std::size_t>(i)]);
        std::set<int> got, expected;
        for (const auto& m : archive.members()) got.insert(m.id);
        for (int i = 0; i < 200; ++i)
            if (ranks[static_cast<std::size_t>(i)] == 0) expected.insert(i);
        if (got != expected) ++mismatches;
    }
    return {mismatches == 0, format("%d mismatches over 20 seeds x 200 points (sort and archive)", mismatches)};
}

Outcome hypervolume_check() {
    const ObjectiveVector single[] = {ov(0, 0)};
    const ObjectiveVector pair[] = {ov(0, 1), ov(1, 0)};
    const double h1 = hypervolume(single, ov(1, 1)), h2 = hypervolume(pair, ov(2, 2));
    Rng rng(106), mc(107);
    int outside = 0;
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
        const int n = 1 + s % 12;
        std::vector<double> xs, ts;
        for (int i = 0; i < n; ++i) {
            xs.push_back(uniform(rng, 0, 1));
            ts.push_back(uniform(rng, 0, 1));
        }
        std::sort(xs.begin(), xs.end());
        std::sort(ts.begin(), ts.end(), std::greater<>());
        std::vector<ObjectiveVector> front;
        for (int i = 0; i < n; ++i) front.push_back(ov(xs[static_cast<std::size_t>(i)], ts[static_cast<std::size_t>(i)]));
        const ObjectiveVector ref = ov(1.2, 1.2);
        const double exact = hypervolume(front, ref);
        const auto [estimate, sigma] = oracle::mc_hypervolume(front, ov(0, 0), ref, 1000000, mc);
        const double z = std::abs(exact - estimate) / sigma;
        worst = std::max(worst, z);
        if (std::abs(exact - estimate) > 3.0 * sigma) ++outside;
    }
    return {h1 == 1.0 && h2 == 3.0 && outside == 0,
            format("hand cases %g and %g; %d/50 fronts outside 3 sigma (worst %.2f sigma)", h1, h2, outside, worst)};
}

Outcome optimizer_effectiveness() {
    const CampaignConfig c = shipped("general_target3");
    std::vector<double> tpe_hv, random_hv;
    int scara = 0;
    double slowest = 0.0;
    bool same_reference = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Stopwatch clock;
        const CampaignResult tpe = run_campaign(spec_for(c, 4, seed, 2000, SamplerKind::tpe));
        slowest = std::max(slowest, clock.seconds());
        const CampaignResult rnd = run_campaign(spec_for(c, 4, seed, 2000, SamplerKind::random));

        bool found = false;
        for (const auto& m : tpe.study.archive().members())
            if (m.objectives.e_tau < 1e-6 && m.objectives.e_x < 0.05) found = true;
        scara += found;

        // Both runs share their start-up window, hence the reference point.
        const auto& ref = tpe.study.reference();
        const auto& rref = rnd.study.reference();
        if (!ref || !rref || ref->e_x != rref->e_x || ref->e_tau != rref->e_tau) same_reference = false;
        tpe_hv.push_back(tpe.study.archive().hypervolume());
        random_hv.push_back(rnd.study.archive().hypervolume());
        std::printf("  seed %2llu: scara %s, hypervolume tpe %.6g random %.6g\n", static_cast<unsigned long long>(seed),
                    found ? "yes" : "no", tpe_hv.back(), random_hv.back());
        std::fflush(stdout);
    }
    const double mt = median(tpe_hv), mr = median(random_hv);
    return {scara >= 8 && mt > mr && same_reference && slowest < 900.0,
            format("SCARA-type design on the front in %d/10 seeds; median hypervolume tpe %.6g vs random %.6g%s; "
                   "slowest seed %.0f s",
                   scara, mt, mr, same_reference ? "" : " (reference points differ)", slowest)};
}

Outcome joint_count_effect() {
    const CampaignConfig c = shipped("general_target1");
    std::vector<double> ratios, best2, best3;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        double best[2];
        for (int n : {2, 3}) {
            const CampaignResult r = run_campaign(spec_for(c, n, seed, 2000, SamplerKind::tpe));
            double b = std::numeric_limits<double>::infinity();
            for (const auto& t : r.study.trials())
                if (t.objectives.feasible) b = std::min(b, t.objectives.e_x);
            best[n - 2] = b;
        }
        best2.push_back(best[0]);
        best3.push_back(best[1]);
        ratios.push_back(best[0] / best[1]);
        std::printf("  seed %2llu: best e_x n=2 %.6g, n=3 %.6g\n", static_cast<unsigned long long>(seed), best[0],
                    best[1]);
        std::fflush(stdout);
    }
    const double m = median(ratios);
    return {m >= 5.0, format("median per-seed ratio %.4g (medians: n=2 %.4g m, n=3 %.4g m)", m, median(best2),
                             median(best3))};
}

// Small campaigns of both design grammars, written to disk.
std::vector<std::pair<fs::path, IkOptions>> write_campaigns(const std::string& tag) {
    std::vector<std::pair<fs::path, IkOptions>> dirs;
    for (const char* name : {"general_target3", "module_target1"}) {
        CampaignConfig c = shipped(name);
        c.trials = 300;
        c.n_joints = {3};
        c.out = scratch(tag + "_" + name);
        for (const auto& s : run_optimize(c)) dirs.emplace_back(s.dir, c.ik);
    }
    return dirs;
}

Outcome determinism() {
    const auto a = write_campaigns("det_a"), b = write_campaigns("det_b");
    int differing = 0, compared = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (const char* f : {"trials.csv", "scatter.svg", "skeletons.svg"}) {
            ++compared;
            const std::string text = slurp(a[i].first / f);
            if (text.empty() || text != slurp(b[i].first / f)) ++differing;
        }
    return {differing == 0, format("%d/%d files differ between repeated runs", differing, compared)};
}

Outcome urdf_round_trip() {
    Rng rng(110);
    double worst_fk = 0.0;
    for (int s = 0; s < 20; ++s) {
        const KinematicModel m = random_design(rng, 1 + s % 4, s % 2 == 1);
        const KinematicModel back = parse_urdf(export_urdf(m, "m"));
        if (back.dof() != m.dof()) return {false, format("model %d lost joints in the round trip", s)};
        for (int p = 0; p < 100; ++p) {
            const VecX t = random_pose(rng, m);
            worst_fk = std::max(worst_fk,
                                (forward_kinematics(m, t).tip.position - forward_kinematics(back, t).tip.position).norm());
        }
    }

    double worst_obj = 0.0;
    int members = 0;
    for (const auto& [dir, ik] : write_campaigns("urdf")) {
        const nlohmann::json pareto = nlohmann::json::parse(slurp(dir / "pareto.json"));
        for (const auto& m : pareto["front"]) {
            const EvaluationReport r = run_evaluate(dir / m["urdf"].get<std::string>(), dir / "targets.json",
                                                    m["seed"].get<std::uint64_t>(), ik);
            worst_obj = std::max({worst_obj, std::abs(r.objectives.e_x - m["e_x"].get<double>()),
                                  std::abs(r.objectives.e_tau - m["e_tau"].get<double>())});
            ++members;
        }
    }
    return {worst_fk < 1e-9 && worst_obj < 1e-9 && members > 0,
            format("max FK deviation %.3g m over 20 models x 100 poses; %d front members re-evaluated, max objective "
                   "deviation %.3g",
                   worst_fk, members, worst_obj)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::function<Outcome()>> checks{
        {1, statics_gradient}, {2, zero_torque},          {3, cantilever},          {4, ik_round_trip},
        {5, front_oracles},    {6, hypervolume_check},    {7, optimizer_effectiveness}, {8, joint_count_effect},
        {9, determinism},      {10, urdf_round_trip},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (!checks.count(n)) {
            std::fprintf(stderr, "unknown criterion '%s' (expected 1-10)\n", argv[i]);
            return 2;
        }
        selected.push_back(n);
    }
    if (selected.empty())
        for (const auto& [n, f] : checks) selected.push_back(n);

    bool all = true;
    for (int n : selected) {
        Outcome o;
        try {
            o = checks.at(n)();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
