// armsynth command line: optimize, evaluate, export-urdf, report.
#include "armsynth/campaign.hpp"
#include "armsynth/config.hpp"
#include "armsynth/urdf.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <iostream>

namespace {

using namespace armsynth;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kStateError = 3;

int cmd_optimize(const std::string& config_path, const OptimizeOverrides& overrides, bool as_json, bool quiet) {
    const CampaignConfig config = load_campaign_config(config_path);
    ProgressFn progress;
    if (!quiet)
        progress = [](const Trial& t) {
            if ((t.id + 1) % 100 == 0) std::cerr << "  trial " << t.id + 1 << '\n';
        };
    const auto summaries = run_optimize(config, overrides, progress);
    if (as_json) {
        json out = json::array();
        for (const auto& s : summaries)
            out.push_back({{"n_joint", s.n_joint},
                           {"dir", s.dir.string()},
                           {"trials", s.trials},
                           {"feasible", s.feasible},
                           {"front_size", s.front_size},
                           {"best_e_x", s.feasible ? json(s.best_e_x) : json(nullptr)},
                           {"min_e_tau", s.feasible ? json(s.min_e_tau) : json(nullptr)},
                           {"hypervolume", s.hypervolume}});
        std::cout << out.dump(2) << '\n';
        return kOk;
    }
    for (const auto& s : summaries) {
        std::printf("n_joint=%d  trials=%d  feasible=%d  front=%d  hypervolume=%.6g  -> %s\n", s.n_joint, s.trials,
                    s.feasible, s.front_size, s.hypervolume, s.dir.string().c_str());
        if (s.feasible) std::printf("  best E_x = %.6g m, min E_tau = %.6g N m\n", s.best_e_x, s.min_e_tau);
        else std::printf("  no feasible design\n");
    }
    return kOk;
}

int cmd_evaluate(const std::string& urdf, const std::string& targets, std::uint64_t seed,
                 const std::string& config_path, bool as_json) {
    IkOptions ik;
    if (!config_path.empty()) ik = load_campaign_config(config_path).ik;
    const EvaluationReport report = run_evaluate(urdf, targets, seed, ik);
    const auto& o = report.objectives;
    if (as_json) {
        json out;
        out["targets"] = json::array();
        for (std::size_t i = 0; i < o.per_target.size(); ++i) {
            const auto& d = o.per_target[i];
            const auto& s = report.solutions[i];
            out["targets"].push_back({{"position_error", d.position_error},
                                      {"torque_norm", d.torque_norm},
                                      {"converged", d.converged},
                                      {"iterations", s.iterations},
                                      {"angles", std::vector<double>(s.angles.data(), s.angles.data() + s.angles.size())}});
        }
        out["e_x"] = o.e_x;
        out["e_tau"] = o.e_tau;
        std::cout << out.dump(2) << '\n';
        return kOk;
    }
    for (std::size_t i = 0; i < o.per_target.size(); ++i) {
        const auto& d = o.per_target[i];
        std::printf("target %zu: position_error=%.6g m  torque_norm=%.6g N m  converged=%s\n", i + 1, d.position_error,
                    d.torque_norm, d.converged ? "yes" : "no");
    }
    std::printf("E_x = %.17g\nE_tau = %.17g\n", o.e_x, o.e_tau);
    return kOk;
}

int cmd_export(const std::string& campaign, int trial, const std::string& space_path, const std::string& genotype,
               const std::string& out) {
    std::string urdf;
    if (!campaign.empty()) {
        if (trial < 0) throw ParseError("trial", "--trial is required with --campaign");
        urdf = export_campaign_trial(campaign, trial);
    } else {
        if (space_path.empty() || genotype.empty())
            throw ParseError("space", "give either --campaign and --trial, or --space and --genotype");
        SearchSpace space = load_search_space(space_path).space;
        const Genotype g = parse_genotype(read_text_file(genotype, "genotype"));
        space.n_joint = static_cast<int>(g.size());
        try {
            check_structure(space, g);
        } catch (const MalformedGenotype& e) {
            throw ParseError("genotype", e.what());
        }
        urdf = export_urdf(decode(space, g), "design");
    }
    if (out.empty()) std::cout << urdf;
    else write_file_atomic(out, urdf);
    return kOk;
}

int cmd_report(const std::string& dir) {
    const int front = render_report(dir);
    std::printf("rendered %s (front size %d)\n", dir.c_str(), front);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular robot design synthesis: multi-objective TPE over serial-chain designs"};
    app.require_subcommand(1);

    std::string config;
    std::uint64_t seed = 0;
    int trials = 0, jobs = 0;
    std::string out;
    bool as_json = false, quiet = false;

    auto* optimize = app.add_subcommand("optimize", "run a campaign (one per n_joint of the sweep)");
    optimize->add_option("--config", config, "campaign config (JSON)")->required();
    auto* seed_opt = optimize->add_option("--seed", seed, "override the campaign seed");
    auto* trials_opt = optimize->add_option("--trials", trials, "override the trial budget")->check(CLI::PositiveNumber);
    auto* out_opt = optimize->add_option("--out", out, "override the output directory");
    auto* jobs_opt = optimize->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    optimize->add_flag("--json", as_json, "machine-readable summary");
    optimize->add_flag("--quiet", quiet, "no progress output");

    std::string urdf, targets, eval_config;
    std::uint64_t eval_seed = 0;
    bool eval_json = false;
    auto* evaluate = app.add_subcommand("evaluate", "evaluate a URDF model against a target set");
    evaluate->add_option("urdf,--urdf", urdf, "model file")->required();
    evaluate->add_option("--targets", targets, "target set (JSON)")->required();
    evaluate->add_option("--seed", eval_seed, "IK restart seed (the trial seed for logged designs)");
    evaluate->add_option("--config", eval_config, "campaign config whose ik block to use");
    evaluate->add_flag("--json", eval_json, "machine-readable output");

    std::string campaign, space_path, genotype, export_out;
    int trial = -1;
    auto* exporter = app.add_subcommand("export-urdf", "write the URDF of a logged trial or of a genotype file");
    exporter->add_option("--campaign", campaign, "completed campaign directory");
    exporter->add_option("--trial", trial, "trial id within the campaign");
    exporter->add_option("--space", space_path, "search-space file");
    exporter->add_option("--genotype", genotype, "genotype file (JSON)");
    exporter->add_option("--out", export_out, "output file (default: stdout)");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "regenerate the SVG report of a completed campaign");
    report->add_option("campaign,--campaign", report_dir, "campaign directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (*optimize) {
            OptimizeOverrides o;
            if (*seed_opt) o.seed = seed;
            if (*trials_opt) o.trials = trials;
            if (*out_opt) o.out = out;
            if (*jobs_opt) o.jobs = jobs;
            return cmd_optimize(config, o, as_json, quiet || as_json);
        }
        if (*evaluate) return cmd_evaluate(urdf, targets, eval_seed, eval_config, eval_json);
        if (*exporter) return cmd_export(campaign, trial, space_path, genotype, export_out);
        if (*report) return cmd_report(report_dir);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const StateError& e) {
        std::cerr << "state error: " << e.what() << '\n';
        return kStateError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}
