#pragma once

#include "armsynth/config.hpp"
#include "armsynth/design_space.hpp"
#include "armsynth/evaluation.hpp"
#include "armsynth/study.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace armsynth {

/// Raised when a command finds on-disk state it cannot work with, such as
/// an unfinished campaign directory.
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One fully resolved campaign for a single joint count.
struct CampaignSpec {
    SearchSpace space;
    TargetSet targets;
    int trials{2000};
    std::uint64_t seed{0};
    IkOptions ik;
    SamplerSettings sampler;
    SamplerKind sampler_kind{SamplerKind::tpe};
    int batch{1};
    int jobs{1};
};

struct CampaignResult {
    Study study;
    /// IK joint angles per trial and target; empty for infeasible trials.
    std::vector<std::vector<VecX>> angles;
};

/// Objectives of one design: penalized when validation fails, otherwise
/// decoded and evaluated with `seed` driving the IK restarts.
ObjectiveVector evaluate_design(const SearchSpace& space, const TargetSet& targets, const IkOptions& ik,
                                const Genotype& g, std::uint64_t seed, std::vector<VecX>* angles = nullptr);

/// Sampler seed of the campaign with `n_joint` joints in a sweep seeded with
/// `seed`. Independent of the sweep order.
std::uint64_t campaign_seed(std::uint64_t seed, int n_joint);

using ProgressFn = std::function<void(const Trial&)>;

/// sample -> validate -> decode -> evaluate -> tell, `spec.trials` times.
/// Evaluations of a batch run on up to `spec.jobs` threads; results are told
/// in ask order, so the outcome does not depend on `jobs`.
CampaignResult run_campaign(const CampaignSpec& spec, const ProgressFn& progress = {});

/// Writes trials.csv, hypervolume.csv, pareto.json, space.json,
/// targets.json, urdf/ for the front members, the SVG report and finally
/// campaign.json marking the directory complete.
void write_campaign(const std::filesystem::path& dir, const CampaignSpec& spec, const CampaignResult& result,
                    const std::string& targets_document);

struct OptimizeOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::filesystem::path> out;
    std::optional<int> jobs;
};

struct CampaignSummary {
    int n_joint{0};
    std::filesystem::path dir;
    int trials{0};
    int feasible{0};
    int front_size{0};
    double best_e_x{0.0};
    double min_e_tau{0.0};
    double hypervolume{0.0};
};

/// Runs every joint count of the sweep as an independent campaign under
/// `out/n_joint_<n>/` and writes `out/summary.json`.
std::vector<CampaignSummary> run_optimize(const CampaignConfig& config, const OptimizeOverrides& overrides = {},
                                          const ProgressFn& progress = {});

/// Regenerates scatter.svg, skeletons.svg and front.csv from the logs of a
/// completed campaign directory. Throws StateError when the campaign is
/// incomplete. Returns the number of front members.
int render_report(const std::filesystem::path& dir);

struct EvaluationReport {
    ObjectiveVector objectives;
    std::vector<IkResult> solutions;
};

/// Evaluates a URDF model against a target file.
EvaluationReport run_evaluate(const std::filesystem::path& urdf, const std::filesystem::path& targets,
                              std::uint64_t seed, const IkOptions& ik);

/// URDF of trial `id` from a completed campaign directory.
std::string export_campaign_trial(const std::filesystem::path& dir, int id);

/// Trials read back from a campaign's trials.csv.
struct LoggedTrial {
    int id{0};
    std::uint64_t seed{0};
    Genotype params;
    double e_x{0.0};
    double e_tau{0.0};
    bool feasible{false};
    int rank{0};
};

std::vector<LoggedTrial> read_trials_csv(const std::filesystem::path& path, const SearchSpace& space);
std::string trials_csv(const Study& study);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace armsynth
