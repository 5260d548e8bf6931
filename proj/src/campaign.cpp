#include "armsynth/campaign.hpp"

#include "armsynth/kinematics.hpp"
#include "armsynth/svg.hpp"
#include "armsynth/urdf.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace armsynth {

namespace {

using nlohmann::json;

constexpr const char* kStatusComplete = "complete";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trial_name(int id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "trial_%05d", id);
    return buf;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json genotype_json(const Genotype& g) { return json::parse(genotype_to_json(g)); }

json read_json(const std::filesystem::path& path, const std::string& field) {
    try {
        return json::parse(read_text_file(path, field));
    } catch (const json::parse_error& e) {
        throw ParseError(field, path.string() + " is not valid JSON: " + e.what());
    }
}

void require_complete(const std::filesystem::path& dir) {
    const auto marker = dir / "campaign.json";
    if (!std::filesystem::exists(marker)) throw StateError(dir.string() + " does not hold a completed campaign");
    json doc;
    try {
        doc = json::parse(read_text_file(marker, "campaign.json"));
    } catch (const std::exception&) {
        throw StateError(marker.string() + " is unreadable");
    }
    if (!doc.is_object() || doc.value("status", "") != kStatusComplete)
        throw StateError(dir.string() + " holds an incomplete campaign");
}

SearchSpace load_campaign_space(const std::filesystem::path& dir) {
    return load_search_space(dir / "space.json").space;
}

// Polyline through base, joint origins and tip for one pose.
std::vector<Vec3> skeleton(const KinematicModel& model, const VecX& theta) {
    const ChainPose pose = forward_kinematics(model, theta);
    std::vector<Vec3> pts{model.base_offset};
    for (const auto& j : pose.joints)
        if (!(j.origin - pts.back()).isZero(0.0)) pts.push_back(j.origin);
    pts.push_back(pose.tip.position);
    return pts;
}

void render_svgs(const std::filesystem::path& dir) {
    const SearchSpace space = load_campaign_space(dir);
    const auto trials = read_trials_csv(dir / "trials.csv", space);
    const json pareto = read_json(dir / "pareto.json", "pareto.json");

    ScatterData scatter;
    scatter.title = pareto.value("label", "") + "  n_joint=" + std::to_string(space.n_joint);
    for (const auto& t : trials) {
        if (t.feasible) scatter.trials.push_back({t.id, t.e_x, t.e_tau});
        else ++scatter.infeasible;
    }
    std::vector<Vec3> targets;
    for (const auto& t : pareto.at("targets")) targets.emplace_back(t[0].get<double>(), t[1].get<double>(), t[2].get<double>());

    std::ostringstream front_csv;
    front_csv << "id,e_x,e_tau\n";
    const auto& front = pareto.at("front");
    for (const auto& m : front) {
        const ObjectivePoint p{m.at("id").get<int>(), m.at("e_x").get<double>(), m.at("e_tau").get<double>()};
        scatter.front.push_back(p);
        front_csv << p.id << ',' << num(p.e_x) << ',' << num(p.e_tau) << '\n';
    }
    if (front.empty()) std::cerr << "warning: " << dir.string() << ": no feasible trial, the front is empty\n";

    constexpr std::size_t kMaxPanels = 8;
    std::vector<Skeleton> designs;
    const std::size_t n = front.size();
    const std::size_t shown = std::min(n, kMaxPanels);
    for (std::size_t k = 0; k < shown; ++k) {
        const std::size_t i = shown == 1 ? 0 : k * (n - 1) / (shown - 1);
        const auto& m = front[i];
        Skeleton s;
        char label[160];
        std::snprintf(label, sizeof label, "trial %d   E_x = %.4g m   E_tau = %.4g N m", m.at("id").get<int>(),
                      m.at("e_x").get<double>(), m.at("e_tau").get<double>());
        s.label = label;
        for (const auto& chain : m.at("skeleton")) {
            std::vector<Vec3> pts;
            for (const auto& p : chain) pts.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
            s.chains.push_back(std::move(pts));
        }
        designs.push_back(std::move(s));
    }

    write_file_atomic(dir / "scatter.svg", scatter_svg(scatter));
    write_file_atomic(dir / "skeletons.svg", skeleton_svg(scatter.title + "  front designs", designs, targets));
    write_file_atomic(dir / "front.csv", front_csv.str());
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

ObjectiveVector evaluate_design(const SearchSpace& space, const TargetSet& targets, const IkOptions& ik,
                                const Genotype& g, std::uint64_t seed, std::vector<VecX>* angles) {
    if (angles) angles->clear();
    const ValidationReport report = validate_genotype(space, g);
    if (!report.feasible()) return penalize(targets, report);
    std::vector<IkResult> solutions;
    ObjectiveVector out = evaluate(decode(space, g), targets, ik, seed, &solutions);
    if (angles)
        for (auto& s : solutions) angles->push_back(std::move(s.angles));
    return out;
}

std::uint64_t campaign_seed(std::uint64_t seed, int n_joint) {
    return derive_seed(seed, {0x63616d70ULL, static_cast<std::uint64_t>(n_joint)});
}

CampaignResult run_campaign(const CampaignSpec& spec, const ProgressFn& progress) {
    if (spec.trials < 1) throw ContractViolation("run_campaign: trials must be >= 1");
    SamplerSettings settings = spec.sampler;
    settings.seed = campaign_seed(spec.seed, spec.space.n_joint);
    settings.uniform_only = spec.sampler_kind == SamplerKind::random;
    CampaignResult result{Study(spec.space, settings), {}};
    Study& study = result.study;
    result.angles.reserve(static_cast<std::size_t>(spec.trials));

    const int batch = std::max(1, spec.batch);
    const int jobs = std::max(1, spec.jobs);
    while (static_cast<int>(study.trials().size()) < spec.trials) {
        const int k = std::min(batch, spec.trials - static_cast<int>(study.trials().size()));
        const auto pending = study.ask_batch(k);
        std::vector<ObjectiveVector> objectives(pending.size());
        std::vector<std::vector<VecX>> angles(pending.size());
        auto work = [&](std::size_t i) {
            objectives[i] = evaluate_design(study.codec().space(), spec.targets, spec.ik, pending[i].params,
                                            pending[i].seed, &angles[i]);
        };
        const int workers = std::min<int>(jobs, static_cast<int>(pending.size()));
        if (workers <= 1) {
            for (std::size_t i = 0; i < pending.size(); ++i) work(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = next++; i < pending.size(); i = next++) work(i);
                    } catch (...) {
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                    }
                });
            for (auto& t : pool) t.join();
            for (const auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const Trial& t = study.tell(pending[i], objectives[i]);
            result.angles.push_back(std::move(angles[i]));
            if (progress) progress(t);
        }
    }
    study.freeze_reference();
    return result;
}

std::string trials_csv(const Study& study) {
    const auto params = study.codec().param_space();
    std::ostringstream os;
    os << "id,seed";
    for (const auto& d : params) os << ',' << d.name;
    os << ",e_x,e_tau,feasible,rank\n";
    for (const auto& t : study.trials()) {
        const ParamVector x = study.codec().encode(t.params);
        os << t.id << ',' << t.seed;
        for (std::size_t i = 0; i < x.size(); ++i) {
            os << ',';
            if (params[i].categorical) os << static_cast<int>(x[i]);
            else os << num(x[i]);
        }
        os << ',' << num(t.objectives.e_x) << ',' << num(t.objectives.e_tau) << ',' << (t.objectives.feasible ? 1 : 0)
           << ',' << t.rank << '\n';
    }
    return os.str();
}

std::vector<LoggedTrial> read_trials_csv(const std::filesystem::path& path, const SearchSpace& space) {
    const std::string text = read_text_file(path, "trials.csv");
    const GenotypeCodec codec(space);
    const auto fields = codec.field_names();
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trials.csv", "empty file");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    std::vector<std::string> expected{"id", "seed"};
    expected.insert(expected.end(), fields.begin(), fields.end());
    for (const char* c : {"e_x", "e_tau", "feasible", "rank"}) expected.emplace_back(c);
    if (header != expected) throw ParseError("trials.csv", "header does not match the campaign's search space");

    std::vector<LoggedTrial> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "trials.csv:" + std::to_string(line_no);
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != expected.size()) throw ParseError(where, "wrong number of columns");
        try {
            LoggedTrial t;
            t.id = std::stoi(cells[0]);
            t.seed = std::stoull(cells[1]);
            ParamVector x;
            for (std::size_t i = 0; i < fields.size(); ++i) x.push_back(std::stod(cells[2 + i]));
            t.params = codec.decode(x);
            const std::size_t o = 2 + fields.size();
            t.e_x = std::stod(cells[o]);
            t.e_tau = std::stod(cells[o + 1]);
            t.feasible = cells[o + 2] == "1";
            t.rank = std::stoi(cells[o + 3]);
            out.push_back(std::move(t));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(where, e.what());
        }
    }
    return out;
}

void write_campaign(const std::filesystem::path& dir, const CampaignSpec& spec, const CampaignResult& result,
                    const std::string& targets_document) {
    const Study& study = result.study;
    const SearchSpace& space = study.codec().space();
    std::filesystem::create_directories(dir / "urdf");
    std::filesystem::remove(dir / "campaign.json");

    write_file_atomic(dir / "trials.csv", trials_csv(study));

    std::ostringstream hv;
    hv << "trials,hypervolume\n";
    const auto& history = study.hypervolume_history();
    for (std::size_t i = 0; i < history.size(); ++i) hv << i + 1 << ',' << num(history[i]) << '\n';
    write_file_atomic(dir / "hypervolume.csv", hv.str());

    const std::string table_file = "connections.json";
    write_file_atomic(dir / "space.json", search_space_to_json(space, table_file));
    if (space.kind == ConfigKind::actuator_module)
        write_file_atomic(dir / table_file, connection_table_to_json(*space.connections));
    write_file_atomic(dir / "targets.json", targets_document);

    json pareto;
    pareto["label"] = spec.targets.label;
    pareto["config_kind"] = to_string(space.kind);
    pareto["n_joint"] = space.n_joint;
    pareto["seed"] = spec.seed;
    pareto["trials"] = study.trials().size();
    pareto["reference"] =
        study.reference() ? json::array({study.reference()->e_x, study.reference()->e_tau}) : json(nullptr);
    pareto["hypervolume"] = study.archive().hypervolume();
    pareto["targets"] = json::array();
    for (const auto& t : spec.targets.targets) pareto["targets"].push_back(vec_json(t.position));
    pareto["front"] = json::array();
    for (const auto& t : study.pareto_front()) {
        const KinematicModel model = decode(space, t.params);
        const std::string name = trial_name(t.id);
        write_file_atomic(dir / "urdf" / (name + ".urdf"), export_urdf(model, name));
        json m;
        m["id"] = t.id;
        m["seed"] = t.seed;
        m["genotype"] = genotype_json(t.params);
        m["e_x"] = t.objectives.e_x;
        m["e_tau"] = t.objectives.e_tau;
        m["per_target"] = json::array();
        for (const auto& d : t.objectives.per_target)
            m["per_target"].push_back(
                {{"position_error", d.position_error}, {"torque_norm", d.torque_norm}, {"converged", d.converged}});
        m["angles"] = json::array();
        m["skeleton"] = json::array();
        for (const auto& theta : result.angles[static_cast<std::size_t>(t.id)]) {
            m["angles"].push_back(std::vector<double>(theta.data(), theta.data() + theta.size()));
            json chain = json::array();
            for (const auto& p : skeleton(model, theta)) chain.push_back(vec_json(p));
            m["skeleton"].push_back(chain);
        }
        m["urdf"] = "urdf/" + name + ".urdf";
        pareto["front"].push_back(m);
    }
    write_file_atomic(dir / "pareto.json", pareto.dump(2) + "\n");

    render_svgs(dir);

    json marker;
    marker["status"] = kStatusComplete;
    marker["n_joint"] = space.n_joint;
    marker["trials"] = study.trials().size();
    marker["seed"] = spec.seed;
    marker["sampler"] = spec.sampler_kind == SamplerKind::tpe ? "tpe" : "random";
    marker["ik"] = {{"tol", spec.ik.tol},
                    {"rot_tol", spec.ik.rot_tol},
                    {"max_iter", spec.ik.max_iter},
                    {"restarts", spec.ik.restarts},
                    {"damping_bias", spec.ik.damping_bias},
                    {"error_clamp", spec.ik.error_clamp},
                    {"rot_weight", spec.ik.rot_weight}};
    write_file_atomic(dir / "campaign.json", marker.dump(2) + "\n");
}

std::vector<CampaignSummary> run_optimize(const CampaignConfig& config, const OptimizeOverrides& overrides,
                                          const ProgressFn& progress) {
    if (config.space_path.empty()) throw ParseError("space", "missing");
    if (config.targets_path.empty()) throw ParseError("targets", "missing");
    const SpaceDocument space_doc = load_search_space(config.space_path);
    const std::string targets_text = read_text_file(config.targets_path, "targets");
    const TargetSet targets = load_targets(targets_text);
    if (targets.kind != space_doc.space.kind)
        throw ParseError("config_kind", "target set is for '" + to_string(targets.kind) + "' but the search space is '" +
                                            to_string(space_doc.space.kind) + "'");

    const std::filesystem::path out = overrides.out.value_or(config.out);
    std::vector<int> sweep = config.n_joints;
    if (sweep.empty()) sweep.push_back(space_doc.space.n_joint);

    std::vector<CampaignSummary> summaries;
    json summary_doc = json::array();
    for (int n : sweep) {
        CampaignSpec spec;
        spec.space = space_doc.space;
        spec.space.n_joint = n;
        if (!space_doc.has_base_range) spec.space.base = targets.base_range;
        spec.targets = targets;
        spec.trials = overrides.trials.value_or(config.trials);
        spec.seed = overrides.seed.value_or(config.seed);
        spec.ik = config.ik;
        spec.sampler = config.sampler;
        spec.sampler_kind = config.sampler_kind;
        spec.batch = config.batch;
        spec.jobs = overrides.jobs.value_or(config.jobs);

        const auto result = run_campaign(spec, progress);
        const auto dir = out / ("n_joint_" + std::to_string(n));
        write_campaign(dir, spec, result, targets_text);

        CampaignSummary s;
        s.n_joint = n;
        s.dir = dir;
        s.trials = static_cast<int>(result.study.trials().size());
        s.best_e_x = std::numeric_limits<double>::infinity();
        s.min_e_tau = std::numeric_limits<double>::infinity();
        for (const auto& t : result.study.trials()) {
            if (!t.objectives.feasible) continue;
            ++s.feasible;
            s.best_e_x = std::min(s.best_e_x, t.objectives.e_x);
            s.min_e_tau = std::min(s.min_e_tau, t.objectives.e_tau);
        }
        s.front_size = static_cast<int>(result.study.archive().size());
        s.hypervolume = result.study.archive().hypervolume();
        summaries.push_back(s);

        json entry{{"n_joint", n},         {"dir", dir.filename().string()}, {"trials", s.trials},
                   {"feasible", s.feasible}, {"front_size", s.front_size},   {"hypervolume", s.hypervolume}};
        entry["best_e_x"] = s.feasible ? json(s.best_e_x) : json(nullptr);
        entry["min_e_tau"] = s.feasible ? json(s.min_e_tau) : json(nullptr);
        summary_doc.push_back(entry);
    }
    write_file_atomic(out / "summary.json", json{{"campaigns", summary_doc}}.dump(2) + "\n");
    return summaries;
}

int render_report(const std::filesystem::path& dir) {
    require_complete(dir);
    render_svgs(dir);
    return static_cast<int>(read_json(dir / "pareto.json", "pareto.json").at("front").size());
}

EvaluationReport run_evaluate(const std::filesystem::path& urdf, const std::filesystem::path& targets,
                              std::uint64_t seed, const IkOptions& ik) {
    const KinematicModel model = load_urdf(urdf);
    const TargetSet set = load_targets_file(targets);
    EvaluationReport report;
    report.objectives = evaluate(model, set, ik, seed, &report.solutions);
    return report;
}

std::string export_campaign_trial(const std::filesystem::path& dir, int id) {
    require_complete(dir);
    const SearchSpace space = load_campaign_space(dir);
    for (const auto& t : read_trials_csv(dir / "trials.csv", space))
        if (t.id == id) return export_urdf(decode(space, t.params), trial_name(id));
    throw ParseError("trial", "no trial " + std::to_string(id) + " in " + dir.string());
}

}  // namespace armsynth
