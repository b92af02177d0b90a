#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locsvm/config.hpp"

namespace locsvm::cli {

enum ExitCode : int { kOk = 0, kBoundViolation = 1, kInputError = 2, kConvergenceError = 3 };

namespace detail {
template <class... Args>
std::string format(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}
}  // namespace detail

struct TrainOutput {
    Dataset data;
    ComposedModel model;
    std::string summary;
};

/// Human-readable model summary: region sizes, H-norms and their analytic bound margins.
inline std::string summarize(const ComposedModel& model, const Dataset& data) {
    std::ostringstream out;
    const auto nb = model.size();
    out << (nb == 1 ? "model: global (B = 1)\n" : "model: composed (B = " + std::to_string(nb) + ")\n");
    out << "loss: " << loss_name(model.loss) << '\n';
    out << "scheme: " << weight_kind_name(model.scheme.kind);
    if (model.scheme.kind == WeightKind::SmoothBump) out << detail::format(" (h = %.6g)", model.scheme.bandwidth);
    out << '\n';
    out << detail::format("n: %d, dim: %d, tau: %.6g\n", static_cast<int>(data.size()), static_cast<int>(data.dim()),
                          model.scheme.partition.overlap_factor);
    const Points probes = make_probes(data.x, 0);
    out << "region  n_b  lambda    kernel                h_norm      bound       margin\n";
    for (const auto& region : model.scheme.partition.regions) {
        const LocalModel& f = model.local(region.id);
        double ksup = 1.0;
        try {
            ksup = sup_norm_on_region(f.kernel, region, probes).value;
        } catch (const InsufficientDataError&) {
        }
        const double hn = h_norm(f);
        const double bound = h_norm_bound(f, ksup);
        std::string kernel(family_name(f.kernel.family));
        if (f.kernel.family == KernelFamily::GaussianRBF) kernel += detail::format("(%.3g)", f.kernel.gamma);
        if (f.kernel.family == KernelFamily::Polynomial) {
            kernel += detail::format("(%d, %.3g)", f.kernel.degree, f.kernel.offset);
        }
        out << detail::format("%-7d %-4d %-9.4g %-21s %-11.6f %-11.6f %.6f%s\n", region.id, static_cast<int>(f.size()),
                              f.lambda, kernel.c_str(), hn, bound, bound - hn,
                              model.is_null_region(region.id) ? "  (null region)" : "");
    }
    out << detail::format("training risk (shifted): %.6f\n", empirical_risk(model, data, true));
    return out.str();
}

/// Regionalizes the configured data and fits the composed model.
inline TrainOutput cmd_train(const ExperimentConfig& cfg) {
    TrainOutput out;
    out.data = load_dataset(cfg);
    const RegionPartition part = regionalize(out.data.x, cfg.partition.b_target, cfg.partition.tau,
                                             cfg.partition.min_region_size, derive_seed(cfg.seed, 1));
    const WeightScheme scheme{cfg.scheme.kind, cfg.scheme.bandwidth, part};
    const auto locals = local_configs(cfg, static_cast<int>(out.data.dim()), part.size());
    out.model = fit_composed(out.data, scheme, locals, cfg.loss, cfg.model.solver);
    out.summary = summarize(out.model, out.data);
    return out;
}

/// Runs the robustness audit of a stored model against the configured data.
inline AuditReport cmd_audit(const ExperimentConfig& cfg, const ComposedModel& model) {
    if (!cfg.audit) throw InputError("config has no 'audit' section");
    const Dataset data = load_dataset(cfg);
    if (model.loss != cfg.loss) throw InputError("model loss differs from config loss");
    if (model.locals.empty() || model.locals.front().kernel.input_dim != data.dim()) {
        throw InputError("model input dimension differs from the data");
    }
    std::vector<DiracPoint> zs = cfg.audit->z;
    for (const auto& z : zs) {
        if (z.x.size() != data.dim()) throw InputError("audit.z: dimension differs from the data");
    }
    if (cfg.audit->z_grid > 0) {
        const auto grid = dirac_grid(data, cfg.loss, cfg.audit->z_grid);
        zs.insert(zs.end(), grid.begin(), grid.end());
    }
    AuditOptions opts;
    opts.eps_ladder = cfg.audit->eps_ladder;
    opts.probe_count = cfg.audit->probe_count;
    opts.maxbias_eps = cfg.audit->maxbias_eps;
    opts.solver = cfg.model.solver;
    return audit(data, std::make_shared<const ComposedModel>(model), zs, opts);
}

struct ExperimentOutput {
    std::string csv;
    Json report;
};

inline ExperimentOutput cmd_experiment(const ExperimentConfig& cfg) {
    if (!cfg.experiment) throw InputError("config has no 'experiment' section");
    SyntheticTask task = *cfg.data.synthetic;
    task.seed = cfg.seed;
    const auto& e = *cfg.experiment;
    const Kernel kernel = cfg.model.kernel.make(task.dim);
    const SchemeParams sp = cfg.scheme;
    ExperimentOutput out;
    char buf[512];
    if (e.kind == ExperimentKind::Consistency) {
        const TrendReport rep = consistency_trend(task, e.n_ladder, e.schedule, cfg.partition, sp, kernel, e.mc_samples,
                                                  cfg.model.solver);
        out.csv = "n,risk,bayes_proxy,global_risk,lambda\n";
        Json rows = Json::array();
        for (const auto& r : rep.rows) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.n, r.risk.mean, r.bayes_proxy,
                          r.global_risk.mean, r.lambda_global);
            out.csv += buf;
            rows.push_back({{"n", r.n},
                            {"risk", r.risk.mean},
                            {"risk_se", r.risk.std_error},
                            {"bayes_proxy", r.bayes_proxy},
                            {"global_risk", r.global_risk.mean},
                            {"global_risk_se", r.global_risk.std_error},
                            {"lambda", r.lambda_global},
                            {"regions", r.regions},
                            {"n_b", r.n_b},
                            {"lambda_b", r.lambda_b}});
        }
        out.report = {{"kind", "consistency"},
                      {"task", std::string(task_name(task.kind))},
                      {"schedule", {{"c", e.schedule.c}, {"beta", e.schedule.beta}}},
                      {"mc_samples", e.mc_samples},
                      {"rows", rows},
                      {"note", "global-vs-local risk ratio is an engineering target, not a theoretical guarantee"}};
    } else {
        const auto rows = tradeoff_sweep(task, e.n, e.lambda_grid, cfg.partition, sp, kernel, e.mc_samples,
                                         cfg.model.solver);
        out.csv = "lambda,risk,if_bound_rough\n";
        Json jr = Json::array();
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.lambda, r.risk.mean, r.if_bound_rough);
            out.csv += buf;
            jr.push_back({{"lambda", r.lambda}, {"risk", r.risk.mean}, {"risk_se", r.risk.std_error},
                          {"if_bound_rough", r.if_bound_rough}});
        }
        out.report = {{"kind", "tradeoff"}, {"task", std::string(task_name(task.kind))}, {"n", e.n},
                      {"mc_samples", e.mc_samples}, {"rows", jr}};
    }
    return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw InputError("cannot write " + p.string());
    f << text;
}

inline std::filesystem::path output_dir(const ExperimentConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (cfg.output_dir) return cfg.base_dir / *cfg.output_dir;
    return ".";
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Localized kernel learning with influence-function audits", "locsvm"};
    app.require_subcommand(1);
    std::string config_path, model_path, out_dir;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--threads", threads, "Worker thread cap (0 = all cores)");
        sub->add_option("--seed", seed, "Override the config seed");
    };
    CLI::App* train_cmd = app.add_subcommand("train", "Fit a composed model");
    add_common(train_cmd);
    CLI::App* audit_cmd = app.add_subcommand("audit", "Audit a model against the influence and maxbias bounds");
    add_common(audit_cmd);
    audit_cmd->add_option("--model", model_path, "Model JSON written by 'train'")->required();
    CLI::App* exp_cmd = app.add_subcommand("experiment", "Run the consistency or trade-off experiment");
    add_common(exp_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        set_max_threads(threads);
        ExperimentConfig cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        const auto dir = detail::output_dir(cfg, out_dir);

        if (train_cmd->parsed()) {
            const TrainOutput t = cmd_train(cfg);
            detail::write_file(dir / "model.json", to_json(t.model).dump(2) + "\n");
            detail::write_file(dir / "summary.txt", t.summary);
            out << t.summary;
            return kOk;
        }
        if (audit_cmd->parsed()) {
            std::ifstream f(model_path);
            if (!f) throw InputError("file not found: " + model_path);
            Json mj;
            try {
                mj = Json::parse(f);
            } catch (const Json::parse_error& e) {
                throw InputError(model_path + ": " + e.what());
            }
            const ComposedModel model = composed_model_from_json(mj);
            const AuditReport rep = cmd_audit(cfg, model);
            detail::write_file(dir / "audit.json", to_json(rep).dump(2) + "\n");
            out << detail::format("if_bound_rough %.6g  if_sup %.6g  if_bound_tv %.6g\n", rep.bounds.if_bound_rough,
                                  rep.if_sup, rep.if_bound_tv);
            if (rep.maxbias) {
                out << detail::format("maxbias_bound %.6g  maxbias_sup %.6g\n", rep.maxbias_bound,
                                      rep.maxbias->empirical_max);
            }
            out << detail::format("decomposition residual %.3g\n", rep.decomposition_residual);
            for (const auto& w : rep.warnings) out << "warning: " << w << '\n';
            out << (rep.satisfied() ? "audit: all bounds satisfied\n" : "audit: BOUND VIOLATED\n");
            return rep.satisfied() ? kOk : kBoundViolation;
        }
        const ExperimentOutput e = cmd_experiment(cfg);
        detail::write_file(dir / "experiment.csv", e.csv);
        detail::write_file(dir / "experiment.json", e.report.dump(2) + "\n");
        out << e.csv;
        return kOk;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what();
        if (e.region_id) err << " (region " << *e.region_id << ")";
        err << '\n';
        return kConvergenceError;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const CoverageError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

}  // namespace locsvm::cli
