#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "locsvm/audit.hpp"
#include "locsvm/csv.hpp"
#include "locsvm/experiments.hpp"
#include "locsvm/serialization.hpp"

namespace locsvm {

/// Kernel family and hyperparameters; input_dim comes from the data.
struct KernelSpec {
    KernelFamily family = KernelFamily::GaussianRBF;
    double gamma = 1.0;
    int degree = 2;
    double offset = 0.0;

    [[nodiscard]] Kernel make(int input_dim) const {
        switch (family) {
            case KernelFamily::GaussianRBF: return Kernel::gaussian_rbf(gamma, input_dim);
            case KernelFamily::Linear: return Kernel::linear(input_dim);
            case KernelFamily::Polynomial: return Kernel::polynomial(degree, offset, input_dim);
        }
        throw InputError("unreachable kernel family");
    }
};

struct RegionModelSpec {
    KernelSpec kernel;
    double lambda = 1.0;
};

struct ModelSpec {
    KernelSpec kernel;
    double lambda = 1.0;
    /// Optional per-region overrides; length must equal the number of regions.
    std::vector<RegionModelSpec> regions;
    TrainConfig solver;
};

struct AuditSpec {
    std::vector<double> eps_ladder{1e-2, 5e-3, 2.5e-3, 1.25e-3};
    int probe_count = 512;
    std::vector<DiracPoint> z;
    /// Points per dimension of a Dirac grid with extreme labels; 0 disables.
    int z_grid = 0;
    /// Negative disables the maxbias probe.
    double maxbias_eps = 0.1;
};

enum class ExperimentKind { Consistency, Tradeoff };

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Consistency;
    std::vector<int> n_ladder{100, 200, 400, 800, 1600};
    LambdaSchedule schedule;
    int n = 400;
    std::vector<double> lambda_grid{2.0, 1.0, 0.5, 0.25, 0.125};
    int mc_samples = 100000;
};

struct DataSpec {
    std::optional<SyntheticTask> synthetic;
    int n = 0;
    std::optional<std::string> csv;
};

struct ExperimentConfig {
    int version = 1;
    std::uint64_t seed = 0;
    DataSpec data;
    PartitionParams partition;
    SchemeParams scheme;
    SmoothLoss loss;
    ModelSpec model;
    std::optional<AuditSpec> audit;
    std::optional<ExperimentSpec> experiment;
    std::optional<std::string> output_dir;
    /// Directory relative paths (CSV) are resolved against.
    std::filesystem::path base_dir = ".";
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw InputError(path + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw InputError(path + ": unknown key '" + key + "'");
    }
}

template <class T>
T get(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw InputError(path + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(path + "." + key + ": wrong type");
    }
}

template <class T>
T get_or(const json& j, const std::string& path, const char* key, T fallback) {
    return j.contains(key) ? get<T>(j, path, key) : fallback;
}

inline KernelSpec parse_kernel_spec(const json& j, const std::string& path) {
    check_keys(j, path, {"family", "gamma", "degree", "offset"});
    KernelSpec k;
    k.family = parse_kernel_family(get<std::string>(j, path, "family"));
    k.gamma = get_or(j, path, "gamma", 1.0);
    k.degree = get_or(j, path, "degree", 2);
    k.offset = get_or(j, path, "offset", 0.0);
    static_cast<void>(k.make(1));
    return k;
}

inline double positive_lambda(const json& j, const std::string& path) {
    const double l = get<double>(j, path, "lambda");
    if (!(l > 0.0)) throw InputError(path + ".lambda: must be positive");
    return l;
}

}  // namespace detail

/// Parses and validates a version-1 config document. Unknown keys are rejected.
inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>") {
    using detail::get;
    using detail::get_or;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(source + ": " + e.what());
    }
    detail::check_keys(j, source, {"version", "seed", "data", "partition", "scheme", "loss", "model", "audit",
                                   "experiment", "output"});
    ExperimentConfig c;
    c.version = get<int>(j, source, "version");
    if (c.version != 1) throw InputError(source + ": unsupported version " + std::to_string(c.version));
    c.seed = get_or<std::uint64_t>(j, source, "seed", 0);
    c.loss = parse_loss(get<std::string>(j, source, "loss"));

    const auto& data = detail::field(j, "data");
    detail::check_keys(data, "data", {"synthetic", "csv"});
    if (data.contains("synthetic") == data.contains("csv")) {
        throw InputError("data: give exactly one of 'synthetic' or 'csv'");
    }
    if (data.contains("csv")) {
        c.data.csv = get<std::string>(data, "data", "csv");
    } else {
        const auto& s = data.at("synthetic");
        detail::check_keys(s, "data.synthetic", {"kind", "noise", "dim", "n", "breakpoints"});
        SyntheticTask t;
        t.kind = parse_task_kind(get<std::string>(s, "data.synthetic", "kind"));
        t.noise = get_or(s, "data.synthetic", "noise", 0.1);
        t.dim = get_or(s, "data.synthetic", "dim", 2);
        t.breakpoints = get_or(s, "data.synthetic", "breakpoints", std::vector<double>{0.0});
        t.validate();
        c.data.n = get<int>(s, "data.synthetic", "n");
        if (c.data.n < 1) throw InputError("data.synthetic.n: must be positive");
        if (t.loss() != c.loss) throw InputError("loss: does not match the synthetic task's label type");
        c.data.synthetic = t;
    }

    if (j.contains("partition")) {
        const auto& p = j.at("partition");
        detail::check_keys(p, "partition", {"b_target", "tau", "min_region_size"});
        c.partition.b_target = get_or(p, "partition", "b_target", 1);
        c.partition.tau = get_or(p, "partition", "tau", 0.0);
        c.partition.min_region_size = get_or(p, "partition", "min_region_size", 1);
        if (c.partition.b_target < 1) throw InputError("partition.b_target: must be positive");
        if (!(c.partition.tau >= 0.0)) throw InputError("partition.tau: must be nonnegative");
        if (c.partition.min_region_size < 1) throw InputError("partition.min_region_size: must be positive");
    } else {
        c.partition = PartitionParams{1, 0.0, 1};
    }

    if (j.contains("scheme")) {
        const auto& s = j.at("scheme");
        detail::check_keys(s, "scheme", {"kind", "bandwidth"});
        c.scheme.kind = parse_weight_kind(get<std::string>(s, "scheme", "kind"));
        c.scheme.bandwidth = get_or(s, "scheme", "bandwidth", 1.0);
        if (!(c.scheme.bandwidth > 0.0)) throw InputError("scheme.bandwidth: must be positive");
    }

    const auto& m = detail::field(j, "model");
    detail::check_keys(m, "model", {"kernel", "lambda", "regions", "solver"});
    c.model.kernel = detail::parse_kernel_spec(detail::field(m, "kernel"), "model.kernel");
    c.model.lambda = detail::positive_lambda(m, "model");
    if (m.contains("regions")) {
        const auto& rs = m.at("regions");
        if (!rs.is_array()) throw InputError("model.regions: expected an array");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const std::string path = "model.regions[" + std::to_string(i) + "]";
            detail::check_keys(rs[i], path, {"kernel", "lambda"});
            RegionModelSpec r;
            r.kernel = rs[i].contains("kernel") ? detail::parse_kernel_spec(rs[i].at("kernel"), path + ".kernel")
                                                : c.model.kernel;
            r.lambda = rs[i].contains("lambda") ? detail::positive_lambda(rs[i], path) : c.model.lambda;
            c.model.regions.push_back(r);
        }
    }
    if (m.contains("solver")) {
        const auto& s = m.at("solver");
        detail::check_keys(s, "model.solver", {"grad_tol", "max_iter", "ridge"});
        c.model.solver.grad_tol = get_or(s, "model.solver", "grad_tol", c.model.solver.grad_tol);
        c.model.solver.max_iter = get_or(s, "model.solver", "max_iter", c.model.solver.max_iter);
        c.model.solver.ridge = get_or(s, "model.solver", "ridge", c.model.solver.ridge);
    }
    c.model.solver.lambda = c.model.lambda;
    validate(c.model.solver);

    if (j.contains("audit")) {
        const auto& a = j.at("audit");
        detail::check_keys(a, "audit", {"eps_ladder", "probe_count", "z", "z_grid", "maxbias_eps"});
        AuditSpec s;
        s.eps_ladder = get_or(a, "audit", "eps_ladder", s.eps_ladder);
        validate(ContaminationSpec{DiracPoint{}, s.eps_ladder});
        if (s.eps_ladder.size() < 2) throw InputError("audit.eps_ladder: need at least 2 values");
        s.probe_count = get_or(a, "audit", "probe_count", s.probe_count);
        if (s.probe_count < 0) throw InputError("audit.probe_count: must be nonnegative");
        s.z_grid = get_or(a, "audit", "z_grid", 0);
        if (s.z_grid < 0) throw InputError("audit.z_grid: must be nonnegative");
        if (a.contains("z")) {
            const auto& zs = a.at("z");
            if (!zs.is_array()) throw InputError("audit.z: expected an array");
            for (std::size_t i = 0; i < zs.size(); ++i) {
                const std::string path = "audit.z[" + std::to_string(i) + "]";
                detail::check_keys(zs[i], path, {"x", "y"});
                DiracPoint z;
                z.x = detail::vector_from(detail::field(zs[i], "x"), path.c_str());
                z.y = get<double>(zs[i], path, "y");
                c.loss.check_label(z.y);
                s.z.push_back(std::move(z));
            }
        }
        s.maxbias_eps = get_or(a, "audit", "maxbias_eps", s.maxbias_eps);
        if (s.maxbias_eps >= 0.5) throw InputError("audit.maxbias_eps: must lie in [0, 1/2)");
        c.audit = s;
    }

    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        detail::check_keys(e, "experiment", {"kind", "n_ladder", "schedule", "n", "lambda_grid", "mc_samples"});
        ExperimentSpec s;
        const auto kind = get<std::string>(e, "experiment", "kind");
        if (kind == "consistency") {
            s.kind = ExperimentKind::Consistency;
        } else if (kind == "tradeoff") {
            s.kind = ExperimentKind::Tradeoff;
        } else {
            throw InputError("experiment.kind: expected 'consistency' or 'tradeoff'");
        }
        s.n_ladder = get_or(e, "experiment", "n_ladder", s.n_ladder);
        if (e.contains("schedule")) {
            const auto& sc = e.at("schedule");
            detail::check_keys(sc, "experiment.schedule", {"c", "beta"});
            s.schedule.c = get_or(sc, "experiment.schedule", "c", 1.0);
            s.schedule.beta = get_or(sc, "experiment.schedule", "beta", 0.25);
        }
        s.schedule.validate();
        s.n = get_or(e, "experiment", "n", s.n);
        s.lambda_grid = get_or(e, "experiment", "lambda_grid", s.lambda_grid);
        s.mc_samples = get_or(e, "experiment", "mc_samples", s.mc_samples);
        if (s.mc_samples < 2) throw InputError("experiment.mc_samples: must be at least 2");
        if (!c.data.synthetic) throw InputError("experiment: requires a synthetic data source");
        c.experiment = s;
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        detail::check_keys(o, "output", {"dir"});
        c.output_dir = get<std::string>(o, "output", "dir");
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("file not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig c = parse_config(ss.str(), path.string());
    c.base_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    return c;
}

inline Dataset load_dataset(const ExperimentConfig& c) {
    if (c.data.csv) {
        std::filesystem::path p(*c.data.csv);
        if (p.is_relative()) p = c.base_dir / p;
        Dataset d = read_csv(p);
        for (Eigen::Index i = 0; i < d.size(); ++i) c.loss.check_label(d.y[i]);
        return d;
    }
    SyntheticTask t = *c.data.synthetic;
    t.seed = c.seed;
    return generate(t, c.data.n);
}

/// Per-region local configs for a partition of `regions` regions.
inline std::vector<LocalConfig> local_configs(const ExperimentConfig& c, int input_dim, std::size_t regions) {
    std::vector<LocalConfig> out;
    if (c.model.regions.empty()) {
        out.push_back({c.model.kernel.make(input_dim), c.model.lambda});
        return out;
    }
    if (c.model.regions.size() != regions) {
        throw InputError("model.regions: " + std::to_string(c.model.regions.size()) + " entries for " +
                         std::to_string(regions) + " regions");
    }
    for (const auto& r : c.model.regions) out.push_back({r.kernel.make(input_dim), r.lambda});
    return out;
}

}  // namespace locsvm
