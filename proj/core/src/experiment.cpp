#include "caflow/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "caflow/catalog.hpp"
#include "caflow/serialize.hpp"

namespace caflow {

using nlohmann::json;

namespace {

VelocitySpec velocity_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "pointwise") return VelocitySpec::pointwise();
        throw ConfigError("velocity string must be 'pointwise'");
    }
    std::string type = j.value("type", "linear");
    if (type == "linear") {
        auto field = [&](const char* name) {
            if (!j.contains(name)) throw ConfigError(std::string("linear velocity needs ") + name);
            const auto& v = j.at(name);
            if (v.is_string()) return parse_rational(v.get<std::string>());
            if (v.is_number_integer()) return Rational(v.get<long long>(), 1);
            throw ConfigError("velocity components must be rational text or integers");
        };
        return VelocitySpec::linear(field("v_minus"), field("v_plus"));
    }
    if (type == "sublinear_pow")
        return VelocitySpec::sublinear_pow(j.value("coef", 1.0), j.value("gamma", 0.5));
    if (type == "sublinear_log") return VelocitySpec::sublinear_log(j.value("coef", 1.0));
    if (type == "pointwise") return VelocitySpec::pointwise();
    throw ConfigError("unknown velocity type: " + type);
}

template <typename T>
std::vector<T> grid_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a non-empty array");
    std::vector<T> out;
    for (const auto& v : j) out.push_back(v.get<T>());
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    ExperimentConfig cfg;
    cfg.experiment_id = j.value("experiment_id", std::string("experiment"));
    if (j.contains("rule")) {
        const auto& r = j.at("rule");
        if (r.is_string())
            cfg.rule_name = r.get<std::string>();
        else if (r.contains("catalog"))
            cfg.rule_name = r.at("catalog").get<std::string>();
        else if (r.contains("file"))
            cfg.rule_file = r.at("file").get<std::string>();
        else
            throw ConfigError("rule must be a catalog name or {file: path}");
    } else {
        throw ConfigError("config needs a 'rule'");
    }
    if (j.contains("measure")) {
        const auto& m = j.at("measure");
        if (m.is_string())
            cfg.measure_preset = m.get<std::string>();
        else if (m.contains("preset"))
            cfg.measure_preset = m.at("preset").get<std::string>();
        else
            cfg.measure_json = m.dump();
    } else {
        throw ConfigError("config needs a 'measure'");
    }
    if (j.contains("p_grid")) cfg.p_grid = grid_from<int>(j.at("p_grid"), "p_grid");
    if (j.contains("n_grid")) cfg.n_grid = grid_from<int>(j.at("n_grid"), "n_grid");
    if (j.contains("delta_grid"))
        cfg.delta_grid = grid_from<double>(j.at("delta_grid"), "delta_grid");
    if (j.contains("velocity")) cfg.velocity = velocity_from_json(j.at("velocity"));
    cfg.base_points = j.value("base_points", cfg.base_points);
    cfg.filter_samples = j.value("filter_samples", cfg.filter_samples);
    cfg.entropy_base_points = j.value("entropy_base_points", cfg.entropy_base_points);
    cfg.mc_samples = j.value("mc_samples", cfg.mc_samples);
    if (!j.contains("seed")) throw ConfigError("config needs an explicit seed");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    std::string mode = j.value("mode", std::string("exact-first"));
    if (mode == "exact-first") {
        cfg.exact_first = true;
    } else if (mode == "mc-only") {
        cfg.exact_first = false;
    } else {
        throw ConfigError("mode must be exact-first or mc-only");
    }
    cfg.mc_allowed = j.value("mc_allowed", true);
    if (j.contains("budget")) {
        const auto& b = j.at("budget");
        cfg.budget.dp_transitions = b.value("dp_transitions", cfg.budget.dp_transitions);
        cfg.budget.max_frontier = b.value("max_frontier", cfg.budget.max_frontier);
        cfg.budget.dfs_nodes = b.value("dfs_nodes", cfg.budget.dfs_nodes);
        cfg.budget.max_words = b.value("max_words", cfg.budget.max_words);
    }
    cfg.jobs = j.value("jobs", 0);
    cfg.reproducible = j.value("reproducible", false);
    cfg.theorem = j.value("theorem", std::string());
    if (j.contains("classify")) {
        const auto& c = j.at("classify");
        cfg.classify_params.n = c.value("n", cfg.classify_params.n);
        cfg.classify_params.base_points = c.value("base_points", cfg.classify_params.base_points);
        cfg.classify_params.horizons = c.value("horizons", cfg.classify_params.horizons);
        cfg.classify_params.first_horizon =
            c.value("first_horizon", cfg.classify_params.first_horizon);
        cfg.classify_params.samples = c.value("samples", cfg.classify_params.samples);
    }
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw ConfigError("n_grid must be increasing");
    for (std::size_t i = 1; i < cfg.delta_grid.size(); ++i)
        if (cfg.delta_grid[i] >= cfg.delta_grid[i - 1])
            throw ConfigError("delta_grid must be decreasing");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

LocalRule resolve_rule(const ExperimentConfig& cfg) {
    if (!cfg.rule_name.empty()) return catalog_rule(cfg.rule_name);
    std::ifstream in(cfg.rule_file);
    if (!in) throw ConfigError("cannot open rule file: " + cfg.rule_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rule_file(ss.str());
}

MeasureModel resolve_measure(const ExperimentConfig& cfg, int k_hint) {
    MeasureModel m = cfg.measure_preset.empty() ? measure_from_json_text(cfg.measure_json)
                                                : preset_measure(cfg.measure_preset, k_hint);
    if (m.k() != k_hint)
        throw ConfigError("measure alphabet size " + std::to_string(m.k()) +
                          " does not match the rule's " + std::to_string(k_hint));
    return m;
}

namespace {

const char* method_name(CountMethod m) {
    switch (m) {
        case CountMethod::dp_exact: return "dp_exact";
        case CountMethod::enumeration: return "enumeration";
        case CountMethod::free_cells: return "free_cells";
        case CountMethod::mc_importance: return "mc_importance";
        case CountMethod::mc_members: return "mc_members";
    }
    return "?";
}

FlowOptions flow_options(const ExperimentConfig& cfg) {
    FlowOptions opts;
    opts.base_points = cfg.base_points;
    opts.filter_samples = cfg.filter_samples;
    opts.budget = cfg.budget;
    opts.mc.importance_samples = cfg.mc_samples;
    opts.exact_first = cfg.exact_first;
    opts.mc_allowed = cfg.mc_allowed;
    opts.jobs = cfg.jobs;
    return opts;
}

json theorem_to_json(const TheoremReport& rep) {
    json j;
    j["theorem"] = rep.theorem;
    j["rule"] = rep.rule_label;
    j["measure"] = rep.measure_label;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["relation"] = rep.relation;
    j["margin"] = rep.margin;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    j["extrapolated"] = rep.extrapolated;
    j["h_sigma"] = rep.h_sigma;
    j["exponent_plus"] = rep.exponent_plus;
    j["exponent_minus"] = rep.exponent_minus;
    j["M_value"] = rep.M_value;
    j["notes"] = rep.notes;
    j["seed"] = rep.seed;
    return j;
}

} // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    LocalRule rule = resolve_rule(cfg);
    MeasureModel m = resolve_measure(cfg, rule.k());
    Rng rng(cfg.seed);
    FlowOptions opts = flow_options(cfg);

    RunArtifacts art;
    art.flow = density_flow(rule, m, cfg.p_grid, cfg.n_grid, cfg.delta_grid, cfg.velocity, opts,
                            rng);

    EntropyOptions eopts;
    eopts.base_points = cfg.entropy_base_points;
    eopts.mc_samples = cfg.mc_samples;
    eopts.budget = cfg.budget;
    for (int p : cfg.p_grid) {
        Rng sub = rng.substream(0xe11, static_cast<std::uint64_t>(p));
        art.entropy.push_back(entropy_F_estimate(rule, m, p, cfg.n_grid, eopts, sub));
    }

    // results.csv: one row per (cell, base point).
    std::ostringstream res;
    res << "experiment_id,rule_label,measure_label,p,n,delta,v_minus,v_plus,count_T,"
           "count_T_filtered,class_log_measure,g_window_log_measure,integrand,M_value,stderr,"
           "mode_flags,samples,seed\n";
    for (const auto& curve : art.flow.curves) {
        for (const auto& cell : curve.cells) {
            for (const auto& pt : cell.points) {
                res << cfg.experiment_id << ',' << rule.label << ',' << m.label() << ','
                    << cell.p << ',' << cell.n << ',' << format_double(cell.delta) << ','
                    << pt.g_minus << ',' << pt.g_plus << ',' << format_double(pt.log_count) << ','
                    << format_double(pt.log_count_filtered) << ',' << "" << ','
                    << format_double(pt.window_log_measure) << ',' << format_double(pt.integrand)
                    << ',' << format_double(cell.M) << ',' << format_double(cell.stderr_est) << ','
                    << method_name(pt.method) << (pt.exact ? "" : "|mc")
                    << (pt.lower_bound ? "|lower_bound" : "") << (pt.clamped ? "|clamped" : "")
                    << ',' << cell.samples << ',' << cfg.seed << "\n";
            }
        }
    }
    art.results_csv = res.str();

    // curves.csv: n vs M per (p, delta).
    std::ostringstream cur;
    cur << "experiment_id,p,delta,n,g_minus,g_plus,M,stderr,eta,exact,lower_bound,fit_limit,"
           "fit_residual\n";
    for (const auto& curve : art.flow.curves) {
        for (const auto& cell : curve.cells) {
            cur << cfg.experiment_id << ',' << curve.p << ',' << format_double(curve.delta) << ','
                << cell.n << ',' << cell.g.g_minus << ',' << cell.g.g_plus << ','
                << format_double(cell.M) << ',' << format_double(cell.stderr_est) << ','
                << format_double(cell.eta) << ',' << (cell.exact ? 1 : 0) << ','
                << (cell.lower_bound ? 1 : 0) << ','
                << format_double(curve.fit.ok ? curve.fit.a : 0.0) << ','
                << format_double(curve.fit.ok ? curve.fit.rms_residual : -1.0) << "\n";
        }
    }
    art.curves_csv = cur.str();

    json summary;
    summary["experiment_id"] = cfg.experiment_id;
    summary["rule"] = rule.label;
    summary["measure"] = m.label();
    summary["velocity"] = cfg.velocity.str();
    summary["seed"] = cfg.seed;
    summary["M_reported"] = art.flow.M_reported;
    summary["M_reported_stderr"] = art.flow.M_reported_stderr;
    summary["M_fit"] = art.flow.M_fit;
    summary["best_p"] = art.flow.best_p;
    summary["exact"] = art.flow.exact;
    summary["lower_bound"] = art.flow.lower_bound;
    summary["clamp_events"] = art.flow.clamp_events;
    json entropies = json::array();
    for (const auto& series : art.entropy) {
        json e;
        e["p"] = series.p;
        e["values"] = series.values;
        e["stderrs"] = series.stderrs;
        e["h_F_fit"] = series.fit.a;
        e["fit_residual"] = series.fit.rms_residual;
        e["invariance_pass"] = series.invariance.pass;
        entropies.push_back(e);
    }
    summary["entropy"] = entropies;
    if (!cfg.reproducible) summary["generated_by"] = "caflow";
    art.summary_json = summary.dump(2) + "\n";
    return art;
}

void write_run_artifacts(const ExperimentConfig& cfg, const RunArtifacts& artifacts) {
    namespace fs = std::filesystem;
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write artifact: " + (dir / name).string());
        out << content;
    };
    write(cfg.experiment_id + "_results.csv", artifacts.results_csv);
    write(cfg.experiment_id + "_curves.csv", artifacts.curves_csv);
    write(cfg.experiment_id + "_summary.json", artifacts.summary_json);
}

VerifyArtifacts verify_experiment(const ExperimentConfig& cfg) {
    if (cfg.theorem.empty()) throw ConfigError("verify needs a theorem (t1|t2i|t2ii|t2iii)");
    LocalRule rule = resolve_rule(cfg);
    MeasureModel m = resolve_measure(cfg, rule.k());
    Rng rng(cfg.seed);

    TheoremOptions opts;
    opts.p_list = cfg.p_grid;
    opts.n_list = cfg.n_grid;
    opts.delta_list = cfg.delta_grid;
    opts.flow = flow_options(cfg);
    opts.entropy.base_points = cfg.entropy_base_points;
    opts.entropy.mc_samples = cfg.mc_samples;
    opts.entropy.budget = cfg.budget;

    VerifyArtifacts art;
    art.report = cfg.theorem == "t1" ? verify_theorem1(rule, m, opts, rng)
                                     : verify_theorem2(rule, m, cfg.velocity, cfg.theorem, opts, rng);
    art.report_json = theorem_to_json(art.report).dump(2) + "\n";

    namespace fs = std::filesystem;
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / (cfg.experiment_id + "_theorem.json"), std::ios::binary);
    if (out) out << art.report_json;
    return art;
}

ClassifyArtifacts classify_experiment(const ExperimentConfig& cfg) {
    LocalRule rule = resolve_rule(cfg);
    MeasureModel m = resolve_measure(cfg, rule.k());
    Rng rng(cfg.seed);
    ClassifyArtifacts art;
    art.report = classify(rule, m, cfg.classify_params, rng);

    json j;
    j["rule"] = art.report.rule_label;
    j["measure"] = art.report.measure_label;
    j["label"] = art.report.label;
    j["seed"] = art.report.seed;
    j["n"] = art.report.params.n;
    json pts = json::array();
    for (const auto& pc : art.report.points) {
        json p;
        p["cylinder_log_measure"] = pc.cylinder_log_measure;
        json curve = json::array();
        for (const auto& est : pc.curve) {
            json e;
            e["horizon"] = est.horizon;
            e["estimate"] = est.estimate;
            e["stderr"] = est.stderr_est;
            curve.push_back(e);
        }
        p["curve"] = curve;
        pts.push_back(p);
    }
    j["points"] = pts;
    art.report_json = j.dump(2) + "\n";

    namespace fs = std::filesystem;
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / (cfg.experiment_id + "_classification.json"), std::ios::binary);
    if (out) out << art.report_json;
    return art;
}

std::string catalog_listing() {
    std::ostringstream out;
    out << "rules:\n";
    for (const auto& e : rule_catalog()) {
        out << "  " << e.name << "  k=" << e.k << " r=" << e.radius
            << (e.bipermutative ? "  bipermutative" : "") << "  " << e.summary << "\n";
    }
    out << "measure presets:\n";
    for (const auto& name : measure_preset_names()) out << "  " << name << "\n";
    return out.str();
}

} // namespace caflow
