// Batch front end: run / sweep / verify subcommands with CSV + JSON outputs.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error,
// 3 internal invariant violation.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adeff/adeff.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void reject_unknown_fields(const json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw config_error(where + ": unknown field \"" + key + "\"");
    }
}

template <typename T>
T require_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw config_error(where + ": missing required field \"" + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(where + ": field \"" + key + "\" has the wrong type");
    }
}

adeff::EnvironmentSpec parse_environment(const json& obj) {
    reject_unknown_fields(obj, {"kind", "means", "drift_period", "file", "losses"},
                          "environment");
    adeff::EnvironmentSpec env;
    env.kind = require_field<std::string>(obj, "kind", "environment");
    if (env.kind == "bernoulli" || env.kind == "drifting" ||
        (env.kind == "bandit" && obj.contains("means")))
        env.means = require_field<std::vector<double>>(obj, "means", "environment");
    if (env.kind == "drifting")
        env.drift_period = require_field<std::size_t>(obj, "drift_period", "environment");
    if (env.kind == "matrix" || (env.kind == "bandit" && !obj.contains("means"))) {
        if (obj.contains("file"))
            env.matrix = adeff::load_loss_csv(obj.at("file").get<std::string>());
        else
            env.matrix = require_field<std::vector<std::vector<double>>>(obj, "losses",
                                                                         "environment");
    }
    return env;
}

adeff::ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    reject_unknown_fields(
        doc, {"algorithm", "N", "M", "T", "repetitions", "base_seed", "environment"},
        "config");

    adeff::ExperimentConfig cfg;
    cfg.n_experts = require_field<std::size_t>(doc, "N", "config");
    cfg.budget = require_field<std::size_t>(doc, "M", "config");
    cfg.horizon = require_field<std::size_t>(doc, "T", "config");
    cfg.repetitions = require_field<std::size_t>(doc, "repetitions", "config");
    cfg.base_seed = require_field<std::uint64_t>(doc, "base_seed", "config");
    const auto algo = require_field<std::string>(doc, "algorithm", "config");
    if (algo == "advice-efficient")
        cfg.algorithm = adeff::AlgorithmKind::advice_efficient;
    else if (algo == "full-info-baseline")
        cfg.algorithm = adeff::AlgorithmKind::full_info_baseline;
    else
        throw config_error("config: unknown algorithm \"" + algo + "\"");
    if (!doc.contains("environment"))
        throw config_error("config: missing required field \"environment\"");
    cfg.environment = parse_environment(doc.at("environment"));
    try {
        cfg.validate();
    } catch (const adeff::invalid_input& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

void write_regret_csv(const fs::path& path, const adeff::ExperimentResult& result) {
    std::ofstream out(path);
    out << "round,mean_regret,std_regret,min,max,bound\n";
    for (std::size_t t = 0; t < result.mean_regret.size(); ++t)
        out << (t + 1) << ',' << fmt(result.mean_regret[t]) << ','
            << fmt(result.std_regret[t]) << ',' << fmt(result.min_regret[t]) << ','
            << fmt(result.max_regret[t]) << ',' << fmt(result.bound[t]) << '\n';
}

json summary_json(const adeff::ExperimentConfig& cfg, const adeff::ExperimentResult& r) {
    const std::size_t last = r.mean_regret.size() - 1;
    return json{{"N", cfg.n_experts},
                {"M", cfg.budget},
                {"T", cfg.horizon},
                {"repetitions", cfg.repetitions},
                {"final_mean_regret", r.mean_regret[last]},
                {"final_std_regret", r.std_regret[last]},
                {"final_min_regret", r.min_regret[last]},
                {"final_max_regret", r.max_regret[last]},
                {"final_bound", r.bound[last]},
                {"best_experts", r.best_experts},
                {"ledger", {{"max_distinct_per_round", r.ledger_max_per_round},
                            {"total_queries", r.ledger_total}}}};
}

void write_manifest(const fs::path& path, const std::string& command, const json& config_echo,
                    const adeff::ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs) {
    std::vector<std::uint64_t> seeds;
    for (std::size_t r = 0; r < cfg.repetitions; ++r)
        seeds.push_back(cfg.base_seed + r);
    const auto now = std::chrono::system_clock::now();
    json manifest{{"command", command},
                  {"version", kVersion},
                  {"timestamp_unix", std::chrono::duration_cast<std::chrono::seconds>(
                                         now.time_since_epoch())
                                         .count()},
                  {"config", config_echo},
                  {"seeds", seeds},
                  {"outputs", outputs}};
    std::ofstream out(path);
    out << manifest.dump(2) << '\n';
}

json echo_config(const std::string& path) {
    std::ifstream in(path);
    return json::parse(in);
}

fs::path resolve_out_dir(std::string out_dir) {
    if (out_dir.empty()) {
        if (const char* env = std::getenv("ADEFF_OUT"))
            out_dir = env;
        else
            out_dir = ".";
    }
    fs::create_directories(out_dir);
    return out_dir;
}

int cmd_run(const std::string& config_path, const std::string& out_dir_arg,
            std::size_t threads) {
    const adeff::ExperimentConfig cfg = load_config(config_path);
    const fs::path out_dir = resolve_out_dir(out_dir_arg);

    const adeff::ExperimentResult result = adeff::run_repeated(cfg, threads);

    const fs::path regret_path = out_dir / "regret.csv";
    const fs::path summary_path = out_dir / "summary.json";
    const fs::path manifest_path = out_dir / "manifest.json";
    write_regret_csv(regret_path, result);
    {
        std::ofstream out(summary_path);
        out << summary_json(cfg, result).dump(2) << '\n';
    }
    write_manifest(manifest_path, "run", echo_config(config_path), cfg,
                   {regret_path.string(), summary_path.string(), manifest_path.string()});
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::size_t>& m_values,
              const std::string& out_dir_arg, std::size_t threads) {
    if (m_values.empty())
        throw config_error("sweep: no M values given");
    const adeff::ExperimentConfig cfg = load_config(config_path);
    for (std::size_t m : m_values)
        if (m < 1 || m > cfg.n_experts)
            throw config_error("sweep: M value out of range: " + std::to_string(m));
    const fs::path out_dir = resolve_out_dir(out_dir_arg);

    const std::vector<adeff::ExperimentResult> results =
        adeff::sweep_budget(cfg, m_values, threads);

    std::vector<std::string> outputs;
    for (std::size_t k = 0; k < m_values.size(); ++k) {
        const fs::path p = out_dir / ("regret_M" + std::to_string(m_values[k]) + ".csv");
        write_regret_csv(p, results[k]);
        outputs.push_back(p.string());
    }
    const fs::path combined = out_dir / "sweep_summary.csv";
    {
        std::ofstream out(combined);
        out << "M,final_mean_regret,final_bound\n";
        for (std::size_t k = 0; k < m_values.size(); ++k) {
            const auto& r = results[k];
            const std::size_t last = r.mean_regret.size() - 1;
            out << m_values[k] << ',' << fmt(r.mean_regret[last]) << ','
                << fmt(r.bound[last]) << '\n';
        }
    }
    outputs.push_back(combined.string());
    const fs::path manifest_path = out_dir / "manifest.json";
    outputs.push_back(manifest_path.string());
    write_manifest(manifest_path, "sweep", echo_config(config_path), cfg, outputs);
    return 0;
}

int cmd_verify(std::size_t max_n, const std::string& out_path, std::uint64_t seed) {
    adeff::Rng rng(seed);
    const std::vector<adeff::verify::CheckResult> checks = adeff::verify::run_suite(max_n, rng);

    json report = json::array();
    bool all_pass = true;
    for (const auto& check : checks) {
        report.push_back({{"check", check.name},
                          {"max_deviation", check.max_deviation},
                          {"threshold", check.threshold},
                          {"pass", check.pass}});
        all_pass = all_pass && check.pass;
        std::cout << (check.pass ? "PASS " : "FAIL ") << check.name
                  << " (max deviation " << fmt(check.max_deviation) << ", threshold "
                  << fmt(check.threshold) << ")\n";
    }
    std::ofstream out(out_path);
    out << report.dump(2) << '\n';
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Advice-efficient prediction with expert advice: batch experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, m_list;
    std::size_t threads = 1;

    auto* run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("--out", out_dir, "Output directory (default $ADEFF_OUT or .)");
    run->add_option("--threads", threads, "Parallel repetitions");

    auto* sweep = app.add_subcommand("sweep", "Run a sweep over M values");
    sweep->add_option("config", config_path, "JSON experiment config")->required();
    sweep->add_option("--m", m_list, "Comma-separated M values")->required();
    sweep->add_option("--out", out_dir, "Output directory (default $ADEFF_OUT or .)");
    sweep->add_option("--threads", threads, "Parallel repetitions");

    std::size_t max_n = 6;
    std::string report_path = "report.json";
    std::uint64_t verify_seed = 20240901;
    auto* verify = app.add_subcommand("verify", "Run the exact verification oracles");
    verify->add_option("--max-n", max_n, "Largest N for enumeration checks (<= 10)");
    verify->add_option("--out", report_path, "JSON report path");
    verify->add_option("--seed", verify_seed, "RNG seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run)
            return cmd_run(config_path, out_dir, threads);
        if (*sweep) {
            std::vector<std::size_t> m_values;
            std::stringstream ss(m_list);
            std::string tok;
            while (std::getline(ss, tok, ','))
                m_values.push_back(std::stoul(tok));
            return cmd_sweep(config_path, m_values, out_dir, threads);
        }
        if (*verify)
            return cmd_verify(max_n, report_path, verify_seed);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const adeff::invalid_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const adeff::invariant_violation& e) {
        std::cerr << "internal invariant violation: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
