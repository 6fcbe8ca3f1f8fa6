// runavg: command-line front end for iterated running averages, minimal-order
// detection, and Laplace/z-domain limit verification.
//
// Exit codes: 0 success, 2 config/data error, 3 no converging order found,
// 4 time/transform disagreement.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "runavg/runavg.hpp"
#include "runavg/serde.hpp"

namespace fs = std::filesystem;
using runavg::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotFound = 3;
constexpr int kExitDisagree = 4;

struct Options {
    std::string config_path;
    std::string out_override;
    std::string format;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw runavg::config_error("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw runavg::config_error("config " + path + ": " + e.what());
    }
}

fs::path resolve_output_dir(const Options& opt, const json& cfg) {
    if (!opt.out_override.empty()) return opt.out_override;
    if (cfg.contains("output_dir")) return cfg.at("output_dir").get<std::string>();
    if (const char* env = std::getenv("RUNAVG_OUT_DIR")) return env;
    return ".";
}

runavg::UniformGrid grid_from_config(const json& cfg) {
    if (!cfg.contains("grid")) throw runavg::config_error("config needs a 'grid' object {dt, T}");
    const json& g = cfg.at("grid");
    const double dt = g.at("dt").get<double>();
    const double T = g.at("T").get<double>();
    if (!(dt > 0.0) || !(T > 0.0)) throw runavg::config_error("grid: dt and T must be > 0");
    if (T / dt > 1e8) throw runavg::config_error("grid: T/dt exceeds 1e8 samples");
    return runavg::UniformGrid::from_span(dt, T);
}

/// Input signal: exactly one of config.spec / config.input.
struct SignalInput {
    runavg::UniformSignal signal;
    std::optional<runavg::SignalSpec> spec;
};

SignalInput load_signal(const json& cfg) {
    const bool has_spec = cfg.contains("spec");
    const bool has_input = cfg.contains("input");
    if (has_spec == has_input)
        throw runavg::config_error("config needs exactly one of 'spec' or 'input'");
    if (has_spec) {
        const runavg::SignalSpec spec = runavg::spec_from_json(cfg.at("spec"));
        return {runavg::sample_spec(spec, grid_from_config(cfg)), spec};
    }
    return {runavg::read_signal_csv(cfg.at("input").get<std::string>()), std::nullopt};
}

runavg::DetectionPolicy resolve_policy(const json& cfg, const std::optional<runavg::SignalSpec>& spec) {
    runavg::DetectionPolicy base;
    if (spec) base = runavg::default_policy_for(*spec);
    if (cfg.contains("policy")) base = runavg::policy_from_json(cfg.at("policy"), base);
    return base;
}

runavg::LimitLadder resolve_ladder(const json& cfg) {
    runavg::LimitLadder ladder;
    if (cfg.contains("ladder")) ladder = runavg::ladder_from_json(cfg.at("ladder"), ladder);
    return ladder;
}

json config_echo(const json& cfg, const runavg::DetectionPolicy& policy, const runavg::LimitLadder& ladder,
                 const fs::path& out_dir) {
    json echo = cfg;
    echo["policy"] = runavg::to_json(policy);
    echo["ladder"] = runavg::to_json(ladder);
    echo["output_dir"] = out_dir.string();
    return echo;
}

/// Flatten the result section into `path,value` CSV rows.
void write_flat_csv(std::ostream& os, const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) write_flat_csv(os, v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) write_flat_csv(os, j[i], prefix + "[" + std::to_string(i) + "]");
    } else {
        os << prefix << "," << j.dump() << "\n";
    }
}

int emit_report(const Options& opt, const fs::path& out_dir, const std::string& command, const json& cfg_echo,
                const json& result, std::chrono::steady_clock::time_point started) {
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    json report{{"schema", 1},
                {"tool", "runavg"},
                {"version", RUNAVG_VERSION},
                {"command", command},
                {"config", cfg_echo},
                {"result", result},
                {"timings", {{"wall_ms", elapsed.count()}}}};
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const bool csv = opt.format == "csv";
    const fs::path path = out_dir / (csv ? "report.csv" : "report.json");
    std::ofstream os(path);
    if (!os) throw runavg::io_error("cannot write report to " + path.string());
    if (csv) {
        os << "key,value\n";
        write_flat_csv(os, result, "");
    } else {
        os << report.dump(2) << "\n";
    }
    if (!os) throw runavg::io_error("short write to " + path.string());
    std::cout << path.string() << "\n";
    return kExitOk;
}

/// Tail statistics (mean / sup-inf / max|.|) over the trailing window of a series.
json tail_stats_json(const runavg::UniformSignal& series, const runavg::DetectionPolicy& policy) {
    runavg::DetectionPolicy single = policy;
    single.ladder = 1;
    const auto rungs = runavg::detail::tail_windows(series, single, series.grid().span());
    return {{"mean", rungs.back().mean}, {"oscillation", rungs.back().osc}, {"envelope", rungs.back().env}};
}

int cmd_gen(const Options& opt, const json& cfg) {
    const auto started = std::chrono::steady_clock::now();
    if (!cfg.contains("spec")) throw runavg::config_error("gen: config needs 'spec'");
    const runavg::SignalSpec spec = runavg::spec_from_json(cfg.at("spec"));
    const runavg::UniformSignal signal = runavg::sample_spec(spec, grid_from_config(cfg));
    const fs::path out_dir = resolve_output_dir(opt, cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path path = out_dir / cfg.value("output", "signal.csv");
    runavg::write_signal_csv(path, signal);
    (void)started;
    std::cout << path.string() << "\n";
    return kExitOk;
}

int cmd_avg(const Options& opt, const json& cfg) {
    const auto started = std::chrono::steady_clock::now();
    SignalInput in = load_signal(cfg);
    if (in.signal.grid().t0() != 0.0)
        throw runavg::data_error("avg: input grid must start at t = 0 (got t0 = " +
                                 std::to_string(in.signal.grid().t0()) + ")");
    const int q_max = cfg.value("q_max", 6);
    if (q_max < 1 || q_max > runavg::kMaxAverageOrder)
        throw runavg::config_error("avg: q_max must be in [1, " + std::to_string(runavg::kMaxAverageOrder) + "]");
    const runavg::DetectionPolicy policy = resolve_policy(cfg, in.spec);
    const fs::path out_dir = resolve_output_dir(opt, cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    // Stream level by level; only the previous and current level are alive.
    json levels = json::array();
    runavg::UniformSignal prev = std::move(in.signal);
    for (int q = 1; q <= q_max; ++q) {
        runavg::UniformSignal cur = runavg::running_average(prev);
        const std::string name = "psi_" + std::to_string(q) + ".csv";
        runavg::write_signal_csv(out_dir / name, cur);
        levels.push_back({{"q", q}, {"file", name}, {"tail", tail_stats_json(cur, policy)}});
        prev = std::move(cur);
    }
    const json result{{"levels", levels}};
    return emit_report(opt, out_dir, "avg", config_echo(cfg, policy, {}, out_dir), result, started);
}

int cmd_detect(const Options& opt, const json& cfg) {
    const auto started = std::chrono::steady_clock::now();
    SignalInput in = load_signal(cfg);
    const int q_max = cfg.value("q_max", 6);
    const runavg::DetectionPolicy policy = resolve_policy(cfg, in.spec);
    const runavg::OrderReport report = runavg::minimal_order(in.signal, q_max, policy);
    const fs::path out_dir = resolve_output_dir(opt, cfg);
    const json result{{"order", runavg::to_json(report)}};
    const int rc = emit_report(opt, out_dir, "detect", config_echo(cfg, policy, {}, out_dir), result, started);
    if (rc != kExitOk) return rc;
    return report.found() ? kExitOk : kExitNotFound;
}

int cmd_verify(const Options& opt, const json& cfg) {
    const auto started = std::chrono::steady_clock::now();
    if (!cfg.contains("spec")) throw runavg::config_error("verify: config needs 'spec' (closed-form transform)");
    const runavg::SignalSpec spec = runavg::spec_from_json(cfg.at("spec"));
    const runavg::UniformGrid grid = grid_from_config(cfg);
    const int q_max = cfg.value("q_max", 6);
    const runavg::DetectionPolicy policy = resolve_policy(cfg, spec);
    const runavg::LimitLadder ladder = resolve_ladder(cfg);

    const runavg::CentralEqualityReport report = runavg::verify_central_equality(spec, grid, q_max, policy, ladder);
    const fs::path out_dir = resolve_output_dir(opt, cfg);
    json result{{"central", runavg::to_json(report)},
                {"transform", runavg::to_json(runavg::closed_form_transform(spec))}};
    const int rc = emit_report(opt, out_dir, "verify", config_echo(cfg, policy, ladder, out_dir), result, started);
    if (rc != kExitOk) return rc;
    if (!report.agree) {
        std::cerr << "disagreement: time limit " << report.time_limit << " vs transform limit "
                  << report.laplace_limit << "\n";
        return kExitDisagree;
    }
    return kExitOk;
}

int cmd_lti(const Options& opt, const json& cfg) {
    const auto started = std::chrono::steady_clock::now();
    if (!cfg.contains("lti")) throw runavg::config_error("lti: config needs an 'lti' object {p, omega, horizon, dt}");
    const json& l = cfg.at("lti");
    const int p = l.at("p").get<int>();
    const double omega = l.at("omega").get<double>();
    const double horizon = l.at("horizon").get<double>();
    const double dt = l.value("dt", 1e-3);
    const int q_max = l.value("q_max", p + 2);

    const runavg::MonomialOsc analytic{p, omega, runavg::Phase::sin, 1.0};
    runavg::DetectionPolicy policy = runavg::default_policy_for(runavg::SignalSpec{analytic});
    if (cfg.contains("policy")) policy = runavg::policy_from_json(cfg.at("policy"), policy);

    runavg::ResonantSystem system{{{omega, p + 1}}};
    runavg::InitialConditions ic{{runavg::ic_for_pure_term(p, omega)}};
    const runavg::UniformSignal sim =
        runavg::simulate(system, ic, runavg::UniformGrid::from_span(dt, horizon));

    // Simulated-vs-analytic error series, for plotting and the report.
    std::vector<double> err(sim.size());
    double max_norm_err = 0.0;
    for (std::size_t k = 0; k < sim.size(); ++k) {
        const double t = sim.grid().time(k);
        err[k] = sim[k] - runavg::eval_spec(runavg::SignalSpec{analytic}, t);
        max_norm_err = std::max(max_norm_err, std::abs(err[k]) / (1.0 + runavg::ipow(t, p)));
    }
    const fs::path out_dir = resolve_output_dir(opt, cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    runavg::write_signal_csv(out_dir / "lti_error.csv", runavg::UniformSignal(sim.grid(), std::move(err)));

    const runavg::OrderReport report = runavg::minimal_order(sim, q_max, policy);
    json result{{"order", runavg::to_json(report)},
                {"max_normalized_error", max_norm_err},
                {"error_file", "lti_error.csv"}};
    const int rc = emit_report(opt, out_dir, "lti", config_echo(cfg, policy, {}, out_dir), result, started);
    if (rc != kExitOk) return rc;
    return report.found() ? kExitOk : kExitNotFound;
}

int cmd_zfvt(const Options& opt, const json& cfg) {
    const auto started = std::chrono::steady_clock::now();
    if (!cfg.contains("ztransform"))
        throw runavg::config_error("zfvt: config needs a 'ztransform' object {num, den}");
    const json& z = cfg.at("ztransform");
    const auto num = z.at("num").get<std::vector<double>>();
    const auto den = z.at("den").get<std::vector<double>>();
    const runavg::LimitLadder ladder = resolve_ladder(cfg);
    const runavg::LimitEstimate est = runavg::z_side_limit(num, den, ladder);
    const fs::path out_dir = resolve_output_dir(opt, cfg);
    const json result{{"z_limit", runavg::to_json(est)}};
    return emit_report(opt, out_dir, "zfvt", config_echo(cfg, {}, ladder, out_dir), result, started);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterated running averages and final-value limit checks"};
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
        sub->add_option("--out", opt.out_override, "output directory (overrides config and RUNAVG_OUT_DIR)");
        sub->add_option("--format", opt.format, "report format: json (default) or csv")
            ->check(CLI::IsMember({"json", "csv", ""}));
    };
    CLI::App* gen = app.add_subcommand("gen", "sample a signal spec to CSV");
    CLI::App* avg = app.add_subcommand("avg", "write iterated running-average series");
    CLI::App* detect = app.add_subcommand("detect", "find the minimal converging averaging order");
    CLI::App* verify = app.add_subcommand("verify", "compare time-domain and transform-domain limits");
    CLI::App* lti = app.add_subcommand("lti", "simulate a resonant system and detect its order");
    CLI::App* zfvt = app.add_subcommand("zfvt", "discrete final value of a rational z-transform");
    for (CLI::App* sub : {gen, avg, detect, verify, lti, zfvt}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        const json cfg = load_config(opt.config_path);
        if (cfg.contains("format") && opt.format.empty()) opt.format = cfg.at("format").get<std::string>();
        if (gen->parsed()) return cmd_gen(opt, cfg);
        if (avg->parsed()) return cmd_avg(opt, cfg);
        if (detect->parsed()) return cmd_detect(opt, cfg);
        if (verify->parsed()) return cmd_verify(opt, cfg);
        if (lti->parsed()) return cmd_lti(opt, cfg);
        if (zfvt->parsed()) return cmd_zfvt(opt, cfg);
    } catch (const runavg::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
