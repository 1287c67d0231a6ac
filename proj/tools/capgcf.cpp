#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "capgcf/body.hpp"
#include "capgcf/convex_analysis.hpp"
#include "capgcf/error.hpp"
#include "capgcf/flow_engine.hpp"
#include "capgcf/io.hpp"
#include "capgcf/soliton.hpp"
#include "capgcf/validation.hpp"

namespace fs = std::filesystem;
using namespace capgcf;
using io::Json;

namespace {

enum Exit { kOk = 0, kInvariant = 1, kBadArgs = 2, kAbort = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    int n = 1;
    std::optional<double> theta;
    std::optional<double> theta_deg;
    int nodes = 201;
    std::string mode;
    std::string init = "cap:r=1";
    std::string body;
    std::string out;
    std::optional<double> tmax;
    double alpha = 1.0;
    double lambda = 1.0;
    double tol = 1e-10;
    std::string config;
    std::string suite;
    std::string over = "theta";
    std::vector<double> values;
    std::string flow = "shrink";
    std::vector<double> probes;
    // FlowConfig fields.
    std::optional<double> dt_safety, dt_cap, stop_u_min, stop_rate, blowup_factor;
    std::optional<std::string> recenter;
    std::optional<int> recenter_period, trace_stride;
    std::optional<long> max_steps;
};

// Keys of --config files; identical to the long flag names with '-' as '_'.
void merge_config(Options& o, const Json& j, const CLI::App& app) {
    if (!j.is_object()) throw UsageError("--config: expected a JSON object");
    auto given = [&](const char* flag) { return app.count(std::string("--") + flag) > 0; };
    auto take = [&](const char* key, const char* flag, auto& into) {
        if (!j.contains(key) || given(flag)) return;
        try {
            using T = std::decay_t<decltype(into)>;
            if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string> &&
                          !std::is_same_v<T, std::vector<double>>)
                into = j.at(key).get<typename T::value_type>();
            else
                into = j.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw UsageError(std::string("--config: field '") + key + "' has the wrong type");
        }
    };
    static const std::vector<std::string> known = {
        "n",         "theta",      "theta_deg",       "nodes",        "mode",          "init",       "body",
        "out",       "tmax",       "alpha",           "lambda",       "tol",           "suite",      "over",
        "values",    "flow",       "probes",          "dt_safety",    "dt_cap",        "stop_u_min", "stop_rate",
        "recenter",  "recenter_period", "trace_stride", "blowup_factor", "max_steps"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw UsageError("--config: unknown field '" + key + "'");
    take("n", "n", o.n);
    take("theta", "theta", o.theta);
    take("theta_deg", "theta-deg", o.theta_deg);
    take("nodes", "nodes", o.nodes);
    take("mode", "mode", o.mode);
    take("init", "init", o.init);
    take("body", "body", o.body);
    take("out", "out", o.out);
    take("tmax", "tmax", o.tmax);
    take("alpha", "alpha", o.alpha);
    take("lambda", "lambda", o.lambda);
    take("tol", "tol", o.tol);
    take("suite", "suite", o.suite);
    take("over", "over", o.over);
    take("values", "values", o.values);
    take("flow", "flow", o.flow);
    take("probes", "probes", o.probes);
    take("dt_safety", "dt-safety", o.dt_safety);
    take("dt_cap", "dt-cap", o.dt_cap);
    take("stop_u_min", "stop-u-min", o.stop_u_min);
    take("stop_rate", "stop-rate", o.stop_rate);
    take("recenter", "recenter", o.recenter);
    take("recenter_period", "recenter-period", o.recenter_period);
    take("trace_stride", "trace-stride", o.trace_stride);
    take("blowup_factor", "blowup-factor", o.blowup_factor);
    take("max_steps", "max-steps", o.max_steps);
}

std::optional<double> theta_of(const Options& o) {
    if (o.theta && o.theta_deg) throw UsageError("give either --theta or --theta-deg, not both");
    if (o.theta_deg) return *o.theta_deg * std::numbers::pi / 180.0;
    return o.theta;
}

GridPtr grid_of(const Options& o) {
    const auto theta = theta_of(o);
    if (!theta) throw UsageError("--theta (radians) or --theta-deg is required");
    GridMode mode = o.n == 1 ? GridMode::Full1D : GridMode::Axisymmetric;
    if (!o.mode.empty()) {
        if (o.mode == "full1d" || o.mode == "Full1D")
            mode = GridMode::Full1D;
        else if (o.mode == "axisymmetric" || o.mode == "Axisymmetric")
            mode = GridMode::Axisymmetric;
        else
            throw UsageError("--mode must be full1d or axisymmetric");
    }
    return build_grid(o.n, *theta, o.nodes, mode);
}

std::map<std::string, double> parse_params(const std::string& text, const std::string& spec) {
    std::map<std::string, double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("body '" + spec + "': expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty())
            throw UsageError("body '" + spec + "': '" + value + "' is not a number");
        out[key] = v;
    }
    return out;
}

// cap[:r=…][,x0=…] | random:amp=…,modes=…,seed=… | file:path | path.json
CapillaryBody make_body(const std::string& spec, const Options& o) {
    if (spec.rfind("file:", 0) == 0) return io::load_body(spec.substr(5)).body;
    if (spec.size() > 5 && spec.ends_with(".json")) return io::load_body(spec).body;
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const auto params = parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1), spec);
    auto get = [&](const char* key, double fallback) {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    auto allow = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : params)
            if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
                throw UsageError("body '" + spec + "': unknown key '" + k + "'");
    };
    if (kind == "cap") {
        allow({"r", "x0"});
        return cap_body(grid_of(o), get("r", 1.0), get("x0", 0.0));
    }
    if (kind == "random") {
        allow({"amp", "modes", "seed"});
        const double modes = get("modes", 3);
        const double seed = get("seed", 0);
        if (modes < 1 || modes != std::floor(modes)) throw UsageError("random: modes must be a positive integer");
        if (seed < 0 || seed != std::floor(seed)) throw UsageError("random: seed must be a non-negative integer");
        return random_body(grid_of(o), get("amp", 0.1), static_cast<int>(modes), static_cast<std::uint64_t>(seed));
    }
    throw UsageError("unknown body '" + spec + "' (cap:..., random:..., file:path)");
}

FlowConfig flow_config(const Options& o, bool normalized) {
    FlowConfig c;
    c.normalized = normalized;
    c.alpha = o.alpha;
    c.t_max = o.tmax.value_or(normalized ? 30.0 : 100.0);
    if (o.dt_safety) c.dt_safety = *o.dt_safety;
    if (o.dt_cap) c.dt_cap = *o.dt_cap;
    if (o.stop_u_min) c.stop_u_min = *o.stop_u_min;
    if (o.stop_rate) c.stop_rate = *o.stop_rate;
    if (o.blowup_factor) c.blowup_factor = *o.blowup_factor;
    if (o.recenter) {
        if (*o.recenter == "never" || *o.recenter == "Never")
            c.recenter = Recenter::Never;
        else if (*o.recenter == "entropy" || *o.recenter == "OnEntropyPoint")
            c.recenter = Recenter::OnEntropyPoint;
        else
            throw UsageError("--recenter must be never or entropy");
    }
    if (o.recenter_period) c.recenter_period = *o.recenter_period;
    if (o.trace_stride) c.trace_stride = *o.trace_stride;
    if (o.max_steps) c.max_steps = *o.max_steps;
    c.validate();
    return c;
}

// Writes trace.csv, summary.json and final_body.json; returns the summary.
Json write_run(const fs::path& dir, const RunResult& r, const FlowConfig& c, const std::string& label) {
    std::ostringstream csv;
    io::write_trace_csv(csv, r.final_state.body.dimension(), r.traces);
    io::write_text(dir / "trace.csv", csv.str());
    const Json summary = io::summary_json(r, c);
    io::write_json(dir / "summary.json", summary);
    io::write_json(dir / "final_body.json", io::body_json(r.final_state.body, label, "capgcf"));
    return summary;
}

void print_summary(const Json& s) {
    std::cout << "outcome " << s["outcome"].get<std::string>();
    if (s.contains("T_est")) std::cout << "  T_est " << io::format_double(s["T_est"].get<double>());
    std::cout << "  t_final " << io::format_double(s["t_final"].get<double>()) << "  residual "
              << io::format_double(s["residual_final"].get<double>()) << "  steps " << s["steps"].get<long>() << '\n';
    if (s.contains("reason") && s["outcome"] == "Aborted") std::cerr << s["reason"].get<std::string>() << '\n';
}

void emit(const Options& o, const std::string& file, const Json& j) {
    if (o.out.empty())
        std::cout << io::dump(j) << '\n';
    else
        io::write_json(fs::path(o.out) / file, j);
}

int run_flow(const Options& o, bool normalized, const std::string& name) {
    const FlowConfig c = flow_config(o, normalized);
    const CapillaryBody initial = make_body(o.init, o);
    if (o.out.empty()) throw UsageError(name + ": --out is required");
    const RunResult r = run(initial, c);
    const Json s = write_run(o.out, r, c, name + " " + o.init);
    print_summary(s);
    return r.outcome.kind == OutcomeKind::Aborted ? kAbort : kOk;
}

int cmd_soliton(const Options& o) {
    NewtonOptions opt;
    opt.alpha = o.alpha;
    opt.lambda = o.lambda;
    opt.tol = o.tol;
    const CapillaryBody initial = make_body(o.body.empty() ? o.init : o.body, o);
    const SolitonSolution s = newton_solve(initial, opt);
    emit(o, "soliton_report.json", io::soliton_json(s.report));
    if (!o.out.empty()) {
        io::write_json(fs::path(o.out) / "soliton_body.json", io::body_json(s.body, "soliton", "capgcf"));
        std::cout << "converged in " << s.report.newton_iterations << " iterations, residual "
                  << io::format_double(s.report.residual_sup) << ", distance_to_cap "
                  << io::format_double(s.report.distance_to_cap) << '\n';
    }
    return kOk;
}

int cmd_toolkit(const Options& o) {
    const std::string spec = o.body.empty() ? o.init : o.body;
    const CapillaryBody b = make_body(spec, o);
    std::vector<HorizontalPoint> probes;
    for (double x : o.probes) probes.push_back(HorizontalPoint::on_axis(b.dimension(), x));
    emit(o, "toolkit_report.json", io::toolkit_json(toolkit_report(b, probes)));
    return kOk;
}

int cmd_validate(const Options& o) {
    std::vector<validation::Check> checks;
    if (o.suite.empty()) {
        checks = validation::run_all();
    } else {
        std::stringstream ss(o.suite);
        std::string name;
        while (std::getline(ss, name, ',')) {
            const auto names = validation::suite_names();
            if (std::find(names.begin(), names.end(), name) == names.end())
                throw UsageError("unknown suite '" + name + "'");
            auto part = validation::run_suite(name);
            checks.insert(checks.end(), part.begin(), part.end());
        }
    }
    std::cout << validation::table(checks);
    const auto failed = std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; });
    std::cout << checks.size() - failed << "/" << checks.size() << " invariants hold\n";
    return failed == 0 ? kOk : kInvariant;
}

int cmd_sweep(const Options& o) {
    if (o.over != "theta" && o.over != "alpha") throw UsageError("--over must be theta or alpha");
    if (o.flow != "shrink" && o.flow != "normalize") throw UsageError("--flow must be shrink or normalize");
    if (o.values.empty()) throw UsageError("sweep: --values is required");
    if (o.out.empty()) throw UsageError("sweep: --out is required");
    const bool normalized = o.flow == "normalize";
    const std::size_t count = o.values.size();

    // Validate every configuration before any computation.
    std::vector<Options> runs(count, o);
    for (std::size_t i = 0; i < count; ++i) {
        if (o.over == "theta") {
            runs[i].theta = o.values[i];
            runs[i].theta_deg.reset();
        } else {
            runs[i].alpha = o.values[i];
        }
        flow_config(runs[i], normalized);
        if (o.over == "theta") grid_of(runs[i]);
    }

    std::vector<Json> summaries(count);
    std::vector<std::string> errors(count);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            const FlowConfig c = flow_config(runs[i], normalized);
            const RunResult r = run(make_body(runs[i].init, runs[i]), c);
            char dir[32];
            std::snprintf(dir, sizeof dir, "run_%03zu", i);
            Json s = write_run(fs::path(o.out) / dir, r, c, o.flow + " " + runs[i].init);
            summaries[i] = Json{{o.over, o.values[i]}, {"dir", dir}};
            for (const auto& [k, v] : s.items()) summaries[i][k] = v;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    Json all = Json::array();
    int status = kOk;
    for (std::size_t i = 0; i < count; ++i) {
        if (!errors[i].empty()) {
            std::cerr << o.over << " = " << io::format_double(o.values[i]) << ": " << errors[i] << '\n';
            all.push_back(Json{{o.over, o.values[i]}, {"outcome", "Aborted"}, {"reason", errors[i]}});
            status = kAbort;
            continue;
        }
        if (summaries[i]["outcome"] == "Aborted") status = kAbort;
        all.push_back(summaries[i]);
    }
    io::write_json(fs::path(o.out) / "sweep.json", all);
    for (const Json& s : all) {
        std::cout << o.over << " " << io::format_double(s[o.over].get<double>()) << "  ";
        if (s.contains("steps"))
            print_summary(s);
        else
            std::cout << "outcome Aborted\n";
    }
    return status;
}

void add_grid_flags(CLI::App* c, Options& o) {
    c->add_option("--n", o.n, "Dimension of the hypersurface (n >= 1)");
    c->add_option("--theta", o.theta, "Contact angle in radians, in (0, pi/2]");
    c->add_option("--theta-deg", o.theta_deg, "Contact angle in degrees");
    c->add_option("--nodes", o.nodes, "Grid nodes (odd, >= 33)");
    c->add_option("--mode", o.mode, "full1d or axisymmetric (default: full1d for n = 1)");
    c->add_option("--config", o.config, "JSON file with the same field names as the flags");
    c->add_option("--out", o.out, "Output directory");
}

void add_flow_flags(CLI::App* c, Options& o) {
    c->add_option("--init", o.init, "Initial body: cap:r=..,x0=.. | random:amp=..,modes=..,seed=.. | file:path");
    c->add_option("--tmax", o.tmax, "Final time");
    c->add_option("--alpha", o.alpha, "Curvature power alpha > 0");
    c->add_option("--dt-safety", o.dt_safety, "Safety factor of the explicit step, in (0, 0.5]");
    c->add_option("--dt-cap", o.dt_cap, "Largest time step");
    c->add_option("--stop-u-min", o.stop_u_min, "Extinction threshold on min u");
    c->add_option("--stop-rate", o.stop_rate, "Stationarity threshold of normalized runs");
    c->add_option("--recenter", o.recenter, "never or entropy");
    c->add_option("--recenter-period", o.recenter_period, "Steps between re-centerings");
    c->add_option("--trace-stride", o.trace_stride, "Steps between trace records");
    c->add_option("--blowup-factor", o.blowup_factor, "Abort once K exceeds this multiple of the initial max");
    c->add_option("--max-steps", o.max_steps, "Step limit (0: none)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for the capillary Gauss curvature flow"};
    app.require_subcommand(1);
    Options o;

    auto* shrink = app.add_subcommand("shrink", "Unnormalized flow until extinction");
    auto* normalize = app.add_subcommand("normalize", "Volume-normalized flow towards a soliton");
    auto* soliton = app.add_subcommand("soliton", "Newton solve of the soliton equation");
    auto* toolkit = app.add_subcommand("toolkit", "Polar volumes, Santalo and entropy points of a body");
    auto* validate = app.add_subcommand("validate", "Run the invariant suites");
    auto* sweep = app.add_subcommand("sweep", "Run a flow over a list of angles or powers");

    for (CLI::App* c : {shrink, normalize, sweep}) {
        add_grid_flags(c, o);
        add_flow_flags(c, o);
    }
    for (CLI::App* c : {soliton, toolkit}) {
        add_grid_flags(c, o);
        c->add_option("--body", o.body, "Body (as --init) or snapshot path");
        c->add_option("--init", o.init, "Alias of --body");
    }
    soliton->add_option("--alpha", o.alpha, "Curvature power alpha > 0");
    soliton->add_option("--lambda", o.lambda, "Right-hand side multiplier");
    soliton->add_option("--tol", o.tol, "Newton tolerance on sup|G|/sup ell");
    toolkit->add_option("--probe", o.probes, "Extra evaluation points along the first axis");
    validate->add_option("--suite", o.suite, "Comma-separated suites (default: all)");
    sweep->add_option("--over", o.over, "theta or alpha");
    sweep->add_option("--values", o.values, "Parameter values")->delimiter(',');
    sweep->add_option("--flow", o.flow, "shrink or normalize");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadArgs;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        if (!o.config.empty()) merge_config(o, io::read_json(o.config), *cmd);
        if (cmd == shrink) return run_flow(o, false, "shrink");
        if (cmd == normalize) return run_flow(o, true, "normalize");
        if (cmd == soliton) return cmd_soliton(o);
        if (cmd == toolkit) return cmd_toolkit(o);
        if (cmd == validate) return cmd_validate(o);
        return cmd_sweep(o);
    } catch (const UsageError& e) {
        std::cerr << "cli: " << e.what() << '\n';
        return kBadArgs;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::InvalidArgument:
            case ErrorCode::AngleOutOfRange:
            case ErrorCode::BadNodeCount:
            case ErrorCode::SchemaMismatch:
            case ErrorCode::NotConvex:
            case ErrorCode::RobinViolation:
            case ErrorCode::GeneratorFailed: return kBadArgs;
            default: return kAbort;
        }
    } catch (const std::exception& e) {
        std::cerr << "cli: " << e.what() << '\n';
        return kAbort;
    }
}
