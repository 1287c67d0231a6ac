#include "capgcf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "capgcf/error.hpp"

namespace capgcf::io {

namespace {

constexpr const char* kModule = "io";

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, kModule, what); }

void emit(std::string& out, const Json& j, int indent, int depth) {
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(key).dump();
                out += pretty ? ": " : ":";
                emit(out, value, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += flat && pretty ? ", " : ",";
                if (!flat) newline(depth + 1);
                emit(out, j[i], indent, depth + 1);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default: out += j.dump();
    }
}

std::vector<double> coords(const HorizontalPoint& p) { return p.coords; }

template <class T>
T field(const Json& j, const char* key) {
    if (!j.contains(key)) mismatch(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        mismatch(std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
void read_if(const Json& j, const char* key, T& into) {
    if (j.contains(key)) into = field<T>(j, key);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump(const Json& j, int indent) {
    std::string out;
    emit(out, j, indent, 0);
    return out;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) mismatch("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        mismatch(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, kModule, "cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, dump(j) + "\n"); }

std::string trace_header(int n) {
    std::string h = "t,dt,volume,entropy";
    for (int i = 1; i <= n; ++i) h += ",entropy_point_" + std::to_string(i);
    h += ",k_min,k_max,lambda_min,lambda_max,u_min,u_max,phi_max,res_sup,res_l2,norm_coeff";
    return h;
}

std::string trace_row(const TraceRecord& r) {
    std::string row;
    auto put = [&](double v) {
        if (!row.empty()) row += ',';
        row += format_double(v);
    };
    put(r.t);
    put(r.dt);
    put(r.volume);
    put(r.entropy);
    for (double z : r.entropy_point) put(z);
    for (double v : {r.k_min, r.k_max, r.lambda_min, r.lambda_max, r.u_min, r.u_max, r.phi_max, r.res_sup, r.res_l2,
                     r.norm_coeff})
        put(v);
    return row;
}

void write_trace_csv(std::ostream& out, int n, const std::vector<TraceRecord>& traces) {
    out << trace_header(n) << '\n';
    for (const TraceRecord& r : traces) out << trace_row(r) << '\n';
}

Json grid_json(const CapGrid& g) {
    return {{"n", g.dimension()},
            {"theta", g.theta()},
            {"mode", std::string(to_string(g.mode()))},
            {"node_count", static_cast<int>(g.size())}};
}

Json config_json(const FlowConfig& c) {
    Json j;
    j["alpha"] = c.alpha;
    j["normalized"] = c.normalized;
    j["dt_safety"] = c.dt_safety;
    j["dt_cap"] = c.dt_cap;
    j["t_max"] = c.t_max;
    j["stop_u_min"] = c.stop_u_min ? Json(*c.stop_u_min) : Json(nullptr);
    j["stop_rate"] = c.stop_rate;
    j["recenter"] = std::string(to_string(c.recenter));
    j["recenter_period"] = c.recenter_period;
    j["trace_stride"] = c.trace_stride;
    j["blowup_factor"] = c.blowup_factor;
    j["max_steps"] = c.max_steps;
    return j;
}

FlowConfig config_from_json(const Json& j, FlowConfig c) {
    if (!j.is_object()) mismatch("config must be a JSON object");
    read_if(j, "alpha", c.alpha);
    read_if(j, "normalized", c.normalized);
    read_if(j, "dt_safety", c.dt_safety);
    read_if(j, "dt_cap", c.dt_cap);
    read_if(j, "t_max", c.t_max);
    if (j.contains("stop_u_min")) {
        if (j["stop_u_min"].is_null())
            c.stop_u_min.reset();
        else
            c.stop_u_min = field<double>(j, "stop_u_min");
    }
    read_if(j, "stop_rate", c.stop_rate);
    if (j.contains("recenter")) {
        const auto r = field<std::string>(j, "recenter");
        if (r == "Never")
            c.recenter = Recenter::Never;
        else if (r == "OnEntropyPoint")
            c.recenter = Recenter::OnEntropyPoint;
        else
            mismatch("recenter must be Never or OnEntropyPoint, got '" + r + "'");
    }
    read_if(j, "recenter_period", c.recenter_period);
    read_if(j, "trace_stride", c.trace_stride);
    read_if(j, "blowup_factor", c.blowup_factor);
    read_if(j, "max_steps", c.max_steps);
    return c;
}

Json summary_json(const RunResult& r, const FlowConfig& config) {
    Json j;
    j["outcome"] = std::string(to_string(r.outcome.kind));
    if (r.outcome.T_est) j["T_est"] = *r.outcome.T_est;
    j["t_final"] = r.outcome.t;
    j["residual_final"] = r.outcome.residual;
    if (!r.outcome.reason.empty()) j["reason"] = r.outcome.reason;
    j["steps"] = r.final_state.step_index;
    j["drift"] = r.drift;
    j["recenterings"] = static_cast<int>(r.recenterings.size());
    j["config"] = config_json(config);
    j["grid"] = grid_json(r.final_state.body.grid_ref());
    return j;
}

Json body_json(const CapillaryBody& body, const std::string& label, const std::string& created_by) {
    Json j = grid_json(body.grid_ref());
    j["h"] = std::vector<double>(body.support().values().begin(), body.support().values().end());
    j["meta"] = {{"label", label}, {"created_by", created_by}};
    return j;
}

Snapshot body_from_json(const Json& j) {
    if (!j.is_object()) mismatch("body snapshot must be a JSON object");
    const int n = field<int>(j, "n");
    const double theta = field<double>(j, "theta");
    const auto mode_text = field<std::string>(j, "mode");
    const int count = field<int>(j, "node_count");
    const auto h = field<std::vector<double>>(j, "h");
    if (static_cast<int>(h.size()) != count)
        mismatch("h has " + std::to_string(h.size()) + " values, node_count is " + std::to_string(count));
    GridMode mode;
    try {
        mode = parse_grid_mode(mode_text);
    } catch (const Error&) {
        mismatch("unknown mode '" + mode_text + "'");
    }
    Snapshot s{CapillaryBody::from_support(ScalarField(build_grid(n, theta, count, mode), h)), "", ""};
    if (j.contains("meta")) {
        const Json& m = j["meta"];
        if (!m.is_object()) mismatch("meta must be an object");
        read_if(m, "label", s.label);
        read_if(m, "created_by", s.created_by);
    }
    return s;
}

Snapshot load_body(const std::filesystem::path& path) { return body_from_json(read_json(path)); }

Json toolkit_json(const ToolkitReport& r) {
    Json polar = Json::array();
    for (const PolarVolumeSample& s : r.polar_volume_at) polar.push_back({{"point", coords(s.point)}, {"volume", s.volume}});
    Json j;
    j["polar_volume_at"] = polar;
    j["santalo_point"] = coords(r.santalo_point);
    j["santalo_volume"] = r.santalo_volume;
    j["entropy_point"] = coords(r.entropy_point);
    j["entropy_value"] = r.entropy_value;
    j["bs_product"] = r.bs_product;
    j["bs_bound"] = r.bs_bound;
    j["bs_margin"] = r.bs_bound - r.bs_product;
    j["orthogonality_residuals"] = {{"santalo", r.santalo_orthogonality}, {"entropy", r.entropy_orthogonality}};
    return j;
}

Json soliton_json(const SolitonReport& r) {
    Json j;
    j["residual_sup"] = r.residual_sup;
    j["residual_l2"] = r.residual_l2;
    j["newton_iterations"] = r.newton_iterations;
    j["converged"] = r.converged;
    j["distance_to_cap"] = r.distance_to_cap;
    j["history"] = r.history;
    j["quadratic_constant"] = r.quadratic_constant;
    return j;
}

}  // namespace capgcf::io
