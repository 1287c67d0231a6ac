#include "capgcf/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "capgcf/body.hpp"
#include "capgcf/convex_analysis.hpp"
#include "capgcf/error.hpp"
#include "capgcf/flow_engine.hpp"
#include "capgcf/io.hpp"
#include "capgcf/soliton.hpp"

namespace capgcf::validation {

namespace {

constexpr double kPi = std::numbers::pi;
const double kThetas[] = {kPi / 6, kPi / 4, kPi / 3};

using Checks = std::vector<Check>;

// measured ≤ bound
void at_most(Checks& out, const char* module, const std::string& name, double measured, double bound,
             std::string note = {}) {
    out.push_back({module, name, measured <= bound, measured, bound, std::move(note)});
}

// measured ≥ bound
void at_least(Checks& out, const char* module, const std::string& name, double measured, double bound,
              std::string note = {}) {
    out.push_back({module, name, measured >= bound, measured, bound, std::move(note)});
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double closed_capillary_area(int n, double theta) {
    using boost::math::quadrature::gauss_kronrod;
    const double cap = unit_sphere_area(n - 1) *
                       gauss_kronrod<double, 61>::integrate([n](double a) { return std::pow(std::sin(a), n - 1); },
                                                           0.0, theta);
    return cap - std::cos(theta) * unit_ball_volume(n) * std::pow(std::sin(theta), n);
}

GridPtr grid_for(int n, double theta, int nodes) {
    return build_grid(n, theta, nodes, n == 1 ? GridMode::Full1D : GridMode::Axisymmetric);
}

// Region enclosed by the embedded surface and the supporting plane.
double embedded_volume(const CapillaryBody& body) {
    const auto x = embed(body);
    const CapGrid& g = body.grid_ref();
    if (g.mode() == GridMode::Full1D) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto& p = x[i];
            const auto& q = x[(i + 1) % x.size()];
            s += p.horizontal * q.vertical - q.horizontal * p.vertical;
        }
        return 0.5 * std::abs(s);
    }
    const int n = g.dimension();
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double r0 = x[i].horizontal;
        const double r1 = x[i + 1].horizontal;
        const double rm = 0.5 * (r0 + r1);
        v += (x[i].vertical - x[i + 1].vertical) * (std::pow(r0, n) + 4 * std::pow(rm, n) + std::pow(r1, n)) / 6.0;
    }
    return unit_ball_volume(n) * std::abs(v);
}

std::vector<CapillaryBody> random_suite(int nodes, int count) {
    std::vector<CapillaryBody> out;
    for (double theta : kThetas) {
        auto g = grid_for(1, theta, nodes);
        for (int s = 0; s < count; ++s) out.push_back(random_body(g, 0.2, 4, static_cast<std::uint64_t>(s)));
    }
    return out;
}

// ---------------------------------------------------------------- cap_domain

Checks cap_domain_suite() {
    const char* m = "cap_domain";
    Checks out;

    double worst = 0.0;
    for (int n : {1, 2, 3})
        for (double theta : kThetas) {
            auto g = grid_for(n, theta, 201);
            const double exact = closed_capillary_area(n, theta);
            worst = std::max(worst, std::abs(g->capillary_area() - exact) / exact);
        }
    at_most(out, m, "quadrature of ell equals capillary area (rel)", worst, 1e-6);

    for (int n : {1, 2}) {
        double err[3];
        double robin[3];
        double bound_ok = 0.0;
        int k = 0;
        for (int nodes : {65, 129, 257}) {
            auto g = grid_for(n, kPi / 3, nodes);
            const ScalarField ell = ell_field(g);
            const PrincipalRadii r = principal_radii(ell);
            std::vector<double> one(g->size(), 1.0);
            err[k] = std::max(sup_diff(r.radial.values(), one), sup_diff(r.tangential.values(), one));
            robin[k] = robin_residual(ell).sup();
            bound_ok = std::max(bound_ok, err[k] / (g->spacing() * g->spacing()));
            ++k;
        }
        const std::string tag = n == 1 ? " [Full1D]" : " [Axisymmetric]";
        at_most(out, m, "radii of ell within 5 D^2 of 1" + tag, bound_ok, 5.0, "max err/D^2");
        at_least(out, m, "radii of ell: observed order" + tag, std::min(order(err[0], err[1]), order(err[1], err[2])),
                 1.9);
        at_least(out, m, "Robin residual of ell: observed order" + tag,
                 std::min(order(robin[0], robin[1]), order(robin[1], robin[2])), 1.9);
    }

    double lin = 0.0;
    for (int n : {1, 3}) {
        auto g = grid_for(n, kPi / 4, 129);
        const ScalarField f = random_body(g, 0.3, 5, 1).support();
        const ScalarField h = random_body(g, 0.3, 5, 2).support();
        for (int ord : {1, 2}) {
            const ScalarField lhs = differentiate(2.5 * f + (-1.5) * h, ord);
            const ScalarField rhs = 2.5 * differentiate(f, ord) + (-1.5) * differentiate(h, ord);
            // Rounding in a difference quotient is amplified by D^-order.
            const double ulp = std::numeric_limits<double>::epsilon() * (2.5 * f.sup_abs() + 1.5 * h.sup_abs()) /
                               std::pow(g->spacing(), ord);
            lin = std::max(lin, (lhs - rhs).sup_abs() / ulp);
        }
    }
    at_most(out, m, "differentiate is linear", lin, 64.0, "in units of eps*scale/D^k");
    return out;
}

// ---------------------------------------------------------------------- body

Checks body_suite() {
    const char* m = "body";
    Checks out;

    double vol = 0.0;
    double curv = 0.0;
    for (int n : {1, 2}) {
        auto g = grid_for(n, kPi / 3, 129);
        const CapillaryBody b = random_body(g, 0.2, 4, 5);
        const double v0 = volume(b);
        const ScalarField k0 = gauss_curvature(b);
        for (double s : {0.5, 2.0}) {
            const CapillaryBody sb = scale(b, s);
            vol = std::max(vol, std::abs(volume(sb) / (std::pow(s, n + 1) * v0) - 1.0));
            const ScalarField k = gauss_curvature(sb);
            for (std::size_t i = 0; i < k.size(); ++i)
                curv = std::max(curv, std::abs(k[i] / (std::pow(s, -n) * k0[i]) - 1.0));
        }
    }
    at_most(out, m, "volume scales as s^(n+1) (rel)", vol, 1e-10);
    at_most(out, m, "Gauss curvature scales as s^-n (rel)", curv, 1e-10);

    double flat = 0.0;
    double sandwich = -std::numeric_limits<double>::infinity();
    double positivity = std::numeric_limits<double>::infinity();
    for (const CapillaryBody& b : random_suite(201, 10)) {
        const CapGrid& g = b.grid_ref();
        const auto x = embed(b);
        const double rim = std::max(std::abs(x.front().vertical), std::abs(x.back().vertical));
        flat = std::max(flat, rim / (g.spacing() * g.spacing() * b.support().sup_abs()));
        const BodyMetrics mt = metrics(b);
        sandwich = std::max({sandwich, (1 - g.cos_theta()) * mt.rho_plus_cap - mt.rho_plus,
                             mt.rho_plus - g.sin_theta() * mt.rho_plus_cap});
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double z = mt.wetting_left + t * (mt.wetting_right - mt.wetting_left);
            const auto uz = capillary_support(b, HorizontalPoint::on_axis(1, z));
            positivity = std::min(positivity, *std::min_element(uz.begin(), uz.end()));
        }
    }
    at_most(out, m, "embedded rim height within 10 D^2 sup|h|", flat, 10.0, "max |x_(n+1)|/(D^2 sup|h|)");
    at_most(out, m, "radii sandwich (1-cos)rho+cap <= rho+ <= sin rho+cap", sandwich, 1e-9, "worst violation");
    out.push_back({m, "u_z > 0 inside the wetting region", positivity > 0.0, positivity, 0.0, "min u_z"});

    double agree = 0.0;
    for (int n : {1, 2})
        for (double theta : kThetas) {
            auto g = grid_for(n, theta, 257);
            for (const CapillaryBody& b : {cap_body(g), random_body(g, 0.1, 3, 7)})
                agree = std::max(agree, std::abs(volume(b) / embedded_volume(b) - 1.0));
        }
    at_most(out, m, "support-function volume = embedded volume (rel, N=257)", agree, 1e-4);
    return out;
}

// ----------------------------------------------------------- convex_analysis

Checks convex_suite() {
    const char* m = "convex_analysis";
    Checks out;

    double gauge_err = 0.0;
    double jac_err = 0.0;
    for (int n : {1, 2})
        for (double theta : kThetas)
            for (double a : {0.0, 0.3 * theta, 0.9 * theta}) {
                std::vector<double> dir(static_cast<std::size_t>(n), 0.0);
                dir[0] = 1.0;
                const auto xi = cap_point(dir, a, theta);
                gauge_err = std::max(gauge_err, std::abs(gauge(cahn_hoffman(xi, theta), theta) - 1.0));
                // det DΨ by central differences, Gaussian elimination in place.
                const std::size_t d = xi.size();
                std::vector<double> jac(d * d);
                const double step = 1e-6;
                for (std::size_t j = 0; j < d; ++j) {
                    auto p = xi;
                    auto q = xi;
                    p[j] += step;
                    q[j] -= step;
                    const auto fp = cahn_hoffman(p, theta);
                    const auto fq = cahn_hoffman(q, theta);
                    for (std::size_t i = 0; i < d; ++i) jac[i * d + j] = (fp[i] - fq[i]) / (2 * step);
                }
                double det = 1.0;
                for (std::size_t c = 0; c < d; ++c) {
                    std::size_t piv = c;
                    for (std::size_t r = c + 1; r < d; ++r)
                        if (std::abs(jac[r * d + c]) > std::abs(jac[piv * d + c])) piv = r;
                    if (piv != c) {
                        for (std::size_t k = 0; k < d; ++k) std::swap(jac[c * d + k], jac[piv * d + k]);
                        det = -det;
                    }
                    det *= jac[c * d + c];
                    for (std::size_t r = c + 1; r < d; ++r) {
                        const double f = jac[r * d + c] / jac[c * d + c];
                        for (std::size_t k = c; k < d; ++k) jac[r * d + k] -= f * jac[c * d + k];
                    }
                }
                const double ell = 1.0 - std::cos(theta) * std::cos(a);
                jac_err = std::max(jac_err, std::abs(det / std::pow(ell, -(n + 2)) - 1.0));
            }
    at_most(out, m, "gauge of the Cahn-Hoffman map is 1", gauge_err, 1e-12);
    at_most(out, m, "det of the Cahn-Hoffman Jacobian = ell^-(n+2) (rel)", jac_err, 1e-6);

    // The discrete volume of the cap converges at O(D^2); 4097 nodes bring it below 1e-8.
    double polar = 0.0;
    double polar_exact = 0.0;
    for (int n : {1, 2})
        for (double theta : kThetas) {
            auto g = grid_for(n, theta, 4097);
            const CapillaryBody cap = cap_body(g);
            const double p = polar_volume(cap, HorizontalPoint::origin(n));
            polar = std::max(polar, std::abs(p / volume(cap) - 1.0));
            polar_exact = std::max(polar_exact, std::abs(p / g->cap_volume() - 1.0));
        }
    at_most(out, m, "polar volume of the unit cap = Vol(cap) (rel)", polar_exact, 1e-8);
    at_most(out, m, "polar volume of the unit cap = its volume (rel, N=4097)", polar, 1e-8);

    double cap_entropy = 0.0;
    for (double r : {0.5, 2.0}) {
        const CapillaryBody cap = cap_body(grid_for(1, kPi / 3, 201), r);
        const BodyMetrics mt = metrics(cap);
        cap_entropy = std::max({cap_entropy, std::abs(mt.rho_plus_cap - r) / r,
                                std::abs(std::exp(entropy_point(cap).value) - r) / r});
    }
    at_most(out, m, "caps: rho+cap = r = exp(E)", cap_entropy, 1e-6);

    double upper = -std::numeric_limits<double>::infinity();
    double lower = std::numeric_limits<double>::infinity();
    double stability = std::numeric_limits<double>::infinity();
    double concavity = -std::numeric_limits<double>::infinity();
    double convexity = std::numeric_limits<double>::infinity();
    double bs = -std::numeric_limits<double>::infinity();
    double orth = 0.0;
    for (const CapillaryBody& b : random_suite(401, 10)) {
        const int n = b.dimension();
        const BodyMetrics mt = metrics(b);
        const ExtremalPoint ze = entropy_point(b);
        upper = std::max(upper, std::log(mt.rho_plus_cap) - ze.value);
        lower = std::min(lower, std::log(mt.rho_minus_cap) + n * ze.value - std::log(mt.volume));
        const AxisInterval w = positive_support_interval(b);
        const double step = 0.02 * w.length();
        for (double t : {0.15, 0.3, 0.5, 0.7, 0.85}) {
            const double z = w.lower + t * w.length();
            auto at = [](double x) { return HorizontalPoint::on_axis(1, x); };
            const double gap = ze.value - entropy(b, at(z));
            // Away from z_e the gap must be strictly positive.
            if (std::abs(z - ze.point.coords[0]) > 1e-3 * w.length()) stability = std::min(stability, gap);
            concavity = std::max(concavity, entropy(b, at(z + step)) - 2 * entropy(b, at(z)) + entropy(b, at(z - step)));
            convexity = std::min(convexity, polar_volume(b, at(z + step)) - 2 * polar_volume(b, at(z)) +
                                                polar_volume(b, at(z - step)));
        }
        const BlaschkeSantalo p = blaschke_santalo_check(b);
        bs = std::max(bs, p.product - p.bound);
        const ExtremalPoint zs = santalo_point(b);
        for (const Orthogonality& o : santalo_orthogonality(b, zs.point)) orth = std::max(orth, std::abs(o.relative()));
        for (const Orthogonality& o : entropy_orthogonality(b, ze.point)) orth = std::max(orth, std::abs(o.relative()));
    }
    out.push_back({m, "log rho+cap - E bounded above (suite constant)", std::isfinite(upper), upper,
                   std::numeric_limits<double>::infinity(), "recorded"});
    out.push_back({m, "log rho-cap + nE - log Vol bounded below (suite constant)", std::isfinite(lower), lower,
                   -std::numeric_limits<double>::infinity(), "recorded"});
    out.push_back({m, "E(z_e) - E(z) > 0 away from z_e", stability > 0.0, stability, 0.0, "min over probes"});
    at_most(out, m, "entropy second differences <= 0", concavity, 0.0);
    at_least(out, m, "polar volume second differences >= 0", convexity, 0.0);
    at_most(out, m, "Blaschke-Santalo: product - bound", bs, 1e-6);
    at_most(out, m, "orthogonality at z_s and z_e (rel)", orth, 1e-8);
    return out;
}

// --------------------------------------------------------------- flow_engine

struct ReferenceRun {
    GridPtr grid;
    RunResult result;
};

// Normalized run from random_body(0.1, 3, 7) carried to t = 30.
const ReferenceRun& reference_run() {
    static const ReferenceRun run_once = [] {
        auto g = grid_for(1, kPi / 3, 201);
        FlowConfig c;
        c.normalized = true;
        c.t_max = 30.0;
        c.stop_rate = 1e-300;
        return ReferenceRun{g, run(random_body(g, 0.1, 3, 7), c)};
    }();
    return run_once;
}

Checks flow_suite() {
    const char* m = "flow_engine";
    Checks out;

    {
        auto g = grid_for(1, kPi / 3, 201);
        FlowConfig c;
        c.t_max = 0.05;
        c.trace_stride = 200;
        const RunResult r = run(random_body(g, 0.1, 3, 7), c);
        const double omega = g->capillary_area();
        const double k_scale = r.traces.front().k_max;
        double law = 0.0;
        double floor = std::numeric_limits<double>::infinity();
        double ceiling = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < r.traces.size(); ++k) {
            const TraceRecord& p = r.traces[k - 1];
            const TraceRecord& q = r.traces[k];
            law = std::max(law, std::abs((q.volume - p.volume) / (q.t - p.t) + omega) / omega);
            floor = std::min(floor, (q.k_min - r.traces.front().k_min) / k_scale);
            ceiling = std::max(ceiling, q.u_max - p.u_max);
        }
        at_most(out, m, "unnormalized volume law dVol/dt = -omega (rel)", law, 1e-3);
        at_least(out, m, "curvature floor: min K(t) - min K(0) (rel k_scale)", floor, -1e-6);
        at_most(out, m, "capillary support ceiling: max u increments", ceiling, 1e-6);

        FlowState s = initial_state(random_body(g, 0.2, 4, 3));
        double robin = 0.0;
        for (int k = 0; k < 20; ++k) {
            s = step(s, c);
            robin = std::max(robin, robin_residual(s.body.support()).sup() / s.body.support().sup_abs());
        }
        at_most(out, m, "Robin residual after steps (rel sup|h|)", robin, 1e-12);
    }

    const ReferenceRun& ref = reference_run();
    const auto& tr = ref.result.traces;
    const double vc = ref.grid->cap_volume();
    double vol = 0.0;
    double mono = -std::numeric_limits<double>::infinity();
    double u_late = std::numeric_limits<double>::infinity();
    double u_after = std::numeric_limits<double>::infinity();
    double decay = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tr.size(); ++k) {
        vol = std::max(vol, std::abs(tr[k].volume - vc) / vc);
        if (k > 0) mono = std::max(mono, tr[k].entropy - tr[k - 1].entropy);
        if (tr[k].t >= 5.0) u_late = std::min(u_late, tr[k].u_min);
        if (tr[k].t >= 1.0) {
            u_after = std::min(u_after, tr[k].u_min);
            if (k > 0 && tr[k - 1].t >= 1.0) decay = std::max(decay, tr[k].res_sup - tr[k - 1].res_sup);
        }
    }
    at_most(out, m, "normalized volume preservation to t=30 (rel)", vol, 5e-3);
    at_most(out, m, "entropy non-increasing between records", mono, 1e-6);
    at_least(out, m, "normalized u_min floor for t>=1 vs half the t in [5,30] minimum", u_after, 0.5 * u_late);
    at_most(out, m, "soliton residual non-increasing for t>=1", decay, 1e-9);
    out.push_back({m, "reference run reaches t=30", ref.result.outcome.kind == OutcomeKind::TimedOut,
                   ref.result.outcome.t, 30.0, std::string(to_string(ref.result.outcome.kind))});
    return out;
}

// ------------------------------------------------------------------- soliton

Checks soliton_suite() {
    const char* m = "soliton";
    Checks out;
    for (int n : {1, 2}) {
        double res[3];
        double scaled = 0.0;
        int k = 0;
        for (int nodes : {65, 129, 257}) {
            auto g = grid_for(n, kPi / 3, nodes);
            res[k] = soliton_residual(cap_body(g)).sup;
            scaled = std::max(scaled, res[k] / (g->spacing() * g->spacing()));
            ++k;
        }
        const std::string tag = n == 1 ? " [Full1D]" : " [Axisymmetric]";
        at_most(out, m, "cap residual within 20 D^2" + tag, scaled, 20.0, "max res/D^2");
        at_least(out, m, "cap residual: observed order" + tag, std::min(order(res[0], res[1]), order(res[1], res[2])),
                 1.9);
    }

    auto g = grid_for(1, kPi / 3, 201);
    const SolitonSolution s = newton_solve(random_body(g, 0.05, 2, 3));
    out.push_back({m, "Newton quadratic tail constant", s.report.converged && std::isfinite(s.report.quadratic_constant),
                   s.report.quadratic_constant, std::numeric_limits<double>::infinity(), "recorded C"});

    const ReferenceRun& ref = reference_run();
    const SolitonSolution f = newton_solve(ref.result.final_state.body);
    at_most(out, m, "flow limit vs Newton solution (support distance)",
            support_distance(f.body, ref.result.final_state.body), 1e-6);
    return out;
}

// ----------------------------------------------------------------------- cli

Checks cli_suite() {
    const char* m = "cli";
    Checks out;
    auto render = [] {
        auto g = grid_for(1, kPi / 3, 101);
        FlowConfig c;
        c.normalized = true;
        c.t_max = 0.5;
        c.trace_stride = 25;
        const RunResult r = run(random_body(g, 0.1, 3, 7), c);
        std::ostringstream csv;
        io::write_trace_csv(csv, 1, r.traces);
        return csv.str() + io::dump(io::summary_json(r, c)) + io::dump(io::body_json(r.final_state.body, "", ""));
    };
    const std::string a = render();
    const std::string b = render();
    out.push_back({m, "identical configs give byte-identical outputs", a == b, static_cast<double>(a.size()),
                   static_cast<double>(b.size()), "bytes"});
    return out;
}

const std::map<std::string, std::function<Checks()>>& registry() {
    static const std::map<std::string, std::function<Checks()>> r = {
        {"cap_domain", cap_domain_suite}, {"body", body_suite},       {"convex_analysis", convex_suite},
        {"flow_engine", flow_suite},      {"soliton", soliton_suite}, {"cli", cli_suite},
    };
    return r;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"cap_domain", "body", "convex_analysis", "flow_engine", "soliton", "cli"};
}

std::vector<Check> run_suite(const std::string& module) {
    const auto& r = registry();
    const auto it = r.find(module);
    if (it == r.end()) throw Error(ErrorCode::InvalidArgument, "validation", "unknown suite '" + module + "'");
    try {
        return it->second();
    } catch (const Error& e) {
        return {{module, "suite completed", false, 0.0, 0.0, e.what()}};
    }
}

std::vector<Check> run_all() {
    std::vector<Check> all;
    for (const std::string& name : suite_names()) {
        auto part = run_suite(name);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

bool all_passed(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string table(const std::vector<Check>& checks) {
    std::size_t wm = 6;
    std::size_t wi = 9;
    for (const Check& c : checks) {
        wm = std::max(wm, c.module.size());
        wi = std::max(wi, c.invariant.size());
    }
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return std::string(buf);
    };
    std::ostringstream out;
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(s.size(), w), ' ');
        return s;
    };
    out << pad("module", wm) << "  " << pad("invariant", wi) << "  " << pad("measured", 11) << "  "
        << pad("bound", 11) << "  result  note\n";
    for (const Check& c : checks)
        out << pad(c.module, wm) << "  " << pad(c.invariant, wi) << "  " << pad(num(c.measured), 11) << "  "
            << pad(num(c.bound), 11) << "  " << (c.passed ? "PASS  " : "FAIL  ") << "  " << c.note << '\n';
    return out.str();
}

}  // namespace capgcf::validation
