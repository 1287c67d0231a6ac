#include "capgcf/flow_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "capgcf/convex_analysis.hpp"
#include "capgcf/error.hpp"
#include "capgcf/kernels.hpp"
#include "capgcf/soliton.hpp"

namespace capgcf {

namespace {

constexpr const char* kModule = "flow_engine";

double det_at(const CapGrid& g, double lr, double lt) {
    const int n = g.dimension();
    return g.mode() == GridMode::Full1D || n == 1 ? lr : lr * std::pow(lt, n - 1);
}

double min_radius_at(const CapGrid& g, double lr, double lt) {
    return g.mode() == GridMode::Full1D || g.dimension() == 1 ? lr : std::min(lr, lt);
}

// Working buffers of a run; radial/tangential always describe the current h.
class Stepper {
public:
    Stepper(const FlowState& s, const FlowConfig& c)
        : grid_(s.body.grid()),
          g_(*grid_),
          cfg_(c),
          h_(s.body.support().values().begin(), s.body.support().values().end()),
          radial_(h_.size()),
          tangential_(h_.size()),
          rhs_(h_.size()),
          stability_(h_.size()),
          previous_(h_.size()),
          t_(s.t),
          step_(s.step_index),
          dt_(s.dt_last),
          k_reference_(s.k_reference),
          coefficient_(s.coefficient) {
        refresh_radii();
        target_volume_ = volume();
    }

    void refresh_radii() { kernels::parallel::principal_radii(g_, h_, radial_, tangential_); }

    double volume() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < h_.size(); ++i)
            acc += g_.weights()[i] * h_[i] * det_at(g_, radial_[i], tangential_[i]);
        return acc / (g_.dimension() + 1);
    }

    void project_volume() {
        const double s = std::pow(target_volume_ / volume(), 1.0 / (g_.dimension() + 1));
        for (std::size_t i = 0; i < h_.size(); ++i) {
            h_[i] *= s;
            radial_[i] *= s;
            tangential_[i] *= s;
        }
    }

    void check_convexity() const {
        std::size_t worst = 0;
        double value = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < h_.size(); ++i) {
            const double v = min_radius_at(g_, radial_[i], tangential_[i]);
            if (v < value) {
                value = v;
                worst = i;
            }
        }
        if (!(value > 0.0))
            throw Error(ErrorCode::ConvexityLost, kModule,
                        "principal radius " + std::to_string(value) + " at node " + std::to_string(worst) +
                            " (t = " + std::to_string(t_) + ")");
    }

    double coefficient() const {
        if (!cfg_.normalized) return 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < h_.size(); ++i) {
            const double d = det_at(g_, radial_[i], tangential_[i]);
            acc += g_.weights()[i] * std::pow(d, 1.0 - cfg_.alpha) * g_.ell()[i];
        }
        return g_.capillary_area() / acc;
    }

    // Fills rhs_/stability_ for the current h and returns the stable dt.
    double evaluate() {
        check_convexity();
        coefficient_ = coefficient();
        if (cfg_.normalized && cfg_.alpha == 1.0) {
            if (std::abs(coefficient_ - 1.0) > 1e-8)
                throw Error(ErrorCode::InvalidArgument, kModule,
                            "normalization coefficient " + std::to_string(coefficient_) + " differs from 1");
            coefficient_ = 1.0;
        }
        const kernels::FlowTerms terms{cfg_.alpha, cfg_.normalized, coefficient_};
        kernels::parallel::flow_rhs(g_, h_, radial_, tangential_, terms, rhs_, stability_);
        double min_det = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < h_.size(); ++i) min_det = std::min(min_det, det_at(g_, radial_[i], tangential_[i]));
        const double k_max = 1.0 / min_det;
        if (k_reference_ > 0.0 && k_max > cfg_.blowup_factor * k_reference_)
            throw Error(ErrorCode::CurvatureBlowup, kModule,
                        "K = " + std::to_string(k_max) + " exceeds " + std::to_string(cfg_.blowup_factor) +
                            " x initial k_max");
        const double bound = *std::min_element(stability_.begin(), stability_.end());
        double dt = std::min(cfg_.dt_cap, cfg_.dt_safety * g_.spacing() * g_.spacing() * bound);
        if (cfg_.normalized) dt = std::min(dt, cfg_.dt_safety);
        return dt;
    }

    // Advances by one step, keeping the starting volume for normalized flows; returns sup|Δh|/(dt·sup h).
    double advance(double dt_limit = std::numeric_limits<double>::infinity()) {
        const double dt = std::min(evaluate(), dt_limit);
        std::copy(h_.begin(), h_.end(), previous_.begin());
        for (std::size_t i = g_.first_interior(); i <= g_.last_interior(); ++i) h_[i] += dt * rhs_[i];
        enforce_robin_inplace(g_, h_);
        refresh_radii();
        if (cfg_.normalized) project_volume();
        t_ += dt;
        dt_ = dt;
        ++step_;
        double change = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < h_.size(); ++i) {
            change = std::max(change, std::abs(h_[i] - previous_[i]));
            scale = std::max(scale, std::abs(h_[i]));
        }
        return change / (dt * scale);
    }

    void translate_by(double x0) {
        for (std::size_t i = 0; i < h_.size(); ++i) h_[i] += x0 * g_.horizontal()[i];
        enforce_robin_inplace(g_, h_);
        refresh_radii();
        if (cfg_.normalized) project_volume();
    }

    double u_min() const {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < h_.size(); ++i) v = std::min(v, h_[i] / g_.ell()[i]);
        return v;
    }

    FlowState state() const {
        return {CapillaryBody::trusted(ScalarField(grid_, h_)), t_, step_, dt_, k_reference_, coefficient_};
    }

    double t() const { return t_; }
    long steps() const { return step_; }
    const std::vector<double>& rhs() const { return rhs_; }
    double dt() const { return dt_; }

private:
    GridPtr grid_;
    const CapGrid& g_;
    const FlowConfig& cfg_;
    std::vector<double> h_;
    std::vector<double> radial_;
    std::vector<double> tangential_;
    std::vector<double> rhs_;
    std::vector<double> stability_;
    std::vector<double> previous_;
    double t_;
    long step_;
    double dt_;
    double k_reference_;
    double coefficient_;
    double target_volume_ = 0.0;
};

double k_max_of(const CapillaryBody& body) { return gauss_curvature(body).max(); }

}  // namespace

std::string_view to_string(Recenter mode) { return mode == Recenter::Never ? "Never" : "OnEntropyPoint"; }

std::string_view to_string(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::Extinct: return "Extinct";
        case OutcomeKind::Converged: return "Converged";
        case OutcomeKind::TimedOut: return "TimedOut";
        case OutcomeKind::Aborted: return "Aborted";
    }
    return "Aborted";
}

void FlowConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, kModule, what); };
    if (!(alpha > 0.0)) fail("alpha must be positive");
    if (!(dt_safety > 0.0 && dt_safety <= 0.5)) fail("dt_safety must lie in (0, 0.5]");
    if (!(dt_cap > 0.0)) fail("dt_cap must be positive");
    if (!(t_max > 0.0)) fail("t_max must be positive");
    if (stop_u_min && !(*stop_u_min > 0.0)) fail("stop_u_min must be positive");
    if (!(stop_rate > 0.0)) fail("stop_rate must be positive");
    if (recenter_period < 1) fail("recenter period must be >= 1");
    if (trace_stride < 1) fail("trace_stride must be >= 1");
    if (!(blowup_factor > 1.0)) fail("blowup_factor must exceed 1");
    if (max_steps < 0) fail("max_steps must be >= 0");
}

FlowState initial_state(const CapillaryBody& body) {
    FlowState s{body, 0.0, 0, 0.0, k_max_of(body), 1.0};
    return s;
}

double normalization_coefficient(const CapillaryBody& body, double alpha) {
    const ScalarField det = principal_radii(body.support()).determinant();
    std::vector<double> f(det.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(det[i], 1.0 - alpha) * body.grid_ref().ell()[i];
    return body.grid_ref().capillary_area() / integrate(ScalarField(body.grid(), std::move(f)));
}

ScalarField rhs(const FlowState& state, const FlowConfig& config) {
    Stepper s(state, config);
    s.evaluate();
    return ScalarField(state.body.grid(), s.rhs());
}

double adaptive_dt(const FlowState& state, const FlowConfig& config) {
    Stepper s(state, config);
    return s.evaluate();
}

FlowState step(const FlowState& state, const FlowConfig& config) {
    Stepper s(state, config);
    s.advance();
    s.check_convexity();
    return s.state();
}

std::pair<CapillaryBody, double> prepare_normalized(const CapillaryBody& body) {
    const RescaledBody scaled = rescale_map(body);
    if (body.grid_ref().mode() != GridMode::Full1D) return {scaled.body, 0.0};
    const double z = entropy_point(scaled.body).point.coords[0];
    CapillaryBody moved = translate(scaled.body, -z);
    return {rescale_map(moved).body, -z};
}

RescaledBody rescale_map(const CapillaryBody& snapshot) {
    const int n = snapshot.dimension();
    const double vol = volume(snapshot);
    if (!(vol > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "snapshot volume must be positive");
    const double t = std::log(snapshot.grid_ref().cap_volume() / vol) / (n + 1);
    return {t, scale(snapshot, std::exp(t))};
}

TraceRecord trace_record(const FlowState& state, const FlowConfig& config) {
    const CapillaryBody& b = state.body;
    const CapGrid& g = b.grid_ref();
    TraceRecord r;
    r.t = state.t;
    r.dt = state.dt_last;
    const PrincipalRadii radii = principal_radii(b.support());
    const ScalarField det = radii.determinant();
    r.volume = integrate(b.support().times(det)) / (g.dimension() + 1);
    const ExtremalPoint ze = config.alpha == 1.0 ? entropy_point(b) : alpha_entropy_point(b, config.alpha);
    r.entropy = ze.value;
    r.entropy_point = ze.point.coords;
    r.k_min = 1.0 / det.max();
    r.k_max = 1.0 / det.min();
    r.lambda_min = radii.min();
    r.lambda_max = radii.max();
    const ScalarField u = capillary_support(b);
    r.u_min = u.min();
    r.u_max = u.max();
    r.phi_max = radii.trace().max();
    if (config.normalized) {
        r.norm_coeff = normalization_coefficient(b, config.alpha);
        const SolitonResidual res = soliton_residual(b, config.alpha, r.norm_coeff);
        r.res_sup = res.sup;
        r.res_l2 = res.l2;
    } else {
        const CapillaryBody rescaled = rescale_map(b).body;
        r.norm_coeff = normalization_coefficient(rescaled, config.alpha);
        const SolitonResidual res = soliton_residual(rescaled, config.alpha, r.norm_coeff);
        r.res_sup = res.sup;
        r.res_l2 = res.l2;
    }
    return r;
}

RunResult run(const CapillaryBody& initial, const FlowConfig& config, const TraceObserver& observer) {
    config.validate();
    std::vector<TraceRecord> traces;
    std::vector<Recentering> recenterings;
    double drift = 0.0;
    const CapGrid& g = initial.grid_ref();
    const int n = g.dimension();

    CapillaryBody start = initial;
    if (config.normalized) {
        auto [prepared, shift] = prepare_normalized(initial);
        start = std::move(prepared);
        drift = shift;
    }
    const double radius0 = std::pow(volume(start) / g.cap_volume(), 1.0 / (n + 1));
    const double stop_u = config.stop_u_min.value_or(1e-2 * radius0);

    FlowState state0 = initial_state(start);
    Stepper stepper(state0, config);
    auto record = [&](const FlowState& s) {
        traces.push_back(trace_record(s, config));
        if (observer) observer(traces.back());
    };
    record(state0);
    long last_traced = 0;

    auto finish = [&](Outcome outcome) {
        FlowState last = stepper.state();
        if (stepper.steps() != last_traced) record(last);
        outcome.residual = traces.back().res_sup;
        outcome.t = stepper.t();
        return RunResult{std::move(last), std::move(traces), std::move(outcome), std::move(recenterings), drift};
    };

    const bool power = config.alpha != 1.0;
    const double exponent = (config.alpha * n + 1.0) / (n + 1.0);
    auto volume_power = [&](double vol) { return std::pow(vol / g.cap_volume(), exponent); };
    double w_prev = volume_power(stepper.volume());
    double t_prev = stepper.t();

    try {
        for (;;) {
            if (stepper.t() >= config.t_max - 1e-12 ||
                (config.max_steps > 0 && stepper.steps() >= config.max_steps))
                return finish({OutcomeKind::TimedOut, std::nullopt, 0.0, 0.0, "t_max reached"});

            const double rate = stepper.advance(config.t_max - stepper.t());

            if (config.normalized) {
                if (const double u = stepper.u_min(); !(u > 0.0))
                    throw Error(ErrorCode::NonpositiveSupport, kModule,
                                "origin left the body (min u = " + std::to_string(u) + ")");
                if (config.recenter == Recenter::OnEntropyPoint && g.mode() == GridMode::Full1D &&
                    stepper.steps() % config.recenter_period == 0) {
                    const double z = entropy_point(stepper.state().body).point.coords[0];
                    if (z != 0.0) {
                        stepper.translate_by(-z);
                        recenterings.push_back({stepper.t(), stepper.steps(), -z});
                        drift -= z;
                    }
                }
                if (rate < config.stop_rate)
                    return finish({OutcomeKind::Converged, std::nullopt, 0.0, 0.0, "stationary"});
            } else {
                if (stepper.u_min() < stop_u) {
                    const double vol = stepper.volume();
                    double T;
                    if (!power) {
                        T = stepper.t() + vol / g.capillary_area();
                    } else {
                        const double w = volume_power(vol);
                        const double slope = (w - w_prev) / (stepper.t() - t_prev);
                        T = stepper.t() - w / slope;
                    }
                    return finish({OutcomeKind::Extinct, T, 0.0, 0.0, "u_min below threshold"});
                }
                if (power) {
                    w_prev = volume_power(stepper.volume());
                    t_prev = stepper.t();
                }
            }

            if (stepper.steps() % config.trace_stride == 0) {
                record(stepper.state());
                last_traced = stepper.steps();
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ConvexityLost && e.code() != ErrorCode::CurvatureBlowup &&
            e.code() != ErrorCode::NoInteriorMinimum && e.code() != ErrorCode::NonpositiveSupport)
            throw;
        Outcome o{OutcomeKind::Aborted, std::nullopt, stepper.t(), traces.back().res_sup, e.what()};
        return RunResult{stepper.state(), std::move(traces), std::move(o), std::move(recenterings), drift};
    }
}

}  // namespace capgcf
