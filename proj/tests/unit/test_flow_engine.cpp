#include <cmath>
#include <numbers>

#include "capgcf/error.hpp"
#include "capgcf/flow_engine.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace capgcf;

namespace {

constexpr double kPi = std::numbers::pi;

FlowConfig shrink(double alpha = 1.0) {
    FlowConfig c;
    c.alpha = alpha;
    return c;
}

FlowConfig normalize(double alpha = 1.0) {
    FlowConfig c;
    c.alpha = alpha;
    c.normalized = true;
    c.t_max = 30.0;
    return c;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("config validation") {
    FlowConfig c;
    CHECK_NOTHROW(c.validate());
    c.dt_safety = 0.6;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
    c = FlowConfig{};
    c.alpha = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = FlowConfig{};
    c.trace_stride = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = FlowConfig{};
    c.stop_u_min = -1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK(to_string(OutcomeKind::Extinct) == "Extinct");
    CHECK(to_string(Recenter::OnEntropyPoint) == "OnEntropyPoint");
}

TEST_CASE("rhs on caps") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    const double d2 = g->spacing() * g->spacing();

    const ScalarField still = rhs(initial_state(cap_body(g)), normalize());
    CHECK(still.sup_abs() <= 20 * d2);
    CHECK(still[0] == 0.0);
    CHECK(still[g->size() - 1] == 0.0);

    for (double alpha : {1.0, 0.5, 2.0}) {
        for (double r : {0.5, 2.0}) {
            const ScalarField v = rhs(initial_state(cap_body(g, r)), shrink(alpha));
            const double k = std::pow(r, -alpha);
            for (std::size_t i = g->first_interior(); i <= g->last_interior(); ++i)
                CHECK(v[i] == doctest::Approx(-g->ell()[i] * k).epsilon(50 * d2));
        }
    }

    auto a = build_grid(2, kPi / 3, 201, GridMode::Axisymmetric);
    const ScalarField va = rhs(initial_state(cap_body(a, 2.0)), shrink());
    for (std::size_t i = a->first_interior(); i <= a->last_interior(); ++i)
        CHECK(va[i] == doctest::Approx(-a->ell()[i] / 4.0).epsilon(50 * d2));
}

TEST_CASE("normalization coefficient") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    CHECK(normalization_coefficient(random_body(g, 0.1, 3, 1), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // Scaling by r multiplies K^{α−1} by r^{−n(α−1)}.
    const double c = normalization_coefficient(cap_body(g, 2.0), 3.0);
    CHECK(c == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("adaptive time step") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    const double d = 2 * (kPi / 3) / 200;
    const double dt = adaptive_dt(initial_state(cap_body(g)), shrink());
    CHECK(dt == doctest::Approx(0.2 * d * d / 0.75).epsilon(1e-3));

    auto f = build_grid(1, kPi / 3, 401, GridMode::Full1D);
    CHECK(adaptive_dt(initial_state(cap_body(f)), shrink()) == doctest::Approx(dt / 4).epsilon(1e-3));
    CHECK(adaptive_dt(initial_state(cap_body(g, 2.0)), shrink()) == doctest::Approx(4 * dt).epsilon(1e-3));

    auto coarse = build_grid(1, kPi / 3, 33, GridMode::Full1D);
    FlowConfig c = shrink();
    c.dt_cap = 1e-4;
    CHECK(adaptive_dt(initial_state(cap_body(coarse)), c) == 1e-4);
    c = normalize();
    c.dt_cap = 10.0;
    c.dt_safety = 0.01;
    CHECK(adaptive_dt(initial_state(cap_body(coarse, 100.0)), c) == 0.01);
}

TEST_CASE("single steps") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    const CapillaryBody cap = cap_body(g);

    const FlowState n1 = step(initial_state(cap), normalize());
    const double d2n = g->spacing() * g->spacing();
    CHECK(support_distance(n1.body, cap) <= 20 * n1.dt_last * d2n);
    CHECK(volume(n1.body) == doctest::Approx(volume(cap)).epsilon(1e-14));
    CHECK(n1.t == doctest::Approx(n1.dt_last));
    CHECK(n1.step_index == 1);

    const FlowState u1 = step(initial_state(cap), shrink());
    const double dt = u1.dt_last;
    const double d2 = g->spacing() * g->spacing();
    for (std::size_t i = g->first_interior(); i <= g->last_interior(); ++i)
        CHECK(std::abs(u1.body.support()[i] - (1 - dt) * g->ell()[i]) <= 20 * dt * d2);
    CHECK(std::abs(u1.body.support()[g->size() - 1] - (1 - dt) * g->ell().back()) <= 20 * dt * d2);

    for (std::uint64_t seed : {1, 2, 3}) {
        FlowState s = initial_state(random_body(g, 0.2, 4, seed));
        for (int k = 0; k < 5; ++k) {
            s = step(s, shrink());
            CHECK(robin_residual(s.body.support()).sup() <= 1e-12 * s.body.support().sup_abs());
        }
    }

    auto a = build_grid(2, kPi / 4, 101, GridMode::Axisymmetric);
    FlowState s = initial_state(random_body(a, 0.2, 3, 4));
    for (int k = 0; k < 5; ++k) s = step(s, shrink(2.0));
    CHECK(robin_residual(s.body.support()).sup() <= 1e-12 * s.body.support().sup_abs());
}

TEST_CASE("step errors") {
    auto g = build_grid(1, kPi / 3, 101, GridMode::Full1D);
    std::vector<double> h(g->ell().begin(), g->ell().end());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += 0.01 * std::cos(40.0 * g->nodes()[i]);
    const CapillaryBody bent = CapillaryBody::trusted(enforce_robin(ScalarField(g, h)));
    try {
        step(initial_state(bent), shrink());
        FAIL("expected ConvexityLost");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConvexityLost);
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }

    FlowState s = initial_state(cap_body(g, 0.5));
    s.k_reference = 1e-7;
    CHECK(code_of([&] { step(s, shrink()); }) == ErrorCode::CurvatureBlowup);

    FlowConfig c = shrink();
    c.blowup_factor = 1.0001;
    const RunResult r = run(cap_body(g), c);
    CHECK(r.outcome.kind == OutcomeKind::Aborted);
    CHECK(r.outcome.reason.find("CurvatureBlowup") != std::string::npos);
}

TEST_CASE("rescale map") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    // The discrete volume of ℓ matches Vol(Ĉ_θ) up to O(Δ²).
    const double d2 = g->spacing() * g->spacing();
    const RescaledBody id = rescale_map(cap_body(g));
    CHECK(std::abs(id.t) <= d2);
    CHECK(support_distance(id.body, cap_body(g)) <= d2);

    const RescaledBody small = rescale_map(cap_body(g, 0.6));
    CHECK(small.t - id.t == doctest::Approx(-std::log(0.6)).epsilon(1e-12));
    CHECK(support_distance(small.body, id.body) <= 1e-12);

    const CapillaryBody b = random_body(g, 0.1, 3, 2);
    const double half = std::pow(0.5, 1.0 / 2.0);
    const RescaledBody h = rescale_map(scale(b, half));
    const RescaledBody full = rescale_map(b);
    CHECK(h.t - full.t == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-10));
    CHECK(volume(full.body) == doctest::Approx(g->cap_volume()).epsilon(1e-12));
}

TEST_CASE("extinction of shrinking caps") {
    auto g = build_grid(1, kPi / 3, 101, GridMode::Full1D);
    const RunResult r = run(cap_body(g), shrink());
    REQUIRE(r.outcome.kind == OutcomeKind::Extinct);
    CHECK(*r.outcome.T_est == doctest::Approx(oracle::extinction_time(1, 1.0, 1.0)).epsilon(1e-3));
    CHECK(r.final_state.body.support().min() < 1e-2 * 0.75);

    const RunResult q = run(cap_body(g, 0.8), shrink(2.0));
    REQUIRE(q.outcome.kind == OutcomeKind::Extinct);
    CHECK(*q.outcome.T_est == doctest::Approx(oracle::extinction_time(1, 2.0, 0.8)).epsilon(5e-3));

    auto a = build_grid(2, kPi / 3, 65, GridMode::Axisymmetric);
    const RunResult s = run(cap_body(a), shrink());
    REQUIRE(s.outcome.kind == OutcomeKind::Extinct);
    CHECK(*s.outcome.T_est == doctest::Approx(oracle::extinction_time(2, 1.0, 1.0)).epsilon(5e-3));
}

TEST_CASE("trajectory follows the shrinking radius") {
    auto g = build_grid(1, kPi / 3, 101, GridMode::Full1D);
    FlowConfig c = shrink();
    c.t_max = 0.2;
    const RunResult r = run(cap_body(g), c);
    REQUIRE(r.outcome.kind == OutcomeKind::TimedOut);
    CHECK(r.outcome.t == doctest::Approx(0.2).epsilon(1e-12));
    const double rad = oracle::shrinking_radius(1, 1.0, 1.0, 0.2);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i)
        err = std::max(err, std::abs(r.final_state.body.support()[i] - rad * g->ell()[i]));
    CHECK(err <= 5e-3);
}

TEST_CASE("unnormalized invariants on a random body") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    FlowConfig c = shrink();
    c.t_max = 0.05;
    c.trace_stride = 200;
    const RunResult r = run(random_body(g, 0.1, 3, 7), c);
    REQUIRE(r.traces.size() > 3);
    const double omega = g->capillary_area();
    const double k_scale = r.traces.front().k_max;
    for (std::size_t k = 1; k < r.traces.size(); ++k) {
        const TraceRecord& p = r.traces[k - 1];
        const TraceRecord& q = r.traces[k];
        const double slope = (q.volume - p.volume) / (q.t - p.t);
        CHECK(std::abs(slope + omega) <= 1e-3 * omega);
        CHECK(q.k_min >= r.traces.front().k_min - 1e-6 * k_scale);
        CHECK(q.u_max <= p.u_max + 1e-6);
    }
}

TEST_CASE("normalized runs") {
    auto g = build_grid(1, kPi / 3, 101, GridMode::Full1D);
    const RunResult cap = run(cap_body(g), normalize());
    CHECK(cap.outcome.kind == OutcomeKind::Converged);
    CHECK(cap.outcome.t <= 1.0);
    CHECK(cap.outcome.residual <= 1e-3);
    CHECK(cap.recenterings.empty());

    const RunResult r = run(random_body(g, 0.1, 3, 7), normalize());
    REQUIRE(r.outcome.kind == OutcomeKind::Converged);
    CHECK(r.outcome.residual <= 1e-4);
    CHECK(!r.recenterings.empty());
    for (std::size_t k = 0; k < r.traces.size(); ++k) {
        CHECK(std::abs(r.traces[k].volume / g->cap_volume() - 1.0) <= 1e-10);
        if (k > 0) CHECK(r.traces[k].entropy <= r.traces[k - 1].entropy + 1e-6);
    }
    CHECK(std::abs(r.traces.back().entropy_point[0]) <= 1e-3);

    FlowConfig fixed = normalize();
    fixed.recenter = Recenter::Never;
    fixed.t_max = 3.0;
    const RunResult s = run(random_body(g, 0.1, 3, 7), fixed);
    CHECK(s.recenterings.empty());
    CHECK(s.outcome.kind == OutcomeKind::TimedOut);
    // The translation mode grows like e^t once the origin is off the limit point.
    CHECK(std::abs(s.traces.back().entropy_point[0]) > 10 * std::abs(s.traces[1].entropy_point[0]));
    fixed.t_max = 30.0;
    const RunResult lost = run(random_body(g, 0.1, 3, 7), fixed);
    CHECK(lost.outcome.kind == OutcomeKind::Aborted);
    CHECK(lost.outcome.reason.find("NonpositiveSupport") != std::string::npos);

    const RunResult q = run(random_body(g, 0.1, 3, 7), normalize(2.0));
    CHECK(q.outcome.kind == OutcomeKind::Converged);
    CHECK(q.traces.back().norm_coeff > 0.0);
}

TEST_CASE("traces and determinism") {
    auto g = build_grid(1, kPi / 4, 65, GridMode::Full1D);
    FlowConfig c = shrink();
    c.t_max = 0.05;
    c.trace_stride = 7;
    int seen = 0;
    const RunResult a = run(random_body(g, 0.1, 2, 5), c, [&](const TraceRecord&) { ++seen; });
    CHECK(seen == static_cast<int>(a.traces.size()));
    CHECK(a.traces.front().t == 0.0);
    CHECK(a.traces.back().t == a.outcome.t);
    const long steps = a.final_state.step_index;
    CHECK(a.traces.size() == static_cast<std::size_t>(steps / 7 + 1 + (steps % 7 != 0)));
    const RunResult b = run(random_body(g, 0.1, 2, 5), c);
    REQUIRE(a.traces.size() == b.traces.size());
    for (std::size_t k = 0; k < a.traces.size(); ++k) {
        CHECK(a.traces[k].t == b.traces[k].t);
        CHECK(a.traces[k].volume == b.traces[k].volume);
        CHECK(a.traces[k].res_sup == b.traces[k].res_sup);
    }
    for (const TraceRecord& t : a.traces) {
        CHECK(std::isfinite(t.entropy));
        CHECK(t.lambda_min > 0.0);
        CHECK(t.k_max >= t.k_min);
        CHECK(t.phi_max >= t.lambda_max);
    }

    c.max_steps = 3;
    const RunResult m = run(cap_body(g), c);
    CHECK(m.outcome.kind == OutcomeKind::TimedOut);
    CHECK(m.final_state.step_index == 3);
}
