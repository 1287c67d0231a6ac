#include <cmath>
#include <numbers>

#include "capgcf/body.hpp"
#include "capgcf/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace capgcf;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

double embedded_volume(const CapillaryBody& b) {
    const auto x = embed(b);
    const CapGrid& g = b.grid_ref();
    std::vector<double> px;
    std::vector<double> py;
    if (g.mode() == GridMode::Full1D) {
        for (const auto& p : x) {
            px.push_back(p.horizontal);
            py.push_back(std::max(0.0, p.vertical));
        }
        return oracle::polygon_area(px, py);
    }
    for (const auto& p : x) {
        px.push_back(p.horizontal);
        py.push_back(std::max(0.0, p.vertical));
    }
    return oracle::revolution_volume(g.dimension(), px, py);
}

}  // namespace

TEST_CASE("validation of support data") {
    auto g = build_grid(1, kPi / 3, 101, GridMode::Full1D);
    CHECK_NOTHROW(cap_body(g));
    CHECK(code_of([&] { CapillaryBody::from_support(-1.0 * ell_field(g)); }) == ErrorCode::NotConvex);
    CHECK(code_of([&] { CapillaryBody::from_support(ScalarField::constant(g, 1.0)); }) == ErrorCode::RobinViolation);
    try {
        CapillaryBody::from_support(-1.0 * ell_field(g));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
}

TEST_CASE("translated cap matches the brute-force support of its surface") {
    const double theta = kPi / 3;
    auto g = build_grid(1, theta, 201, GridMode::Full1D);
    const double r = 1.3;
    const double x0 = 0.2;
    const CapillaryBody b = cap_body(g, r, x0);
    // Ball of radius r centred at x0 − r·cosθ·E_2, cut by the plane.
    std::vector<double> px;
    std::vector<double> py;
    for (int k = 0; k <= 20000; ++k) {
        const double a = -theta + 2 * theta * k / 20000.0;
        px.push_back(x0 + r * std::sin(a));
        py.push_back(r * (std::cos(a) - std::cos(theta)));
    }
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(std::abs(b.support()[i] - oracle::brute_support(px, py, g->nodes()[i])) <= 1e-6);
}

TEST_CASE("capillary support and translation rule") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    const ScalarField u = capillary_support(cap_body(g));
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - 1.0) <= 1e-4);

    const CapillaryBody t = cap_body(g, 1.0, 0.3);
    const auto uz = capillary_support(t, HorizontalPoint::on_axis(1, 0.3));
    for (double v : uz) CHECK(std::abs(v - 1.0) <= 1e-4);
    const auto u0 = capillary_support(t, HorizontalPoint::origin(1));
    for (std::size_t i = 0; i < u0.size(); ++i) CHECK(u0[i] == doctest::Approx(t.support()[i] / g->ell()[i]));

    auto a = build_grid(2, kPi / 3, 65, GridMode::Axisymmetric);
    DirectionSamples s;
    const auto off = capillary_support(cap_body(a), HorizontalPoint::on_axis(2, 0.1), &s);
    CHECK(off.size() == a->size() * kBetaNodes);
    double wsum = 0.0;
    for (double w : s.weight) wsum += w;
    CHECK(wsum == doctest::Approx(a->area()).epsilon(1e-12));
}

TEST_CASE("Gauss curvature of caps") {
    auto check = [](const GridPtr& g, double r, double expected) {
        const ScalarField k = gauss_curvature(cap_body(g, r));
        const double d = g->spacing();
        for (std::size_t i = 0; i < k.size(); ++i) {
            CHECK(std::abs(k[i] - expected) <= 5 * d * d * expected);
        }
    };
    auto g1 = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    check(g1, 1.0, 1.0);
    check(g1, 2.0, 0.5);
    auto g2 = build_grid(2, kPi / 3, 201, GridMode::Axisymmetric);
    check(g2, 2.0, 0.25);
}

TEST_CASE("embedding of the unit cap") {
    const double theta = kPi / 3;
    for (GridMode mode : {GridMode::Full1D, GridMode::Axisymmetric}) {
        auto g = build_grid(mode == GridMode::Full1D ? 1 : 2, theta, 201, mode);
        const auto x = embed(cap_body(g));
        const std::size_t pole = mode == GridMode::Full1D ? g->size() / 2 : 0;
        CHECK(std::abs(x[pole].horizontal) <= 1e-12);
        CHECK(x[pole].vertical == doctest::Approx(1.0 - std::cos(theta)).epsilon(1e-4));
        CHECK(std::abs(x.back().horizontal - std::sin(theta)) <= 1e-4);
        CHECK(std::abs(x.back().vertical) <= 1e-12);
    }
    auto g = build_grid(1, theta, 201, GridMode::Full1D);
    const auto base = embed(cap_body(g));
    const auto moved = embed(cap_body(g, 1.0, 0.25));
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(std::abs(moved[i].horizontal - base[i].horizontal - 0.25) <= 1e-4);
        CHECK(std::abs(moved[i].vertical - base[i].vertical) <= 1e-4);
    }
}

TEST_CASE("volume of caps against closed forms and embedded oracles") {
    const double theta = kPi / 3;
    auto g1 = build_grid(1, theta, 257, GridMode::Full1D);
    const double v1 = volume(cap_body(g1));
    CHECK(v1 == doctest::Approx(theta - std::sin(theta) * std::cos(theta)).epsilon(1e-5));
    CHECK(std::abs(v1 - embedded_volume(cap_body(g1))) / v1 <= 1e-4);

    auto g2 = build_grid(2, theta, 257, GridMode::Axisymmetric);
    const double v2 = volume(cap_body(g2));
    CHECK(v2 == doctest::Approx(oracle::cap_volume(2, theta)).epsilon(1e-5));
    CHECK(oracle::cap_volume(2, theta) == doctest::Approx(0.6544985).epsilon(1e-7));
    CHECK(std::abs(v2 - embedded_volume(cap_body(g2))) / v2 <= 1e-4);

    CHECK(volume(cap_body(g2, 1.5)) == doctest::Approx(std::pow(1.5, 3) * v2).epsilon(1e-10));
}

TEST_CASE("scaling laws") {
    auto g = build_grid(1, kPi / 4, 129, GridMode::Full1D);
    const CapillaryBody b = random_body(g, 0.1, 3, 7);
    for (double lam : {0.5, 2.0}) {
        const CapillaryBody s = scale(b, lam);
        CHECK(volume(s) == doctest::Approx(lam * lam * volume(b)).epsilon(1e-10));
        const ScalarField k = gauss_curvature(b);
        const ScalarField ks = gauss_curvature(s);
        for (std::size_t i = 0; i < k.size(); ++i) CHECK(ks[i] == doctest::Approx(k[i] / lam).epsilon(1e-10));
    }
}

TEST_CASE("random bodies") {
    auto g = build_grid(1, kPi / 3, 201, GridMode::Full1D);
    const CapillaryBody cap = cap_body(g);
    CHECK(support_distance(random_body(g, 0.0, 4, 1), cap) == 0.0);

    const CapillaryBody b = random_body(g, 0.1, 3, 7);
    CHECK(principal_radii(b.support()).min() > 0.0);
    CHECK(support_distance(random_body(g, 0.1, 3, 7), b) == 0.0);
    CHECK(support_distance(random_body(g, 0.1, 3, 8), b) > 0.0);
    CHECK(robin_residual(b.support()).sup() <= 1e-12);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        try {
            random_body(g, 0.5, 8, seed);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GeneratorFailed);
        }
    }
    CHECK_THROWS_AS(random_body(g, 0.6, 3, 1), Error);
    CHECK_THROWS_AS(random_body(g, 0.1, 0, 1), Error);
}

TEST_CASE("metrics of caps") {
    const double theta = kPi / 3;
    auto g = build_grid(1, theta, 401, GridMode::Full1D);
    const BodyMetrics m = metrics(cap_body(g, 1.7));
    CHECK(m.rho_minus_cap == doctest::Approx(1.7).epsilon(1e-4));
    CHECK(m.rho_plus_cap == doctest::Approx(1.7).epsilon(1e-4));
    CHECK(m.rho_minus >= (1 - std::cos(theta)) * 1.7 - 1e-4);
    CHECK(m.rho_minus <= std::sin(theta) * 1.7 + 1e-4);
    CHECK(m.rho_minus_approximate);
    CHECK(m.wetting_area == doctest::Approx(2 * 1.7 * std::sin(theta)).epsilon(1e-4));
    CHECK(m.k_min <= m.k_max);

    auto half = build_grid(1, kPi / 2, 401, GridMode::Full1D);
    CHECK(metrics(cap_body(half)).capillary_area == doctest::Approx(kPi).epsilon(1e-8));

    auto a = build_grid(2, theta, 201, GridMode::Axisymmetric);
    const BodyMetrics ma = metrics(cap_body(a));
    CHECK(ma.rho_minus_cap == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(ma.capillary_area == doctest::Approx(oracle::capillary_area(2, theta)).epsilon(1e-4));
}

TEST_CASE("radii sandwich and interior positivity on generated bodies") {
    for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
        auto g = build_grid(1, theta, 201, GridMode::Full1D);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const CapillaryBody b = random_body(g, 0.2, 4, seed);
            const BodyMetrics m = metrics(b);
            CHECK(m.volume > 0.0);
            CHECK(m.rho_minus_cap <= m.rho_plus_cap);
            CHECK((1 - std::cos(theta)) * m.rho_plus_cap <= m.rho_plus + 1e-9);
            CHECK(m.rho_plus <= std::sin(theta) * m.rho_plus_cap + 1e-9);
            const AxisInterval w = positive_support_interval(b);
            for (double t : {0.1, 0.5, 0.9}) {
                const double z = w.lower + t * w.length();
                const auto uz = capillary_support(b, HorizontalPoint::on_axis(1, z));
                CHECK(*std::min_element(uz.begin(), uz.end()) > 0.0);
            }
            CHECK(std::abs(m.volume - embedded_volume(b)) / m.volume <= 1e-3);
        }
    }
}
