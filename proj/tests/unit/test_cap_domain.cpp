#include <cmath>
#include <numbers>

#include "capgcf/cap_domain.hpp"
#include "capgcf/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace capgcf;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField sample(const GridPtr& g, auto f) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g->nodes()[i]);
    return ScalarField(g, std::move(v));
}

double sup_dev(const ScalarField& f, double target, bool interior_only = false) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (interior_only && !f.grid()->is_interior(i)) continue;
        s = std::max(s, std::abs(f[i] - target));
    }
    return s;
}

}  // namespace

TEST_CASE("grid construction validates its arguments") {
    CHECK_THROWS_AS(build_grid(1, kPi / 3, 32, GridMode::Full1D), Error);
    try {
        build_grid(1, kPi / 3, 32, GridMode::Full1D);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadNodeCount);
        CHECK(std::string(e.what()).rfind("cap_domain: BadNodeCount", 0) == 0);
    }
    try {
        build_grid(1, kPi / 3, 31, GridMode::Full1D);
        FAIL("expected BadNodeCount");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadNodeCount);
    }
    for (double bad : {0.0, -0.1, 1.6, 3.0}) {
        try {
            build_grid(1, bad, 101, GridMode::Full1D);
            FAIL("expected AngleOutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AngleOutOfRange);
        }
    }
    CHECK_THROWS_AS(build_grid(2, kPi / 3, 101, GridMode::Full1D), Error);
    CHECK_NOTHROW(build_grid(1, kPi / 3, 101, GridMode::Axisymmetric));
}

TEST_CASE("nodes are uniform and centred") {
    auto g = build_grid(1, kPi / 3, 101, GridMode::Full1D);
    CHECK(g->nodes().front() == doctest::Approx(-kPi / 3).epsilon(1e-15));
    CHECK(g->nodes()[50] == 0.0);
    for (std::size_t i = 1; i < g->size(); ++i)
        CHECK(std::abs(g->nodes()[i] - g->nodes()[i - 1] - g->spacing()) < 1e-14);
    auto a = build_grid(2, kPi / 3, 101, GridMode::Axisymmetric);
    CHECK(a->nodes().front() == 0.0);
    CHECK(a->weights().front() == 0.0);
}

TEST_CASE("quadrature of one matches the cap area") {
    auto half = build_grid(1, kPi / 2, 101, GridMode::Full1D);
    CHECK(half->area() == doctest::Approx(kPi).epsilon(1e-12));

    auto g2 = build_grid(2, kPi / 3, 101, GridMode::Axisymmetric);
    CHECK(std::abs(g2->area() - oracle::cap_area(2, kPi / 3)) / kPi <= 1e-8);
    CHECK(oracle::cap_area(2, kPi / 3) == doctest::Approx(kPi).epsilon(1e-12));

    auto g3 = build_grid(3, kPi / 4, 201, GridMode::Axisymmetric);
    CHECK(std::abs(g3->area() - oracle::cap_area(3, kPi / 4)) / oracle::cap_area(3, kPi / 4) <= 1e-8);
}

TEST_CASE("capillary area quadrature matches the closed form") {
    for (double theta : {kPi / 6, kPi / 4, kPi / 3, kPi / 2}) {
        auto g1 = build_grid(1, theta, 101, GridMode::Full1D);
        CHECK(std::abs(g1->capillary_area() / oracle::capillary_area(1, theta) - 1.0) <= 1e-6);
        auto g2 = build_grid(2, theta, 101, GridMode::Axisymmetric);
        CHECK(std::abs(g2->capillary_area() / oracle::capillary_area(2, theta) - 1.0) <= 1e-6);
        CHECK(std::abs(g2->cap_volume() / oracle::cap_volume(2, theta) - 1.0) <= 1e-6);
    }
}

TEST_CASE("ell samples") {
    auto g = build_grid(1, kPi / 2, 101, GridMode::Full1D);
    CHECK(sup_dev(ell_field(g), 1.0) == 0.0);
    auto a = build_grid(2, kPi / 3, 101, GridMode::Axisymmetric);
    const ScalarField ell = ell_field(a);
    CHECK(ell[a->size() - 1] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(ell[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("first derivative of ell is second order") {
    const double theta = kPi / 3;
    double prev = 0.0;
    for (int nodes : {65, 129, 257}) {
        auto g = build_grid(1, theta, nodes, GridMode::Full1D);
        const ScalarField d = differentiate(ell_field(g), 1);
        double err = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i)
            err = std::max(err, std::abs(d[i] - std::cos(theta) * std::sin(g->nodes()[i])));
        CHECK(err <= 1.0 * g->spacing() * g->spacing());
        if (prev > 0.0) CHECK(oracle::order(prev, err) >= 1.9);
        prev = err;
    }
}

TEST_CASE("derivatives of constants vanish and differentiation is linear") {
    for (GridMode mode : {GridMode::Full1D, GridMode::Axisymmetric}) {
        auto g = build_grid(mode == GridMode::Full1D ? 1 : 2, kPi / 4, 65, mode);
        const ScalarField c = ScalarField::constant(g, 3.7);
        CHECK(differentiate(c, 1).sup_abs() <= 1e-12);
        CHECK(differentiate(c, 2).sup_abs() <= 1e-10);
        const ScalarField f = sample(g, [](double a) { return std::exp(a) + a * a; });
        const ScalarField h = sample(g, [](double a) { return std::cos(3 * a); });
        for (int order : {1, 2}) {
            const ScalarField lhs = differentiate(2.5 * f + (-1.5) * h, order);
            const ScalarField rhs = 2.5 * differentiate(f, order) + (-1.5) * differentiate(h, order);
            CHECK((lhs - rhs).sup_abs() <= 1e-9 * (1.0 + rhs.sup_abs()));
        }
        CHECK_THROWS_AS(differentiate(f, 3), Error);
    }
}

TEST_CASE("principal radii of ell, scaled ell and zero") {
    auto g = build_grid(1, kPi / 3, 129, GridMode::Full1D);
    const PrincipalRadii r1 = principal_radii(ell_field(g));
    CHECK(sup_dev(r1.radial, 1.0) <= 5 * g->spacing() * g->spacing());

    auto a = build_grid(2, kPi / 3, 129, GridMode::Axisymmetric);
    const PrincipalRadii r2 = principal_radii(2.0 * ell_field(a));
    CHECK(r2.tangential_multiplicity == 1);
    CHECK(sup_dev(r2.radial, 2.0) <= 10 * a->spacing() * a->spacing());
    CHECK(sup_dev(r2.tangential, 2.0) <= 10 * a->spacing() * a->spacing());
    CHECK(sup_dev(r2.determinant(), 4.0) <= 50 * a->spacing() * a->spacing());

    const PrincipalRadii r0 = principal_radii(ScalarField::constant(a, 0.0));
    CHECK(r0.radial.sup_abs() == 0.0);
    CHECK(r0.tangential.sup_abs() == 0.0);
}

TEST_CASE("operator identity converges at second order") {
    for (GridMode mode : {GridMode::Full1D, GridMode::Axisymmetric}) {
        double prev_radii = 0.0;
        double prev_robin = 0.0;
        for (int nodes : {65, 129, 257}) {
            auto g = build_grid(mode == GridMode::Full1D ? 1 : 2, kPi / 3, nodes, mode);
            const ScalarField ell = ell_field(g);
            const PrincipalRadii r = principal_radii(ell);
            const double e_radii = std::max(sup_dev(r.radial, 1.0), sup_dev(r.tangential, 1.0));
            const double e_robin = robin_residual(ell).sup();
            CHECK(e_radii <= 5 * g->spacing() * g->spacing());
            if (prev_radii > 0.0) {
                CHECK(oracle::order(prev_radii, e_radii) >= 1.9);
                CHECK(oracle::order(prev_robin, e_robin) >= 1.9);
            }
            prev_radii = e_radii;
            prev_robin = e_robin;
        }
    }
}

TEST_CASE("Robin residuals") {
    const double theta = kPi / 3;
    auto g = build_grid(1, theta, 257, GridMode::Full1D);
    const double d2 = g->spacing() * g->spacing();
    const RobinResidual rl = robin_residual(ell_field(g));
    REQUIRE(rl.boundary.size() == 2);
    CHECK(rl.sup() <= d2);

    const ScalarField bumped = sample(g, [theta](double p) {
        return (1.0 - std::cos(theta) * std::cos(p)) * (1.0 + 0.1 * std::cos(kPi * (p + theta) / (2 * theta)));
    });
    CHECK(robin_residual(bumped).sup() <= 5 * d2);

    auto q = build_grid(1, kPi / 4, 65, GridMode::Full1D);
    const RobinResidual one = robin_residual(ScalarField::constant(q, 1.0));
    CHECK(one.boundary[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(one.boundary[1] == doctest::Approx(-1.0).epsilon(1e-12));

    auto a = build_grid(2, theta, 129, GridMode::Axisymmetric);
    const RobinResidual ra = robin_residual(ell_field(a));
    CHECK(ra.boundary.size() == 1);
    CHECK(ra.pole.has_value());
    CHECK(ra.sup() <= 2 * a->spacing() * a->spacing());
}

TEST_CASE("boundary closure makes the discrete Robin identity exact") {
    for (GridMode mode : {GridMode::Full1D, GridMode::Axisymmetric}) {
        auto g = build_grid(mode == GridMode::Full1D ? 1 : 3, kPi / 5, 65, mode);
        const ScalarField f = sample(g, [](double a) { return 2.0 + std::sin(a) + a * a; });
        const ScalarField closed = enforce_robin(f);
        CHECK(robin_residual(closed).sup() <= 1e-12 * closed.sup_abs());
        for (std::size_t i = g->first_interior(); i <= g->last_interior(); ++i) CHECK(closed[i] == f[i]);
    }
}

TEST_CASE("scalar fields reject bad samples") {
    auto g = build_grid(1, kPi / 3, 33, GridMode::Full1D);
    CHECK_THROWS_AS(ScalarField(g, std::vector<double>(32, 0.0)), Error);
    std::vector<double> v(33, 1.0);
    v[5] = std::nan("");
    CHECK_THROWS_AS(ScalarField(g, v), Error);
}
