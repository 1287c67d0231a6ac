#include "capgcf/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "capgcf/error.hpp"

namespace capgcf {

namespace {

constexpr const char* kModule = "body";
constexpr int kCornerSamples = 64;

// Brent minimisation on [lo, hi]; returns (argmin, min).
template <class F>
std::pair<double, double> minimize(F f, double lo, double hi) {
    if (!(hi > lo)) return {lo, f(lo)};
    std::uintmax_t iters = 200;
    return boost::math::tools::brent_find_minima(f, lo, hi, 30, iters);
}

std::string node_report(const CapGrid& g, std::size_t i, double value) {
    return "node " + std::to_string(i) + " (angle " + std::to_string(g.nodes()[i]) + ") has principal radius " +
           std::to_string(value);
}

}  // namespace

double HorizontalPoint::norm() const {
    double s = 0.0;
    for (double c : coords) s += c * c;
    return std::sqrt(s);
}

CapillaryBody CapillaryBody::from_support(ScalarField h, double robin_tol) {
    const CapGrid& g = *h.grid();
    const PrincipalRadii radii = principal_radii(h);
    std::size_t worst = 0;
    double worst_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h.size(); ++i) {
        double v = radii.radial[i];
        if (radii.tangential_multiplicity > 0) v = std::min(v, radii.tangential[i]);
        if (v < worst_value) {
            worst_value = v;
            worst = i;
        }
    }
    if (!(worst_value > 0.0)) throw Error(ErrorCode::NotConvex, kModule, node_report(g, worst, worst_value));

    const double scale = h.sup_abs();
    const double residual = robin_residual(h).sup();
    if (residual > robin_tol * scale)
        throw Error(ErrorCode::RobinViolation, kModule,
                    "Robin residual " + std::to_string(residual) + " exceeds " + std::to_string(robin_tol * scale));
    return CapillaryBody(std::move(h));
}

CapillaryBody CapillaryBody::trusted(ScalarField h) { return CapillaryBody(std::move(h)); }

CapillaryBody cap_body(const GridPtr& grid, double radius, double x0) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "cap radius must be positive");
    if (x0 != 0.0 && grid->mode() != GridMode::Full1D)
        throw Error(ErrorCode::InvalidArgument, kModule, "off-centre caps need a Full1D grid");
    std::vector<double> h(grid->size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = radius * grid->ell()[i] + x0 * grid->horizontal()[i];
    return CapillaryBody::from_support(enforce_robin(ScalarField(grid, std::move(h))));
}

CapillaryBody translate(const CapillaryBody& body, double x0) {
    const CapGrid& g = body.grid_ref();
    if (x0 == 0.0) return body;
    if (g.mode() != GridMode::Full1D)
        throw Error(ErrorCode::InvalidArgument, kModule, "off-axis translation needs a Full1D grid");
    ScalarField h = body.support();
    auto& v = h.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += x0 * g.horizontal()[i];
    enforce_robin_inplace(g, v);
    return CapillaryBody::trusted(std::move(h));
}

CapillaryBody scale(const CapillaryBody& body, double factor) {
    if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "scale factor must be positive");
    return CapillaryBody::trusted(body.support() * factor);
}

ScalarField capillary_support(const CapillaryBody& body) {
    return body.support().divided_by(ell_field(body.grid()));
}

DirectionSamples direction_samples(const CapillaryBody& body, bool off_axis) {
    const CapGrid& g = body.grid_ref();
    const auto h = body.support().values();
    DirectionSamples s;
    if (g.mode() == GridMode::Full1D || !off_axis) {
        s.weight.assign(g.weights().begin(), g.weights().end());
        s.ell.assign(g.ell().begin(), g.ell().end());
        s.xi1.resize(g.size(), 0.0);
        if (g.mode() == GridMode::Full1D) s.xi1.assign(g.horizontal().begin(), g.horizontal().end());
        s.u.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) s.u[i] = h[i] / g.ell()[i];
        return s;
    }

    // Split each ring a = const into horizontal directions at angle β from E_1.
    const int n = g.dimension();
    std::vector<double> cosb;
    std::vector<double> frac;
    if (n == 1) {
        cosb = {1.0, -1.0};
        frac = {0.5, 0.5};
    } else if (n == 2) {
        for (int j = 0; j < kBetaNodes; ++j) {
            cosb.push_back(std::cos(2.0 * std::numbers::pi * j / kBetaNodes));
            frac.push_back(1.0 / kBetaNodes);
        }
    } else {
        double total = 0.0;
        for (int j = 0; j < kBetaNodes; ++j) {
            const double b = std::numbers::pi * (j + 0.5) / kBetaNodes;
            cosb.push_back(std::cos(b));
            frac.push_back(std::pow(std::sin(b), n - 2));
            total += frac.back();
        }
        for (double& f : frac) f /= total;
    }
    const std::size_t m = cosb.size();
    s.weight.reserve(g.size() * m);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            s.weight.push_back(g.weights()[i] * frac[j]);
            s.ell.push_back(g.ell()[i]);
            s.xi1.push_back(g.horizontal()[i] * cosb[j]);
            s.u.push_back(h[i] / g.ell()[i]);
        }
    }
    return s;
}

double axis_coordinate(const CapillaryBody& body, const HorizontalPoint& z) {
    if (static_cast<int>(z.coords.size()) != body.dimension())
        throw Error(ErrorCode::InvalidArgument, kModule, "evaluation point has wrong dimension");
    return body.grid_ref().mode() == GridMode::Full1D ? z.coords[0] : z.norm();
}

std::vector<double> capillary_support(const CapillaryBody& body, const HorizontalPoint& z,
                                      DirectionSamples* samples_out) {
    const double zc = axis_coordinate(body, z);
    DirectionSamples s = direction_samples(body, zc != 0.0);
    std::vector<double> uz(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) uz[k] = s.u[k] - zc * s.xi1[k] / s.ell[k];
    if (samples_out) *samples_out = std::move(s);
    return uz;
}

ScalarField gauss_curvature(const CapillaryBody& body) {
    ScalarField det = principal_radii(body.support()).determinant();
    for (double& v : det.data()) v = 1.0 / v;
    return det;
}

std::vector<ProfilePoint> embed(const CapillaryBody& body) {
    const CapGrid& g = body.grid_ref();
    const auto h = body.support().values();
    const ScalarField dh = differentiate(body.support(), 1);
    std::vector<ProfilePoint> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = g.nodes()[i];
        const double sa = std::sin(a);
        const double ca = std::cos(a);
        out[i].horizontal = h[i] * sa + dh[i] * ca;
        out[i].vertical = h[i] * ca - dh[i] * sa;
    }
    return out;
}

double volume(const CapillaryBody& body) {
    const ScalarField det = principal_radii(body.support()).determinant();
    return integrate(body.support().times(det)) / (body.dimension() + 1);
}

AxisInterval positive_support_interval(const CapillaryBody& body) {
    const CapGrid& g = body.grid_ref();
    const auto h = body.support().values();
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.horizontal()[i];
        if (x > 0.0) upper = std::min(upper, h[i] / x);
        if (x < 0.0) lower = std::max(lower, h[i] / x);
    }
    if (g.mode() == GridMode::Axisymmetric) lower = -upper;
    return {lower, upper};
}

namespace {

// Classical support of the body in the unit direction at angle a from the
// vertical (a ∈ [−π/2, π/2]); beyond the cap the supporting point is a rim point.
struct ClassicalSupport {
    std::vector<double> angle;
    std::vector<double> value;
};

ClassicalSupport classical_support(const CapillaryBody& body, const std::vector<ProfilePoint>& x) {
    const CapGrid& g = body.grid_ref();
    ClassicalSupport cs;
    const auto h = body.support().values();
    for (std::size_t i = 0; i < g.size(); ++i) {
        cs.angle.push_back(g.nodes()[i]);
        cs.value.push_back(h[i]);
    }
    const double half_pi = 0.5 * std::numbers::pi;
    const double span = half_pi - g.theta();
    if (span <= 0.0) return cs;
    const ProfilePoint right = x.back();
    const ProfilePoint left = g.mode() == GridMode::Full1D ? x.front() : ProfilePoint{-right.horizontal, right.vertical};
    for (int k = 1; k <= kCornerSamples; ++k) {
        const double a = g.theta() + span * k / kCornerSamples;
        cs.angle.push_back(a);
        cs.value.push_back(right.horizontal * std::sin(a) + right.vertical * std::cos(a));
        if (g.mode() == GridMode::Full1D) {
            cs.angle.push_back(-a);
            cs.value.push_back(-left.horizontal * std::sin(a) + left.vertical * std::cos(a));
        }
    }
    return cs;
}

}  // namespace

BodyMetrics metrics(const CapillaryBody& body) {
    const CapGrid& g = body.grid_ref();
    const int n = g.dimension();
    const bool full = g.mode() == GridMode::Full1D;
    BodyMetrics m;
    const PrincipalRadii radii = principal_radii(body.support());
    const ScalarField det = radii.determinant();
    m.volume = integrate(body.support().times(det)) / (n + 1);
    m.surface_area = integrate(det);
    m.lambda_min = radii.min();
    m.lambda_max = radii.max();
    m.k_min = 1.0 / det.max();
    m.k_max = 1.0 / det.min();

    const std::vector<ProfilePoint> x = embed(body);
    if (full) {
        m.wetting_left = x.front().horizontal;
        m.wetting_right = x.back().horizontal;
        m.wetting_area = m.wetting_right - m.wetting_left;
    } else {
        m.wetting_right = x.back().horizontal;
        m.wetting_left = -m.wetting_right;
        m.wetting_area = unit_ball_volume(n) * std::pow(m.wetting_right, n);
    }
    m.capillary_area = m.surface_area - g.cos_theta() * m.wetting_area;

    // Capillary radii: caps C_{r,θ}(x0) inside/around the body ⇔ u_{x0} ≥ r / ≤ r.
    const ScalarField u = capillary_support(body);
    auto min_u = [&](double x0) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.size(); ++i) v = std::min(v, u[i] - x0 * g.horizontal()[i] / g.ell()[i]);
        return v;
    };
    auto max_u = [&](double x0) {
        double v = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.size(); ++i) v = std::max(v, u[i] - x0 * g.horizontal()[i] / g.ell()[i]);
        return v;
    };
    const AxisInterval wet = positive_support_interval(body);
    if (full) {
        m.rho_minus_cap = -minimize([&](double z) { return -min_u(z); }, wet.lower, wet.upper).second;
        m.rho_plus_cap = minimize(max_u, wet.lower, wet.upper).second;
    } else {
        m.rho_minus_cap = min_u(0.0);
        m.rho_plus_cap = max_u(0.0);
    }

    // Classical half-ball radii centred on the supporting plane.
    auto max_dist = [&](double x0) {
        double v = 0.0;
        for (const auto& p : x) v = std::max(v, std::hypot(p.horizontal - x0, p.vertical));
        return v;
    };
    const ClassicalSupport cs = classical_support(body, x);
    auto min_gap = [&](double x0) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cs.angle.size(); ++k) v = std::min(v, cs.value[k] - x0 * std::sin(cs.angle[k]));
        return v;
    };
    if (full) {
        m.rho_plus = minimize(max_dist, m.wetting_left, m.wetting_right).second;
        m.rho_minus = -minimize([&](double z) { return -min_gap(z); }, m.wetting_left, m.wetting_right).second;
    } else {
        m.rho_plus = max_dist(0.0);
        m.rho_minus = min_gap(0.0);
    }
    m.rho_minus_approximate = true;
    return m;
}

CapillaryBody random_body(const GridPtr& grid, double amplitude, int mode_count, std::uint64_t seed) {
    if (!(amplitude >= 0.0 && amplitude <= 0.5))
        throw Error(ErrorCode::InvalidArgument, kModule, "amplitude must lie in [0, 0.5]");
    if (mode_count < 1) throw Error(ErrorCode::InvalidArgument, kModule, "mode count must be >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> draws(static_cast<std::size_t>(mode_count));
    for (double& d : draws) d = unit(rng);

    const CapGrid& g = *grid;
    const bool full = g.mode() == GridMode::Full1D;
    double amp = amplitude;
    for (int attempt = 0; attempt <= 10; ++attempt, amp *= 0.5) {
        std::vector<double> h(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double s = full ? (g.nodes()[i] + g.theta()) / (2.0 * g.theta()) : g.nodes()[i] / g.theta();
            double u = 1.0;
            for (int j = 1; j <= mode_count; ++j)
                u += amp * draws[static_cast<std::size_t>(j - 1)] / (j * j) * std::cos(j * std::numbers::pi * s);
            h[i] = g.ell()[i] * u;
        }
        try {
            return CapillaryBody::from_support(enforce_robin(ScalarField(grid, std::move(h))));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotConvex) throw;
        }
    }
    throw Error(ErrorCode::GeneratorFailed, kModule,
                "no strictly convex body after 10 amplitude halvings (seed " + std::to_string(seed) + ")");
}

double support_distance(const CapillaryBody& a, const CapillaryBody& b) {
    if (a.support().size() != b.support().size())
        throw Error(ErrorCode::InvalidArgument, kModule, "support distance needs bodies on the same grid");
    double d = 0.0;
    for (std::size_t i = 0; i < a.support().size(); ++i) d = std::max(d, std::abs(a.support()[i] - b.support()[i]));
    return d;
}

}  // namespace capgcf
