#include "capgcf/convex_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "capgcf/error.hpp"

namespace capgcf {

namespace {

constexpr const char* kModule = "convex_analysis";

double vertical(std::span<const double> x) { return x.back(); }

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

struct Evaluation {
    DirectionSamples samples;
    std::vector<double> uz;
};

Evaluation evaluate(const CapillaryBody& body, const HorizontalPoint& z) {
    Evaluation ev;
    ev.uz = capillary_support(body, z, &ev.samples);
    double lo = ev.uz.empty() ? 0.0 : ev.uz[0];
    for (double v : ev.uz) lo = std::min(lo, v);
    if (!(lo > 0.0))
        throw Error(ErrorCode::NonpositiveSupport, kModule,
                    "min u_z = " + std::to_string(lo) + " at z = " + std::to_string(axis_coordinate(body, z)));
    return ev;
}

// Same as evaluate, but always on the product grid so that per-axis moments
// of an axisymmetric body are computed rather than assumed.
Evaluation evaluate_resolved(const CapillaryBody& body, const HorizontalPoint& z) {
    if (body.grid_ref().mode() == GridMode::Full1D || !z.is_origin()) return evaluate(body, z);
    Evaluation ev;
    ev.samples = direction_samples(body, true);
    ev.uz = ev.samples.u;
    return ev;
}

double capillary_area_of(const DirectionSamples& s) {
    double w = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) w += s.weight[k] * s.ell[k];
    return w;
}

struct AxisValue {
    double g = 0.0;
    double dg = 0.0;
    double scale = 0.0;
};

// V′, V″ and the orthogonality scale at axis coordinate zc.
AxisValue santalo_axis(const CapillaryBody& body, double zc) {
    const int n = body.dimension();
    const Evaluation ev = evaluate(body, HorizontalPoint::on_axis(n, zc));
    AxisValue a;
    for (std::size_t k = 0; k < ev.uz.size(); ++k) {
        const double w = ev.samples.weight[k];
        const double x = ev.samples.xi1[k];
        const double p = std::pow(ev.uz[k], -(n + 2));
        a.g += w * x * p;
        a.scale += w * std::abs(x) * p;
        a.dg += w * (n + 2) * x * x * p / (ev.samples.ell[k] * ev.uz[k]);
    }
    return a;
}

// ∫ ξ₁ u_z^{−p} and its z-derivative; p = 1/α.
AxisValue entropy_axis(const CapillaryBody& body, double zc, double p) {
    const Evaluation ev = evaluate(body, HorizontalPoint::on_axis(body.dimension(), zc));
    AxisValue a;
    for (std::size_t k = 0; k < ev.uz.size(); ++k) {
        const double w = ev.samples.weight[k];
        const double x = ev.samples.xi1[k];
        const double q = p == 1.0 ? 1.0 / ev.uz[k] : std::pow(ev.uz[k], -p);
        a.g += w * x * q;
        a.scale += w * std::abs(x) * q;
        a.dg += p * w * x * x * q / (ev.samples.ell[k] * ev.uz[k]);
    }
    return a;
}

// Root of an increasing function on the shrunk wetting interval: Newton
// steps kept inside a sign-change bracket, bisection otherwise.
template <class F>
std::pair<double, int> increasing_root(const CapillaryBody& body, F eval, const char* what) {
    const AxisInterval wet = positive_support_interval(body);
    double lo = wet.lower + kSearchShrink * wet.length();
    double hi = wet.upper - kSearchShrink * wet.length();
    if (!(hi > lo)) throw Error(ErrorCode::NoInteriorMinimum, kModule, std::string(what) + ": empty wetting interval");
    const AxisValue at_lo = eval(lo);
    const AxisValue at_hi = eval(hi);
    if (at_lo.g > 0.0 || at_hi.g < 0.0)
        throw Error(ErrorCode::NoInteriorMinimum, kModule, std::string(what) + ": gradient does not change sign");

    double z = std::clamp(0.0, lo, hi);
    for (int it = 0; it < kSearchMaxIterations; ++it) {
        const AxisValue v = eval(z);
        if (std::abs(v.g) <= kSearchTol * v.scale) return {z, it};
        if (v.g < 0.0)
            lo = z;
        else
            hi = z;
        double next = v.dg > 0.0 ? z - v.g / v.dg : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == z) break;
        z = next;
    }
    throw Error(ErrorCode::MaxIterations, kModule, std::string(what) + ": no convergence in 100 iterations");
}

}  // namespace

double gauge(std::span<const double> x, double theta) { return norm(x) - std::cos(theta) * vertical(x); }

double dual_gauge(std::span<const double> x, double theta) {
    const double cot = std::cos(theta) / std::sin(theta);
    const double ex = -vertical(x);
    const double r = norm(x);
    return (std::sqrt(r * r + cot * cot * ex * ex) - cot * ex) / std::sin(theta);
}

std::vector<double> cahn_hoffman(std::span<const double> xi, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double ell = s * s - c * vertical(xi);
    std::vector<double> out(xi.begin(), xi.end());
    out.back() += c;
    for (double& v : out) v /= ell;
    return out;
}

std::vector<double> cap_point(std::span<const double> horizontal, double a, double theta) {
    std::vector<double> out;
    out.reserve(horizontal.size() + 1);
    for (double v : horizontal) out.push_back(std::sin(a) * v);
    out.push_back(std::cos(a) - std::cos(theta));
    return out;
}

double polar_volume(const CapillaryBody& body, const HorizontalPoint& z) {
    const int n = body.dimension();
    const Evaluation ev = evaluate(body, z);
    double acc = 0.0;
    for (std::size_t k = 0; k < ev.uz.size(); ++k)
        acc += ev.samples.weight[k] * ev.samples.ell[k] * std::pow(ev.uz[k], -(n + 1));
    return acc / (n + 1);
}

double entropy(const CapillaryBody& body, const HorizontalPoint& z) {
    const Evaluation ev = evaluate(body, z);
    double acc = 0.0;
    for (std::size_t k = 0; k < ev.uz.size(); ++k)
        acc += ev.samples.weight[k] * ev.samples.ell[k] * std::log(ev.uz[k]);
    return acc / capillary_area_of(ev.samples);
}

double alpha_entropy(const CapillaryBody& body, const HorizontalPoint& z, double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "alpha must be positive");
    if (alpha == 1.0) return entropy(body, z);
    const Evaluation ev = evaluate(body, z);
    const double p = 1.0 - 1.0 / alpha;
    double acc = 0.0;
    for (std::size_t k = 0; k < ev.uz.size(); ++k)
        acc += ev.samples.weight[k] * ev.samples.ell[k] * std::pow(ev.uz[k], p);
    return alpha / (alpha - 1.0) * std::log(acc / capillary_area_of(ev.samples));
}

std::vector<Orthogonality> santalo_orthogonality(const CapillaryBody& body, const HorizontalPoint& z) {
    const int n = body.dimension();
    const Evaluation ev = evaluate_resolved(body, z);
    std::vector<Orthogonality> out(static_cast<std::size_t>(n));
    // The product grid is invariant under rotations, so every axis sees the E_1 moment.
    for (std::size_t k = 0; k < ev.uz.size(); ++k) {
        const double w = ev.samples.weight[k] * std::pow(ev.uz[k], -(n + 2));
        out[0].value += w * ev.samples.xi1[k];
        out[0].scale += w * std::abs(ev.samples.xi1[k]);
    }
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = out[0];
    return out;
}

std::vector<Orthogonality> entropy_orthogonality(const CapillaryBody& body, const HorizontalPoint& z) {
    const int n = body.dimension();
    const Evaluation ev = evaluate_resolved(body, z);
    std::vector<Orthogonality> out(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < ev.uz.size(); ++k) {
        const double w = ev.samples.weight[k] / ev.uz[k];
        out[0].value += w * ev.samples.xi1[k];
        out[0].scale += w * std::abs(ev.samples.xi1[k]);
    }
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = out[0];
    return out;
}

ExtremalPoint santalo_point(const CapillaryBody& body) {
    const int n = body.dimension();
    ExtremalPoint out;
    out.point = HorizontalPoint::origin(n);
    if (body.grid_ref().mode() == GridMode::Full1D) {
        const auto [z, it] = increasing_root(body, [&](double zc) { return santalo_axis(body, zc); }, "santalo_point");
        out.point = HorizontalPoint::on_axis(n, z);
        out.iterations = it;
    }
    out.value = polar_volume(body, out.point);
    return out;
}

ExtremalPoint entropy_point(const CapillaryBody& body) { return alpha_entropy_point(body, 1.0); }

ExtremalPoint alpha_entropy_point(const CapillaryBody& body, double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "alpha must be positive");
    const int n = body.dimension();
    ExtremalPoint out;
    out.point = HorizontalPoint::origin(n);
    if (body.grid_ref().mode() == GridMode::Full1D) {
        const double p = 1.0 / alpha;
        const auto [z, it] =
            increasing_root(body, [&](double zc) { return entropy_axis(body, zc, p); }, "entropy_point");
        out.point = HorizontalPoint::on_axis(n, z);
        out.iterations = it;
    }
    out.value = alpha_entropy(body, out.point, alpha);
    return out;
}

BlaschkeSantalo blaschke_santalo_check(const CapillaryBody& body) {
    BlaschkeSantalo bs;
    bs.product = volume(body) * santalo_point(body).value;
    const double ball = unit_ball_volume(body.dimension() + 1);
    bs.bound = 0.5 * ball * ball;
    bs.margin = bs.bound - bs.product;
    return bs;
}

ToolkitReport toolkit_report(const CapillaryBody& body, const std::vector<HorizontalPoint>& probes) {
    ToolkitReport r;
    const ExtremalPoint zs = santalo_point(body);
    const ExtremalPoint ze = entropy_point(body);
    r.santalo_point = zs.point;
    r.santalo_volume = zs.value;
    r.entropy_point = ze.point;
    r.entropy_value = ze.value;
    r.bs_product = volume(body) * zs.value;
    const double ball = unit_ball_volume(body.dimension() + 1);
    r.bs_bound = 0.5 * ball * ball;

    std::vector<HorizontalPoint> points = {HorizontalPoint::origin(body.dimension()), zs.point, ze.point};
    points.insert(points.end(), probes.begin(), probes.end());
    for (const auto& p : points) r.polar_volume_at.push_back({p, polar_volume(body, p)});

    for (const auto& o : santalo_orthogonality(body, zs.point)) r.santalo_orthogonality.push_back(o.relative());
    for (const auto& o : entropy_orthogonality(body, ze.point)) r.entropy_orthogonality.push_back(o.relative());
    return r;
}

}  // namespace capgcf
