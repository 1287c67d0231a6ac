#include "capgcf/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace capgcf::kernels {
namespace {

inline double first_at(const CapGrid& g, std::span<const double> f, std::size_t i) {
    const std::size_t last = f.size() - 1;
    const double d = g.spacing();
    if (i == 0) {
        if (g.mode() == GridMode::Axisymmetric) return 0.0;
        return (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * d);
    }
    if (i == last) return (11.0 * f[last] - 18.0 * f[last - 1] + 9.0 * f[last - 2] - 2.0 * f[last - 3]) / (6.0 * d);
    return (f[i + 1] - f[i - 1]) / (2.0 * d);
}

inline double second_at(const CapGrid& g, std::span<const double> f, std::size_t i) {
    const std::size_t last = f.size() - 1;
    const double d2 = g.spacing() * g.spacing();
    if (i == 0) {
        if (g.mode() == GridMode::Axisymmetric) return 2.0 * (f[1] - f[0]) / d2;
        return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / d2;
    }
    if (i == last) return (2.0 * f[last] - 5.0 * f[last - 1] + 4.0 * f[last - 2] - f[last - 3]) / d2;
    return (f[i + 1] - 2.0 * f[i] + f[i - 1]) / d2;
}

inline void radii_at(const CapGrid& g, std::span<const double> h, std::size_t i, double& radial,
                     double& tangential) {
    radial = second_at(g, h, i) + h[i];
    if (g.mode() == GridMode::Full1D || i == 0) {
        tangential = radial;
        return;
    }
    const double a = g.nodes()[i];
    tangential = first_at(g, h, i) * std::cos(a) / std::sin(a) + h[i];
}

inline void rhs_at(const CapGrid& g, std::span<const double> h, std::span<const double> radial,
                   std::span<const double> tangential, const FlowTerms& terms, std::size_t i,
                   double& rhs, double& stability) {
    const int n = g.dimension();
    const double lr = radial[i];
    const double lt = tangential[i];
    const double det = g.mode() == GridMode::Full1D ? lr : lr * std::pow(lt, n - 1);
    const double k = 1.0 / det;
    const double ka = terms.alpha == 1.0 ? k : std::pow(k, terms.alpha);
    const double ell = g.ell()[i];
    const double lambda_min = g.mode() == GridMode::Full1D || n == 1 ? lr : std::min(lr, lt);
    stability = lambda_min / (ell * ka * std::max(1.0, terms.alpha));
    if (!g.is_interior(i)) {
        rhs = 0.0;
        return;
    }
    const double speed = terms.coefficient * ell * ka;
    rhs = terms.normalized ? h[i] - speed : -speed;
}

}  // namespace

namespace serial {

void first_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out) {
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = first_at(grid, f, i);
}

void second_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out) {
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = second_at(grid, f, i);
}

void principal_radii(const CapGrid& grid, std::span<const double> h, std::span<double> radial,
                     std::span<double> tangential) {
    for (std::size_t i = 0; i < h.size(); ++i) radii_at(grid, h, i, radial[i], tangential[i]);
}

void flow_rhs(const CapGrid& grid, std::span<const double> h, std::span<const double> radial,
              std::span<const double> tangential, const FlowTerms& terms, std::span<double> rhs,
              std::span<double> stability) {
    for (std::size_t i = 0; i < h.size(); ++i)
        rhs_at(grid, h, radial, tangential, terms, i, rhs[i], stability[i]);
}

double weighted_sum(std::span<const double> w, std::span<const double> f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i];
    return acc;
}

}  // namespace serial

namespace parallel {

void first_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static) if (f.size() >= kParallelMinNodes)
    for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = first_at(grid, f, static_cast<std::size_t>(i));
}

void second_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out) {
    const auto count = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static) if (f.size() >= kParallelMinNodes)
    for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = second_at(grid, f, static_cast<std::size_t>(i));
}

void principal_radii(const CapGrid& grid, std::span<const double> h, std::span<double> radial,
                     std::span<double> tangential) {
    const auto count = static_cast<std::ptrdiff_t>(h.size());
#pragma omp parallel for schedule(static) if (h.size() >= kParallelMinNodes)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        radii_at(grid, h, k, radial[k], tangential[k]);
    }
}

void flow_rhs(const CapGrid& grid, std::span<const double> h, std::span<const double> radial,
              std::span<const double> tangential, const FlowTerms& terms, std::span<double> rhs,
              std::span<double> stability) {
    const auto count = static_cast<std::ptrdiff_t>(h.size());
#pragma omp parallel for schedule(static) if (h.size() >= kParallelMinNodes)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        rhs_at(grid, h, radial, tangential, terms, k, rhs[k], stability[k]);
    }
}

double weighted_sum(std::span<const double> w, std::span<const double> f) {
    const auto count = static_cast<std::ptrdiff_t>(f.size());
    double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc) if (f.size() >= kParallelMinNodes)
    for (std::ptrdiff_t i = 0; i < count; ++i) acc += w[i] * f[i];
    return acc;
}

}  // namespace parallel

}  // namespace capgcf::kernels
