#include "capgcf/cap_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "capgcf/error.hpp"
#include "capgcf/kernels.hpp"

namespace capgcf {

namespace {
constexpr const char* kModule = "cap_domain";
}

std::string_view to_string(GridMode mode) {
    return mode == GridMode::Full1D ? "Full1D" : "Axisymmetric";
}

GridMode parse_grid_mode(std::string_view text) {
    if (text == "Full1D" || text == "full1d" || text == "full") return GridMode::Full1D;
    if (text == "Axisymmetric" || text == "axisymmetric" || text == "axi") return GridMode::Axisymmetric;
    throw Error(ErrorCode::InvalidArgument, kModule, "unknown grid mode '" + std::string(text) + "'");
}

double unit_sphere_area(int k) {
    const double half = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double unit_ball_volume(int k) {
    const double half = 0.5 * k;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

GridPtr build_grid(int n, double theta, int node_count, GridMode mode) {
    if (!(theta > 0.0 && theta <= 0.5 * std::numbers::pi + 1e-14))
        throw Error(ErrorCode::AngleOutOfRange, kModule,
                    "theta = " + std::to_string(theta) + " must lie in (0, pi/2]");
    if (node_count < kMinNodeCount || node_count % 2 == 0)
        throw Error(ErrorCode::BadNodeCount, kModule,
                    "node count " + std::to_string(node_count) + " must be odd and >= 33");
    if (n < 1) throw Error(ErrorCode::InvalidArgument, kModule, "dimension n must be >= 1");
    if (mode == GridMode::Full1D && n != 1)
        throw Error(ErrorCode::InvalidArgument, kModule, "Full1D grids require n = 1");

    std::shared_ptr<CapGrid> g(new CapGrid());
    g->n_ = n;
    g->theta_ = std::min(theta, 0.5 * std::numbers::pi);
    g->mode_ = mode;
    const bool right_angle = g->theta_ >= 0.5 * std::numbers::pi - 1e-14;
    g->cos_theta_ = right_angle ? 0.0 : std::cos(g->theta_);
    g->sin_theta_ = right_angle ? 1.0 : std::sin(g->theta_);

    const auto count = static_cast<std::size_t>(node_count);
    const double half = 0.5 * static_cast<double>(count - 1);
    g->nodes_.resize(count);
    if (mode == GridMode::Full1D) {
        g->spacing_ = 2.0 * g->theta_ / static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) g->nodes_[i] = (static_cast<double>(i) - half) * g->spacing_;
        g->nodes_.front() = -g->theta_;
        g->nodes_.back() = g->theta_;
    } else {
        g->spacing_ = g->theta_ / static_cast<double>(count - 1);
        for (std::size_t i = 0; i < count; ++i) g->nodes_[i] = static_cast<double>(i) * g->spacing_;
        g->nodes_.back() = g->theta_;
    }

    // Composite Simpson on f·ρ(a) with ρ the surface density of the chart.
    const double sphere = mode == GridMode::Axisymmetric ? unit_sphere_area(n - 1) : 1.0;
    g->weights_.resize(count);
    g->ell_.resize(count);
    g->horizontal_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double a = g->nodes_[i];
        double simpson = (i == 0 || i + 1 == count) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        simpson *= g->spacing_ / 3.0;
        const double density = mode == GridMode::Axisymmetric ? sphere * std::pow(std::sin(a), n - 1) : 1.0;
        g->weights_[i] = simpson * density;
        g->ell_[i] = 1.0 - g->cos_theta_ * std::cos(a);
        g->horizontal_[i] = std::sin(a);
    }
    g->area_ = kernels::serial::weighted_sum(g->weights_, std::vector<double>(count, 1.0));
    g->capillary_area_ = kernels::serial::weighted_sum(g->weights_, g->ell_);
    return g;
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error(ErrorCode::InvalidArgument, kModule, "field without grid");
    if (values_.size() != grid_->size())
        throw Error(ErrorCode::InvalidArgument, kModule,
                    "field has " + std::to_string(values_.size()) + " samples, grid has " +
                        std::to_string(grid_->size()));
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw Error(ErrorCode::InvalidArgument, kModule, "non-finite sample at node " + std::to_string(i));
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
    const std::size_t n = grid->size();
    return ScalarField(std::move(grid), std::vector<double>(n, value));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::sup_abs() const {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
    for (double& v : values_) v *= factor;
    return *this;
}

ScalarField ScalarField::times(const ScalarField& other) const {
    ScalarField out = *this;
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] *= other.values_[i];
    return out;
}

ScalarField ScalarField::divided_by(const ScalarField& other) const {
    ScalarField out = *this;
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] /= other.values_[i];
    return out;
}

// Serial on purpose: output files must not depend on the thread count.
double integrate(const ScalarField& f) { return kernels::serial::weighted_sum(f.grid()->weights(), f.values()); }

ScalarField ell_field(const GridPtr& grid) {
    return ScalarField(grid, std::vector<double>(grid->ell().begin(), grid->ell().end()));
}

ScalarField differentiate(const ScalarField& f, int order) {
    std::vector<double> out(f.size());
    if (order == 1)
        kernels::parallel::first_derivative(*f.grid(), f.values(), out);
    else if (order == 2)
        kernels::parallel::second_derivative(*f.grid(), f.values(), out);
    else
        throw Error(ErrorCode::InvalidArgument, kModule, "derivative order must be 1 or 2");
    return ScalarField(f.grid(), std::move(out));
}

PrincipalRadii principal_radii(const ScalarField& h) {
    std::vector<double> radial(h.size());
    std::vector<double> tangential(h.size());
    kernels::parallel::principal_radii(*h.grid(), h.values(), radial, tangential);
    const int mult = h.grid()->mode() == GridMode::Full1D ? 0 : h.grid()->dimension() - 1;
    return {ScalarField(h.grid(), std::move(radial)), ScalarField(h.grid(), std::move(tangential)), mult};
}

ScalarField PrincipalRadii::determinant() const {
    ScalarField out = radial;
    auto& v = out.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::pow(tangential[i], tangential_multiplicity);
    return out;
}

ScalarField PrincipalRadii::trace() const {
    ScalarField out = radial;
    auto& v = out.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += tangential_multiplicity * tangential[i];
    return out;
}

double PrincipalRadii::min() const {
    return tangential_multiplicity > 0 ? std::min(radial.min(), tangential.min()) : radial.min();
}

double PrincipalRadii::max() const {
    return tangential_multiplicity > 0 ? std::max(radial.max(), tangential.max()) : radial.max();
}

double RobinResidual::sup() const {
    double s = pole ? std::abs(*pole) : 0.0;
    for (double b : boundary) s = std::max(s, std::abs(b));
    return s;
}

RobinResidual robin_residual(const ScalarField& h) {
    const CapGrid& g = *h.grid();
    const auto f = h.values();
    const std::size_t last = f.size() - 1;
    const double d = g.spacing();
    const double cot = g.cot_theta();
    RobinResidual out;
    const double right = (11.0 * f[last] - 18.0 * f[last - 1] + 9.0 * f[last - 2] - 2.0 * f[last - 3]) / (6.0 * d);
    const double left = (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * d);
    if (g.mode() == GridMode::Full1D) {
        // Outward conormal at φ = −θ points towards decreasing φ.
        out.boundary = {-left - cot * f[0], right - cot * f[last]};
    } else {
        out.boundary = {right - cot * f[last]};
        out.pole = left;
    }
    return out;
}

void enforce_robin_inplace(const CapGrid& g, std::span<double> h) {
    const std::size_t last = h.size() - 1;
    const double denom = 11.0 - 6.0 * g.spacing() * g.cot_theta();
    h[last] = (18.0 * h[last - 1] - 9.0 * h[last - 2] + 2.0 * h[last - 3]) / denom;
    const double inner = 18.0 * h[1] - 9.0 * h[2] + 2.0 * h[3];
    h[0] = g.mode() == GridMode::Full1D ? inner / denom : inner / 11.0;
}

ScalarField enforce_robin(ScalarField h) {
    enforce_robin_inplace(*h.grid(), h.data());
    return h;
}

}  // namespace capgcf
