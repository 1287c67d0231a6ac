#pragma once

#include <cstdint>
#include <vector>

#include "capgcf/cap_domain.hpp"

namespace capgcf {

/// A point of the supporting hyperplane ∂ℝ^{n+1}_+ (n coordinates).
struct HorizontalPoint {
    std::vector<double> coords;

    static HorizontalPoint origin(int n) { return {std::vector<double>(static_cast<std::size_t>(n), 0.0)}; }
    static HorizontalPoint on_axis(int n, double x1) {
        HorizontalPoint p = origin(n);
        p.coords[0] = x1;
        return p;
    }
    double norm() const;
    bool is_origin() const { return norm() == 0.0; }
};

inline constexpr double kDefaultRobinTol = 1e-6;

/// Strictly convex capillary convex body, encoded by its support function
/// with respect to the origin.
class CapillaryBody {
public:
    /// Validates strict convexity (NotConvex, reporting the worst node) and
    /// the discrete Robin condition relative to sup|h| (RobinViolation).
    static CapillaryBody from_support(ScalarField h, double robin_tol = kDefaultRobinTol);
    /// Skips validation; for bodies produced by schemes that enforce the
    /// boundary closure themselves.
    static CapillaryBody trusted(ScalarField h);

    const GridPtr& grid() const noexcept { return h_.grid(); }
    const CapGrid& grid_ref() const noexcept { return *h_.grid(); }
    const ScalarField& support() const noexcept { return h_; }
    int dimension() const noexcept { return h_.grid()->dimension(); }

private:
    explicit CapillaryBody(ScalarField h) : h_(std::move(h)) {}
    ScalarField h_;
};

/// Cap C_{r,θ}(x0): h = r·ℓ + ⟨x0, ξ⟩. Off-origin centres need a Full1D grid.
CapillaryBody cap_body(const GridPtr& grid, double radius = 1.0, double x0 = 0.0);

/// Adds ⟨x0, ξ⟩ to the support function (translation of the body by x0 along
/// the horizontal axis) and re-closes the boundary. Full1D only for x0 ≠ 0.
CapillaryBody translate(const CapillaryBody& body, double x0);
CapillaryBody scale(const CapillaryBody& body, double factor);

/// Capillary support u = h/ℓ with respect to the origin.
ScalarField capillary_support(const CapillaryBody& body);

/// Direction samples covering C_θ for integrals that involve an off-origin
/// evaluation point along the horizontal axis E_1. For Full1D these are the
/// grid nodes; for Axisymmetric bodies with an off-axis point the (a, β)
/// product grid with 64 β nodes is used.
struct DirectionSamples {
    std::vector<double> weight;
    std::vector<double> ell;
    std::vector<double> xi1;  // ⟨ξ, E_1⟩
    std::vector<double> u;    // capillary support w.r.t. the origin
    std::size_t size() const { return weight.size(); }
};

inline constexpr int kBetaNodes = 64;

DirectionSamples direction_samples(const CapillaryBody& body, bool off_axis);

/// Coordinate of z along the search axis: z itself for Full1D, |z| for
/// axisymmetric bodies (rotation invariance).
double axis_coordinate(const CapillaryBody& body, const HorizontalPoint& z);

/// u_z(ξ) = u(ξ) − ⟨z, ξ⟩/ℓ(ξ) on the direction samples.
std::vector<double> capillary_support(const CapillaryBody& body, const HorizontalPoint& z,
                                      DirectionSamples* samples_out = nullptr);

/// K = 1/det(∇²h + hσ).
ScalarField gauss_curvature(const CapillaryBody& body);

/// Point on the surface: horizontal coordinate (signed for Full1D, radial for
/// Axisymmetric) and height above the supporting plane.
struct ProfilePoint {
    double horizontal = 0.0;
    double vertical = 0.0;
};

/// X(ξ) = ∇h + h·(ξ − cosθ·e) at every node.
std::vector<ProfilePoint> embed(const CapillaryBody& body);

/// (1/(n+1)) ∫ h·det(∇²h + hσ) dσ.
double volume(const CapillaryBody& body);

struct BodyMetrics {
    double volume = 0.0;
    double surface_area = 0.0;
    double wetting_area = 0.0;
    double capillary_area = 0.0;
    double k_min = 0.0;
    double k_max = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double rho_minus_cap = 0.0;
    double rho_plus_cap = 0.0;
    double rho_minus = 0.0;
    double rho_plus = 0.0;
    bool rho_minus_approximate = true;
    /// Horizontal interval of the wetting region (Full1D), or [−R, R].
    double wetting_left = 0.0;
    double wetting_right = 0.0;
};

BodyMetrics metrics(const CapillaryBody& body);

/// Interval of evaluation points z along the search axis for which every
/// u_z sample is positive (the discrete open wetting region).
struct AxisInterval {
    double lower = 0.0;
    double upper = 0.0;
    double length() const { return upper - lower; }
};
AxisInterval positive_support_interval(const CapillaryBody& body);

/// Test-body generator: h = ℓ·(1 + Σ_j c_j·cos(j·π·s)), |c_j| ≤ amplitude/j²,
/// with s the normalised angle. The amplitude is halved (at most 10 times)
/// until the body is strictly convex; GeneratorFailed otherwise.
CapillaryBody random_body(const GridPtr& grid, double amplitude, int mode_count, std::uint64_t seed);

/// sup over C_θ of |h₁ − h₂| (both on the same grid).
double support_distance(const CapillaryBody& a, const CapillaryBody& b);

}  // namespace capgcf
