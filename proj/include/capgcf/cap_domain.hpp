#pragma once

// Discretization of the spherical cap C_θ = {ξ : |ξ − cosθ·e| = 1, ξ_{n+1} ≥ 0},
// e = −E_{n+1}. Directions are charted by the polar angle a of ω = ξ − cosθ·e
// measured from the vertical, so that ℓ(a) = 1 − cosθ·cos a.
//
//   Full1D        n = 1, nodes φ ∈ [−θ, θ], ω = (sin φ, cos φ)
//   Axisymmetric  n ≥ 1, nodes a ∈ [0, θ], fields depend on a only

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace capgcf {

enum class GridMode { Full1D, Axisymmetric };

std::string_view to_string(GridMode mode);
GridMode parse_grid_mode(std::string_view text);

inline constexpr int kMinNodeCount = 33;

class CapGrid {
public:
    int dimension() const noexcept { return n_; }
    double theta() const noexcept { return theta_; }
    GridMode mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double spacing() const noexcept { return spacing_; }

    double cos_theta() const noexcept { return cos_theta_; }
    double sin_theta() const noexcept { return sin_theta_; }
    double cot_theta() const noexcept { return cos_theta_ / sin_theta_; }

    /// Angular samples (φ for Full1D, a for Axisymmetric).
    std::span<const double> nodes() const noexcept { return nodes_; }
    /// Quadrature weights for ∫_{C_θ} · dσ.
    std::span<const double> weights() const noexcept { return weights_; }
    /// ℓ sampled at the nodes.
    std::span<const double> ell() const noexcept { return ell_; }
    /// Magnitude of the horizontal part of ξ: sin φ (signed) or sin a.
    std::span<const double> horizontal() const noexcept { return horizontal_; }

    /// Quadrature of 1, i.e. |C_θ|.
    double area() const noexcept { return area_; }
    /// ω_θ = ∫ ℓ dσ computed with the grid quadrature.
    double capillary_area() const noexcept { return capillary_area_; }
    /// Vol(Ĉ_θ) = ω_θ / (n+1), consistent with the grid quadrature.
    double cap_volume() const noexcept { return capillary_area_ / (n_ + 1); }

    /// Index range [first_interior, last_interior] of nodes evolved by the
    /// PDE; the remaining nodes are fixed by boundary/pole closure.
    std::size_t first_interior() const noexcept { return 1; }
    std::size_t last_interior() const noexcept { return size() - 2; }
    bool is_interior(std::size_t i) const noexcept { return i >= 1 && i + 1 < size(); }

    friend std::shared_ptr<const CapGrid> build_grid(int, double, int, GridMode);

private:
    CapGrid() = default;

    int n_ = 1;
    double theta_ = 0.0;
    GridMode mode_ = GridMode::Full1D;
    double spacing_ = 0.0;
    double cos_theta_ = 0.0;
    double sin_theta_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> ell_;
    std::vector<double> horizontal_;
    double area_ = 0.0;
    double capillary_area_ = 0.0;
};

using GridPtr = std::shared_ptr<const CapGrid>;

/// Throws AngleOutOfRange unless θ ∈ (0, π/2] (π/2 is admitted as the
/// free-boundary limit used by several closed-form checks) and BadNodeCount
/// unless node_count is odd and ≥ 33.
GridPtr build_grid(int n, double theta, int node_count, GridMode mode);

/// Area of the unit k-sphere S^k ⊂ ℝ^{k+1}.
double unit_sphere_area(int k);
/// Volume of the unit ball in ℝ^k.
double unit_ball_volume(int k);

/// One sample per grid node; values must be finite.
class ScalarField {
public:
    ScalarField(GridPtr grid, std::vector<double> values);
    static ScalarField constant(GridPtr grid, double value);

    const GridPtr& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    double min() const;
    double max() const;
    double sup_abs() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double factor);

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

    /// Pointwise product and quotient.
    ScalarField times(const ScalarField& other) const;
    ScalarField divided_by(const ScalarField& other) const;

    /// Raw storage, for kernels that update in place.
    std::vector<double>& data() noexcept { return values_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// ∫_{C_θ} f dσ with the grid quadrature.
double integrate(const ScalarField& f);

ScalarField ell_field(const GridPtr& grid);

/// Finite differences: centered second order in the interior; at the rim
/// nodes f′ uses the 4-point third-order one-sided stencil and f″ the 4-point
/// second-order one; at the Axisymmetric pole f′ = 0 and f″ uses even
/// reflection. `order` must be 1 or 2.
ScalarField differentiate(const ScalarField& f, int order);

/// Eigenvalues of ∇²h + hσ. The tangential eigenvalue has multiplicity
/// n − 1 (zero in Full1D, where it is left equal to the radial one).
struct PrincipalRadii {
    ScalarField radial;
    ScalarField tangential;
    int tangential_multiplicity = 0;

    /// det(∇²h + hσ) per node.
    ScalarField determinant() const;
    /// tr(∇²h + hσ) = Δh + n h per node.
    ScalarField trace() const;
    double min() const;
    double max() const;
};

PrincipalRadii principal_radii(const ScalarField& h);

/// ∇_μ h − cotθ·h at the rim nodes (Full1D: {φ=−θ, φ=θ}; Axisymmetric:
/// {a=θ}) plus, for Axisymmetric, the one-sided h′(0) at the pole.
struct RobinResidual {
    std::vector<double> boundary;
    std::optional<double> pole;
    double sup() const;
};

RobinResidual robin_residual(const ScalarField& h);

/// Rewrites the rim (and pole) values so the one-sided Robin (and pole
/// smoothness) stencils hold exactly, given the three nearest interior values.
ScalarField enforce_robin(ScalarField h);
void enforce_robin_inplace(const CapGrid& grid, std::span<double> h);

}  // namespace capgcf
