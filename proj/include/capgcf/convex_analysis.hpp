#pragma once

// Capillary gauge, polar bodies, Santaló and entropy points.
//
// Ambient points x ∈ ℝ^{n+1} are stored with the vertical coordinate last;
// e = −E_{n+1}, so ⟨e, x⟩ = −x_{n+1}.

#include <span>
#include <vector>

#include "capgcf/body.hpp"

namespace capgcf {

/// F_θ(x) = |x| + cosθ⟨e, x⟩.
double gauge(std::span<const double> x, double theta);
/// F_θ°(x) = (√(|x|² + cot²θ⟨e,x⟩²) − cotθ⟨e,x⟩) / sinθ.
double dual_gauge(std::span<const double> x, double theta);
/// Ψ(ξ) = (ξ − cosθ·e)/ℓ(ξ) with ℓ(ξ) = sin²θ + cosθ⟨ξ, e⟩. The formula is
/// evaluated for any ξ, which lets callers difference it in ℝ^{n+1}.
std::vector<double> cahn_hoffman(std::span<const double> xi, double theta);
/// Point of C_θ ⊂ ℝ^{n+1} at polar angle a from the vertical in the
/// direction of the unit horizontal vector `horizontal` (n entries).
std::vector<double> cap_point(std::span<const double> horizontal, double a, double theta);

/// (1/(n+1))∫ ℓ u_z^{−(n+1)} dσ. NonpositiveSupport if min u_z ≤ 0.
double polar_volume(const CapillaryBody& body, const HorizontalPoint& z);
/// (1/ω_θ)∫ ℓ log u_z dσ with ω_θ the quadrature of ℓ.
double entropy(const CapillaryBody& body, const HorizontalPoint& z);
/// (α/(α−1))·log((1/ω_θ)∫ u_z^{1−1/α} ℓ dσ); α = 1 falls back to entropy.
double alpha_entropy(const CapillaryBody& body, const HorizontalPoint& z, double alpha);

/// First-order condition of an extremal point along one horizontal axis
/// together with the matching absolute-value integral used as its scale.
struct Orthogonality {
    double value = 0.0;
    double scale = 0.0;
    double relative() const { return scale > 0.0 ? value / scale : value; }
};

/// ∫ ξ_i u_z^{−(n+2)} dσ for each horizontal axis i.
std::vector<Orthogonality> santalo_orthogonality(const CapillaryBody& body, const HorizontalPoint& z);
/// ∫ ξ_i / u_z dσ for each horizontal axis i.
std::vector<Orthogonality> entropy_orthogonality(const CapillaryBody& body, const HorizontalPoint& z);

struct ExtremalPoint {
    HorizontalPoint point;
    double value = 0.0;
    int iterations = 0;
};

inline constexpr double kSearchShrink = 1e-6;
inline constexpr double kSearchTol = 1e-10;
inline constexpr int kSearchMaxIterations = 100;

/// Minimiser of the polar volume; value = V(z_s). Axisymmetric bodies return
/// the origin. NoInteriorMinimum, MaxIterations.
ExtremalPoint santalo_point(const CapillaryBody& body);
/// Maximiser of the entropy; value = E_θ(Σ̂).
ExtremalPoint entropy_point(const CapillaryBody& body);
/// Maximiser of the α-entropy; its first-order condition is ∫ ξ_i u_z^{−1/α} dσ = 0.
ExtremalPoint alpha_entropy_point(const CapillaryBody& body, double alpha);

struct BlaschkeSantalo {
    double product = 0.0;
    double bound = 0.0;
    double margin = 0.0;
};

/// Vol(Σ̂)·Vol(Σ̂*_{z_s}) against ½·Vol(B^{n+1})².
BlaschkeSantalo blaschke_santalo_check(const CapillaryBody& body);

struct PolarVolumeSample {
    HorizontalPoint point;
    double volume = 0.0;
};

struct ToolkitReport {
    std::vector<PolarVolumeSample> polar_volume_at;
    HorizontalPoint santalo_point;
    double santalo_volume = 0.0;
    HorizontalPoint entropy_point;
    double entropy_value = 0.0;
    double bs_product = 0.0;
    double bs_bound = 0.0;
    /// Per-axis relative residuals of the two first-order conditions.
    std::vector<double> santalo_orthogonality;
    std::vector<double> entropy_orthogonality;
};

/// Polar volumes are reported at the origin, z_s, z_e and any extra probes.
ToolkitReport toolkit_report(const CapillaryBody& body, const std::vector<HorizontalPoint>& probes = {});

}  // namespace capgcf
