#pragma once

// Explicit time stepping of the capillary α-power Gauss curvature flows
//
//   unnormalized  ∂_t h = −ℓ K^α
//   normalized    ∂_t h = h − c(t) ℓ K^α,   c = ω_θ / ∫ K^{α−1} ℓ dσ
//
// on the interior nodes, with the rim (and pole) values rebuilt from the
// discrete Robin closure after every update.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capgcf/body.hpp"

namespace capgcf {

enum class Recenter { Never, OnEntropyPoint };

std::string_view to_string(Recenter mode);

struct FlowConfig {
    double alpha = 1.0;
    bool normalized = false;
    double dt_safety = 0.2;
    double dt_cap = 1e-3;
    double t_max = 100.0;
    /// Shrink runs stop once min u falls below this; unset means 1e-2 times
    /// the initial radius (Vol₀/Vol(Ĉ_θ))^{1/(n+1)}.
    std::optional<double> stop_u_min;
    /// Normalized runs stop once sup|h_{k+1} − h_k| / (dt·sup h) drops below this.
    double stop_rate = 1e-6;
    /// Normalized runs only: every `recenter_period` steps the body is
    /// translated so that its entropy point is the origin.
    Recenter recenter = Recenter::OnEntropyPoint;
    int recenter_period = 100;
    int trace_stride = 100;
    /// CurvatureBlowup once K exceeds this multiple of the initial k_max.
    double blowup_factor = 1e6;
    /// Hard cap on the number of steps; 0 means unlimited.
    long max_steps = 0;

    /// Throws InvalidArgument on inconsistent values.
    void validate() const;
};

struct FlowState {
    CapillaryBody body;
    double t = 0.0;
    long step_index = 0;
    double dt_last = 0.0;
    /// k_max of the state the run started from.
    double k_reference = 0.0;
    double coefficient = 1.0;
};

FlowState initial_state(const CapillaryBody& body);

struct TraceRecord {
    double t = 0.0;
    double dt = 0.0;
    double volume = 0.0;
    double entropy = 0.0;
    std::vector<double> entropy_point;
    double k_min = 0.0;
    double k_max = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double phi_max = 0.0;
    double res_sup = 0.0;
    double res_l2 = 0.0;
    double norm_coeff = 1.0;
};

enum class OutcomeKind { Extinct, Converged, TimedOut, Aborted };

std::string_view to_string(OutcomeKind kind);

struct Outcome {
    OutcomeKind kind = OutcomeKind::TimedOut;
    std::optional<double> T_est;
    double t = 0.0;
    double residual = 0.0;
    std::string reason;
};

struct Recentering {
    double t = 0.0;
    long step = 0;
    double shift = 0.0;
};

struct RunResult {
    FlowState final_state;
    std::vector<TraceRecord> traces;
    Outcome outcome;
    std::vector<Recentering> recenterings;
    /// Sum of all translations applied, including the initial one.
    double drift = 0.0;
};

/// c(t) = ω_θ / ∫ K^{α−1} ℓ dσ.
double normalization_coefficient(const CapillaryBody& body, double alpha);

/// ∂_t h at the interior nodes (0 at rim and pole). CurvatureBlowup.
ScalarField rhs(const FlowState& state, const FlowConfig& config);

/// min(dt_cap, dt_safety·Δ²·min λ_min/(ℓ K^α max(1, α))), and ≤ dt_safety
/// for normalized flows.
double adaptive_dt(const FlowState& state, const FlowConfig& config);

/// One forward-Euler step with boundary closure (and, for normalized flows,
/// projection back to Vol(Ĉ_θ)). ConvexityLost, CurvatureBlowup.
FlowState step(const FlowState& state, const FlowConfig& config);

/// Scales a normalized-run start to Vol(Ĉ_θ) and moves its entropy point to
/// the origin; returns the translation applied along the search axis.
std::pair<CapillaryBody, double> prepare_normalized(const CapillaryBody& body);

TraceRecord trace_record(const FlowState& state, const FlowConfig& config);

using TraceObserver = std::function<void(const TraceRecord&)>;

RunResult run(const CapillaryBody& initial, const FlowConfig& config, const TraceObserver& observer = {});

struct RescaledBody {
    double t = 0.0;
    CapillaryBody body;
};

/// t = log(Vol(Ĉ_θ)/Vol)/(n+1), h ↦ e^t·h.
RescaledBody rescale_map(const CapillaryBody& snapshot);

}  // namespace capgcf
