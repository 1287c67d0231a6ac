#pragma once

#include <vector>

#include "capgcf/body.hpp"

namespace capgcf {

/// G(h) = h·det(∇²h + hσ)^α − λ·ℓ per node. Norms are taken over the
/// interior nodes and divided by sup ℓ.
struct SolitonResidual {
    ScalarField field;
    double sup = 0.0;
    double l2 = 0.0;
};

SolitonResidual soliton_residual(const CapillaryBody& body, double alpha = 1.0, double lambda = 1.0);

struct SolitonReport {
    double residual_sup = 0.0;
    double residual_l2 = 0.0;
    int newton_iterations = 0;
    bool converged = false;
    double distance_to_cap = 0.0;
    /// Interior sup-norm of G (relative to sup ℓ) before each iteration and at the end.
    std::vector<double> history;
    /// max over the last three iterations of ‖G‖_{k+1}/‖G‖_k², when defined.
    double quadratic_constant = 0.0;
};

struct NewtonOptions {
    double alpha = 1.0;
    double lambda = 1.0;
    double tol = 1e-10;
    int max_iterations = 50;
    int max_halvings = 30;
};

struct SolitonSolution {
    CapillaryBody body;
    SolitonReport report;
};

/// Damped Newton on G with the discrete Robin (and pole) rows imposed on
/// the update. NewtonStalled after max_halvings without decrease,
/// ConvexityLost if every damped trial leaves the convex cone, MaxIterations.
SolitonSolution newton_solve(const CapillaryBody& initial, const NewtonOptions& options = {});

}  // namespace capgcf
