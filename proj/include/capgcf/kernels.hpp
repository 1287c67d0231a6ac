#pragma once

// Per-node stencil kernels. Each kernel has a serial reference and an OpenMP
// variant that must agree with it bit for bit (the per-node arithmetic is
// identical; only the loop is distributed). Reductions are the exception:
// parallel::weighted_sum may differ from the serial sum in the last bits.

#include <cstddef>
#include <span>

#include "capgcf/cap_domain.hpp"

namespace capgcf::kernels {

/// Below this many nodes the OpenMP variants run on the calling thread.
inline constexpr std::size_t kParallelMinNodes = 2048;

struct FlowTerms {
    double alpha = 1.0;
    bool normalized = false;
    double coefficient = 1.0;  // c(t) of the normalized α-flow
};

namespace serial {

void first_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out);
void second_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out);
void principal_radii(const CapGrid& grid, std::span<const double> h, std::span<double> radial,
                     std::span<double> tangential);
/// ∂_t h at interior nodes (rim/pole entries are set to 0) together with the
/// per-node explicit stability bound λ_min / (ℓ K^α max(1, α)).
void flow_rhs(const CapGrid& grid, std::span<const double> h, std::span<const double> radial,
              std::span<const double> tangential, const FlowTerms& terms, std::span<double> rhs,
              std::span<double> stability);
double weighted_sum(std::span<const double> w, std::span<const double> f);

}  // namespace serial

namespace parallel {

void first_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out);
void second_derivative(const CapGrid& grid, std::span<const double> f, std::span<double> out);
void principal_radii(const CapGrid& grid, std::span<const double> h, std::span<double> radial,
                     std::span<double> tangential);
void flow_rhs(const CapGrid& grid, std::span<const double> h, std::span<const double> radial,
              std::span<const double> tangential, const FlowTerms& terms, std::span<double> rhs,
              std::span<double> stability);
double weighted_sum(std::span<const double> w, std::span<const double> f);

}  // namespace parallel

}  // namespace capgcf::kernels
