#include "capgcf/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <lapacke.h>

#include "capgcf/error.hpp"

namespace capgcf {

namespace {

constexpr const char* kModule = "soliton";

double sup_ell(const CapGrid& g) { return *std::max_element(g.ell().begin(), g.ell().end()); }

struct Norms {
    double sup = 0.0;
    double l2 = 0.0;
};

Norms interior_norms(const CapGrid& g, std::span<const double> r) {
    Norms out;
    double acc = 0.0;
    for (std::size_t i = g.first_interior(); i <= g.last_interior(); ++i) {
        out.sup = std::max(out.sup, std::abs(r[i]));
        acc += g.weights()[i] * r[i] * r[i];
    }
    const double s = sup_ell(g);
    out.sup /= s;
    out.l2 = std::sqrt(acc) / s;
    return out;
}

bool strictly_convex(const PrincipalRadii& r) { return r.min() > 0.0; }

// Column-major band storage for dgbsv with kl = ku = 3.
class BandMatrix {
public:
    static constexpr int kl = 3;
    static constexpr int ku = 3;
    static constexpr int ldab = 2 * kl + ku + 1;

    explicit BandMatrix(std::size_t n) : n_(n), ab_(ldab * n, 0.0) {}

    void set(std::size_t i, std::size_t j, double v) {
        ab_[static_cast<std::size_t>(kl + ku) + i - j + j * ldab] = v;
    }

    // Solves in place; returns the LAPACK info code.
    int solve(std::vector<double>& rhs) {
        std::vector<lapack_int> piv(n_);
        return LAPACKE_dgbsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), kl, ku, 1, ab_.data(), ldab,
                             piv.data(), rhs.data(), static_cast<lapack_int>(n_));
    }

private:
    std::size_t n_;
    std::vector<double> ab_;
};

}  // namespace

SolitonResidual soliton_residual(const CapillaryBody& body, double alpha, double lambda) {
    const CapGrid& g = body.grid_ref();
    const ScalarField det = principal_radii(body.support()).determinant();
    std::vector<double> r(g.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = alpha == 1.0 ? det[i] : std::pow(det[i], alpha);
        r[i] = body.support()[i] * d - lambda * g.ell()[i];
    }
    const Norms n = interior_norms(g, r);
    return {ScalarField(body.grid(), std::move(r)), n.sup, n.l2};
}

SolitonSolution newton_solve(const CapillaryBody& initial, const NewtonOptions& opt) {
    const CapGrid& g = *initial.grid();
    const std::size_t size = g.size();
    const std::size_t last = size - 1;
    const bool full = g.mode() == GridMode::Full1D;
    const double d = g.spacing();
    const double d2 = d * d;
    const double robin = 11.0 - 6.0 * d * g.cot_theta();

    ScalarField h = enforce_robin(initial.support());
    SolitonReport report;
    SolitonResidual res = soliton_residual(CapillaryBody::trusted(h), opt.alpha, opt.lambda);
    report.history.push_back(res.sup);

    int it = 0;
    while (res.sup > opt.tol) {
        if (it == opt.max_iterations)
            throw Error(ErrorCode::MaxIterations, kModule,
                        "no convergence in " + std::to_string(opt.max_iterations) + " Newton iterations");
        const PrincipalRadii radii = principal_radii(h);
        BandMatrix jac(size);
        std::vector<double> rhs(size, 0.0);

        for (std::size_t i = g.first_interior(); i <= g.last_interior(); ++i) {
            const double lr = radii.radial[i];
            const double lt = radii.tangential[i];
            const int m = radii.tangential_multiplicity;
            const double det = m == 0 ? lr : lr * std::pow(lt, m);
            const double da = std::pow(det, opt.alpha);
            const double scale = opt.alpha * h[i] * std::pow(det, opt.alpha - 1.0);
            // ∂det/∂λ_rad and ∂det/∂λ_tan.
            const double drad = m == 0 ? 1.0 : std::pow(lt, m);
            const double dtan = m == 0 ? 0.0 : m * lr * std::pow(lt, m - 1);
            const double cot = full ? 0.0 : std::cos(g.nodes()[i]) / std::sin(g.nodes()[i]);

            const double c_prev = scale * (drad / d2 - dtan * cot / (2.0 * d));
            const double c_next = scale * (drad / d2 + dtan * cot / (2.0 * d));
            const double c_self = da + scale * (drad * (1.0 - 2.0 / d2) + dtan);
            jac.set(i, i - 1, c_prev);
            jac.set(i, i, c_self);
            jac.set(i, i + 1, c_next);
            rhs[i] = res.field[i];
        }
        // Boundary rows keep the closure identities exact for the update.
        jac.set(last, last, robin);
        jac.set(last, last - 1, -18.0);
        jac.set(last, last - 2, 9.0);
        jac.set(last, last - 3, -2.0);
        jac.set(0, 0, full ? robin : 11.0);
        jac.set(0, 1, -18.0);
        jac.set(0, 2, 9.0);
        jac.set(0, 3, -2.0);

        if (int info = jac.solve(rhs); info != 0)
            throw Error(ErrorCode::NewtonStalled, kModule, "singular Newton matrix (info " + std::to_string(info) + ")");

        double step = 1.0;
        bool accepted = false;
        bool convex_seen = false;
        for (int k = 0; k <= opt.max_halvings; ++k, step *= 0.5) {
            std::vector<double> trial(h.values().begin(), h.values().end());
            for (std::size_t i = 0; i < size; ++i) trial[i] -= step * rhs[i];
            enforce_robin_inplace(g, trial);
            ScalarField th(h.grid(), std::move(trial));
            if (!strictly_convex(principal_radii(th))) continue;
            convex_seen = true;
            SolitonResidual tr = soliton_residual(CapillaryBody::trusted(th), opt.alpha, opt.lambda);
            if (tr.sup < res.sup) {
                h = std::move(th);
                res = std::move(tr);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!convex_seen)
                throw Error(ErrorCode::ConvexityLost, kModule, "every damped Newton trial left the convex cone");
            throw Error(ErrorCode::NewtonStalled, kModule,
                        "no decrease after " + std::to_string(opt.max_halvings) + " step halvings");
        }
        ++it;
        report.history.push_back(res.sup);
    }

    report.newton_iterations = it;
    report.converged = true;
    report.residual_sup = res.sup;
    report.residual_l2 = res.l2;
    for (std::size_t i = 0; i < size; ++i)
        report.distance_to_cap = std::max(report.distance_to_cap, std::abs(h[i] - g.ell()[i]));
    const auto& hist = report.history;
    for (std::size_t k = hist.size() >= 4 ? hist.size() - 3 : 1; k < hist.size(); ++k)
        if (hist[k - 1] > 0.0)
            report.quadratic_constant = std::max(report.quadratic_constant, hist[k] / (hist[k - 1] * hist[k - 1]));
    return {CapillaryBody::trusted(std::move(h)), report};
}

}  // namespace capgcf
