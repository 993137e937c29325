#include "hbd/dual.hpp"

#include <algorithm>
#include <cmath>

#include "hbd/errors.hpp"

namespace hbd {

namespace {

std::vector<double> coupling_residual(const MixedIntegerProgram& mip, std::span<const std::uint8_t> y) {
    std::vector<double> yd(y.begin(), y.end());
    auto r = mip.A_y.multiply(yd);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= mip.b[k];
    return r;
}

// Rows -(A_zᵀα + Cᵀβ) ≤ g over the stacked (α, β) variables.
void dual_rows(const MixedIntegerProgram& mip, LinearProgram& lp) {
    const std::size_t mb = mip.m_b(), md = mip.m_d();
    lp.A_ub = Matrix(mip.n_z, mb + md);
    lp.b_ub.assign(mip.n_z, 0.0);
    for (std::size_t j = 0; j < mip.n_z; ++j) {
        for (std::size_t k = 0; k < mb; ++k) lp.A_ub(j, k) = -mip.A_z(k, j);
        for (std::size_t l = 0; l < md; ++l) lp.A_ub(j, mb + l) = -mip.C(l, j);
        lp.b_ub[j] = mip.coupling_sense == CouplingSense::leq ? mip.g[j] : 0.0;
    }
}

}  // namespace

const char* to_string(DualClass c) {
    switch (c) {
        case DualClass::ray: return "ray";
        case DualClass::point: return "point";
        case DualClass::feasible_certificate: return "feasible";
    }
    return "?";
}

DualSolution solve_dual_subproblem(const MixedIntegerProgram& mip, std::span<const std::uint8_t> y,
                                   std::span<const double> alpha_bar, std::span<const double> beta_bar,
                                   const DualOptions& opts) {
    const std::size_t mb = mip.m_b(), md = mip.m_d();
    if (y.size() != mip.n_y || alpha_bar.size() != mb || beta_bar.size() != md)
        throw DimensionError("dual subproblem inputs do not match problem dimensions");
    for (double a : alpha_bar)
        if (!(a > 0.0)) throw DimensionError("alpha_bar entries must be positive");
    for (double b : beta_bar)
        if (!(b > 0.0)) throw DimensionError("beta_bar entries must be positive");

    const bool leq = mip.coupling_sense == CouplingSense::leq;
    auto r = coupling_residual(mip, y);
    LinearProgram lp;
    lp.sense = Sense::maximize;
    lp.c.resize(mb + md);
    lp.lower.resize(mb + md);
    lp.upper.resize(mb + md);
    for (std::size_t k = 0; k < mb; ++k) {
        lp.c[k] = r[k];
        lp.lower[k] = leq ? 0.0 : -alpha_bar[k];
        lp.upper[k] = alpha_bar[k];
    }
    for (std::size_t l = 0; l < md; ++l) {
        lp.c[mb + l] = -mip.d[l];
        lp.lower[mb + l] = 0.0;
        lp.upper[mb + l] = beta_bar[l];
    }
    dual_rows(mip, lp);
    auto first = solve_lp(lp, opts.simplex);
    if (first.status != LpStatus::optimal)
        throw NumericalFailure(std::string("bounded dual subproblem returned ") + to_string(first.status));

    std::vector<double> x = first.x;
    if (leq && first.objective > opts.zero_tol) {
        // Among optimal duals take the one with the least bound-relative mass, so any
        // coordinate still at its bound is forced there by the objective.
        LinearProgram tie = lp;
        tie.sense = Sense::minimize;
        for (std::size_t k = 0; k < mb; ++k) tie.c[k] = 1.0 / alpha_bar[k];
        for (std::size_t l = 0; l < md; ++l) tie.c[mb + l] = 1.0 / beta_bar[l];
        std::vector<double> floor_row(mb + md);
        for (std::size_t i = 0; i < mb + md; ++i) floor_row[i] = -lp.c[i];
        tie.A_ub.append_row(floor_row);
        tie.b_ub.push_back(-(first.objective - 1e-9 * std::max(1.0, std::abs(first.objective))));
        try {
            auto second = solve_lp(tie, opts.simplex);
            if (second.status == LpStatus::optimal) x = second.x;
        } catch (const NumericalFailure&) {
        }
    }

    DualSolution sol;
    sol.alpha.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mb));
    sol.beta.assign(x.begin() + static_cast<std::ptrdiff_t>(mb), x.end());
    sol.objective = dot(lp.c, x);
    if (sol.objective <= opts.zero_tol) {
        sol.classification = DualClass::feasible_certificate;
    } else if (!leq) {
        sol.classification = DualClass::ray;
    } else {
        sol.classification = classify_dual(sol, alpha_bar, beta_bar, opts.bound_tol);
    }
    if (leq && sol.classification == DualClass::ray) {
        LinearProgram cone = lp;
        std::fill(cone.b_ub.begin(), cone.b_ub.end(), 0.0);
        auto ray = solve_lp(cone, opts.simplex);
        if (ray.status != LpStatus::optimal)
            throw NumericalFailure(std::string("homogeneous dual returned ") + to_string(ray.status));
        const double v = dot(cone.c, ray.x);
        if (v > opts.zero_tol) {
            sol.ray_alpha.assign(ray.x.begin(), ray.x.begin() + static_cast<std::ptrdiff_t>(mb));
            sol.ray_beta.assign(ray.x.begin() + static_cast<std::ptrdiff_t>(mb), ray.x.end());
            sol.ray_objective = v;
        } else {
            sol.classification = DualClass::point;
        }
    }
    return sol;
}

DualClass classify_dual(const DualSolution& sol, std::span<const double> alpha_bar,
                        std::span<const double> beta_bar, double bound_tol) {
    for (std::size_t k = 0; k < sol.alpha.size(); ++k)
        if (std::abs(sol.alpha[k]) >= alpha_bar[k] - bound_tol * alpha_bar[k]) return DualClass::ray;
    for (std::size_t l = 0; l < sol.beta.size(); ++l)
        if (sol.beta[l] >= beta_bar[l] - bound_tol * beta_bar[l]) return DualClass::ray;
    return DualClass::point;
}

std::optional<std::vector<double>> solve_continuous(const MixedIntegerProgram& mip,
                                                    std::span<const std::uint8_t> y,
                                                    const SimplexOptions& opts) {
    if (y.size() != mip.n_y) throw DimensionError("y does not match problem dimensions");
    auto r = coupling_residual(mip, y);
    const bool leq = mip.coupling_sense == CouplingSense::leq;
    LinearProgram lp;
    lp.sense = Sense::minimize;
    lp.c = leq ? mip.g : std::vector<double>(mip.n_z, 0.0);
    lp.A_ub = Matrix(0, mip.n_z);
    if (leq) {
        lp.A_ub = mip.A_z;
        for (double v : r) lp.b_ub.push_back(-v);
    } else {
        lp.A_eq = mip.A_z;
        for (double v : r) lp.b_eq.push_back(-v);
    }
    for (std::size_t l = 0; l < mip.m_d(); ++l) {
        lp.A_ub.append_row(mip.C.row(l));
        lp.b_ub.push_back(mip.d[l]);
    }
    auto s = solve_lp(lp, opts);
    if (s.status != LpStatus::optimal) return std::nullopt;
    return s.x;
}

std::vector<double> recover_continuous(const MixedIntegerProgram& mip, std::span<const std::uint8_t> y,
                                       const SimplexOptions& opts) {
    auto z = solve_continuous(mip, y, opts);
    if (!z) throw IntegrityError("continuous recovery failed for a certified binary assignment");
    return *z;
}

}  // namespace hbd
