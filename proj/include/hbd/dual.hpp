#pragma once

#include <span>
#include <vector>

#include "hbd/lp.hpp"
#include "hbd/problem.hpp"

namespace hbd {

enum class DualClass { ray, point, feasible_certificate };

struct DualSolution {
    std::vector<double> alpha;
    std::vector<double> beta;
    double objective = 0.0;
    DualClass classification = DualClass::feasible_certificate;
    // LEQ form only: recession direction behind a ray, from the dual with g removed.
    std::vector<double> ray_alpha;
    std::vector<double> ray_beta;
    double ray_objective = 0.0;
    bool has_ray() const { return !ray_alpha.empty() || !ray_beta.empty(); }
};

struct DualOptions {
    double zero_tol = 1e-6;
    // Relative tolerance for a coordinate sitting at its bound.
    double bound_tol = 1e-5;
    SimplexOptions simplex;
};

// max αᵀ(A_y y − b) − βᵀd  s.t.  A_zᵀα + Cᵀβ (+ g) ≥ 0,  |α| ≤ ᾱ (α ≥ 0 in LEQ form),  0 ≤ β ≤ β̄.
DualSolution solve_dual_subproblem(const MixedIntegerProgram& mip, std::span<const std::uint8_t> y,
                                   std::span<const double> alpha_bar, std::span<const double> beta_bar,
                                   const DualOptions& opts = {});

DualClass classify_dual(const DualSolution& sol, std::span<const double> alpha_bar,
                        std::span<const double> beta_bar, double bound_tol = 1e-5);

// Continuous completion for a certified y: any feasible z (equality form) or a gᵀz minimizer (LEQ form).
std::vector<double> recover_continuous(const MixedIntegerProgram& mip, std::span<const std::uint8_t> y,
                                       const SimplexOptions& opts = {});

// Optimal continuous value for fixed y, or nothing when no z is feasible.
std::optional<std::vector<double>> solve_continuous(const MixedIntegerProgram& mip,
                                                    std::span<const std::uint8_t> y,
                                                    const SimplexOptions& opts = {});

const char* to_string(DualClass c);

}  // namespace hbd
