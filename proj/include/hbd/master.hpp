#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hbd/anneal.hpp"
#include "hbd/qubo.hpp"

namespace hbd {

enum class Backend { exact, qubo_exact, anneal };

const char* to_string(Backend b);

struct MasterOptions {
    Backend backend = Backend::exact;
    PenaltyConfig penalty;
    AnnealSchedule schedule;
    // Benders iteration, used for the annealing schedule and seed stream.
    std::size_t iteration = 0;
    double feasibility_tol = 1e-9;
};

struct MasterDiagnostics {
    std::size_t qubo_bits = 0;
    double energy = 0.0;
    double violation = 0.0;
    // q as read from the sampled bits; the returned q is the exact cut bound at y.
    double decoded_q = 0.0;
    std::vector<double> residuals;
    std::size_t nodes = 0;
    std::size_t reads = 0;
    std::size_t sweeps = 0;
};

struct MasterSolution {
    BitVector y;
    double q = 0.0;
    double master_value = 0.0;
    MasterDiagnostics diagnostics;
};

// Smallest q ≥ 0 meeting every optimality cut at y.
double optimality_bound(std::span<const Cut> cuts, std::span<const std::uint8_t> y);
bool satisfies_feasibility_cuts(std::span<const Cut> cuts, std::span<const std::uint8_t> y, double tol = 1e-9);

// min f(y) + γ·q over the cut set.
MasterSolution solve_master(const Matrix& f_quadratic, std::span<const double> f_linear, std::span<const Cut> cuts,
                            int gamma, const MasterOptions& opts);

}  // namespace hbd
