#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hbd/matrix.hpp"

namespace hbd {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };

// Empty lower/upper mean 0 and +∞ for every variable.
struct LinearProgram {
    Sense sense = Sense::minimize;
    std::vector<double> c;
    Matrix A_eq;
    std::vector<double> b_eq;
    Matrix A_ub;
    std::vector<double> b_ub;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t num_vars() const { return c.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

struct SimplexOptions {
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-9;
    std::size_t max_pivots = 50000;
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {});

const char* to_string(LpStatus s);

}  // namespace hbd
