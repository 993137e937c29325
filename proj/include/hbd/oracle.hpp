#pragma once

#include <cstddef>

#include "hbd/problem.hpp"

namespace hbd {

struct OracleResult {
    bool feasible = false;
    Assignment assignment;
    double objective = 0.0;
    std::size_t evaluated = 0;
};

constexpr std::size_t kOracleLimit = 20;

// Tries every y in lexicographic order and solves the continuous LP for each.
OracleResult enumerate_optimum(const MixedIntegerProgram& mip, std::size_t limit = kOracleLimit);

}  // namespace hbd
