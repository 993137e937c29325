#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbd/matrix.hpp"

namespace hbd {

using BitVector = std::vector<std::uint8_t>;

enum class CouplingSense { equality, leq };

// min yᵀQy + f_linearᵀy + gᵀz  s.t.  A_y y + A_z z (= or ≤) b,  C z ≤ d,  y binary, z ≥ 0.
struct MixedIntegerProgram {
    std::size_t n_y = 0;
    std::size_t n_z = 0;
    Matrix f_quadratic;
    std::vector<double> f_linear;
    std::vector<double> g;
    Matrix A_y;
    Matrix A_z;
    std::vector<double> b;
    CouplingSense coupling_sense = CouplingSense::equality;
    Matrix C;
    std::vector<double> d;

    std::size_t m_b() const { return b.size(); }
    std::size_t m_d() const { return d.size(); }

    double binary_objective(std::span<const std::uint8_t> y) const;
    bool has_continuous_objective() const;
};

struct Assignment {
    BitVector y;
    std::vector<double> z;
};

struct Finding {
    enum class Kind { dimension, asymmetry, non_finite } kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

ValidationReport validate(const MixedIntegerProgram& mip);
// Throws DimensionError listing the findings when validate is not clean.
void require_valid(const MixedIntegerProgram& mip);

struct Evaluation {
    double objective = 0.0;
    bool feasible = false;
    double worst_violation = 0.0;
};

Evaluation evaluate(const MixedIntegerProgram& mip, const Assignment& a, double tol = 1e-6);

// Interval upper bounds on z ≥ 0 implied by the rows of C z ≤ d (infinity when unbounded).
std::vector<double> implied_upper_bounds(const Matrix& C, std::span<const double> d);

// Bookkeeping for translating between a LEQ problem and its equality form.
struct VariableMap {
    std::size_t n_y_original = 0;
    std::size_t n_z_original = 0;
    std::size_t m_b_original = 0;
    // Per original coupling row: equality-form row it maps to.
    std::vector<std::size_t> row_target;
    // Per original coupling row: slack column in the equality form, if the row was an inequality.
    std::vector<std::optional<std::size_t>> row_slack;
    // Per original coupling row: true when it is the negated partner of an earlier row.
    std::vector<bool> row_is_mirror;
    std::size_t q_bit_offset = 0;
    std::size_t n_q_bits = 0;
    double w_q = 0.0;
    std::optional<std::size_t> rounding_slack;
};

struct EqualityForm {
    MixedIntegerProgram mip;
    VariableMap map;
};

// Smallest bit count whose expansion w_q·(2ⁿ−1) covers the interval upper bound of gᵀz.
std::size_t required_q_bits(const MixedIntegerProgram& mip, double w_q);

EqualityForm to_equality_form(const MixedIntegerProgram& mip, double w_q, std::size_t n_q_bits);

Assignment to_equality_assignment(const EqualityForm& eq, const MixedIntegerProgram& original,
                                  const Assignment& a);
Assignment to_original_assignment(const VariableMap& map, const Assignment& a);

}  // namespace hbd
