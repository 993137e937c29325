#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "hbd/dual.hpp"
#include "hbd/matrix.hpp"
#include "hbd/problem.hpp"

namespace hbd {

enum class CutKind { feasibility, optimality };

// a·y − rhs ≤ 0 (feasibility) or a·y − rhs ≤ q / norm_factor (optimality) after scaling.
struct Cut {
    CutKind kind = CutKind::feasibility;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> a;
    double rhs = 0.0;
    double norm_factor = 1.0;

    double activity(std::span<const std::uint8_t> y) const;
    // Coefficient of q on the right-hand side.
    double q_coefficient() const { return kind == CutKind::optimality ? 1.0 / norm_factor : 0.0; }
};

// a = αᵀA_y, rhs = αᵀb + βᵀd.
Cut make_cut(const MixedIntegerProgram& mip, const DualSolution& dual, CutKind kind);
Cut normalize_cut(const Cut& cut, double dual_objective, double tol = 1e-6);

struct PenaltyConfig {
    double w_t = 50.0;
    double w_x = 0.01;
    // 0 sizes each cut's slack register to its margin.
    std::size_t slack_bits_default = 10;
    double w_q = 0.01;
    std::size_t n_q_bits = 30;
    // Kept for parity with hardware runs; nothing reads it.
    double chain_strength = 3.0;
    // Replace w_t with the interval-bound threshold that dominates the spread of f.
    bool auto_penalty = false;
    double max_coefficient = 9007199254740992.0;
};

void validate(const PenaltyConfig& cfg);

// Register width covering the largest feasible margin; a nonzero pin fixes the width instead.
std::size_t slack_bits(std::span<const double> a, double rhs, double w_x, std::size_t pinned = 0);

enum class BitRole : std::uint8_t { decision, slack, q_bit };

struct BitTag {
    BitRole role = BitRole::decision;
    std::size_t index = 0;  // decision variable or cut
    std::size_t bit = 0;    // position within the slack or q register
};

struct QuboTerm {
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;
};

// Penalty row as encoded: residual = a·y − rhs + w_x·slack − c·q.
struct PenaltyRow {
    CutKind kind = CutKind::feasibility;
    std::vector<double> a;
    double rhs = 0.0;
    double q_coefficient = 0.0;
    std::size_t slack_offset = 0;
    std::size_t slack_bits = 0;
};

struct QuboProblem {
    std::size_t n = 0;
    std::vector<QuboTerm> terms;  // i ≤ j, sorted, nonzero
    double constant_offset = 0.0;
    std::vector<BitTag> roles;

    std::size_t n_decision = 0;
    std::size_t q_offset = 0;
    std::size_t n_q_bits = 0;
    double w_q = 0.0;
    double w_x = 0.0;
    double w_t = 0.0;
    int gamma = 0;
    std::vector<PenaltyRow> rows;
    Matrix f_quadratic;
    std::vector<double> f_linear;

    double energy(std::span<const std::uint8_t> bits) const;
    // True when built by encode_master, so the penalty rows describe every term.
    bool structured = false;
};

// Interval bounds of yᵀQy + fᵀy over the unit cube.
std::pair<double, double> objective_range(const Matrix& f_quadratic, std::span<const double> f_linear);

QuboProblem encode_master(const Matrix& f_quadratic, std::span<const double> f_linear, std::span<const Cut> cuts,
                          int gamma, const PenaltyConfig& cfg);

// A plain QUBO over decision bits only.
QuboProblem make_qubo(std::size_t n, std::vector<QuboTerm> terms, double constant_offset = 0.0);

struct Decoded {
    BitVector y;
    double q_value = 0.0;
    std::vector<double> residuals;
    double violation = 0.0;
};

Decoded decode(const QuboProblem& qubo, std::span<const std::uint8_t> bits);

// Penalized objective evaluated from the cut rows, independent of the expanded coefficients.
double penalized_energy(const QuboProblem& qubo, std::span<const std::uint8_t> bits);

void write_qubo(std::ostream& os, const QuboProblem& qubo);
QuboProblem read_qubo(std::istream& is);

}  // namespace hbd
