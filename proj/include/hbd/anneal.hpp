#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hbd/problem.hpp"
#include "hbd/qubo.hpp"

namespace hbd {

struct AnnealSchedule {
    std::size_t n_read_0 = 80;
    std::size_t n_sweep_0 = 5000;
    double growth_rate = 1.02;
    // Zero means estimate from the QUBO by random probing.
    double beta_hot = 0.0;
    double beta_cold = 0.0;
    std::uint64_t seed = 0;
};

void validate(const AnnealSchedule& s);

// (floor(n_read_0·growth^t), floor(n_sweep_0·growth^t))
std::pair<std::size_t, std::size_t> schedule_at(const AnnealSchedule& s, std::size_t t);

struct Sample {
    BitVector bits;
    double energy = 0.0;
};

struct SampleSet {
    std::vector<Sample> samples;  // ascending energy, then lexicographic bits
    std::size_t reads_used = 0;
    std::size_t sweeps_used = 0;
    double beta_hot = 0.0;
    double beta_cold = 0.0;
};

struct BetaRange {
    double hot = 0.0;
    double cold = 0.0;
};

BetaRange probe_beta_range(const QuboProblem& qubo, std::uint64_t seed);

// Independent Metropolis chains, one RNG stream per (seed, read); reads run under OpenMP.
SampleSet sample_qubo(const QuboProblem& qubo, std::size_t n_read, std::size_t n_sweep, std::uint64_t seed,
                      BetaRange range = {});
// Same chains on one thread. When given, accepted_minimum[r] receives the lowest energy
// of any state read r visited.
SampleSet sample_qubo_serial(const QuboProblem& qubo, std::size_t n_read, std::size_t n_sweep, std::uint64_t seed,
                             BetaRange range = {}, std::vector<double>* accepted_minimum = nullptr);

constexpr std::size_t kBruteForceLimit = 26;
constexpr std::size_t kStructuredDecisionLimit = 24;

// Gray-code enumeration; the parallel version splits on the high bits.
Sample brute_force_qubo(const QuboProblem& qubo);
Sample brute_force_qubo_serial(const QuboProblem& qubo);

// Exact minimum for encode_master output: enumerates decision bits and minimizes the
// slack and q registers in closed form.
Sample minimize_structured(const QuboProblem& qubo);

// Brute force when small enough, otherwise the structured minimizer.
Sample minimize_qubo_exact(const QuboProblem& qubo);

bool lex_less(const BitVector& a, const BitVector& b);

void write_samples_csv(std::ostream& os, const SampleSet& set);

}  // namespace hbd
