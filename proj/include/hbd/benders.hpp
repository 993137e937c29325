#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hbd/dual.hpp"
#include "hbd/master.hpp"
#include "hbd/problem.hpp"
#include "hbd/qubo.hpp"

namespace hbd {

enum class Algorithm { feasibility_only = 1, with_optimality = 2 };
enum class RunStatus { converged, iter_cap };

const char* to_string(RunStatus s);

struct IterationRecord {
    std::size_t t = 0;
    double s_pt = 0.0;
    double s_dt = 0.0;
    double dual_objective = 0.0;
    DualClass classification = DualClass::feasible_certificate;
    std::optional<CutKind> cut;
    // Aggregate cut residual of the sampled master bits; zero for the exact backend.
    double violation = 0.0;
    // How far (y_t, q_t) lies outside the cut it triggered.
    double cut_violation = 0.0;
    bool repeated = false;
    bool normalized = false;
    std::optional<double> incumbent;
    double ms = 0.0;
    BitVector y;
    double q = 0.0;
    MasterDiagnostics master;
};

struct EngineConfig {
    Algorithm algorithm = Algorithm::feasibility_only;
    Backend backend = Backend::exact;
    // Empty vectors take the scalar defaults below; alpha_bar_value 0 picks 1 (Alg. 1) or 1000 (Alg. 2).
    std::vector<double> alpha_bar;
    std::vector<double> beta_bar;
    double alpha_bar_value = 0.0;
    double beta_bar_value = 1000.0;
    std::size_t max_iters = 300;
    // Wall-clock cap in seconds, checked between iterations; 0 disables it.
    double time_limit_s = 0.0;
    double dual_zero_tol = 1e-6;
    bool normalize_cuts = true;
    PenaltyConfig penalty;
    AnnealSchedule schedule;
    SimplexOptions simplex;
    std::function<void(const IterationRecord&)> trace_sink;
};

void validate(const EngineConfig& cfg);

struct BendersTrace {
    std::vector<IterationRecord> iterations;
    std::vector<Cut> cuts;
};

struct BendersResult {
    RunStatus status = RunStatus::iter_cap;
    bool has_solution = false;
    Assignment assignment;
    double objective = 0.0;
    BendersTrace trace;
    bool time_limited = false;
};

enum class StopDecision { proceed, stop };
StopDecision termination_check(double s_pt, double s_dt, double tol);

BendersResult run_algorithm1(const MixedIntegerProgram& mip, const EngineConfig& cfg);
BendersResult run_algorithm2(const MixedIntegerProgram& mip, const EngineConfig& cfg);
BendersResult run_benders(const MixedIntegerProgram& mip, const EngineConfig& cfg);

void write_trace_csv(std::ostream& os, const BendersTrace& trace, bool include_time = true);

}  // namespace hbd
