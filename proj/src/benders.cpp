#include "hbd/benders.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hbd/errors.hpp"

namespace hbd {

namespace {

struct Bounds {
    std::vector<double> alpha, beta;
};

Bounds dual_bounds(const MixedIntegerProgram& mip, const EngineConfig& cfg) {
    Bounds b;
    const double a = cfg.alpha_bar_value > 0.0 ? cfg.alpha_bar_value
                     : cfg.algorithm == Algorithm::feasibility_only ? 1.0 : 1000.0;
    b.alpha = cfg.alpha_bar.empty() ? std::vector<double>(mip.m_b(), a) : cfg.alpha_bar;
    b.beta = cfg.beta_bar.empty() ? std::vector<double>(mip.m_d(), cfg.beta_bar_value) : cfg.beta_bar;
    if (b.alpha.size() != mip.m_b() || b.beta.size() != mip.m_d())
        throw DimensionError("dual bound vectors do not match the problem rows");
    return b;
}

bool same_cut(const Cut& a, const Cut& b) {
    if (a.kind != b.kind) return false;
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::max(std::abs(x), std::abs(y))); };
    if (!close(a.rhs, b.rhs) || !close(a.q_coefficient(), b.q_coefficient())) return false;
    for (std::size_t i = 0; i < a.a.size(); ++i)
        if (!close(a.a[i], b.a[i])) return false;
    return true;
}

bool seen(const std::vector<Cut>& cuts, const Cut& c) {
    for (const auto& k : cuts)
        if (same_cut(k, c)) return true;
    return false;
}

class Engine {
public:
    Engine(const MixedIntegerProgram& mip, const EngineConfig& cfg) : mip_(mip), cfg_(cfg), bounds_(dual_bounds(mip, cfg)) {
        dual_opts_.zero_tol = cfg.dual_zero_tol;
        dual_opts_.simplex = cfg.simplex;
        master_opts_.backend = cfg.backend;
        master_opts_.penalty = cfg.penalty;
        master_opts_.schedule = cfg.schedule;
    }

    BendersResult run() {
        const bool alg2 = cfg_.algorithm == Algorithm::with_optimality;
        const auto start = std::chrono::steady_clock::now();
        int gamma = 0;
        for (std::size_t t = 0; t < cfg_.max_iters; ++t) {
            master_opts_.iteration = t;
            auto m = solve_master(mip_.f_quadratic, mip_.f_linear, result_.trace.cuts, gamma, master_opts_);
            const double fy = mip_.binary_objective(m.y);
            auto dual = solve_dual_subproblem(mip_, m.y, bounds_.alpha, bounds_.beta, dual_opts_);

            IterationRecord rec;
            rec.t = t;
            rec.y = m.y;
            rec.q = m.q;
            rec.s_pt = m.master_value;
            rec.s_dt = fy + dual.objective;
            rec.dual_objective = dual.objective;
            rec.classification = dual.classification;
            rec.violation = m.diagnostics.violation;
            rec.master = m.diagnostics;

            const bool infeasible = dual.classification == DualClass::ray;
            if (!infeasible) offer_incumbent(m.y);

            bool done;
            if (!alg2) {
                done = !infeasible;
            } else {
                done = !infeasible && termination_check(rec.s_pt, rec.s_dt, cfg_.dual_zero_tol) == StopDecision::stop;
            }
            if (!done) {
                const CutKind kind = infeasible ? CutKind::feasibility : CutKind::optimality;
                Cut cut = make_cut(mip_, dual, kind);
                if (alg2 && cfg_.normalize_cuts) {
                    const double value = infeasible && dual.has_ray() ? dual.ray_objective : dual.objective;
                    rec.normalized = value > cfg_.dual_zero_tol;
                    cut = normalize_cut(cut, value, cfg_.dual_zero_tol);
                }
                rec.cut = kind;
                rec.cut_violation = cut.activity(m.y) - cut.rhs - cut.q_coefficient() * (gamma ? m.q : 0.0);
                rec.repeated = seen(result_.trace.cuts, cut);
                result_.trace.cuts.push_back(std::move(cut));
                if (kind == CutKind::optimality) gamma = 1;
            }
            if (result_.has_solution) rec.incumbent = result_.objective;
            rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            if (cfg_.trace_sink) cfg_.trace_sink(rec);
            result_.trace.iterations.push_back(std::move(rec));
            if (done) {
                // The terminating y is preferred over an equally good earlier incumbent.
                offer_incumbent(m.y, true);
                result_.status = RunStatus::converged;
                return std::move(result_);
            }
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (cfg_.time_limit_s > 0.0 && elapsed >= cfg_.time_limit_s) {
                result_.time_limited = true;
                break;
            }
        }
        result_.status = RunStatus::iter_cap;
        return std::move(result_);
    }

private:
    void offer_incumbent(const BitVector& y, bool prefer = false) {
        auto z = solve_continuous(mip_, y, cfg_.simplex);
        if (!z) return;
        Assignment a{y, *z};
        auto ev = evaluate(mip_, a);
        if (!ev.feasible) return;
        const double tol = 1e-9 * std::max(1.0, std::abs(result_.objective));
        if (!result_.has_solution || ev.objective < result_.objective - tol ||
            (prefer && ev.objective <= result_.objective + tol)) {
            result_.has_solution = true;
            result_.objective = ev.objective;
            result_.assignment = std::move(a);
        }
    }

    const MixedIntegerProgram& mip_;
    const EngineConfig& cfg_;
    Bounds bounds_;
    DualOptions dual_opts_;
    MasterOptions master_opts_;
    BendersResult result_;
};

}  // namespace

const char* to_string(RunStatus s) { return s == RunStatus::converged ? "CONVERGED" : "ITER_CAP"; }

void validate(const EngineConfig& cfg) {
    if (cfg.max_iters < 1) throw DimensionError("max_iters must be at least 1");
    if (!(cfg.dual_zero_tol > 0.0)) throw DimensionError("dual_zero_tol must be positive");
    if (cfg.time_limit_s < 0.0) throw DimensionError("time_limit_s must be nonnegative");
    if (cfg.backend != Backend::exact) validate(cfg.penalty);
    if (cfg.backend == Backend::anneal) validate(cfg.schedule);
}

StopDecision termination_check(double s_pt, double s_dt, double tol) {
    return s_pt >= s_dt - tol ? StopDecision::stop : StopDecision::proceed;
}

BendersResult run_algorithm1(const MixedIntegerProgram& mip, const EngineConfig& cfg) {
    require_valid(mip);
    validate(cfg);
    if (mip.coupling_sense != CouplingSense::equality)
        throw DimensionError("feasibility-only decomposition expects an equality-form problem");
    if (mip.has_continuous_objective())
        throw DimensionError("feasibility-only decomposition expects g = 0");
    EngineConfig c = cfg;
    c.algorithm = Algorithm::feasibility_only;
    return Engine(mip, c).run();
}

BendersResult run_algorithm2(const MixedIntegerProgram& mip, const EngineConfig& cfg) {
    require_valid(mip);
    validate(cfg);
    if (mip.coupling_sense != CouplingSense::leq)
        throw DimensionError("decomposition with optimality cuts expects a LEQ-form problem");
    for (double v : mip.g)
        if (v < 0.0) throw DimensionError("decomposition with optimality cuts expects g ≥ 0");
    EngineConfig c = cfg;
    c.algorithm = Algorithm::with_optimality;
    return Engine(mip, c).run();
}

BendersResult run_benders(const MixedIntegerProgram& mip, const EngineConfig& cfg) {
    return cfg.algorithm == Algorithm::feasibility_only ? run_algorithm1(mip, cfg) : run_algorithm2(mip, cfg);
}

void write_trace_csv(std::ostream& os, const BendersTrace& trace, bool include_time) {
    os << "t,s_pt,s_dt,dual_obj,cut_kind,violation,incumbent_obj,ms\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : trace.iterations) {
        os << r.t << ',' << num(r.s_pt) << ',' << num(r.s_dt) << ',' << num(r.dual_objective) << ',';
        if (r.cut) os << (*r.cut == CutKind::feasibility ? "feasibility" : "optimality");
        else os << "none";
        os << ',' << num(r.violation) << ',';
        if (r.incumbent) os << num(*r.incumbent);
        os << ',';
        if (include_time) {
            std::snprintf(buf, sizeof buf, "%.3f", r.ms);
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace hbd
