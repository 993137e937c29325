#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hbd/benders.hpp"
#include "hbd/errors.hpp"
#include "hbd/oracle.hpp"
#include "hbd/problem_io.hpp"
#include "hbd/uc.hpp"

using namespace hbd;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, usage = 1, capped = 2, infeasible = 3, inconsistent = 4 };

struct RunSpec {
    std::string input;
    std::string builtin;
    int horizon = 2;
    int algorithm = 0;  // 0: from the problem's coupling sense
    std::string backend = "exact";
    std::uint64_t seed = 0;
    std::size_t max_iters = 300;
    std::optional<double> penalty, granularity, q_granularity, alpha_bar, beta_bar, growth;
    std::optional<std::size_t> slack_bits, q_bits, reads, sweeps;
    bool trace_figures = false;
    std::string out = ".";
};

void add_common(CLI::App* cmd, RunSpec& s) {
    cmd->add_option("--input", s.input, "problem JSON (network JSON for uc)");
    cmd->add_option("--builtin", s.builtin, "built-in network")->check(CLI::IsMember({"6bus"}));
    cmd->add_option("--horizon", s.horizon, "UC horizon in hours")->check(CLI::PositiveNumber);
    cmd->add_option("--algorithm", s.algorithm, "1: feasibility cuts, 2: feasibility and optimality cuts")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--backend", s.backend, "master backend")->check(CLI::IsMember({"exact", "qubo-exact", "anneal"}));
    cmd->add_option("--seed", s.seed, "annealing seed");
    cmd->add_option("--max-iters", s.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--penalty", s.penalty, "penalty strength w_t");
    cmd->add_option("--granularity", s.granularity, "slack granularity w_x");
    cmd->add_option("--slack-bits", s.slack_bits, "slack bits per cut (0 sizes each register)");
    cmd->add_option("--q-bits", s.q_bits, "bits of the q expansion");
    cmd->add_option("--q-granularity", s.q_granularity, "granularity w_q of the q expansion");
    cmd->add_option("--alpha-bar", s.alpha_bar, "bound on every alpha entry");
    cmd->add_option("--beta-bar", s.beta_bar, "bound on every beta entry");
    cmd->add_option("--reads", s.reads, "initial number of annealing reads");
    cmd->add_option("--sweeps", s.sweeps, "initial number of sweeps per read");
    cmd->add_option("--growth", s.growth, "per-iteration growth of reads and sweeps");
    cmd->add_flag("--trace-figures", s.trace_figures, "also write violation.csv and dual.csv");
    cmd->add_option("--out", s.out, "output directory");
}

Backend parse_backend(const std::string& b) {
    if (b == "qubo-exact") return Backend::qubo_exact;
    if (b == "anneal") return Backend::anneal;
    return Backend::exact;
}

EngineConfig engine_config(const RunSpec& s, Algorithm alg) {
    EngineConfig cfg;
    cfg.algorithm = alg;
    cfg.backend = parse_backend(s.backend);
    cfg.max_iters = s.max_iters;
    if (s.alpha_bar) cfg.alpha_bar_value = *s.alpha_bar;
    if (s.beta_bar) cfg.beta_bar_value = *s.beta_bar;
    if (s.penalty) cfg.penalty.w_t = *s.penalty;
    if (s.granularity) cfg.penalty.w_x = *s.granularity;
    if (s.slack_bits) cfg.penalty.slack_bits_default = *s.slack_bits;
    if (s.q_bits) cfg.penalty.n_q_bits = *s.q_bits;
    if (s.q_granularity) cfg.penalty.w_q = *s.q_granularity;
    if (s.reads) cfg.schedule.n_read_0 = *s.reads;
    if (s.sweeps) cfg.schedule.n_sweep_0 = *s.sweeps;
    if (s.growth) cfg.schedule.growth_rate = *s.growth;
    cfg.schedule.seed = s.seed;
    return cfg;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << text;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_traces(const RunSpec& s, const BendersTrace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    write_file(fs::path(s.out) / "trace.csv", os.str());
    if (!s.trace_figures) return;
    std::string viol = "t,violation\n", dual = "t,dual_obj,s_pt,s_dt\n";
    for (const auto& it : trace.iterations) {
        viol += std::to_string(it.t) + "," + num(it.violation) + "\n";
        dual += std::to_string(it.t) + "," + num(it.dual_objective) + "," + num(it.s_pt) + "," + num(it.s_dt) + "\n";
    }
    write_file(fs::path(s.out) / "violation.csv", viol);
    write_file(fs::path(s.out) / "dual.csv", dual);
}

nlohmann::json run_header(const RunSpec& s, Algorithm alg, const BendersResult& r) {
    nlohmann::json j;
    j["status"] = to_string(r.status);
    j["algorithm"] = static_cast<int>(alg);
    j["backend"] = s.backend;
    j["seed"] = s.seed;
    j["iterations"] = r.trace.iterations.size();
    j["cuts"] = r.trace.cuts.size();
    return j;
}

Algorithm pick_algorithm(const RunSpec& s, const MixedIntegerProgram& m) {
    if (s.algorithm == 1) return Algorithm::feasibility_only;
    if (s.algorithm == 2) return Algorithm::with_optimality;
    return m.coupling_sense == CouplingSense::equality ? Algorithm::feasibility_only : Algorithm::with_optimality;
}

int no_incumbent(const RunSpec& s, Algorithm alg, const BendersResult& r) {
    auto sol = run_header(s, alg, r);
    sol["objective"] = nullptr;
    write_file(fs::path(s.out) / "solution.json", sol.dump(2) + "\n");
    write_traces(s, r.trace);
    std::cerr << "no feasible incumbent within " << s.max_iters << " iterations\n";
    return capped;
}

int finish(const RunSpec& s, nlohmann::json sol, const BendersResult& r) {
    write_file(fs::path(s.out) / "solution.json", sol.dump(2) + "\n");
    write_traces(s, r.trace);
    std::printf("%s objective %.6f", sol["status"].get<std::string>().c_str(), sol["objective"].get<double>());
    std::cout << " after "
              << r.trace.iterations.size() << " iterations\n";
    return r.status == RunStatus::converged ? ok : capped;
}

int cmd_solve(const RunSpec& s) {
    if (s.input.empty()) throw CLI::ValidationError("--input", "solve needs a problem file");
    auto mip = load_mip(s.input);
    const auto alg = pick_algorithm(s, mip);
    auto cfg = engine_config(s, alg);
    auto r = run_benders(mip, cfg);
    if (!r.has_solution) return no_incumbent(s, alg, r);
    auto ev = evaluate(mip, r.assignment);
    if (!ev.feasible || std::abs(ev.objective - r.objective) > 1e-6 * std::max(1.0, std::abs(ev.objective))) {
        std::cerr << "solution failed re-validation (worst violation " << ev.worst_violation << ")\n";
        return inconsistent;
    }
    auto sol = run_header(s, alg, r);
    sol["objective"] = ev.objective;
    sol["assignment"] = assignment_to_json(r.assignment);
    return finish(s, sol, r);
}

Network network_of(const RunSpec& s) {
    if (!s.input.empty()) return load_network(s.input);
    if (s.builtin == "6bus" || s.builtin.empty()) return builtin_6bus();
    throw CLI::ValidationError("--builtin", "unknown network " + s.builtin);
}

int cmd_uc(const RunSpec& s) {
    auto net = network_of(s);
    auto model = build_uc(net, s.horizon);
    const auto alg = s.algorithm == 2 ? Algorithm::with_optimality : Algorithm::feasibility_only;
    auto cfg = engine_config(s, alg);
    if (!s.alpha_bar) cfg.alpha_bar_value = 1000.0;
    if (!s.penalty) cfg.penalty.w_t = 2.0;
    if (!s.granularity) cfg.penalty.w_x = 1.0;
    if (!s.slack_bits) cfg.penalty.slack_bits_default = 0;

    BendersResult r;
    std::optional<BitVector> y;
    if (alg == Algorithm::feasibility_only) {
        const double w_q = s.q_granularity.value_or(1.0);
        const std::size_t bits = s.q_bits.value_or(required_q_bits(model.mip, w_q));
        auto eq = to_equality_form(model.mip, w_q, bits);
        cfg.penalty.w_q = w_q;
        cfg.penalty.n_q_bits = bits;
        r = run_benders(eq.mip, cfg);
        if (r.has_solution) y = to_original_assignment(eq.map, r.assignment).y;
    } else {
        r = run_benders(model.mip, cfg);
        if (r.has_solution) y = r.assignment.y;
    }
    if (!y) return no_incumbent(s, alg, r);
    // Dispatch for the committed units, re-optimized on the inequality model.
    Assignment a{*y, recover_continuous(model.mip, *y)};
    auto ev = evaluate(model.mip, a);
    if (!ev.feasible) {
        std::cerr << "dispatch failed re-validation (worst violation " << ev.worst_violation << ")\n";
        return inconsistent;
    }
    Dispatch d;
    try {
        d = interpret_solution(model, net, a);
    } catch (const IntegrityError& e) {
        std::cerr << e.what() << "\n";
        return inconsistent;
    }
    auto sol = run_header(s, alg, r);
    sol["objective"] = ev.objective;
    sol["decomposition_objective"] = r.objective;
    sol["horizon"] = s.horizon;
    nlohmann::json hours = nlohmann::json::array();
    for (const auto& h : d.hours) {
        nlohmann::json row;
        for (std::size_t i = 0; i < h.on.size(); ++i)
            row[net.generators[i].name] = {{"state", h.on[i] ? "on" : "off"}, {"MW", h.mw[i]}};
        hours.push_back(row);
    }
    sol["dispatch"] = hours;
    sol["assignment"] = assignment_to_json(a);
    std::ostringstream os;
    write_dispatch_csv(os, net, d);
    write_file(fs::path(s.out) / "dispatch.csv", os.str());
    return finish(s, sol, r);
}

int cmd_oracle(const RunSpec& s) {
    MixedIntegerProgram mip;
    if (!s.input.empty()) mip = load_mip(s.input);
    else if (!s.builtin.empty()) mip = build_uc(network_of(s), s.horizon).mip;
    else throw CLI::ValidationError("--input", "oracle needs --input or --builtin");
    auto o = enumerate_optimum(mip);
    nlohmann::json j;
    j["status"] = o.feasible ? "OPTIMAL" : "INFEASIBLE";
    j["evaluated"] = o.evaluated;
    if (o.feasible) {
        j["objective"] = o.objective;
        j["assignment"] = assignment_to_json(o.assignment);
    }
    std::cout << j.dump(2) << "\n";
    return o.feasible ? ok : infeasible;
}

int cmd_export(const RunSpec& s) {
    if (s.input.empty()) throw CLI::ValidationError("--input", "export-qubo needs a problem file");
    auto mip = load_mip(s.input);
    const auto alg = pick_algorithm(s, mip);
    auto cfg = engine_config(s, alg);
    auto r = run_benders(mip, cfg);
    // The master that would be solved next, over every cut generated so far.
    int gamma = 0;
    for (const auto& c : r.trace.cuts) gamma |= c.kind == CutKind::optimality;
    auto qubo = encode_master(mip.f_quadratic, mip.f_linear, r.trace.cuts, gamma, cfg.penalty);
    std::ostringstream os;
    write_qubo(os, qubo);
    write_file(fs::path(s.out) / "master.qubo", os.str());
    std::cout << "master.qubo: " << qubo.n << " bits, " << qubo.terms.size() << " terms, " << r.trace.cuts.size()
              << " cuts\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid Benders decomposition with exact, QUBO and annealing masters"};
    app.require_subcommand(1);
    RunSpec run;
    auto* solve = app.add_subcommand("solve", "solve a problem file");
    auto* uc = app.add_subcommand("uc", "unit commitment on a network");
    auto* oracle = app.add_subcommand("oracle", "exhaustive enumeration optimum");
    auto* exp = app.add_subcommand("export-qubo", "write the master QUBO after a run");
    for (auto* c : {solve, uc, oracle, exp}) add_common(c, run);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : usage;
    }
    try {
        if (!oracle->parsed()) fs::create_directories(run.out);
        if (solve->parsed()) return cmd_solve(run);
        if (uc->parsed()) return cmd_uc(run);
        if (oracle->parsed()) return cmd_oracle(run);
        return cmd_export(run);
    } catch (const MasterInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const IntegrityError& e) {
        std::cerr << "internal inconsistency: " << e.what() << "\n";
        return inconsistent;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
}
