#include <random>

#include "doctest.h"
#include "hbd/errors.hpp"
#include "hbd/master.hpp"

using namespace hbd;

namespace {

Cut cut_of(std::vector<double> a, double rhs, CutKind kind = CutKind::feasibility) {
    Cut c;
    c.kind = kind;
    c.a = std::move(a);
    c.rhs = rhs;
    return c;
}

struct Instance {
    Matrix Q;
    std::vector<double> f;
    std::vector<Cut> cuts;
    int gamma = 0;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n, bool quadratic, int gamma) {
    std::uniform_int_distribution<int> coef(-3, 3);
    Instance in;
    in.Q = Matrix(n, n);
    if (quadratic)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) in.Q(i, j) = in.Q(j, i) = coef(rng);
    for (std::size_t i = 0; i < n; ++i) in.f.push_back(coef(rng));
    in.gamma = gamma;
    for (int k = 0; k < 2; ++k) {
        std::vector<double> a(n);
        for (auto& v : a) v = coef(rng);
        in.cuts.push_back(cut_of(a, coef(rng) + 2));
    }
    if (gamma) {
        std::vector<double> a(n);
        for (auto& v : a) v = coef(rng);
        in.cuts.push_back(cut_of(a, coef(rng), CutKind::optimality));
    }
    return in;
}

double objective(const Instance& in, const BitVector& y) {
    double v = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        v += in.f[i] * y[i];
        for (std::size_t j = 0; j < y.size(); ++j) v += in.Q(i, j) * y[i] * y[j];
    }
    if (in.gamma) {
        double q = 0.0;
        for (const auto& c : in.cuts)
            if (c.kind == CutKind::optimality) q = std::max(q, c.activity(y) - c.rhs);
        v += q;
    }
    return v;
}

// Constrained optimum by enumeration; nothing when the cuts exclude every y.
std::optional<double> enumerate(const Instance& in) {
    const std::size_t n = in.f.size();
    std::optional<double> best;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        BitVector y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = (m >> i) & 1u;
        bool ok = true;
        for (const auto& c : in.cuts)
            if (c.kind == CutKind::feasibility) ok = ok && c.activity(y) <= c.rhs + 1e-9;
        if (ok && (!best || objective(in, y) < *best)) best = objective(in, y);
    }
    return best;
}

MasterOptions options(Backend b) {
    MasterOptions o;
    o.backend = b;
    o.penalty.w_t = 60;
    o.penalty.w_x = 1;
    o.penalty.slack_bits_default = 0;
    o.penalty.w_q = 1;
    o.penalty.n_q_bits = 5;
    return o;
}

}  // namespace

TEST_CASE("no cuts and nonnegative costs give y = 0") {
    std::vector<double> f{8.75, 4.95, 6.2, 8.4};
    for (auto b : {Backend::exact, Backend::qubo_exact, Backend::anneal}) {
        auto s = solve_master(Matrix(4, 4), f, {}, 0, options(b));
        CHECK_MESSAGE(s.y == BitVector(4, 0), to_string(b));
        CHECK(s.master_value == 0.0);
    }
}

TEST_CASE("exact master matches enumeration on random instances") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 120; ++trial) {
        auto in = random_instance(rng, 2 + trial % 9, trial % 3 == 0, trial % 2);
        auto best = enumerate(in);
        if (!best) {
            CHECK_THROWS_AS(solve_master(in.Q, in.f, in.cuts, in.gamma, options(Backend::exact)), MasterInfeasible);
            continue;
        }
        auto s = solve_master(in.Q, in.f, in.cuts, in.gamma, options(Backend::exact));
        CHECK(satisfies_feasibility_cuts(in.cuts, s.y));
        CHECK(s.master_value == doctest::Approx(*best));
        CHECK(objective(in, s.y) == doctest::Approx(*best));
    }
}

TEST_CASE("exact and exhaustive QUBO backends agree on the constrained objective") {
    std::mt19937_64 rng(19);
    int compared = 0;
    for (int trial = 0; trial < 80 && compared < 40; ++trial) {
        auto in = random_instance(rng, 2 + trial % 4, trial % 2 == 0, trial % 2);
        auto best = enumerate(in);
        if (!best) continue;
        auto opts = options(Backend::qubo_exact);
        auto qubo = encode_master(in.Q, in.f, in.cuts, in.gamma, opts.penalty);
        if (qubo.n > 22) continue;
        auto e = solve_master(in.Q, in.f, in.cuts, in.gamma, options(Backend::exact));
        auto q = solve_master(in.Q, in.f, in.cuts, in.gamma, opts);
        CHECK(q.diagnostics.qubo_bits == qubo.n);
        CHECK(satisfies_feasibility_cuts(in.cuts, q.y));
        CHECK(e.master_value == doctest::Approx(q.master_value));
        ++compared;
    }
    CHECK(compared >= 20);
}

TEST_CASE("exact q is the tightest optimality bound") {
    std::vector<Cut> cuts{cut_of({2, 1}, 1, CutKind::optimality), cut_of({1, 0}, -1, CutKind::optimality),
                          cut_of({1, 1}, 1)};
    std::vector<double> f{1.0, -3.0};
    auto s = solve_master(Matrix(2, 2), f, cuts, 1, options(Backend::exact));
    // Feasible y: 00, 10, 01 with values 0 + 1, 1 + 2, -3 + 1.
    CHECK(s.y == BitVector{0, 1});
    CHECK(s.q == doctest::Approx(1.0));
    CHECK(s.master_value == doctest::Approx(-2.0));

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        auto in = random_instance(rng, 4, false, 1);
        if (!enumerate(in)) continue;
        auto m = solve_master(in.Q, in.f, in.cuts, 1, options(Backend::exact));
        bool tight = false;
        for (const auto& c : in.cuts) {
            if (c.kind != CutKind::optimality) continue;
            CHECK(c.activity(m.y) - c.rhs <= m.q + 1e-9);
            tight = tight || std::abs(c.activity(m.y) - c.rhs - m.q) <= 1e-9;
        }
        CHECK((tight || m.q == 0.0));
    }
}

TEST_CASE("a cut set excluding every y is reported") {
    std::vector<Cut> cuts{cut_of({1, 1}, -1)};
    CHECK_THROWS_AS(solve_master(Matrix(2, 2), std::vector<double>{0, 0}, cuts, 0, options(Backend::exact)),
                    MasterInfeasible);
}

TEST_CASE("annealing master is reproducible for a fixed seed and iteration") {
    std::mt19937_64 rng(2);
    auto in = random_instance(rng, 6, false, 0);
    auto opts = options(Backend::anneal);
    opts.schedule.n_read_0 = 10;
    opts.schedule.n_sweep_0 = 200;
    opts.iteration = 3;
    auto a = solve_master(in.Q, in.f, in.cuts, 0, opts);
    auto b = solve_master(in.Q, in.f, in.cuts, 0, opts);
    CHECK(a.y == b.y);
    CHECK(a.diagnostics.energy == b.diagnostics.energy);
    auto [reads, sweeps] = schedule_at(opts.schedule, 3);
    CHECK(a.diagnostics.reads == reads);
    CHECK(a.diagnostics.sweeps == sweeps);
}
