#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "hbd/dual.hpp"
#include "hbd/errors.hpp"
#include "hbd/qubo.hpp"
#include "oracles/mip_enum.hpp"

using namespace hbd;

namespace {

std::vector<double> filled(std::size_t n, double v) { return std::vector<double>(n, v); }

MixedIntegerProgram random_leq(std::mt19937_64& rng, std::size_t ny, std::size_t nz, std::size_t mb, std::size_t md) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> cost(0, 5);
    MixedIntegerProgram m;
    m.n_y = ny;
    m.n_z = nz;
    m.f_quadratic = Matrix(ny, ny);
    m.f_linear = filled(ny, 0.0);
    for (std::size_t j = 0; j < nz; ++j) m.g.push_back(cost(rng));
    m.A_y = Matrix(0, ny);
    m.A_z = Matrix(0, nz);
    for (std::size_t k = 0; k < mb; ++k) {
        std::vector<double> ay(ny), az(nz);
        for (auto& v : ay) v = coef(rng);
        for (auto& v : az) v = coef(rng);
        m.A_y.append_row(ay);
        m.A_z.append_row(az);
        m.b.push_back(coef(rng));
    }
    m.coupling_sense = CouplingSense::leq;
    m.C = Matrix(0, nz);
    for (std::size_t l = 0; l < md; ++l) {
        std::vector<double> row(nz);
        for (auto& v : row) v = std::abs(coef(rng));
        m.C.append_row(row);
        m.d.push_back(2.0 + cost(rng));
    }
    return m;
}

BitVector random_bits(std::mt19937_64& rng, std::size_t n) {
    BitVector y(n);
    for (auto& b : y) b = rng() & 1u;
    return y;
}

}  // namespace

TEST_CASE("a feasible y yields a zero certificate") {
    auto m = small_case("small_alg1");
    auto best = oracle::mip_minimum(m);
    REQUIRE(best.feasible);
    auto sol = solve_dual_subproblem(m, best.y, filled(3, 1.0), {});
    CHECK(std::abs(sol.objective) <= 1e-6);
    CHECK(sol.classification == DualClass::feasible_certificate);
}

TEST_CASE("y = 0 on the small case is certified infeasible") {
    auto m = small_case("small_alg1");
    BitVector y(4, 0);
    REQUIRE_FALSE(oracle::continuous_minimum(m, y));
    auto sol = solve_dual_subproblem(m, y, filled(3, 1.0), {});
    CHECK(sol.objective > 1e-6);
    CHECK(sol.classification == DualClass::ray);
    for (double a : sol.alpha) CHECK(std::abs(a) <= 1.0 + 1e-9);
}

TEST_CASE("classify_dual follows the bound test") {
    DualSolution at_bound;
    at_bound.alpha = {0.0, 1000.0};
    at_bound.beta = {5.0};
    CHECK(classify_dual(at_bound, filled(2, 1000.0), filled(1, 1000.0)) == DualClass::ray);
    DualSolution zero;
    zero.alpha = {0.0, 0.0};
    zero.beta = {0.0};
    CHECK(classify_dual(zero, filled(2, 1000.0), filled(1, 1000.0)) == DualClass::point);
    DualSolution beta_bound;
    beta_bound.alpha = {0.0};
    beta_bound.beta = {999.995};
    CHECK(classify_dual(beta_bound, filled(1, 1000.0), filled(1, 1000.0)) == DualClass::ray);
}

TEST_CASE("bound classification agrees with the bound-doubling oracle") {
    std::mt19937_64 rng(11);
    int rays = 0, points = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto m = random_leq(rng, 3, 3, 3, 2);
        auto y = random_bits(rng, m.n_y);
        auto ab = filled(m.m_b(), 10.0), bb = filled(m.m_d(), 10.0);
        auto ab2 = filled(m.m_b(), 20.0), bb2 = filled(m.m_d(), 20.0);
        auto sol = solve_dual_subproblem(m, y, ab, bb);
        auto doubled = solve_dual_subproblem(m, y, ab2, bb2);
        const bool grows = doubled.objective > sol.objective + 1e-6 * (1.0 + std::abs(sol.objective));
        const bool ray = classify_dual(sol, ab, bb) == DualClass::ray;
        CHECK_MESSAGE(ray == grows, "trial " << trial << " obj " << sol.objective << " doubled " << doubled.objective);
        (ray ? rays : points) += 1;
    }
    CHECK(rays > 5);
    CHECK(points > 5);
}

TEST_CASE("certificate soundness on random instances") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto m = random_leq(rng, 3, 3, 3, 2);
        if (trial % 2) {
            m.coupling_sense = CouplingSense::equality;
            std::fill(m.g.begin(), m.g.end(), 0.0);
        }
        auto y = random_bits(rng, m.n_y);
        auto ab = filled(m.m_b(), 1000.0), bb = filled(m.m_d(), 1000.0);
        auto sol = solve_dual_subproblem(m, y, ab, bb);
        CHECK(sol.objective >= -1e-6);
        const bool feasible = oracle::continuous_minimum(m, y).has_value();
        if (sol.classification == DualClass::feasible_certificate) {
            CHECK(feasible);
            auto z = recover_continuous(m, y);
            CHECK(evaluate(m, {y, z}).feasible);
        } else {
            const bool ray = sol.classification == DualClass::ray;
            CHECK(ray == !feasible);
            auto cut = make_cut(m, sol, ray ? CutKind::feasibility : CutKind::optimality);
            // The cut excludes y: strictly for a ray, above q = 0 for a point.
            CHECK(cut.activity(y) - cut.rhs > 1e-6);
        }
    }
}

TEST_CASE("recovery on the inequality small case reaches the oracle optimum") {
    auto m = small_case("small_alg2");
    auto best = oracle::mip_minimum(m);
    REQUIRE(best.feasible);
    auto z = recover_continuous(m, best.y);
    auto e = evaluate(m, {best.y, z});
    CHECK(e.feasible);
    CHECK(e.objective == doctest::Approx(best.value).epsilon(1e-9));
}

TEST_CASE("recovery returns z = 0 when A_z = 0 and A_y y = b") {
    MixedIntegerProgram m;
    m.n_y = 2;
    m.n_z = 2;
    m.f_quadratic = Matrix(2, 2);
    m.f_linear = {0.0, 0.0};
    m.g = {0.0, 0.0};
    m.A_y = Matrix{{1.0, 1.0}};
    m.A_z = Matrix(1, 2);
    m.b = {1.0};
    m.C = Matrix(0, 2);
    auto z = recover_continuous(m, BitVector{1, 0});
    CHECK(z == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(recover_continuous(m, BitVector{1, 1}), IntegrityError);
}

TEST_CASE("dual inputs are checked") {
    auto m = small_case("small_alg1");
    CHECK_THROWS_AS(solve_dual_subproblem(m, BitVector(4, 0), filled(2, 1.0), {}), DimensionError);
    CHECK_THROWS_AS(solve_dual_subproblem(m, BitVector(4, 0), filled(3, 0.0), {}), DimensionError);
}
