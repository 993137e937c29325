#include "hbd/oracle.hpp"

#include <cmath>
#include <string>

#include "hbd/dual.hpp"
#include "hbd/errors.hpp"

namespace hbd {

OracleResult enumerate_optimum(const MixedIntegerProgram& mip, std::size_t limit) {
    require_valid(mip);
    if (mip.n_y > limit)
        throw SizeGuardError("enumeration limited to " + std::to_string(limit) + " binaries, got " +
                             std::to_string(mip.n_y));
    OracleResult out;
    BitVector y(mip.n_y, 0);
    const std::uint64_t count = std::uint64_t{1} << mip.n_y;
    for (std::uint64_t k = 0; k < count; ++k) {
        // y[0] is the most significant bit, so k runs through y in lexicographic order.
        for (std::size_t i = 0; i < mip.n_y; ++i) y[i] = (k >> (mip.n_y - 1 - i)) & 1u;
        ++out.evaluated;
        auto z = solve_continuous(mip, y);
        if (!z) continue;
        Assignment a{y, *z};
        auto ev = evaluate(mip, a);
        if (!ev.feasible) continue;
        const double tol = 1e-9 * std::max(1.0, std::abs(out.objective));
        if (!out.feasible || ev.objective < out.objective - tol) {
            out.feasible = true;
            out.objective = ev.objective;
            out.assignment = std::move(a);
        }
    }
    return out;
}

}  // namespace hbd
