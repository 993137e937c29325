#include "hbd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hbd/errors.hpp"

namespace hbd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shape(ValidationReport& r, const char* name, const Matrix& m, std::size_t rows,
                 std::size_t cols) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
        r.findings.push_back({Finding::Kind::dimension, os.str()});
    }
}

void check_length(ValidationReport& r, const char* name, std::size_t got, std::size_t want) {
    if (got != want) {
        std::ostringstream os;
        os << name << " has length " << got << ", expected " << want;
        r.findings.push_back({Finding::Kind::dimension, os.str()});
    }
}

void check_finite(ValidationReport& r, const char* name, std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            r.findings.push_back({Finding::Kind::non_finite, std::string(name) + " has a non-finite entry"});
            return;
        }
    }
}

bool rows_mirror(const MixedIntegerProgram& mip, std::size_t i, std::size_t j) {
    auto close = [](double a, double b) {
        return std::abs(a + b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    if (!close(mip.b[i], mip.b[j])) return false;
    for (std::size_t c = 0; c < mip.n_y; ++c)
        if (!close(mip.A_y(i, c), mip.A_y(j, c))) return false;
    for (std::size_t c = 0; c < mip.n_z; ++c)
        if (!close(mip.A_z(i, c), mip.A_z(j, c))) return false;
    return true;
}

// Continuous upper bound on gᵀz over the box implied by C,d and the LEQ coupling rows with y ∈ [0,1].
double objective_upper_bound(const MixedIntegerProgram& mip) {
    Matrix rows(0, mip.n_z);
    std::vector<double> rhs;
    for (std::size_t i = 0; i < mip.m_d(); ++i) {
        rows.append_row(mip.C.row(i));
        rhs.push_back(mip.d[i]);
    }
    for (std::size_t i = 0; i < mip.m_b(); ++i) {
        double ymin = 0.0;
        for (double a : mip.A_y.row(i)) ymin += std::min(0.0, a);
        rows.append_row(mip.A_z.row(i));
        rhs.push_back(mip.b[i] - ymin);
    }
    auto ub = implied_upper_bounds(rows, rhs);
    double total = 0.0;
    for (std::size_t j = 0; j < mip.n_z; ++j) {
        if (mip.g[j] < 0.0)
            throw CapacityError("binary objective expansion cannot represent negative continuous costs");
        if (mip.g[j] > 0.0) {
            if (!std::isfinite(ub[j]))
                throw CapacityError("continuous objective is unbounded over the implied variable box");
            total += mip.g[j] * ub[j];
        }
    }
    return total;
}

}  // namespace

double MixedIntegerProgram::binary_objective(std::span<const std::uint8_t> y) const {
    double v = 0.0;
    for (std::size_t i = 0; i < n_y; ++i) {
        if (!y[i]) continue;
        v += f_linear[i];
        if (f_quadratic.empty()) continue;
        for (std::size_t j = 0; j < n_y; ++j)
            if (y[j]) v += f_quadratic(i, j);
    }
    return v;
}

bool MixedIntegerProgram::has_continuous_objective() const {
    return std::any_of(g.begin(), g.end(), [](double v) { return v != 0.0; });
}

ValidationReport validate(const MixedIntegerProgram& mip) {
    ValidationReport r;
    const std::size_t mb = mip.m_b(), md = mip.m_d();
    check_shape(r, "f_quadratic", mip.f_quadratic, mip.n_y, mip.n_y);
    check_length(r, "f_linear", mip.f_linear.size(), mip.n_y);
    check_length(r, "g", mip.g.size(), mip.n_z);
    check_shape(r, "A_y", mip.A_y, mb, mip.n_y);
    check_shape(r, "A_z", mip.A_z, mb, mip.n_z);
    check_shape(r, "C", mip.C, md, mip.n_z);
    check_finite(r, "f_quadratic", mip.f_quadratic.data());
    check_finite(r, "f_linear", mip.f_linear);
    check_finite(r, "g", mip.g);
    check_finite(r, "A_y", mip.A_y.data());
    check_finite(r, "A_z", mip.A_z.data());
    check_finite(r, "b", mip.b);
    check_finite(r, "C", mip.C.data());
    check_finite(r, "d", mip.d);
    const auto& Q = mip.f_quadratic;
    if (Q.rows() == mip.n_y && Q.cols() == mip.n_y) {
        for (std::size_t i = 0; i < mip.n_y; ++i)
            for (std::size_t j = i + 1; j < mip.n_y; ++j)
                if (std::abs(Q(i, j) - Q(j, i)) > 1e-12) {
                    std::ostringstream os;
                    os << "f_quadratic asymmetric at (" << i << "," << j << ")";
                    r.findings.push_back({Finding::Kind::asymmetry, os.str()});
                }
    }
    return r;
}

void require_valid(const MixedIntegerProgram& mip) {
    auto r = validate(mip);
    if (r.ok()) return;
    std::string msg = "invalid problem:";
    for (const auto& f : r.findings) msg += " " + f.message + ";";
    throw DimensionError(msg);
}

Evaluation evaluate(const MixedIntegerProgram& mip, const Assignment& a, double tol) {
    if (a.y.size() != mip.n_y || a.z.size() != mip.n_z)
        throw DimensionError("assignment does not match problem dimensions");
    std::vector<double> yd(a.y.begin(), a.y.end());
    Evaluation e;
    e.objective = mip.binary_objective(a.y) + dot(mip.g, a.z);

    double worst = -kInf;
    auto ay = mip.A_y.multiply(yd);
    auto az = mip.A_z.multiply(a.z);
    for (std::size_t i = 0; i < mip.m_b(); ++i) {
        double r = ay[i] + az[i] - mip.b[i];
        worst = std::max(worst, mip.coupling_sense == CouplingSense::equality ? std::abs(r) : r);
    }
    auto cz = mip.C.multiply(a.z);
    for (std::size_t i = 0; i < mip.m_d(); ++i) worst = std::max(worst, cz[i] - mip.d[i]);
    for (double z : a.z) worst = std::max(worst, -z);
    for (auto y : a.y) worst = std::max(worst, y > 1 ? 1.0 : -kInf);
    e.worst_violation = std::isfinite(worst) ? worst : 0.0;
    e.feasible = e.worst_violation <= tol;
    return e;
}

std::vector<double> implied_upper_bounds(const Matrix& C, std::span<const double> d) {
    const std::size_t n = C.cols();
    std::vector<double> ub(n, kInf);
    for (int pass = 0; pass < 4; ++pass) {
        bool changed = false;
        for (std::size_t r = 0; r < C.rows(); ++r) {
            auto row = C.row(r);
            // Minimum of the row's activity over the current box, with z ≥ 0.
            double floor_sum = 0.0;
            std::size_t unbounded = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (row[j] >= 0.0) continue;
                if (std::isfinite(ub[j])) floor_sum += row[j] * ub[j];
                else ++unbounded;
            }
            if (unbounded) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (row[j] <= 0.0) continue;
                double bound = (d[r] - floor_sum) / row[j];
                if (bound < ub[j] - 1e-12 * std::max(1.0, std::abs(bound))) {
                    ub[j] = std::max(bound, 0.0);
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return ub;
}

std::size_t required_q_bits(const MixedIntegerProgram& mip, double w_q) {
    if (!mip.has_continuous_objective()) return 0;
    double ub = objective_upper_bound(mip);
    std::size_t n = 0;
    while (w_q * (std::ldexp(1.0, static_cast<int>(n)) - 1.0) < ub) {
        if (++n > 62) throw CapacityError("continuous objective bound needs more than 62 bits");
    }
    return n;
}

EqualityForm to_equality_form(const MixedIntegerProgram& mip, double w_q, std::size_t n_q_bits) {
    require_valid(mip);
    if (mip.coupling_sense != CouplingSense::leq)
        throw DimensionError("to_equality_form expects a LEQ-form problem");
    if (w_q <= 0.0) throw DimensionError("w_q must be positive");

    const std::size_t mb = mip.m_b();
    VariableMap map;
    map.n_y_original = mip.n_y;
    map.n_z_original = mip.n_z;
    map.m_b_original = mb;
    map.row_target.assign(mb, 0);
    map.row_slack.assign(mb, std::nullopt);
    map.row_is_mirror.assign(mb, false);

    // Pair each row with a later exact negation; the pair becomes one equality.
    std::vector<std::optional<std::size_t>> partner(mb);
    for (std::size_t i = 0; i < mb; ++i) {
        if (partner[i] || map.row_is_mirror[i]) continue;
        for (std::size_t j = i + 1; j < mb; ++j) {
            if (partner[j] || map.row_is_mirror[j]) continue;
            if (rows_mirror(mip, i, j)) {
                partner[i] = j;
                map.row_is_mirror[j] = true;
                break;
            }
        }
    }

    std::size_t inequality_rows = 0;
    for (std::size_t i = 0; i < mb; ++i)
        if (!map.row_is_mirror[i] && !partner[i]) ++inequality_rows;

    const bool objective = mip.has_continuous_objective();
    if (objective) {
        double ub = objective_upper_bound(mip);
        if (w_q * (std::ldexp(1.0, static_cast<int>(n_q_bits)) - 1.0) < ub)
            throw CapacityError("n_q_bits too small for the continuous objective bound " + std::to_string(ub));
    } else {
        n_q_bits = 0;
    }

    EqualityForm out;
    auto& e = out.mip;
    e.coupling_sense = CouplingSense::equality;
    e.n_y = mip.n_y + n_q_bits;
    e.n_z = mip.n_z + inequality_rows + (objective ? 1 : 0);
    e.f_quadratic = Matrix(e.n_y, e.n_y);
    for (std::size_t i = 0; i < mip.n_y; ++i)
        for (std::size_t j = 0; j < mip.n_y; ++j) e.f_quadratic(i, j) = mip.f_quadratic(i, j);
    e.f_linear = mip.f_linear;
    for (std::size_t j = 0; j < n_q_bits; ++j) e.f_linear.push_back(w_q * std::ldexp(1.0, static_cast<int>(j)));
    e.g.assign(e.n_z, 0.0);
    e.A_y = Matrix(0, e.n_y);
    e.A_z = Matrix(0, e.n_z);

    std::size_t slack_col = mip.n_z;
    std::vector<double> ry(e.n_y), rz(e.n_z);
    for (std::size_t i = 0; i < mb; ++i) {
        if (map.row_is_mirror[i]) continue;
        std::fill(ry.begin(), ry.end(), 0.0);
        std::fill(rz.begin(), rz.end(), 0.0);
        std::copy(mip.A_y.row(i).begin(), mip.A_y.row(i).end(), ry.begin());
        std::copy(mip.A_z.row(i).begin(), mip.A_z.row(i).end(), rz.begin());
        if (!partner[i]) {
            rz[slack_col] = 1.0;
            map.row_slack[i] = slack_col++;
        }
        map.row_target[i] = e.A_y.rows();
        if (partner[i]) map.row_target[*partner[i]] = e.A_y.rows();
        e.A_y.append_row(ry);
        e.A_z.append_row(rz);
        e.b.push_back(mip.b[i]);
    }

    e.C = Matrix(0, e.n_z);
    std::vector<double> cz(e.n_z);
    for (std::size_t i = 0; i < mip.m_d(); ++i) {
        std::fill(cz.begin(), cz.end(), 0.0);
        std::copy(mip.C.row(i).begin(), mip.C.row(i).end(), cz.begin());
        e.C.append_row(cz);
        e.d.push_back(mip.d[i]);
    }

    map.q_bit_offset = mip.n_y;
    map.n_q_bits = n_q_bits;
    map.w_q = w_q;
    if (objective) {
        const std::size_t s = e.n_z - 1;
        map.rounding_slack = s;
        std::fill(ry.begin(), ry.end(), 0.0);
        std::fill(rz.begin(), rz.end(), 0.0);
        for (std::size_t j = 0; j < n_q_bits; ++j) ry[mip.n_y + j] = -w_q * std::ldexp(1.0, static_cast<int>(j));
        std::copy(mip.g.begin(), mip.g.end(), rz.begin());
        rz[s] = -1.0;
        e.A_y.append_row(ry);
        e.A_z.append_row(rz);
        e.b.push_back(0.0);
        std::fill(cz.begin(), cz.end(), 0.0);
        cz[s] = 1.0;
        e.C.append_row(cz);
        e.d.push_back(w_q);
    }
    out.map = std::move(map);
    return out;
}

Assignment to_equality_assignment(const EqualityForm& eq, const MixedIntegerProgram& original,
                                  const Assignment& a) {
    const auto& map = eq.map;
    if (a.y.size() != map.n_y_original || a.z.size() != map.n_z_original)
        throw DimensionError("assignment does not match the original problem");
    Assignment out;
    out.y = a.y;
    out.y.resize(eq.mip.n_y, 0);
    out.z = a.z;
    out.z.resize(eq.mip.n_z, 0.0);

    std::vector<double> yd(a.y.begin(), a.y.end());
    auto ay = original.A_y.multiply(yd);
    auto az = original.A_z.multiply(a.z);
    for (std::size_t i = 0; i < map.m_b_original; ++i)
        if (map.row_slack[i]) out.z[*map.row_slack[i]] = std::max(0.0, original.b[i] - ay[i] - az[i]);

    if (map.rounding_slack) {
        double gz = std::max(0.0, dot(original.g, a.z));
        double units = std::floor(gz / map.w_q * (1.0 + 1e-15));
        double cap = std::ldexp(1.0, static_cast<int>(map.n_q_bits)) - 1.0;
        units = std::clamp(units, 0.0, cap);
        auto m = static_cast<std::uint64_t>(units);
        for (std::size_t j = 0; j < map.n_q_bits; ++j) out.y[map.q_bit_offset + j] = (m >> j) & 1u;
        out.z[*map.rounding_slack] = std::max(0.0, gz - map.w_q * units);
    }
    return out;
}

Assignment to_original_assignment(const VariableMap& map, const Assignment& a) {
    if (a.y.size() < map.n_y_original || a.z.size() < map.n_z_original)
        throw DimensionError("assignment smaller than the original problem");
    Assignment out;
    out.y.assign(a.y.begin(), a.y.begin() + static_cast<std::ptrdiff_t>(map.n_y_original));
    out.z.assign(a.z.begin(), a.z.begin() + static_cast<std::ptrdiff_t>(map.n_z_original));
    return out;
}

}  // namespace hbd
