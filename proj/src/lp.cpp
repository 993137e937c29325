#include "hbd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hbd/errors.hpp"

namespace hbd {

namespace {

// Internal column x' ≥ 0 contributing offset + sign·x' to an original variable.
struct ColumnMap {
    std::size_t var;
    double sign;
};

class BoundedSimplex {
public:
    BoundedSimplex(Matrix A, std::vector<double> b, std::vector<double> upper, std::vector<std::size_t> basis,
                   std::size_t first_artificial, const SimplexOptions& opts)
        : A0_(A), b0_(b), T_(std::move(A)), xb_(std::move(b)), upper_(std::move(upper)),
          basis_(std::move(basis)), first_artificial_(first_artificial), opts_(opts) {
        m_ = T_.rows();
        n_ = T_.cols();
        pos_.assign(n_, -1);
        at_upper_.assign(n_, 0);
        for (std::size_t i = 0; i < m_; ++i) pos_[basis_[i]] = static_cast<long>(i);
    }

    // Returns false when the objective is unbounded below.
    bool optimize(const std::vector<double>& cost) {
        cost_ = cost;
        reduced_costs();
        bland_ = false;
        std::size_t degenerate = 0;
        const std::size_t bland_after = 2 * (m_ + n_);
        for (;;) {
            if (pivots_ >= opts_.max_pivots) throw NumericalFailure("simplex pivot cap reached");
            if (pivots_ && pivots_ % 200 == 0) reduced_costs();
            long q = choose_entering();
            if (q < 0) return true;
            auto step = ratio_test(static_cast<std::size_t>(q));
            if (!step) return false;
            degenerate = *step <= 1e-12 ? degenerate + 1 : 0;
            if (degenerate > bland_after) bland_ = true;
        }
    }

    void fix_artificials() {
        for (std::size_t j = first_artificial_; j < n_; ++j) upper_[j] = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < first_artificial_) continue;
            std::size_t best = n_;
            double best_abs = opts_.pivot_tol;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                if (pos_[j] >= 0) continue;
                double a = std::abs(T_(r, j));
                if (a > best_abs) {
                    best_abs = a;
                    best = j;
                }
            }
            if (best == n_) continue;
            const double theta = xb_[r] / T_(r, best);
            const double value = (at_upper_[best] ? upper_[best] : 0.0) + theta;
            for (std::size_t i = 0; i < m_; ++i)
                if (i != r) xb_[i] -= T_(i, best) * theta;
            pivot(r, best);
            xb_[r] = value;
            at_upper_[best] = 0;
        }
    }

    double artificial_sum() const {
        double s = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= first_artificial_) s += std::abs(xb_[i]);
        return s;
    }

    std::vector<double> values() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j)
            if (pos_[j] < 0 && at_upper_[j]) x[j] = upper_[j];
        for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = xb_[i];
        return x;
    }

    // Recomputes basic values from the original rows to shed accumulated drift.
    void refine() {
        if (m_ == 0) return;
        auto x = values();
        Matrix B(m_, m_);
        std::vector<double> rhs = b0_;
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j)
                if (pos_[j] < 0 && x[j] != 0.0) rhs[i] -= A0_(i, j) * x[j];
            for (std::size_t k = 0; k < m_; ++k) B(i, k) = A0_(i, basis_[k]);
        }
        std::vector<std::size_t> perm(m_);
        for (std::size_t i = 0; i < m_; ++i) perm[i] = i;
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < m_; ++i)
                if (std::abs(B(i, k)) > std::abs(B(p, k))) p = i;
            if (std::abs(B(p, k)) < 1e-11) return;
            if (p != k) {
                for (std::size_t j = 0; j < m_; ++j) std::swap(B(p, j), B(k, j));
                std::swap(rhs[p], rhs[k]);
            }
            for (std::size_t i = k + 1; i < m_; ++i) {
                double f = B(i, k) / B(k, k);
                if (f == 0.0) continue;
                for (std::size_t j = k; j < m_; ++j) B(i, j) -= f * B(k, j);
                rhs[i] -= f * rhs[k];
            }
        }
        std::vector<double> sol(m_);
        for (std::size_t k = m_; k-- > 0;) {
            double s = rhs[k];
            for (std::size_t j = k + 1; j < m_; ++j) s -= B(k, j) * sol[j];
            sol[k] = s / B(k, k);
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (std::abs(sol[i] - xb_[i]) > 1e-6 * std::max(1.0, std::abs(xb_[i]))) return;
        }
        xb_ = sol;
    }

    std::size_t pivots() const { return pivots_; }

private:
    void reduced_costs() {
        d_.assign(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) d_[j] = cost_[j];
        for (std::size_t i = 0; i < m_; ++i) {
            double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            auto r = T_.row(i);
            for (std::size_t j = 0; j < n_; ++j) d_[j] -= cb * r[j];
        }
    }

    bool eligible(std::size_t j) const {
        if (pos_[j] >= 0 || upper_[j] <= 0.0) return false;
        return at_upper_[j] ? d_[j] > opts_.optimality_tol : d_[j] < -opts_.optimality_tol;
    }

    long choose_entering() const {
        long best = -1;
        double best_score = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (!eligible(j)) continue;
            if (bland_) return static_cast<long>(j);
            double s = std::abs(d_[j]);
            if (s > best_score) {
                best_score = s;
                best = static_cast<long>(j);
            }
        }
        return best;
    }

    // Performs one step along column q; returns the step length, or nothing if unbounded.
    std::optional<double> ratio_test(std::size_t q) {
        const double dir = at_upper_[q] ? -1.0 : 1.0;
        double theta = upper_[q];
        long leave = -1;
        double leave_alpha = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            double alpha = T_(i, q) * dir;
            double lim;
            if (alpha > opts_.pivot_tol) {
                lim = std::max(xb_[i], 0.0) / alpha;
            } else if (alpha < -opts_.pivot_tol && std::isfinite(upper_[basis_[i]])) {
                lim = std::max(upper_[basis_[i]] - xb_[i], 0.0) / -alpha;
            } else {
                continue;
            }
            if (leave < 0 ? lim < theta : lim < theta - 1e-12) {
                theta = lim;
                leave = static_cast<long>(i);
                leave_alpha = alpha;
            } else if (leave >= 0 && lim <= theta + 1e-12) {
                const auto cur = static_cast<std::size_t>(leave);
                bool better = bland_ ? basis_[i] < basis_[cur] : std::abs(alpha) > std::abs(leave_alpha);
                if (better) {
                    theta = std::min(theta, lim);
                    leave = static_cast<long>(i);
                    leave_alpha = alpha;
                }
            }
        }
        if (!std::isfinite(theta)) return std::nullopt;
        ++pivots_;
        for (std::size_t i = 0; i < m_; ++i) xb_[i] -= T_(i, q) * dir * theta;
        if (leave < 0) {
            at_upper_[q] ^= 1;
            return theta;
        }
        const auto r = static_cast<std::size_t>(leave);
        const std::size_t out = basis_[r];
        double entering_value = (at_upper_[q] ? upper_[q] : 0.0) + dir * theta;
        pivot(r, q);
        xb_[r] = entering_value;
        at_upper_[q] = 0;
        at_upper_[out] = leave_alpha < 0.0 ? 1 : 0;
        return theta;
    }

    void pivot(std::size_t r, std::size_t q) {
        auto pr = T_.row(r);
        const double p = pr[q];
        for (std::size_t j = 0; j < n_; ++j) pr[j] /= p;
        pr[q] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            auto ri = T_.row(i);
            double f = ri[q];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) ri[j] -= f * pr[j];
            ri[q] = 0.0;
        }
        if (!d_.empty()) {
            double f = d_[q];
            if (f != 0.0)
                for (std::size_t j = 0; j < n_; ++j) d_[j] -= f * pr[j];
            d_[q] = 0.0;
        }
        const std::size_t out = basis_[r];
        pos_[out] = -1;
        basis_[r] = q;
        pos_[q] = static_cast<long>(r);
    }

    Matrix A0_;
    std::vector<double> b0_;
    Matrix T_;
    std::vector<double> xb_;
    std::vector<double> upper_;
    std::vector<std::size_t> basis_;
    std::size_t first_artificial_;
    SimplexOptions opts_;
    std::size_t m_ = 0, n_ = 0;
    std::vector<long> pos_;
    std::vector<std::uint8_t> at_upper_;
    std::vector<double> cost_, d_;
    std::size_t pivots_ = 0;
    bool bland_ = false;
};

}  // namespace

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts) {
    const std::size_t nv = lp.num_vars();
    const std::size_t me = lp.b_eq.size(), mu = lp.b_ub.size();
    if ((me && lp.A_eq.cols() != nv) || lp.A_eq.rows() != me || (mu && lp.A_ub.cols() != nv) ||
        lp.A_ub.rows() != mu)
        throw DimensionError("linear program rows do not match the variable count");
    std::vector<double> lo = lp.lower.empty() ? std::vector<double>(nv, 0.0) : lp.lower;
    std::vector<double> hi = lp.upper.empty() ? std::vector<double>(nv, kInfinity) : lp.upper;
    if (lo.size() != nv || hi.size() != nv) throw DimensionError("bound vectors do not match the variable count");

    LpSolution out;
    std::vector<double> offset(nv, 0.0);
    std::vector<ColumnMap> cols;
    std::vector<double> col_upper;
    for (std::size_t j = 0; j < nv; ++j) {
        if (lo[j] > hi[j]) return out;
        if (std::isfinite(lo[j])) {
            offset[j] = lo[j];
            cols.push_back({j, 1.0});
            col_upper.push_back(hi[j] - lo[j]);
        } else if (std::isfinite(hi[j])) {
            offset[j] = hi[j];
            cols.push_back({j, -1.0});
            col_upper.push_back(kInfinity);
        } else {
            cols.push_back({j, 1.0});
            col_upper.push_back(kInfinity);
            cols.push_back({j, -1.0});
            col_upper.push_back(kInfinity);
        }
    }
    const std::size_t ns = cols.size();
    const std::size_t m = me + mu;

    // Row layout: equalities first, then inequalities with their slacks.
    std::vector<double> rhs(m);
    std::vector<bool> flip(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        auto row = i < me ? lp.A_eq.row(i) : lp.A_ub.row(i - me);
        double r = i < me ? lp.b_eq[i] : lp.b_ub[i - me];
        for (std::size_t j = 0; j < nv; ++j) r -= row[j] * offset[j];
        rhs[i] = r;
        flip[i] = r < 0.0;
    }
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (i < me || flip[i]) ++n_art;
    const std::size_t first_art = ns + mu;
    const std::size_t n = first_art + n_art;

    Matrix A(m, n);
    std::vector<double> b(m);
    std::vector<double> upper(n, kInfinity);
    std::copy(col_upper.begin(), col_upper.end(), upper.begin());
    std::vector<std::size_t> basis(m);
    std::size_t art = first_art;
    for (std::size_t i = 0; i < m; ++i) {
        auto row = i < me ? lp.A_eq.row(i) : lp.A_ub.row(i - me);
        const double s = flip[i] ? -1.0 : 1.0;
        for (std::size_t k = 0; k < ns; ++k) A(i, k) = s * row[cols[k].var] * cols[k].sign;
        b[i] = s * rhs[i];
        if (i >= me) {
            A(i, ns + (i - me)) = s;
            if (!flip[i]) {
                basis[i] = ns + (i - me);
                continue;
            }
        }
        A(i, art) = 1.0;
        basis[i] = art++;
    }

    double bscale = 1.0;
    for (double v : b) bscale = std::max(bscale, std::abs(v));

    BoundedSimplex sx(std::move(A), b, std::move(upper), std::move(basis), first_art, opts);
    if (n_art) {
        std::vector<double> phase1(n, 0.0);
        for (std::size_t j = first_art; j < n; ++j) phase1[j] = 1.0;
        sx.optimize(phase1);
        if (sx.artificial_sum() > opts.feasibility_tol * bscale) {
            out.status = LpStatus::infeasible;
            out.pivots = sx.pivots();
            return out;
        }
        sx.fix_artificials();
    }
    const double sense = lp.sense == Sense::maximize ? -1.0 : 1.0;
    std::vector<double> cost(n, 0.0);
    for (std::size_t k = 0; k < ns; ++k) cost[k] = sense * lp.c[cols[k].var] * cols[k].sign;
    bool bounded = sx.optimize(cost);
    out.pivots = sx.pivots();
    if (!bounded) {
        out.status = LpStatus::unbounded;
        return out;
    }
    sx.refine();
    auto xs = sx.values();
    out.x = offset;
    for (std::size_t k = 0; k < ns; ++k) out.x[cols[k].var] += cols[k].sign * xs[k];
    for (std::size_t j = 0; j < nv; ++j) out.x[j] = std::clamp(out.x[j], lo[j], hi[j]);
    out.objective = dot(lp.c, out.x);
    out.status = LpStatus::optimal;
    return out;
}

}  // namespace hbd
