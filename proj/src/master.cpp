#include "hbd/master.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hbd/errors.hpp"
#include "hbd/lp.hpp"

namespace hbd {

namespace {

double cut_tol(const Cut& c, double tol) { return tol * std::max(1.0, std::abs(c.rhs)); }

double binary_value(const Matrix& Q, std::span<const double> f, std::span<const std::uint8_t> y) {
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!y[i]) continue;
        v += f[i];
        if (Q.empty()) continue;
        for (std::size_t j = 0; j < f.size(); ++j)
            if (y[j]) v += Q(i, j);
    }
    return v;
}

class BranchAndBound {
public:
    BranchAndBound(const Matrix& Q, std::span<const double> f, std::span<const Cut> cuts, int gamma, double tol)
        : Q_(Q), f_(f), gamma_(gamma), tol_(tol), n_(f.size()) {
        for (const auto& c : cuts) {
            if (c.kind == CutKind::feasibility) feas_.push_back(&c);
            else if (gamma == 1) opt_.push_back(&c);
        }
        linear_ = Q.empty() || Q.is_zero();
    }

    MasterSolution solve() {
        std::vector<std::vector<std::int8_t>> stack;
        stack.emplace_back(n_, -1);
        while (!stack.empty()) {
            auto fixed = std::move(stack.back());
            stack.pop_back();
            ++nodes_;
            if (!propagate(fixed)) continue;
            std::size_t next = n_;
            for (std::size_t i = 0; i < n_; ++i)
                if (fixed[i] < 0) {
                    next = i;
                    break;
                }
            if (next == n_) {
                leaf(fixed);
                continue;
            }
            auto lb = bound(fixed);
            if (!lb || (have_ && lb->value >= best_value_ - eps())) continue;
            if (lb->integral) {
                // The relaxation is already binary on the free variables.
                auto full = fixed;
                for (std::size_t i = 0; i < n_; ++i)
                    if (full[i] < 0) full[i] = lb->x[i] > 0.5 ? 1 : 0;
                leaf(full);
                if (have_ && lb->value >= best_value_ - eps()) continue;
            }
            if (lb->branch < n_) next = lb->branch;
            auto one = fixed;
            one[next] = 1;
            fixed[next] = 0;
            // Explore the side the relaxation leans toward first.
            if (lb->lean_one) {
                stack.push_back(std::move(fixed));
                stack.push_back(std::move(one));
            } else {
                stack.push_back(std::move(one));
                stack.push_back(std::move(fixed));
            }
        }
        if (!have_) throw MasterInfeasible("the cut set excludes every binary assignment");
        MasterSolution s;
        s.y = best_;
        s.q = gamma_ == 1 ? optimality_bound(cuts_view(), best_) : 0.0;
        s.master_value = binary_value(Q_, f_, best_) + gamma_ * s.q;
        s.diagnostics.nodes = nodes_;
        return s;
    }

private:
    std::vector<Cut> cuts_view() const {
        std::vector<Cut> out;
        for (const Cut* c : opt_) out.push_back(*c);
        return out;
    }

    double eps() const { return 1e-9 * std::max(1.0, std::abs(best_value_)); }

    // Fixes variables forced by the feasibility cuts; false when a cut cannot be met.
    bool propagate(std::vector<std::int8_t>& fixed) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Cut* c : feas_) {
                double min_act = 0.0;
                for (std::size_t i = 0; i < n_; ++i) {
                    if (fixed[i] == 1) min_act += c->a[i];
                    else if (fixed[i] < 0) min_act += std::min(0.0, c->a[i]);
                }
                const double limit = c->rhs + cut_tol(*c, tol_);
                if (min_act > limit) return false;
                for (std::size_t i = 0; i < n_; ++i) {
                    if (fixed[i] >= 0 || c->a[i] == 0.0) continue;
                    if (min_act + std::abs(c->a[i]) > limit) {
                        fixed[i] = c->a[i] > 0.0 ? 0 : 1;
                        changed = true;
                    }
                }
            }
        }
        return true;
    }

    struct NodeBound {
        double value = 0.0;
        std::vector<double> x;  // relaxation values, full length; empty for interval bounds
        std::size_t branch = 0;
        bool lean_one = false;
        bool integral = false;
    };

    std::optional<NodeBound> bound(const std::vector<std::int8_t>& fixed) const {
        if (!linear_) {
            auto v = interval_bound(fixed);
            if (!v) return std::nullopt;
            NodeBound b;
            b.value = *v;
            b.branch = n_;
            return b;
        }
        return lp_bound(fixed);
    }

    std::optional<NodeBound> lp_bound(const std::vector<std::int8_t>& fixed) const {
        std::vector<std::size_t> free;
        double base = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (fixed[i] < 0) free.push_back(i);
            else if (fixed[i] == 1) base += f_[i];
        }
        const bool use_q = !opt_.empty();
        const std::size_t nv = free.size() + (use_q ? 1 : 0);
        LinearProgram lp;
        lp.c.resize(nv);
        lp.lower.assign(nv, 0.0);
        lp.upper.assign(nv, 1.0);
        for (std::size_t k = 0; k < free.size(); ++k) lp.c[k] = f_[free[k]];
        if (use_q) {
            lp.c.back() = 1.0;
            lp.upper.back() = kInfinity;
        }
        lp.A_ub = Matrix(0, nv);
        std::vector<double> row(nv);
        auto add = [&](const Cut* c, bool optimality) {
            double rhs = c->rhs + (optimality ? 0.0 : cut_tol(*c, tol_));
            for (std::size_t i = 0; i < n_; ++i)
                if (fixed[i] == 1) rhs -= c->a[i];
            for (std::size_t k = 0; k < free.size(); ++k) row[k] = c->a[free[k]];
            if (optimality) row.back() = -c->q_coefficient();
            lp.A_ub.append_row(row);
            lp.b_ub.push_back(rhs);
        };
        for (const Cut* c : feas_) add(c, false);
        for (const Cut* c : opt_) add(c, true);
        auto s = solve_lp(lp);
        if (s.status == LpStatus::infeasible) return std::nullopt;
        if (s.status != LpStatus::optimal) throw NumericalFailure("master relaxation is unbounded");
        NodeBound b;
        b.value = base + s.objective;
        b.x.assign(n_, 0.0);
        b.branch = n_;
        b.integral = true;
        double best_frac = 0.0;
        for (std::size_t k = 0; k < free.size(); ++k) {
            const double x = s.x[k];
            b.x[free[k]] = x;
            const double frac = std::min(x, 1.0 - x);
            if (frac > 1e-7) b.integral = false;
            if (frac > best_frac) {
                best_frac = frac;
                b.branch = free[k];
                b.lean_one = x > 0.5;
            }
        }
        return b;
    }

    std::optional<double> interval_bound(const std::vector<std::int8_t>& fixed) const {
        double v = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (fixed[i] == 0) continue;
            double li = f_[i] + Q_(i, i);
            if (fixed[i] == 1) {
                v += li;
                for (std::size_t j = i + 1; j < n_; ++j) {
                    double qij = Q_(i, j) + Q_(j, i);
                    if (fixed[j] == 1) v += qij;
                    else if (fixed[j] < 0) v += std::min(0.0, qij);
                }
            } else {
                v += std::min(0.0, li);
                for (std::size_t j = i + 1; j < n_; ++j) {
                    double qij = Q_(i, j) + Q_(j, i);
                    if (fixed[j] != 0) v += std::min(0.0, qij);
                }
            }
        }
        double qlow = 0.0;
        for (const Cut* c : opt_) {
            double min_act = -c->rhs;
            for (std::size_t i = 0; i < n_; ++i) {
                if (fixed[i] == 1) min_act += c->a[i];
                else if (fixed[i] < 0) min_act += std::min(0.0, c->a[i]);
            }
            qlow = std::max(qlow, min_act / c->q_coefficient());
        }
        return v + gamma_ * qlow;
    }

    void leaf(const std::vector<std::int8_t>& fixed) {
        BitVector y(fixed.begin(), fixed.end());
        for (const Cut* c : feas_)
            if (c->activity(y) - c->rhs > cut_tol(*c, tol_)) return;
        double q = 0.0;
        for (const Cut* c : opt_) q = std::max(q, (c->activity(y) - c->rhs) / c->q_coefficient());
        const double v = binary_value(Q_, f_, y) + gamma_ * q;
        if (!have_ || v < best_value_ - eps()) {
            have_ = true;
            best_value_ = v;
            best_ = std::move(y);
        }
    }

    const Matrix& Q_;
    std::span<const double> f_;
    int gamma_;
    double tol_;
    std::size_t n_;
    bool linear_ = true;
    std::vector<const Cut*> feas_, opt_;
    bool have_ = false;
    double best_value_ = 0.0;
    BitVector best_;
    std::size_t nodes_ = 0;
};

std::uint64_t iteration_seed(std::uint64_t seed, std::size_t t) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(t) + 1));
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}

}  // namespace

const char* to_string(Backend b) {
    switch (b) {
        case Backend::exact: return "exact";
        case Backend::qubo_exact: return "qubo-exact";
        case Backend::anneal: return "anneal";
    }
    return "?";
}

double optimality_bound(std::span<const Cut> cuts, std::span<const std::uint8_t> y) {
    double q = 0.0;
    for (const auto& c : cuts)
        if (c.kind == CutKind::optimality) q = std::max(q, (c.activity(y) - c.rhs) / c.q_coefficient());
    return q;
}

bool satisfies_feasibility_cuts(std::span<const Cut> cuts, std::span<const std::uint8_t> y, double tol) {
    for (const auto& c : cuts)
        if (c.kind == CutKind::feasibility && c.activity(y) - c.rhs > cut_tol(c, tol)) return false;
    return true;
}

MasterSolution solve_master(const Matrix& f_quadratic, std::span<const double> f_linear, std::span<const Cut> cuts,
                            int gamma, const MasterOptions& opts) {
    const std::size_t n = f_linear.size();
    if (!f_quadratic.empty() && (f_quadratic.rows() != n || f_quadratic.cols() != n))
        throw DimensionError("f_quadratic does not match f_linear");
    for (const auto& c : cuts)
        if (c.a.size() != n) throw DimensionError("cut length does not match decision count");

    if (opts.backend == Backend::exact)
        return BranchAndBound(f_quadratic, f_linear, cuts, gamma, opts.feasibility_tol).solve();

    auto qubo = encode_master(f_quadratic, f_linear, cuts, gamma, opts.penalty);
    Sample best;
    MasterSolution s;
    if (opts.backend == Backend::qubo_exact) {
        best = minimize_qubo_exact(qubo);
    } else {
        validate(opts.schedule);
        auto [reads, sweeps] = schedule_at(opts.schedule, opts.iteration);
        auto set = sample_qubo(qubo, reads, sweeps, iteration_seed(opts.schedule.seed, opts.iteration),
                               {opts.schedule.beta_hot, opts.schedule.beta_cold});
        best = set.samples.front();
        s.diagnostics.reads = reads;
        s.diagnostics.sweeps = sweeps;
    }
    auto d = decode(qubo, best.bits);
    s.y = d.y;
    s.diagnostics.decoded_q = d.q_value;
    s.q = gamma == 1 ? optimality_bound(cuts, s.y) : 0.0;
    s.master_value = binary_value(f_quadratic, f_linear, s.y) + gamma * s.q;
    s.diagnostics.qubo_bits = qubo.n;
    s.diagnostics.energy = best.energy;
    s.diagnostics.violation = d.violation;
    s.diagnostics.residuals = std::move(d.residuals);
    return s;
}

}  // namespace hbd
