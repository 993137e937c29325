#include "hbd/anneal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "hbd/errors.hpp"

namespace hbd {

namespace {

struct Csr {
    std::size_t n = 0;
    std::vector<std::size_t> start;
    std::vector<std::uint32_t> col;
    std::vector<double> val;
    std::vector<double> diag;
    double offset = 0.0;
};

Csr build_csr(const QuboProblem& q) {
    Csr c;
    c.n = q.n;
    c.offset = q.constant_offset;
    c.diag.assign(q.n, 0.0);
    std::vector<std::size_t> degree(q.n, 0);
    for (const auto& t : q.terms) {
        if (t.i == t.j) continue;
        ++degree[t.i];
        ++degree[t.j];
    }
    c.start.assign(q.n + 1, 0);
    for (std::size_t i = 0; i < q.n; ++i) c.start[i + 1] = c.start[i] + degree[i];
    c.col.resize(c.start[q.n]);
    c.val.resize(c.start[q.n]);
    std::vector<std::size_t> fill(c.start.begin(), c.start.end() - 1);
    for (const auto& t : q.terms) {
        if (t.i == t.j) {
            c.diag[t.i] += t.value;
            continue;
        }
        c.col[fill[t.i]] = static_cast<std::uint32_t>(t.j);
        c.val[fill[t.i]++] = t.value;
        c.col[fill[t.j]] = static_cast<std::uint32_t>(t.i);
        c.val[fill[t.j]++] = t.value;
    }
    return c;
}

// Local fields h_i = Q_ii + Σ_j Q_ij x_j, so flipping i changes the energy by (1 − 2x_i)·h_i.
void init_fields(const Csr& c, const BitVector& x, std::vector<double>& h) {
    h = c.diag;
    for (std::size_t i = 0; i < c.n; ++i) {
        if (!x[i]) continue;
        for (std::size_t p = c.start[i]; p < c.start[i + 1]; ++p) h[c.col[p]] += c.val[p];
    }
}

double exact_energy(const Csr& c, const BitVector& x) {
    double e = c.offset;
    for (std::size_t i = 0; i < c.n; ++i) {
        if (!x[i]) continue;
        e += c.diag[i];
        for (std::size_t p = c.start[i]; p < c.start[i + 1]; ++p)
            if (c.col[p] > i && x[c.col[p]]) e += c.val[p];
    }
    return e;
}

inline void flip(const Csr& c, BitVector& x, std::vector<double>& h, std::size_t i) {
    x[i] ^= 1;
    const double s = x[i] ? 1.0 : -1.0;
    for (std::size_t p = c.start[i]; p < c.start[i + 1]; ++p) h[c.col[p]] += s * c.val[p];
}

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix(splitmix(seed) ^ splitmix(stream + 0x632be59bd9b4e019ULL));
}

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> beta_ladder(BetaRange r, std::size_t n_sweep) {
    std::vector<double> b(n_sweep);
    if (n_sweep == 1) {
        b[0] = r.cold;
        return b;
    }
    const double ratio = std::log(r.cold / r.hot);
    for (std::size_t s = 0; s < n_sweep; ++s)
        b[s] = r.hot * std::exp(ratio * static_cast<double>(s) / static_cast<double>(n_sweep - 1));
    return b;
}

Sample run_read(const Csr& c, const std::vector<double>& betas, std::uint64_t seed, double* accepted_min) {
    std::mt19937_64 rng(seed);
    const std::size_t n = c.n;
    BitVector x(n);
    for (auto& v : x) v = static_cast<std::uint8_t>(rng() >> 63);
    std::vector<double> h;
    init_fields(c, x, h);
    double e = exact_energy(c, x);
    BitVector best = x;
    double best_e = e;
    // Bits that may differ from the best state; synced only on improvement.
    std::vector<std::size_t> dirty;
    std::vector<std::uint8_t> is_dirty(n, 0);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (double beta : betas) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        for (std::size_t i : order) {
            const double de = x[i] ? -h[i] : h[i];
            if (de > 0.0) {
                const double a = beta * de;
                if (a > 40.0 || uniform01(rng) >= std::exp(-a)) continue;
            }
            flip(c, x, h, i);
            e += de;
            if (!is_dirty[i]) {
                is_dirty[i] = 1;
                dirty.push_back(i);
            }
            if (e < best_e) {
                best_e = e;
                for (std::size_t k : dirty) {
                    best[k] = x[k];
                    is_dirty[k] = 0;
                }
                dirty.clear();
            }
        }
    }
    if (accepted_min) *accepted_min = best_e;
    return {best, exact_energy(c, best)};
}

void sort_samples(std::vector<Sample>& s) {
    std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return lex_less(a.bits, b.bits);
    });
}

BetaRange resolve_range(const QuboProblem& q, std::uint64_t seed, BetaRange r) {
    if (r.hot > 0.0 && r.cold > r.hot) return r;
    auto p = probe_beta_range(q, seed);
    if (r.hot > 0.0) p.hot = r.hot;
    if (r.cold > 0.0) p.cold = r.cold;
    if (!(p.cold > p.hot)) p.cold = p.hot * 100.0;
    return p;
}

SampleSet sample_impl(const QuboProblem& qubo, std::size_t n_read, std::size_t n_sweep, std::uint64_t seed,
                      BetaRange range, bool parallel, std::vector<double>* accepted_minimum) {
    if (qubo.n == 0) throw DimensionError("cannot sample an empty QUBO");
    if (n_read == 0 || n_sweep == 0) throw DimensionError("read and sweep counts must be positive");
    const Csr c = build_csr(qubo);
    SampleSet out;
    const BetaRange r = resolve_range(qubo, seed, range);
    out.beta_hot = r.hot;
    out.beta_cold = r.cold;
    out.reads_used = n_read;
    out.sweeps_used = n_sweep;
    const auto betas = beta_ladder(r, n_sweep);
    out.samples.resize(n_read);
    if (accepted_minimum) accepted_minimum->assign(n_read, 0.0);
    const auto reads = static_cast<long>(n_read);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long k = 0; k < reads; ++k)
            out.samples[k] = run_read(c, betas, stream_seed(seed, static_cast<std::uint64_t>(k)), nullptr);
    } else {
        for (long k = 0; k < reads; ++k)
            out.samples[k] = run_read(c, betas, stream_seed(seed, static_cast<std::uint64_t>(k)),
                                      accepted_minimum ? &(*accepted_minimum)[k] : nullptr);
    }
    sort_samples(out.samples);
    return out;
}

struct ScanResult {
    BitVector bits;
    double energy;
};

bool better(double e, const BitVector& x, double best_e, const BitVector& best) {
    const double tol = 1e-9 * std::max(1.0, std::abs(best_e));
    if (e < best_e - tol) return true;
    return e <= best_e + tol && lex_less(x, best);
}

// Enumerates the low `free_bits` bits with the others fixed as in `x`.
ScanResult gray_scan(const Csr& c, BitVector x, std::size_t free_bits) {
    std::vector<double> h;
    init_fields(c, x, h);
    double e = exact_energy(c, x);
    ScanResult best{x, e};
    const std::uint64_t count = std::uint64_t{1} << free_bits;
    for (std::uint64_t k = 1; k < count; ++k) {
        const auto i = static_cast<std::size_t>(std::countr_zero(k));
        e += x[i] ? -h[i] : h[i];
        flip(c, x, h, i);
        if (better(e, x, best.energy, best.bits)) best = {x, e};
    }
    best.energy = exact_energy(c, best.bits);
    return best;
}

void guard(const QuboProblem& q) {
    if (q.n > kBruteForceLimit)
        throw SizeGuardError("brute force limited to " + std::to_string(kBruteForceLimit) + " bits, got " +
                             std::to_string(q.n));
}

}  // namespace

void validate(const AnnealSchedule& s) {
    if (s.n_read_0 == 0 || s.n_sweep_0 == 0) throw DimensionError("schedule counts must be at least 1");
    if (!(s.growth_rate >= 1.0)) throw DimensionError("growth rate must be at least 1");
    if (s.beta_hot > 0.0 && s.beta_cold > 0.0 && !(s.beta_hot < s.beta_cold))
        throw DimensionError("beta_hot must be below beta_cold");
}

std::pair<std::size_t, std::size_t> schedule_at(const AnnealSchedule& s, std::size_t t) {
    const long double g = std::pow(static_cast<long double>(s.growth_rate), static_cast<long double>(t));
    // The relative nudge keeps exact products such as 5000·1.02 from flooring one below.
    auto scaled = [&](std::size_t base) {
        long double v = static_cast<long double>(base) * g;
        return static_cast<std::size_t>(std::floor(v * (1.0L + 1e-15L)));
    };
    return {scaled(s.n_read_0), scaled(s.n_sweep_0)};
}

bool lex_less(const BitVector& a, const BitVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

BetaRange probe_beta_range(const QuboProblem& qubo, std::uint64_t seed) {
    const Csr c = build_csr(qubo);
    std::mt19937_64 rng(stream_seed(seed, ~std::uint64_t{0}));
    double sum = 0.0, min_nonzero = INFINITY;
    std::size_t count = 0;
    BitVector x(c.n);
    std::vector<double> h;
    for (int probe = 0; probe < 16; ++probe) {
        for (auto& v : x) v = static_cast<std::uint8_t>(rng() >> 63);
        init_fields(c, x, h);
        for (double v : h) {
            const double a = std::abs(v);
            sum += a;
            ++count;
            if (a > 0.0) min_nonzero = std::min(min_nonzero, a);
        }
    }
    BetaRange r;
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    if (!(mean > 0.0) || !std::isfinite(min_nonzero)) return {1.0, 100.0};
    r.hot = 0.1 / mean;
    r.cold = 10.0 / min_nonzero;
    return r;
}

SampleSet sample_qubo(const QuboProblem& qubo, std::size_t n_read, std::size_t n_sweep, std::uint64_t seed,
                      BetaRange range) {
    return sample_impl(qubo, n_read, n_sweep, seed, range, true, nullptr);
}

SampleSet sample_qubo_serial(const QuboProblem& qubo, std::size_t n_read, std::size_t n_sweep, std::uint64_t seed,
                             BetaRange range, std::vector<double>* accepted_minimum) {
    return sample_impl(qubo, n_read, n_sweep, seed, range, false, accepted_minimum);
}

Sample brute_force_qubo_serial(const QuboProblem& qubo) {
    guard(qubo);
    const Csr c = build_csr(qubo);
    auto r = gray_scan(c, BitVector(qubo.n, 0), qubo.n);
    return {r.bits, r.energy};
}

Sample brute_force_qubo(const QuboProblem& qubo) {
    guard(qubo);
    const std::size_t high = qubo.n > 14 ? 8 : 0;
    if (high == 0) return brute_force_qubo_serial(qubo);
    const Csr c = build_csr(qubo);
    const std::size_t low = qubo.n - high;
    const long chunks = 1L << high;
    std::vector<ScanResult> part(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < chunks; ++k) {
        BitVector x(qubo.n, 0);
        for (std::size_t b = 0; b < high; ++b) x[low + b] = static_cast<std::uint8_t>((k >> b) & 1);
        part[static_cast<std::size_t>(k)] = gray_scan(c, std::move(x), low);
    }
    ScanResult best = part[0];
    for (std::size_t k = 1; k < part.size(); ++k)
        if (better(part[k].energy, part[k].bits, best.energy, best.bits)) best = part[k];
    return {best.bits, best.energy};
}

namespace {

class StructuredMinimizer {
public:
    explicit StructuredMinimizer(const QuboProblem& q) : q_(q) {
        for (std::size_t k = 0; k < q.rows.size(); ++k)
            (q.rows[k].kind == CutKind::optimality ? opt_ : feas_).push_back(k);
        cap_.resize(q.rows.size());
        for (std::size_t k = 0; k < q.rows.size(); ++k)
            cap_[k] = std::ldexp(1.0, static_cast<int>(q.rows[k].slack_bits)) - 1.0;
        m_max_ = q.n_q_bits ? (std::uint64_t{1} << q.n_q_bits) - 1 : 0;
    }

    Sample run() {
        const std::size_t ny = q_.n_decision;
        const std::size_t K = q_.rows.size();
        BitVector y(ny, 0);
        std::vector<double> u(K);
        for (std::size_t k = 0; k < K; ++k) u[k] = -q_.rows[k].rhs;
        // Gradient of the binary objective for incremental updates.
        std::vector<double> fh(ny);
        for (std::size_t i = 0; i < ny; ++i) fh[i] = q_.f_linear[i] + q_.f_quadratic(i, i);
        double f = 0.0;

        bool have = false;
        double best_e = 0.0;
        BitVector best_bits;
        const std::uint64_t count = std::uint64_t{1} << ny;
        for (std::uint64_t step = 0; step < count; ++step) {
            if (step) {
                const auto i = static_cast<std::size_t>(std::countr_zero(step));
                const double s = y[i] ? -1.0 : 1.0;
                f += s * fh[i];
                y[i] ^= 1;
                for (std::size_t j = 0; j < ny; ++j)
                    if (j != i) fh[j] += s * (q_.f_quadratic(i, j) + q_.f_quadratic(j, i));
                for (std::size_t k = 0; k < K; ++k) u[k] += s * q_.rows[k].a[i];
            }
            double e = f;
            for (std::size_t k : feas_) {
                const double r = residual(k, u[k], 0.0);
                e += q_.w_t * r * r;
            }
            std::uint64_t m = 0;
            e += best_q(u, m);
            const double tol = 1e-9 * std::max(1.0, std::abs(best_e));
            if (!have || e < best_e - tol) {
                have = true;
                best_e = e;
                best_bits = assemble(y, u, m);
            } else if (e <= best_e + tol) {
                auto bits = assemble(y, u, m);
                if (lex_less(bits, best_bits)) {
                    best_e = e;
                    best_bits = std::move(bits);
                }
            }
        }
        return {best_bits, q_.energy(best_bits)};
    }

private:
    double slack_units(std::size_t k, double u, double qv) const {
        const double s = std::floor((q_.rows[k].q_coefficient * qv - u) / q_.w_x + 0.5);
        return std::clamp(s, 0.0, cap_[k]);
    }

    double residual(std::size_t k, double u, double qv) const {
        return u + q_.w_x * slack_units(k, u, qv) - q_.rows[k].q_coefficient * qv;
    }

    double qvalue(std::uint64_t m) const { return q_.w_q * static_cast<double>(m); }

    // Exact contribution of the q register and optimality rows at m.
    double h(const std::vector<double>& u, std::uint64_t m) const {
        const double qv = qvalue(m);
        double e = q_.gamma * qv;
        for (std::size_t k : opt_) {
            const double r = residual(k, u[k], qv);
            e += q_.w_t * r * r;
        }
        return e;
    }

    // Convex lower bound on h with continuous slacks.
    double envelope(const std::vector<double>& u, std::uint64_t m) const {
        const double qv = qvalue(m);
        double e = q_.gamma * qv;
        for (std::size_t k : opt_) {
            const double p = q_.rows[k].q_coefficient * qv - u[k];
            const double top = q_.w_x * cap_[k];
            const double dist = p < 0.0 ? -p : (p > top ? p - top : 0.0);
            e += q_.w_t * dist * dist;
        }
        return e;
    }

    double best_q(const std::vector<double>& u, std::uint64_t& m_out) const {
        m_out = 0;
        if (q_.n_q_bits == 0) return 0.0;
        if (opt_.empty()) return h(u, 0);
        // First minimizer of the convex envelope: smallest m whose forward difference is ≥ 0.
        std::uint64_t lo = 0, hi = m_max_;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (envelope(u, mid + 1) - envelope(u, mid) >= 0.0) hi = mid;
            else lo = mid + 1;
        }
        const std::uint64_t m_star = lo;
        double upper = h(u, m_star);
        const double bound = upper + 1e-12 * std::max(1.0, std::abs(upper));
        // Any m whose envelope exceeds the bound cannot beat m_star.
        std::uint64_t a = 0, b = m_star;
        while (a < b) {
            const std::uint64_t mid = a + (b - a) / 2;
            if (envelope(u, mid) <= bound) b = mid;
            else a = mid + 1;
        }
        const std::uint64_t first = a;
        a = m_star;
        b = m_max_;
        while (a < b) {
            const std::uint64_t mid = a + (b - a + 1) / 2;
            if (envelope(u, mid) <= bound) a = mid;
            else b = mid - 1;
        }
        const std::uint64_t last = a;
        if (last - first > (std::uint64_t{1} << 22))
            throw SizeGuardError("q register search window too wide for exact minimization");
        double best = INFINITY;
        for (std::uint64_t m = first; m <= last; ++m) {
            const double v = h(u, m);
            if (v < best) {
                best = v;
                m_out = m;
            }
        }
        return best;
    }

    BitVector assemble(const BitVector& y, const std::vector<double>& u, std::uint64_t m) const {
        BitVector bits(q_.n, 0);
        std::copy(y.begin(), y.end(), bits.begin());
        const double qv = qvalue(m);
        for (std::size_t k = 0; k < q_.rows.size(); ++k) {
            const auto& row = q_.rows[k];
            const auto s = static_cast<std::uint64_t>(slack_units(k, u[k], row.kind == CutKind::optimality ? qv : 0.0));
            for (std::size_t j = 0; j < row.slack_bits; ++j) bits[row.slack_offset + j] = (s >> j) & 1u;
        }
        for (std::size_t j = 0; j < q_.n_q_bits; ++j) bits[q_.q_offset + j] = (m >> j) & 1u;
        return bits;
    }

    const QuboProblem& q_;
    std::vector<std::size_t> feas_, opt_;
    std::vector<double> cap_;
    std::uint64_t m_max_ = 0;
};

}  // namespace

Sample minimize_structured(const QuboProblem& qubo) {
    if (!qubo.structured) throw DimensionError("structured minimization needs an encoded master QUBO");
    if (qubo.n_decision > kStructuredDecisionLimit)
        throw SizeGuardError("structured minimizer limited to " + std::to_string(kStructuredDecisionLimit) +
                             " decision bits");
    for (const auto& row : qubo.rows)
        if (row.slack_bits > 62) throw SizeGuardError("slack register too wide for exact minimization");
    return StructuredMinimizer(qubo).run();
}

Sample minimize_qubo_exact(const QuboProblem& qubo) {
    if (qubo.n <= kBruteForceLimit) return brute_force_qubo(qubo);
    return minimize_structured(qubo);
}

void write_samples_csv(std::ostream& os, const SampleSet& set) {
    os << "bits,energy\n";
    char buf[32];
    for (const auto& s : set.samples) {
        for (auto b : s.bits) os << static_cast<char>('0' + b);
        std::snprintf(buf, sizeof buf, "%.17g", s.energy);
        os << ',' << buf << '\n';
    }
}

}  // namespace hbd
