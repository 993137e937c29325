#include "hbd/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "hbd/errors.hpp"

namespace hbd {

double Cut::activity(std::span<const std::uint8_t> y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (y[i]) s += a[i];
    return s;
}

Cut make_cut(const MixedIntegerProgram& mip, const DualSolution& dual, CutKind kind) {
    Cut c;
    c.kind = kind;
    const bool use_ray = kind == CutKind::feasibility && dual.has_ray();
    c.alpha = use_ray ? dual.ray_alpha : dual.alpha;
    c.beta = use_ray ? dual.ray_beta : dual.beta;
    c.a = mip.A_y.transpose_multiply(c.alpha);
    c.rhs = dot(c.alpha, mip.b) + dot(c.beta, mip.d);
    return c;
}

Cut normalize_cut(const Cut& cut, double dual_objective, double tol) {
    if (dual_objective <= tol) return cut;
    const double s = std::sqrt(dual_objective);
    Cut c = cut;
    for (auto& v : c.a) v /= s;
    c.rhs /= s;
    c.norm_factor = cut.norm_factor * s;
    return c;
}

void validate(const PenaltyConfig& cfg) {
    if (!(cfg.w_t > 0.0) || !(cfg.w_x > 0.0) || !(cfg.w_q > 0.0))
        throw DimensionError("penalty weights and granularities must be positive");
    if (cfg.n_q_bits == 0 || cfg.n_q_bits > 62) throw DimensionError("n_q_bits must be in 1..62");
}

std::size_t slack_bits(std::span<const double> a, double rhs, double w_x, std::size_t pinned) {
    if (!(w_x > 0.0)) throw DimensionError("w_x must be positive");
    if (pinned) return pinned;
    double min_activity = 0.0;
    for (double v : a) min_activity += std::min(0.0, v);
    const double margin = std::max(0.0, rhs - min_activity);
    std::size_t n = 0;
    while (w_x * (std::ldexp(1.0, static_cast<int>(n)) - 1.0) < margin * (1.0 - 1e-12)) {
        if (++n > 63) throw CapacityError("slack register would need more than 63 bits");
    }
    return n;
}

std::pair<double, double> objective_range(const Matrix& f_quadratic, std::span<const double> f_linear) {
    const std::size_t n = f_linear.size();
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double l = f_linear[i] + (f_quadratic.empty() ? 0.0 : f_quadratic(i, i));
        lo += std::min(0.0, l);
        hi += std::max(0.0, l);
        if (f_quadratic.empty()) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            double q = f_quadratic(i, j) + f_quadratic(j, i);
            lo += std::min(0.0, q);
            hi += std::max(0.0, q);
        }
    }
    return {lo, hi};
}

double QuboProblem::energy(std::span<const std::uint8_t> bits) const {
    double e = constant_offset;
    for (const auto& t : terms)
        if (bits[t.i] && bits[t.j]) e += t.value;
    return e;
}

namespace {

class Accumulator {
public:
    explicit Accumulator(std::size_t n) : n_(n) {}
    void add(std::size_t i, std::size_t j, double v) {
        if (v == 0.0) return;
        if (i > j) std::swap(i, j);
        map_[static_cast<std::uint64_t>(i) * n_ + j] += v;
    }
    std::vector<QuboTerm> terms() const {
        std::vector<QuboTerm> out;
        out.reserve(map_.size());
        for (const auto& [key, v] : map_)
            if (v != 0.0) out.push_back({static_cast<std::size_t>(key / n_), static_cast<std::size_t>(key % n_), v});
        std::sort(out.begin(), out.end(), [](const QuboTerm& a, const QuboTerm& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        return out;
    }

private:
    std::size_t n_;
    std::unordered_map<std::uint64_t, double> map_;
};

}  // namespace

QuboProblem make_qubo(std::size_t n, std::vector<QuboTerm> terms, double constant_offset) {
    Accumulator acc(std::max<std::size_t>(n, 1));
    for (const auto& t : terms) {
        if (t.i >= n || t.j >= n) throw DimensionError("QUBO term index out of range");
        acc.add(t.i, t.j, t.value);
    }
    QuboProblem q;
    q.n = n;
    q.terms = acc.terms();
    q.constant_offset = constant_offset;
    q.roles.resize(n);
    for (std::size_t i = 0; i < n; ++i) q.roles[i] = {BitRole::decision, i, 0};
    q.n_decision = n;
    q.q_offset = n;
    return q;
}

QuboProblem encode_master(const Matrix& f_quadratic, std::span<const double> f_linear, std::span<const Cut> cuts,
                          int gamma, const PenaltyConfig& cfg) {
    validate(cfg);
    const std::size_t ny = f_linear.size();
    if (!f_quadratic.empty() && (f_quadratic.rows() != ny || f_quadratic.cols() != ny))
        throw DimensionError("f_quadratic does not match f_linear");
    if (gamma != 0 && gamma != 1) throw DimensionError("gamma must be 0 or 1");

    QuboProblem q;
    q.structured = true;
    q.n_decision = ny;
    q.gamma = gamma;
    q.w_x = cfg.w_x;
    q.w_q = cfg.w_q;
    q.w_t = cfg.w_t;
    q.f_quadratic = f_quadratic.empty() ? Matrix(ny, ny) : f_quadratic;
    q.f_linear.assign(f_linear.begin(), f_linear.end());
    if (cfg.auto_penalty) {
        auto [lo, hi] = objective_range(q.f_quadratic, f_linear);
        if (hi > lo) q.w_t = (hi - lo) / (cfg.w_x * cfg.w_x) * (1.0 + 1e-6);
    }

    for (std::size_t i = 0; i < ny; ++i) q.roles.push_back({BitRole::decision, i, 0});
    bool any_optimality = false;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const auto& c = cuts[k];
        if (c.a.size() != ny) throw DimensionError("cut length does not match decision count");
        PenaltyRow row;
        row.kind = c.kind;
        row.a = c.a;
        row.rhs = c.rhs;
        row.q_coefficient = c.q_coefficient();
        row.slack_offset = q.roles.size();
        row.slack_bits = slack_bits(c.a, c.rhs, cfg.w_x, cfg.slack_bits_default);
        for (std::size_t j = 0; j < row.slack_bits; ++j) q.roles.push_back({BitRole::slack, k, j});
        any_optimality |= c.kind == CutKind::optimality;
        q.rows.push_back(std::move(row));
    }
    q.q_offset = q.roles.size();
    if (gamma == 1 || any_optimality) {
        q.n_q_bits = cfg.n_q_bits;
        for (std::size_t j = 0; j < q.n_q_bits; ++j) q.roles.push_back({BitRole::q_bit, 0, j});
    }
    q.n = q.roles.size();

    Accumulator acc(std::max<std::size_t>(q.n, 1));
    for (std::size_t i = 0; i < ny; ++i) {
        acc.add(i, i, f_linear[i] + q.f_quadratic(i, i));
        for (std::size_t j = i + 1; j < ny; ++j) acc.add(i, j, q.f_quadratic(i, j) + q.f_quadratic(j, i));
    }
    for (std::size_t j = 0; j < q.n_q_bits; ++j)
        acc.add(q.q_offset + j, q.q_offset + j, gamma * cfg.w_q * std::ldexp(1.0, static_cast<int>(j)));

    std::vector<std::pair<std::size_t, double>> form;
    double offset = 0.0;
    for (const auto& row : q.rows) {
        form.clear();
        for (std::size_t i = 0; i < ny; ++i)
            if (row.a[i] != 0.0) form.emplace_back(i, row.a[i]);
        for (std::size_t j = 0; j < row.slack_bits; ++j)
            form.emplace_back(row.slack_offset + j, cfg.w_x * std::ldexp(1.0, static_cast<int>(j)));
        if (row.kind == CutKind::optimality)
            for (std::size_t j = 0; j < q.n_q_bits; ++j)
                form.emplace_back(q.q_offset + j, -row.q_coefficient * cfg.w_q * std::ldexp(1.0, static_cast<int>(j)));
        const double c0 = -row.rhs;
        // (Σ e_u x_u + c0)² with x² = x.
        for (std::size_t u = 0; u < form.size(); ++u) {
            const auto [iu, eu] = form[u];
            acc.add(iu, iu, q.w_t * (eu * eu + 2.0 * c0 * eu));
            for (std::size_t v = u + 1; v < form.size(); ++v) acc.add(iu, form[v].first, 2.0 * q.w_t * eu * form[v].second);
        }
        offset += q.w_t * c0 * c0;
    }
    q.terms = acc.terms();
    q.constant_offset = offset;
    for (const auto& t : q.terms) {
        if (!(std::abs(t.value) <= cfg.max_coefficient)) {
            std::ostringstream os;
            os << "QUBO coefficient " << t.value << " exceeds " << cfg.max_coefficient << "; increase w_x or reduce bits";
            throw ScalingError(os.str());
        }
    }
    return q;
}

Decoded decode(const QuboProblem& qubo, std::span<const std::uint8_t> bits) {
    if (bits.size() != qubo.n) throw DimensionError("bit vector length does not match QUBO size");
    Decoded d;
    d.y.assign(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(qubo.n_decision));
    for (std::size_t j = 0; j < qubo.n_q_bits; ++j)
        if (bits[qubo.q_offset + j]) d.q_value += qubo.w_q * std::ldexp(1.0, static_cast<int>(j));
    const double t = static_cast<double>(qubo.rows.size());
    for (const auto& row : qubo.rows) {
        double r = -row.rhs;
        for (std::size_t i = 0; i < qubo.n_decision; ++i)
            if (d.y[i]) r += row.a[i];
        for (std::size_t j = 0; j < row.slack_bits; ++j)
            if (bits[row.slack_offset + j]) r += qubo.w_x * std::ldexp(1.0, static_cast<int>(j));
        r -= row.q_coefficient * d.q_value;
        d.residuals.push_back(r);
        const double denom = std::abs(row.rhs) < 1e-12 ? 1.0 : std::abs(row.rhs);
        d.violation += std::abs(r) / (t * denom);
    }
    return d;
}

double penalized_energy(const QuboProblem& qubo, std::span<const std::uint8_t> bits) {
    auto d = decode(qubo, bits);
    double e = 0.0;
    for (std::size_t i = 0; i < qubo.n_decision; ++i) {
        if (!d.y[i]) continue;
        e += qubo.f_linear[i];
        for (std::size_t j = 0; j < qubo.n_decision; ++j)
            if (d.y[j]) e += qubo.f_quadratic(i, j);
    }
    e += qubo.gamma * d.q_value;
    for (double r : d.residuals) e += qubo.w_t * r * r;
    return e;
}

void write_qubo(std::ostream& os, const QuboProblem& qubo) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", qubo.constant_offset);
    os << qubo.n << ' ' << buf << '\n';
    for (const auto& t : qubo.terms) {
        std::snprintf(buf, sizeof buf, "%a", t.value);
        os << t.i << ' ' << t.j << ' ' << buf << '\n';
    }
}

QuboProblem read_qubo(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DimensionError("QUBO file is empty");
    std::istringstream head(line);
    std::size_t n = 0;
    std::string offset;
    if (!(head >> n >> offset)) throw DimensionError("malformed QUBO header");
    std::vector<QuboTerm> terms;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        QuboTerm t;
        std::string v;
        if (!(ls >> t.i >> t.j >> v)) throw DimensionError("malformed QUBO line: " + line);
        t.value = std::strtod(v.c_str(), nullptr);
        terms.push_back(t);
    }
    return make_qubo(n, std::move(terms), std::strtod(offset.c_str(), nullptr));
}

}  // namespace hbd
