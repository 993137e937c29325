#include "hbd/uc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <queue>

#include "hbd/dual.hpp"
#include "hbd/errors.hpp"

namespace hbd {

std::size_t Network::bus_index(int bus) const {
    auto it = std::find(buses.begin(), buses.end(), bus);
    if (it == buses.end()) throw ModelingError("unknown bus " + std::to_string(bus));
    return static_cast<std::size_t>(it - buses.begin());
}

double Network::load_at(int bus, int hour) const {
    double s = 0.0;
    for (const auto& l : loads)
        if (l.bus == bus) s += l.mw.at(static_cast<std::size_t>(hour - 1));
    return s;
}

Network builtin_6bus() {
    Network n;
    n.buses = {1, 2, 3, 4, 5, 6};
    n.slack_bus = 1;
    n.generators = {
        {"G1", 1, 16.83, 200.0, 100.0, 50.0, 2, 2},
        {"G2", 2, 40.62, 100.0, 20.0, 40.0, 2, 2},
        {"G3", 6, 21.93, 20.0, 10.0, 15.0, 2, 2},
    };
    n.lines = {
        {1, 2, 0.17, 200.0}, {1, 4, 0.258, 100.0}, {2, 4, 0.197, 100.0}, {5, 6, 0.14, 100.0},
        {3, 6, 0.018, 100.0}, {2, 3, 0.037, 100.0}, {4, 5, 0.037, 100.0},
    };
    n.loads = {
        {3, {39.45, 42.36, 42.24}},
        {4, {78.91, 84.73, 84.48}},
        {5, {78.91, 84.73, 84.48}},
    };
    return n;
}

void validate(const Network& net, int horizon) {
    if (net.buses.empty()) throw ModelingError("network has no buses");
    net.bus_index(net.slack_bus);
    for (const auto& g : net.generators) {
        net.bus_index(g.bus);
        if (g.p_min > g.p_max) throw ModelingError(g.name + ": minimum output exceeds maximum");
        if (g.t_on < 2 || g.t_off < 2) throw ModelingError(g.name + ": minimum up/down times must be at least 2");
        if (g.cost < 0.0) throw ModelingError(g.name + ": negative cost");
    }
    for (const auto& l : net.lines) {
        net.bus_index(l.from);
        net.bus_index(l.to);
        if (!(l.reactance > 0.0)) throw ModelingError("line reactance must be positive");
        if (!(l.limit > 0.0)) throw ModelingError("line limit must be positive");
    }
    for (const auto& l : net.loads) {
        net.bus_index(l.bus);
        if (static_cast<int>(l.mw.size()) < horizon) throw ModelingError("load profile shorter than the horizon");
    }
    std::vector<std::vector<std::size_t>> adj(net.buses.size());
    for (const auto& l : net.lines) {
        adj[net.bus_index(l.from)].push_back(net.bus_index(l.to));
        adj[net.bus_index(l.to)].push_back(net.bus_index(l.from));
    }
    std::vector<bool> seen(net.buses.size(), false);
    std::queue<std::size_t> q;
    q.push(net.bus_index(net.slack_bus));
    seen[q.front()] = true;
    while (!q.empty()) {
        auto b = q.front();
        q.pop();
        for (auto c : adj[b])
            if (!seen[c]) {
                seen[c] = true;
                q.push(c);
            }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw ModelingError("network is disconnected");
}

Network network_from_json(const nlohmann::json& j) {
    Network n;
    n.buses = j.at("buses").get<std::vector<int>>();
    n.slack_bus = j.value("slack_bus", n.buses.empty() ? 0 : n.buses.front());
    for (const auto& g : j.at("generators")) {
        Generator x;
        x.name = g.value("name", "G" + std::to_string(n.generators.size() + 1));
        x.bus = g.at("bus").get<int>();
        x.cost = g.at("cost").get<double>();
        x.p_max = g.at("p_max").get<double>();
        x.p_min = g.at("p_min").get<double>();
        x.ramp = g.at("ramp").get<double>();
        x.t_on = g.value("t_on", 2);
        x.t_off = g.value("t_off", 2);
        n.generators.push_back(x);
    }
    for (const auto& l : j.value("lines", nlohmann::json::array()))
        n.lines.push_back({l.at("from").get<int>(), l.at("to").get<int>(), l.at("reactance").get<double>(),
                           l.at("limit").get<double>()});
    for (const auto& l : j.value("loads", nlohmann::json::array()))
        n.loads.push_back({l.at("bus").get<int>(), l.at("mw").get<std::vector<double>>()});
    return n;
}

nlohmann::json network_to_json(const Network& n) {
    nlohmann::json j;
    j["buses"] = n.buses;
    j["slack_bus"] = n.slack_bus;
    j["generators"] = nlohmann::json::array();
    for (const auto& g : n.generators)
        j["generators"].push_back({{"name", g.name}, {"bus", g.bus}, {"cost", g.cost}, {"p_max", g.p_max},
                                   {"p_min", g.p_min}, {"ramp", g.ramp}, {"t_on", g.t_on}, {"t_off", g.t_off}});
    j["lines"] = nlohmann::json::array();
    for (const auto& l : n.lines)
        j["lines"].push_back({{"from", l.from}, {"to", l.to}, {"reactance", l.reactance}, {"limit", l.limit}});
    j["loads"] = nlohmann::json::array();
    for (const auto& l : n.loads) j["loads"].push_back({{"bus", l.bus}, {"mw", l.mw}});
    return j;
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return network_from_json(nlohmann::json::parse(in));
}

std::size_t UcVariables::binary(BinaryKind k, std::size_t gen, int hour) const {
    const auto T_ = static_cast<std::size_t>(T);
    return static_cast<std::size_t>(k) * G * T_ + gen * T_ + static_cast<std::size_t>(hour - 1);
}
std::size_t UcVariables::power(std::size_t gen, int hour) const {
    return gen * static_cast<std::size_t>(T) + static_cast<std::size_t>(hour - 1);
}
std::size_t UcVariables::flow(std::size_t line, int hour) const {
    return (G + line) * static_cast<std::size_t>(T) + static_cast<std::size_t>(hour - 1);
}
std::size_t UcVariables::angle(std::size_t bus, int hour) const {
    return (G + L + bus) * static_cast<std::size_t>(T) + static_cast<std::size_t>(hour - 1);
}

namespace {

class RowBuilder {
public:
    RowBuilder(std::size_t ny, std::size_t nz) : y_(ny, 0.0), z_(nz, 0.0) {}
    RowBuilder& y(std::size_t i, double v) {
        y_[i] += v;
        return *this;
    }
    RowBuilder& z(std::size_t i, double v) {
        z_[i] += v;
        return *this;
    }
    void coupling(MixedIntegerProgram& m, double rhs) {
        m.A_y.append_row(y_);
        m.A_z.append_row(z_);
        m.b.push_back(rhs);
        reset();
    }
    void continuous(MixedIntegerProgram& m, double rhs) {
        m.C.append_row(z_);
        m.d.push_back(rhs);
        reset();
    }
    // lo ≤ row ≤ hi as one or two ≤ rows.
    void coupling_range(MixedIntegerProgram& m, double lo, double hi) {
        auto y = y_;
        auto z = z_;
        m.A_y.append_row(y);
        m.A_z.append_row(z);
        m.b.push_back(hi);
        for (auto& v : y) v = -v;
        for (auto& v : z) v = -v;
        m.A_y.append_row(y);
        m.A_z.append_row(z);
        m.b.push_back(-lo);
        reset();
    }
    void continuous_equal(MixedIntegerProgram& m, double rhs) {
        auto z = z_;
        m.C.append_row(z);
        m.d.push_back(rhs);
        for (auto& v : z) v = -v;
        m.C.append_row(z);
        m.d.push_back(-rhs);
        reset();
    }

private:
    void reset() {
        std::fill(y_.begin(), y_.end(), 0.0);
        std::fill(z_.begin(), z_.end(), 0.0);
    }
    std::vector<double> y_, z_;
};

}  // namespace

UcModel build_uc(const Network& net, int T, const UcOptions& opts) {
    if (T < 2) throw ModelingError("horizon must be at least 2 hours");
    validate(net, T);
    UcModel model;
    auto& v = model.vars;
    v.G = net.generators.size();
    v.L = net.lines.size();
    v.N = net.buses.size();
    v.T = T;
    for (const auto& l : net.lines) {
        v.flow_shift.push_back(l.limit);
        v.angle_offset += 2.0 * l.limit * l.reactance;
    }
    double pmax = 0.0;
    for (const auto& g : net.generators) pmax = std::max(pmax, g.p_max);
    const double M = opts.big_m > 0.0 ? opts.big_m : 2.0 * pmax;
    const double Mr = opts.ramp_m > 0.0 ? opts.ramp_m : M;
    model.big_m = M;
    model.ramp_m = Mr;

    auto& m = model.mip;
    m.coupling_sense = CouplingSense::leq;
    m.n_y = v.n_binary();
    m.n_z = v.n_continuous();
    m.f_quadratic = Matrix(m.n_y, m.n_y);
    m.f_linear.assign(m.n_y, 0.0);
    m.g.assign(m.n_z, 0.0);
    m.A_y = Matrix(0, m.n_y);
    m.A_z = Matrix(0, m.n_z);
    m.C = Matrix(0, m.n_z);
    for (std::size_t i = 0; i < v.G; ++i)
        for (int t = 1; t <= T; ++t) m.g[v.power(i, t)] = net.generators[i].cost;

    RowBuilder r(m.n_y, m.n_z);
    using K = BinaryKind;
    for (std::size_t i = 0; i < v.G; ++i) {
        const auto& g = net.generators[i];
        // Output limits, released by the big-M terms when the unit is off (y_G = 1).
        for (int t = 1; t <= T; ++t) {
            r.z(v.power(i, t), 1.0).y(v.binary(K::commitment, i, t), -M).coupling(m, g.p_max);
            r.z(v.power(i, t), -1.0).y(v.binary(K::commitment, i, t), -M).coupling(m, -g.p_min);
            r.z(v.power(i, t), 1.0).y(v.binary(K::commitment, i, t), g.p_max).coupling(m, g.p_max);
        }
        for (int t = 2; t <= T; ++t) {
            r.z(v.power(i, t), 1.0).z(v.power(i, t - 1), -1.0).y(v.binary(K::on, i, t - 1), -Mr).coupling(m, g.ramp);
            r.z(v.power(i, t - 1), 1.0).z(v.power(i, t), -1.0).y(v.binary(K::off, i, t - 1), -Mr).coupling(m, g.ramp);
            r.y(v.binary(K::on, i, t - 1), 1.0).y(v.binary(K::commitment, i, t), 1.0).coupling(m, 1.0);
            r.y(v.binary(K::commitment, i, t), -1.0).y(v.binary(K::off, i, t - 1), 1.0).coupling(m, 0.0);
            r.y(v.binary(K::commitment, i, t), 1.0)
                .y(v.binary(K::commitment, i, t - 1), -1.0)
                .y(v.binary(K::on, i, t), 1.0)
                .coupling_range(m, 0.0, 1.0);
            r.y(v.binary(K::commitment, i, t - 1), 1.0)
                .y(v.binary(K::commitment, i, t), -1.0)
                .y(v.binary(K::off, i, t), 1.0)
                .coupling_range(m, 0.0, 1.0);
            for (auto [kind, window] : {std::pair{K::on, g.t_on}, std::pair{K::off, g.t_off}}) {
                const int th = window - std::max(0, window + t - T);
                if (th <= 0) continue;
                // Σ_{k=τ}^{τ+T̂} y(k) − T̂·y(τ) + T̂·y(τ−1) ≥ 0
                for (int k = t; k <= std::min(T, t + th); ++k) r.y(v.binary(kind, i, k), -1.0);
                r.y(v.binary(kind, i, t), th).y(v.binary(kind, i, t - 1), -th).coupling(m, 0.0);
            }
        }
    }

    const std::size_t slack = net.bus_index(net.slack_bus);
    for (int t = 1; t <= T; ++t) {
        for (std::size_t l = 0; l < v.L; ++l) r.z(v.flow(l, t), 1.0).continuous(m, 2.0 * net.lines[l].limit);
        // Shifted flow p_L = (Θ_from − Θ_to)/X + P̄_L.
        for (std::size_t l = 0; l < v.L; ++l) {
            const auto& line = net.lines[l];
            r.z(v.flow(l, t), 1.0)
                .z(v.angle(net.bus_index(line.from), t), -1.0 / line.reactance)
                .z(v.angle(net.bus_index(line.to), t), 1.0 / line.reactance)
                .continuous_equal(m, line.limit);
        }
        // Injection at each bus equals the net unshifted outflow.
        for (std::size_t b = 0; b < v.N; ++b) {
            const int bus = net.buses[b];
            double rhs = net.load_at(bus, t);
            for (std::size_t i = 0; i < v.G; ++i)
                if (net.generators[i].bus == bus) r.z(v.power(i, t), 1.0);
            for (std::size_t l = 0; l < v.L; ++l) {
                const auto& line = net.lines[l];
                if (line.from == bus) {
                    r.z(v.flow(l, t), -1.0);
                    rhs -= line.limit;
                }
                if (line.to == bus) {
                    r.z(v.flow(l, t), 1.0);
                    rhs += line.limit;
                }
            }
            r.continuous_equal(m, rhs);
        }
        r.z(v.angle(slack, t), 1.0).continuous_equal(m, v.angle_offset);
    }
    require_valid(m);
    return model;
}

SizeAccounting model_sizes(const UcModel& model) {
    return {model.mip.n_y, model.mip.n_z, model.mip.m_b(), model.mip.m_d()};
}

SizeAccounting reported_sizes(std::size_t G, std::size_t L, std::size_t N, int T) {
    const auto t = static_cast<std::size_t>(T);
    return {G * (16 * t - 3), 2 * (G + L + N + 1) * t, 2 * G * (3 * t - 1), 2 * (G + L + N + 2) * t};
}

Dispatch interpret_solution(const UcModel& model, const Network& net, const Assignment& a, double tol) {
    const auto& v = model.vars;
    if (a.y.size() != model.mip.n_y || a.z.size() != model.mip.n_z)
        throw DimensionError("assignment does not match the UC model");
    Dispatch d;
    const double slack_angle = v.angle_offset;
    for (int t = 1; t <= v.T; ++t) {
        HourDispatch h;
        for (std::size_t i = 0; i < v.G; ++i) {
            const bool off = a.y[v.binary(BinaryKind::commitment, i, t)] != 0;
            const double p = a.z[v.power(i, t)];
            if (off && p > tol)
                throw IntegrityError(net.generators[i].name + " is off in hour " + std::to_string(t) +
                                     " but produces " + std::to_string(p) + " MW");
            h.on.push_back(!off);
            h.mw.push_back(p);
            d.cost += net.generators[i].cost * p;
        }
        for (std::size_t l = 0; l < v.L; ++l) h.flow.push_back(a.z[v.flow(l, t)] - v.flow_shift[l]);
        for (std::size_t b = 0; b < v.N; ++b) h.angle.push_back(a.z[v.angle(b, t)] - slack_angle);
        d.hours.push_back(std::move(h));
    }
    return d;
}

std::optional<Assignment> complete_commitment(const UcModel& model, const std::vector<std::vector<bool>>& on) {
    const auto& v = model.vars;
    const auto& m = model.mip;
    if (on.size() != v.G) throw DimensionError("commitment matrix must have one row per generator");
    // Per generator, collect the on/off indicator patterns allowed by the pure-binary rows.
    // Among those, a pattern whose activity in every mixed row is no smaller than another's
    // can only shrink the dispatch region, so it is dropped.
    std::vector<bool> pure(m.m_b(), true);
    for (std::size_t k = 0; k < m.m_b(); ++k)
        for (std::size_t c = 0; c < m.n_z && pure[k]; ++c)
            if (m.A_z(k, c) != 0.0) pure[k] = false;
    std::vector<std::vector<BitVector>> options(v.G);
    const std::size_t T = static_cast<std::size_t>(v.T);
    for (std::size_t i = 0; i < v.G; ++i) {
        if (on[i].size() != T) throw DimensionError("commitment row length must equal the horizon");
        std::vector<std::size_t> cols;
        for (int t = 1; t <= v.T; ++t)
            for (auto kind : {BinaryKind::commitment, BinaryKind::on, BinaryKind::off}) cols.push_back(v.binary(kind, i, t));
        std::vector<std::vector<double>> mixed;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (2 * T)); ++mask) {
            BitVector y(m.n_y, 0);
            for (int t = 1; t <= v.T; ++t) {
                y[v.binary(BinaryKind::commitment, i, t)] = on[i][static_cast<std::size_t>(t - 1)] ? 0 : 1;
                y[v.binary(BinaryKind::on, i, t)] = (mask >> (t - 1)) & 1u;
                y[v.binary(BinaryKind::off, i, t)] = (mask >> (T + static_cast<std::size_t>(t) - 1)) & 1u;
            }
            bool ok = true;
            std::vector<double> act_mixed;
            for (std::size_t k = 0; k < m.m_b() && ok; ++k) {
                bool touches = false;
                double act = 0.0;
                for (auto col : cols) {
                    if (m.A_y(k, col) != 0.0) touches = true;
                    act += m.A_y(k, col) * y[col];
                }
                if (!pure[k]) act_mixed.push_back(act);
                else if (touches && act > m.b[k] + 1e-9) ok = false;
            }
            if (!ok) continue;
            bool dominated = false;
            for (std::size_t o = 0; o < options[i].size() && !dominated; ++o) {
                bool le = true;
                for (std::size_t r = 0; r < act_mixed.size() && le; ++r) le = mixed[o][r] <= act_mixed[r];
                dominated = le;
            }
            if (dominated) continue;
            for (std::size_t o = options[i].size(); o-- > 0;) {
                bool ge = true;
                for (std::size_t r = 0; r < act_mixed.size() && ge; ++r) ge = mixed[o][r] >= act_mixed[r];
                if (ge) {
                    options[i].erase(options[i].begin() + static_cast<std::ptrdiff_t>(o));
                    mixed.erase(mixed.begin() + static_cast<std::ptrdiff_t>(o));
                }
            }
            options[i].push_back(std::move(y));
            mixed.push_back(std::move(act_mixed));
        }
        if (options[i].empty()) return std::nullopt;
    }
    std::optional<Assignment> best;
    double best_cost = 0.0;
    std::vector<std::size_t> pick(v.G, 0);
    for (;;) {
        BitVector y(m.n_y, 0);
        for (std::size_t i = 0; i < v.G; ++i)
            for (std::size_t c = 0; c < m.n_y; ++c)
                if (options[i][pick[i]][c]) y[c] = 1;
        if (auto z = solve_continuous(m, y)) {
            const double cost = dot(m.g, *z);
            if (!best || cost < best_cost - 1e-9) {
                best = Assignment{y, *z};
                best_cost = cost;
            }
        }
        std::size_t i = 0;
        while (i < v.G && ++pick[i] == options[i].size()) pick[i++] = 0;
        if (i == v.G) break;
    }
    return best;
}

void write_dispatch_csv(std::ostream& os, const Network& net, const Dispatch& d) {
    os << "hour,generator,state,MW\n";
    char buf[64];
    for (std::size_t t = 0; t < d.hours.size(); ++t)
        for (std::size_t i = 0; i < d.hours[t].on.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.6f", d.hours[t].mw[i]);
            os << t + 1 << ',' << net.generators[i].name << ',' << (d.hours[t].on[i] ? "on" : "off") << ',' << buf
               << '\n';
        }
}

}  // namespace hbd
