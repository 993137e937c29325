#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "hbd/problem.hpp"

namespace hbd {

struct Generator {
    std::string name;
    int bus = 0;
    double cost = 0.0;
    double p_max = 0.0;
    double p_min = 0.0;
    double ramp = 0.0;
    int t_on = 2;
    int t_off = 2;
};

struct Line {
    int from = 0;
    int to = 0;
    double reactance = 0.0;
    double limit = 0.0;
};

struct Load {
    int bus = 0;
    std::vector<double> mw;  // per hour
};

struct Network {
    std::vector<int> buses;
    int slack_bus = 0;
    std::vector<Generator> generators;
    std::vector<Line> lines;
    std::vector<Load> loads;

    std::size_t bus_index(int bus) const;
    double load_at(int bus, int hour) const;  // hour is 1-based
};

Network builtin_6bus();
void validate(const Network& net, int horizon);

Network network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const Network& net);
Network load_network(const std::filesystem::path& path);

enum class BinaryKind { commitment, on, off };

// Column layout of the UC problem. Hours are 1-based in the accessors.
struct UcVariables {
    std::size_t G = 0, L = 0, N = 0;
    int T = 0;
    double angle_offset = 0.0;
    std::vector<double> flow_shift;

    std::size_t binary(BinaryKind k, std::size_t gen, int hour) const;
    std::size_t power(std::size_t gen, int hour) const;
    std::size_t flow(std::size_t line, int hour) const;
    std::size_t angle(std::size_t bus, int hour) const;
    std::size_t n_binary() const { return 3 * G * static_cast<std::size_t>(T); }
    std::size_t n_continuous() const { return (G + L + N) * static_cast<std::size_t>(T); }
};

struct UcOptions {
    double big_m = 0.0;   // 0 → 2·max P̄
    double ramp_m = 0.0;  // 0 → big_m
};

struct UcModel {
    MixedIntegerProgram mip;
    UcVariables vars;
    double big_m = 0.0;
    double ramp_m = 0.0;
};

UcModel build_uc(const Network& net, int horizon, const UcOptions& opts = {});

struct SizeAccounting {
    std::size_t n_y = 0, n_z = 0, m_b = 0, m_d = 0;
    bool operator==(const SizeAccounting&) const = default;
};

// Sizes of the matrices build_uc actually emits.
SizeAccounting model_sizes(const UcModel& model);
// Published accounting, reproduced as an affine fit in (G, L, N, T):
// n_y = G(16T−3), n_z = 2(G+L+N+1)T, m_b = 2G(3T−1), m_d = 2(G+L+N+2)T.
SizeAccounting reported_sizes(std::size_t G, std::size_t L, std::size_t N, int T);

struct HourDispatch {
    std::vector<bool> on;
    std::vector<double> mw;
    std::vector<double> flow;   // unshifted, MW
    std::vector<double> angle;  // unshifted, relative to the slack bus
};

struct Dispatch {
    std::vector<HourDispatch> hours;
    double cost = 0.0;
};

Dispatch interpret_solution(const UcModel& model, const Network& net, const Assignment& a, double tol = 1e-6);

// Cheapest feasible completion of a fixed commitment (on[gen][hour-1]); nothing if none exists.
std::optional<Assignment> complete_commitment(const UcModel& model, const std::vector<std::vector<bool>>& on);

void write_dispatch_csv(std::ostream& os, const Network& net, const Dispatch& d);

}  // namespace hbd
