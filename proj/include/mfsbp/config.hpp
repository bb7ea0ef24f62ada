#pragma once

// Experiment configuration: a flat "key = value" text format with '#'
// comments, plus the named grid presets.
//
//   domain          disk | punctured        (default disk)
//   outer_radius    R                       (3)
//   hole_radius     hole radius             (2/3)
//   grids           comma list of presets (grid1..grid5, explosion) or nx:ny:nb[:ni]
//   adjacency       radius | mst | delaunay1 | delaunay2
//   radius_factor   r = factor * Diam / (max(nx, ny) - 1)   (2.5)
//   norm            opt | unif
//   laplacian       pcg | cholesky          (spanning trees are solved exactly)
//   functions       comma list of u1, u2    (ops-convergence)
//   axis            x | y
//   equation        advection | euler
//   problem         advection_sine | density_wave | density_wave_c0 | explosion
//   flux            central | llf | hllc
//   bc              dirichlet_exact | inflow_dirichlet | slip_wall
//   bc_imposition   riemann | state
//   lambda          local | global
//   stepper         ssprk43 | forward_euler
//   dt_rule         algebraic | edge_length
//   cfl, t_final, dt
//   snapshot_times  comma list
//   error           first | all             (components entering the L2 error)
//   advection_a, advection_b, gamma
//   out             output directory

#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mfsbp/adjacency.hpp"
#include "mfsbp/error.hpp"
#include "mfsbp/geometry.hpp"
#include "mfsbp/laplacian.hpp"
#include "mfsbp/norm.hpp"
#include "mfsbp/physics.hpp"
#include "mfsbp/solver.hpp"

namespace mfsbp {

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    std::string out(s.substr(a, b - a));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is{std::string(s)};
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace detail

/// Raw key/value pairs; later assignments override earlier ones.
using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& is) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[' && t.back() == ']') continue;  // section headers are decorative
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        kv[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }
    return kv;
}

/// Named grid: background grid plus boundary counts.
struct GridPreset {
    std::string name;
    GridSpec grid;
};

/// grid1..grid5 double n_x, n_b and n_i from (75, 250, 60); "explosion" is
/// 300 x 300 with 1000 boundary nodes. "nx:ny:nb[:ni]" gives a custom grid.
inline GridPreset grid_preset(std::string_view name) {
    if (name.size() == 5 && name.substr(0, 4) == "grid" && name[4] >= '1' && name[4] <= '5') {
        const int k = name[4] - '1';
        const int s = 1 << k;
        return {std::string(name), GridSpec{75 * s, 75 * s, 250 * s, 60 * s}};
    }
    if (name == "explosion") return {"explosion", GridSpec{300, 300, 1000, 0}};
    std::vector<int> v;
    std::string item;
    std::istringstream is{std::string(name)};
    while (std::getline(is, item, ':')) {
        try {
            v.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ParameterError("unknown grid: " + std::string(name));
        }
    }
    if (v.size() < 3 || v.size() > 4) throw ParameterError("unknown grid: " + std::string(name));
    return {std::string(name), GridSpec{v[0], v[1], v[2], v.size() == 4 ? v[3] : 0}};
}

enum class EquationKind { advection, euler };
enum class ProblemKind { advection_sine, density_wave, density_wave_c0, explosion };

inline ProblemKind parse_problem(std::string_view s) {
    if (s == "advection_sine") return ProblemKind::advection_sine;
    if (s == "density_wave") return ProblemKind::density_wave;
    if (s == "density_wave_c0") return ProblemKind::density_wave_c0;
    if (s == "explosion") return ProblemKind::explosion;
    throw ParameterError("unknown problem: " + std::string(s));
}

inline std::string_view to_string(ProblemKind p) {
    switch (p) {
        case ProblemKind::advection_sine: return "advection_sine";
        case ProblemKind::density_wave: return "density_wave";
        case ProblemKind::density_wave_c0: return "density_wave_c0";
        case ProblemKind::explosion: return "explosion";
    }
    return "unknown";
}

struct ExperimentConfig {
    DomainSpec domain = DomainSpec::disk(3.0);
    std::vector<std::string> grids = {"grid1", "grid2", "grid3"};
    AdjacencyMethod adjacency = AdjacencyMethod::euclidean_radius;
    double radius_factor = 2.5;
    NormKind norm = NormKind::optimized;
    LaplacianMethod laplacian = LaplacianMethod::pcg;
    std::vector<std::string> functions = {"u1", "u2"};
    Axis axis = Axis::x;

    EquationKind equation = EquationKind::advection;
    ProblemKind problem = ProblemKind::advection_sine;
    FluxKind flux = FluxKind::llf;
    BcKind bc = BcKind::inflow_dirichlet;
    BcImposition imposition = BcImposition::riemann;
    LambdaMode lambda = LambdaMode::local;
    TimeIntegrationConfig time;
    ErrorComponents error = ErrorComponents::first;
    double advection_a = 1.0;
    double advection_b = 0.5;
    double gamma = 1.4;
    std::string out = "out";
};

/// Applies keys over defaults. Unknown keys are rejected.
inline ExperimentConfig make_config(const KeyValues& kv, ExperimentConfig c = {}) {
    auto num = [](const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ParameterError("config key '" + key + "': not a number: " + v);
        }
    };
    std::string domain_kind = c.domain.holes.empty() ? "disk" : "punctured";
    double outer = c.domain.outer_radius;
    double hole = c.domain.holes.empty() ? 2.0 / 3.0 : c.domain.holes.front().radius;

    for (const auto& [k, v] : kv) {
        if (k == "domain") domain_kind = v;
        else if (k == "outer_radius") outer = num(k, v);
        else if (k == "hole_radius") hole = num(k, v);
        else if (k == "grids") c.grids = detail::split_list(v);
        else if (k == "adjacency") c.adjacency = parse_adjacency(v);
        else if (k == "radius_factor") c.radius_factor = num(k, v);
        else if (k == "norm") c.norm = parse_norm(v);
        else if (k == "laplacian") c.laplacian = parse_laplacian_method(v);
        else if (k == "functions") c.functions = detail::split_list(v);
        else if (k == "axis") {
            if (v != "x" && v != "y") throw ParameterError("axis must be x or y");
            c.axis = v == "x" ? Axis::x : Axis::y;
        } else if (k == "equation") {
            if (v == "advection") c.equation = EquationKind::advection;
            else if (v == "euler") c.equation = EquationKind::euler;
            else throw ParameterError("unknown equation: " + v);
        } else if (k == "problem") c.problem = parse_problem(v);
        else if (k == "flux") c.flux = parse_flux(v);
        else if (k == "bc") c.bc = parse_bc(v);
        else if (k == "bc_imposition") c.imposition = parse_imposition(v);
        else if (k == "lambda") c.lambda = parse_lambda_mode(v);
        else if (k == "stepper") c.time.stepper = parse_stepper(v);
        else if (k == "dt_rule") c.time.dt_rule = parse_dt_rule(v);
        else if (k == "cfl") c.time.cfl = num(k, v);
        else if (k == "t_final") c.time.t_final = num(k, v);
        else if (k == "dt") c.time.fixed_dt = num(k, v);
        else if (k == "snapshot_times") {
            c.time.snapshot_times.clear();
            for (const auto& s : detail::split_list(v)) c.time.snapshot_times.push_back(num(k, s));
        } else if (k == "error") c.error = parse_error_components(v);
        else if (k == "advection_a") c.advection_a = num(k, v);
        else if (k == "advection_b") c.advection_b = num(k, v);
        else if (k == "gamma") c.gamma = num(k, v);
        else if (k == "out") c.out = v;
        else throw ParameterError("unknown config key: " + k);
    }

    if (domain_kind == "disk") c.domain = DomainSpec::disk(outer);
    else if (domain_kind == "punctured") c.domain = DomainSpec::three_hole_disk(outer, hole);
    else throw ParameterError("unknown domain: " + domain_kind);
    c.domain.validate();
    for (const auto& g : c.grids) (void)grid_preset(g);
    c.time.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig defaults = {}) {
    std::ifstream is(path);
    if (!is) throw ParameterError("cannot open config " + path);
    return make_config(parse_key_values(is), std::move(defaults));
}

}  // namespace mfsbp
