// mfsbp: build meshfree SBP operators, run derivative convergence studies and
// solve conservation laws on point clouds.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfsbp/mfsbp.hpp"

namespace fs = std::filesystem;
using namespace mfsbp;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::string grids;
    std::string flux;
    std::string norm;
    std::string adjacency;
    std::vector<std::string> sets;

    void add(CLI::App* app) {
        app->add_option("--config", config, "experiment config file");
        app->add_option("--out", out, "output directory");
        app->add_option("--grids", grids, "comma-separated grid presets (grid1..grid5, explosion, nx:ny:nb[:ni])");
        app->add_option("--flux", flux, "numerical flux")->check(CLI::IsMember({"llf", "hllc", "central"}));
        app->add_option("--norm", norm, "norm matrix")->check(CLI::IsMember({"opt", "unif"}));
        app->add_option("--adjacency", adjacency, "adjacency notion")
            ->check(CLI::IsMember({"radius", "mst", "delaunay1", "delaunay2"}));
        app->add_option("--set", sets, "extra config assignment key=value (repeatable)");
    }

    ExperimentConfig resolve(ExperimentConfig defaults = {}) const {
        KeyValues kv;
        if (!config.empty()) {
            std::ifstream is(config);
            if (!is) throw ParameterError("cannot open config " + config);
            kv = parse_key_values(is);
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ParameterError("--set expects key=value, got " + s);
            kv[detail::trim(s.substr(0, eq))] = detail::trim(s.substr(eq + 1));
        }
        if (!out.empty()) kv["out"] = out;
        if (!grids.empty()) kv["grids"] = grids;
        if (!flux.empty()) kv["flux"] = flux;
        if (!norm.empty()) kv["norm"] = norm;
        if (!adjacency.empty()) kv["adjacency"] = adjacency;
        return make_config(kv, std::move(defaults));
    }
};

std::string domain_tag(const ExperimentConfig& c) { return c.domain.holes.empty() ? "omega1" : "omega2"; }

void write_json(const fs::path& p, const nlohmann::json& j) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << j.dump(2) << '\n';
}

void print_rows(const std::string& title, const std::vector<ConvergenceRow>& rows) {
    std::cout << title << '\n';
    for (const auto& r : rows) {
        std::cout << "  " << std::left << std::setw(10) << r.grid << " N=" << std::setw(9) << r.N
                  << " error=" << std::setprecision(4) << r.error;
        if (!std::isnan(r.rate)) std::cout << "  rate=" << std::setprecision(4) << r.rate;
        std::cout << '\n';
    }
}

void write_rows(const fs::path& p, const std::vector<ConvergenceRow>& rows) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p);
    write_convergence_csv(os, rows);
}

int cmd_build_ops(const ExperimentConfig& c) {
    bool ok = true;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& g : c.grids) {
        const auto b = build_operators(c, g);
        const fs::path dir = fs::path(c.out) / (domain_tag(c) + "_" + g + "_" + std::string(to_string(c.adjacency)) +
                                                "_" + std::string(to_string(c.norm)));
        fs::create_directories(dir);
        write_cloud_csv((dir / "cloud.csv").string(), b->cloud);
        {
            std::ofstream es(dir / "edges.txt");
            write_edge_list(es, b->graph);
        }
        auto info = to_json(*b);
        write_operators(dir, b->ops, "cloud.csv", {{"build", info}});
        runs.push_back(info);
        ok = ok && b->report.passed();
        std::cout << g << ": N=" << b->cloud.size() << " edges=" << b->graph.edge_count()
                  << " invariants=" << (b->report.passed() ? "pass" : "FAIL") << " -> " << dir.string() << '\n';
    }
    write_json(fs::path(c.out) / "build_ops.json", runs);
    return ok ? 0 : 3;
}

int cmd_ops_convergence(const ExperimentConfig& c) {
    std::vector<std::unique_ptr<OperatorBuild>> builds;
    for (const auto& g : c.grids) builds.push_back(build_operators(c, g));
    const std::string axis = c.axis == Axis::x ? "x" : "y";
    bool ok = true;
    for (const auto& b : builds) ok = ok && b->report.passed();

    for (const auto& name : c.functions) {
        const auto f = test_function(name);
        std::size_t k = 0;
        const auto rows = convergence_study(c.grids, [&](const std::string&) {
            const auto& b = *builds[k++];
            return std::pair{b.cloud.size(), derivative_l2_error(b, f, c.axis)};
        });
        const std::string stem = domain_tag(c) + "_" + std::string(to_string(c.adjacency)) + "_" +
                                 std::string(to_string(c.norm)) + "_" + name + "_" + axis;
        write_rows(fs::path(c.out) / (stem + ".csv"), rows);
        print_rows(stem, rows);

        // Boundary band (r >= 2) versus interior maximum errors.
        std::ofstream os(fs::path(c.out) / (stem + "_regions.csv"));
        os << "grid,N,linf_exterior,linf_interior\n";
        for (const auto& b : builds) {
            const auto e = derivative_error(b->ops, b->cloud, f, c.axis);
            const double ext = linf_error_region(b->cloud, e, [](const Point2& p) { return p.x * p.x + p.y * p.y >= 4.0; });
            const double in = linf_error_region(b->cloud, e, [](const Point2& p) { return p.x * p.x + p.y * p.y < 4.0; });
            os << b->grid.name << ',' << b->cloud.size() << ',' << std::setprecision(6) << ext << ',' << in << '\n';
        }
    }
    return ok ? 0 : 3;
}

int cmd_adjacency_compare(const ExperimentConfig& base) {
    const std::vector<AdjacencyMethod> methods = {AdjacencyMethod::euclidean_radius, AdjacencyMethod::delaunay1,
                                                  AdjacencyMethod::delaunay2, AdjacencyMethod::mst};
    fs::create_directories(base.out);
    std::ofstream os(fs::path(base.out) / (domain_tag(base) + "_adjacency_compare.csv"));
    os << "adjacency,function,grid,N,edges,error,rate\n";
    for (const auto m : methods) {
        auto c = base;
        c.adjacency = m;
        std::vector<std::unique_ptr<OperatorBuild>> builds;
        for (const auto& g : c.grids) builds.push_back(build_operators(c, g));
        for (const auto& name : c.functions) {
            const auto f = test_function(name);
            std::size_t k = 0;
            const auto rows = convergence_study(c.grids, [&](const std::string&) {
                const auto& b = *builds[k++];
                return std::pair{b.cloud.size(), derivative_l2_error(b, f, c.axis)};
            });
            print_rows(std::string(to_string(m)) + " " + name, rows);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                os << to_string(m) << ',' << name << ',' << rows[i].grid << ',' << rows[i].N << ','
                   << builds[i]->graph.edge_count() << ',' << std::setprecision(4) << rows[i].error << ',';
                if (!std::isnan(rows[i].rate)) os << rows[i].rate;
                os << '\n';
            }
        }
    }
    return 0;
}

int cmd_solve(const ExperimentConfig& c) {
    const fs::path out(c.out);
    fs::create_directories(out);
    nlohmann::json runs = nlohmann::json::array();
    std::vector<ConvergenceRow> rows;
    const std::string stem = domain_tag(c) + "_" + std::string(to_string(c.problem)) + "_" + std::string(to_string(c.flux));
    for (const auto& g : c.grids) {
        const auto b = build_operators(c, g);
        SnapshotWriter writer = [&](double t, const PointCloud& cloud, const std::vector<std::vector<double>>& u) {
            std::ostringstream name;
            name << stem << "_" << g << "_t" << std::fixed << std::setprecision(5) << t << ".csv";
            std::ofstream os(out / name.str());
            const bool euler = c.equation == EquationKind::euler;
            os << (euler ? "x,y,rho,rho_v1,rho_v2,rho_e,p\n" : "x,y,u\n");
            os << std::setprecision(std::numeric_limits<double>::max_digits10);
            const Euler eq{c.gamma};
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                os << cloud.points[i].x << ',' << cloud.points[i].y;
                for (double v : u[i]) os << ',' << v;
                if (euler) os << ',' << eq.pressure({u[i][0], u[i][1], u[i][2], u[i][3]});
                os << '\n';
            }
        };
        const auto s = run_problem(*b, c, writer);
        auto j = to_json(s);
        j["build"] = to_json(*b);
        runs.push_back(j);
        ConvergenceRow row{g, s.N, s.error};
        if (!rows.empty()) row.rate = std::log2(rows.back().error / s.error);
        rows.push_back(row);
        std::cout << g << ": N=" << s.N << " steps=" << s.steps << " error=" << std::setprecision(5) << s.error
                  << " wall=" << std::setprecision(3) << s.wall_seconds << "s";
        if (c.equation == EquationKind::euler)
            std::cout << " min_rho=" << std::setprecision(4) << s.min_density << " min_p=" << s.min_pressure;
        std::cout << '\n';
    }
    if (c.problem != ProblemKind::explosion && rows.size() >= 2) write_rows(out / (stem + ".csv"), rows);
    nlohmann::json summary = {{"problem", std::string(to_string(c.problem))},
                              {"flux", std::string(to_string(c.flux))},
                              {"bc", std::string(to_string(c.bc))},
                              {"domain", domain_tag(c)},
                              {"runs", runs}};
    write_json(out / (stem + ".json"), summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meshfree summation-by-parts operators and flux-based solvers"};
    app.require_subcommand(1);

    CommonFlags build_flags, conv_flags, solve_flags, cmp_flags;
    auto* build = app.add_subcommand("build-ops", "build operators and write them with a manifest");
    build_flags.add(build);
    auto* conv = app.add_subcommand("ops-convergence", "derivative error tables for u1/u2");
    conv_flags.add(conv);
    auto* solve = app.add_subcommand("solve", "integrate an advection or Euler problem");
    solve_flags.add(solve);
    auto* cmp = app.add_subcommand("adjacency-compare", "derivative errors for every adjacency notion");
    cmp_flags.add(cmp);

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build_ops(build_flags.resolve());
        if (conv->parsed()) return cmd_ops_convergence(conv_flags.resolve());
        if (cmp->parsed()) return cmd_adjacency_compare(cmp_flags.resolve());
        if (solve->parsed()) return cmd_solve(solve_flags.resolve());
    } catch (const ConnectivityError& e) {
        std::cerr << "connectivity error: " << e.what() << '\n';
        return 4;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
