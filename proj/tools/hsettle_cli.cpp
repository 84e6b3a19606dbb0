// hsettle_cli: generate configurations, run single computations, sweeps and
// the scaling suite. Exit codes: 0 success, 2 config error, 3 partial
// failures, 1 any other error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hsettle/core/checks.hpp"
#include "hsettle/harness/suite.hpp"

using namespace hsettle;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    std::string out = "hsettle_out";
    int threads = 1;
    std::uint64_t seed = 0;
    bool timing = false;
};

struct SystemArgs {
    std::string generator = "lattice";
    int M = 4;
    std::size_t N = 0;
    double r = 0.05;
    double lambda = 0.25;
};

void add_system_options(CLI::App* sc, SystemArgs& s) {
    sc->add_option("--generator", s.generator, "lattice | shifted | half_duct | hardcore_poisson")->capture_default_str();
    sc->add_option("-M", s.M, "lattice size per unit length")->capture_default_str();
    sc->add_option("-N", s.N, "particle count (hardcore_poisson)");
    sc->add_option("-r", s.r, "radius ratio r = N^{1/3} R")->capture_default_str();
    sc->add_option("--lambda", s.lambda, "shift of the shifted example")->capture_default_str();
}

json descriptor(const SystemArgs& s, const Globals& g) {
    json d{{"generator", s.generator}, {"r", s.r}, {"seed", g.seed}};
    if (s.generator == "hardcore_poisson") {
        d["N"] = s.N;
    } else {
        d["M"] = s.M;
    }
    if (s.generator == "shifted") d["lambda"] = s.lambda;
    return d;
}

RunConfig base_config(const Globals& g) {
    RunConfig c = g.config.empty() ? RunConfig{} : RunConfig::from_file(g.config);
    c.threads = g.threads;
    c.seed = g.seed;
    c.timing = c.timing || g.timing;
    return c;
}

void write_json(const fs::path& p, const json& j) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << j.dump(2) << "\n";
}

int finish_records(const Globals& g, const std::vector<ExperimentRecord>& rs, const std::vector<Verdict>& vs) {
    write_outputs(g.out, rs, verdicts_to_json(vs));
    for (const auto& r : rs) {
        if (!r.ok()) std::cerr << r.generator << " N=" << r.N << " r=" << r.r << ": " << r.status << "\n";
    }
    for (const auto& v : vs) std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "\n";
    std::cout << rs.size() << " records written to " << g.out << "\n";
    return all_ok(rs) ? 0 : 3;
}

int single_job(const Globals& g, const SystemArgs& s, std::vector<std::string> pipes) {
    RunConfig c = base_config(g);
    c.jobs = {{descriptor(s, g), pipes}};
    const auto rs = run(c);
    return finish_records(g, rs, record_verdicts(rs, c.thresholds));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean sedimentation velocity of dilute sphere suspensions"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON run configuration");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", g.seed, "seed for random generators")->capture_default_str();
    app.add_flag("--timing", g.timing, "record wall times (breaks byte-identical CSVs)");

    SystemArgs sys;

    auto* gen = app.add_subcommand("generate", "write a configuration and its density");
    add_system_options(gen, sys);

    auto* energy = app.add_subcommand("energy", "free-space energy E_1 and the estimate");
    add_system_options(energy, sys);

    auto* periodic = app.add_subcommand("periodic", "lattice sums S(rho) and a_per");
    std::vector<double> rhos{0.02, 0.01, 0.005};
    double tol = 1e-8;
    bool a_per = false;
    periodic->add_option("--rho", rhos, "radius-to-cell ratios")->capture_default_str();
    periodic->add_option("--tol", tol, "relative tail tolerance")->capture_default_str();
    periodic->add_flag("--a-per", a_per, "also extrapolate a_per from the list");

    auto* cont = app.add_subcommand("continuum", "grid solves: defect, vstar, vmatrix");
    std::string kind = "vstar";
    double weight = -1.0, h = 1.0 / 16, length = 16.0;
    int cells = 256;
    std::string export_field;
    cont->add_option("--kind", kind, "defect | vstar | vmatrix")->capture_default_str();
    cont->add_option("--weight", weight, "defect weight (default from the shifted example)");
    cont->add_option("--cells", cells, "defect cells per unit length")->capture_default_str();
    cont->add_option("--spacing", h, "MAC grid spacing")->capture_default_str();
    cont->add_option("--length", length, "duct truncation length")->capture_default_str();
    cont->add_option("--export", export_field, "write this grid field (u1, u2, u3, p, w) as raw float64");
    add_system_options(cont, sys);

    auto* metrics = app.add_subcommand("metrics", "separation, W_inf bound and dual norms");
    double shrink = 1.0;
    metrics->add_option("--cube-shrink", shrink, "cube side factor for the norm measures")->capture_default_str();
    add_system_options(metrics, sys);

    auto* suite = app.add_subcommand("suite", "run the configured sweeps and the scaling suite");
    auto* plan = app.add_subcommand("plan", "print the ordered stages of every job (dry run)");

    for (auto* sc : app.get_subcommands({})) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            const auto s = generate_from_json(descriptor(sys, g));
            fs::create_directories(g.out);
            std::ofstream csv(fs::path(g.out) / "configuration.csv", std::ios::binary);
            write_configuration_csv(csv, s.config);
            write_json(fs::path(g.out) / "configuration.json", configuration_sidecar(s.config));
            std::cout << s.config.N() << " particles written to " << g.out << "\n";
            return 0;
        }
        if (energy->parsed()) {
            const auto s = generate_from_json(descriptor(sys, g));
            EnergyOptions opt;
            opt.threads = g.threads;
            opt.timing = g.timing;
            write_json(fs::path(g.out) / "energy.json", assemble_energy(s.config, opt).to_json());
            return single_job(g, sys, {"energy", "defect"});
        }
        if (periodic->parsed()) {
            json out{{"sums", json::array()}};
            for (double rho : rhos) out["sums"].push_back(lattice_energy(rho, tol).to_json());
            if (a_per) out["hasimoto"] = a_per_estimate(rhos, tol).to_json();
            write_json(fs::path(g.out) / "periodic.json", out);
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (cont->parsed()) {
            const auto s = generate_from_json(descriptor(sys, g));
            GridSolution sol;
            json out{{"kind", kind}};
            if (kind == "defect") {
                const double w = weight >= 0.0 ? weight : (s.density.defect ? s.density.defect->weight : 0.0);
                sol = solve_defect_poisson(w, cells);
                out["weight"] = w;
                out["series"] = defect_series() * w * w;
            } else if (kind == "vstar" || kind == "vmatrix") {
                const AxisBox box = continuum_box(s.density, length);
                sol = solve_stokes_box(s.density, box, h);
                if (kind == "vmatrix") {
                    const Vec3 V = mean_velocity_matrix(s.density, box, h);
                    out["V_star"] = {V[0], V[1], V[2]};
                }
            } else {
                throw ConfigError("--kind", "unknown kind '" + kind + "'");
            }
            out.update({{"h", sol.h},
                        {"energy", sol.energy},
                        {"pairing", sol.pairing},
                        {"residual", sol.residual},
                        {"iterations", sol.iterations},
                        {"max_divergence", sol.max_divergence}});
            if (!export_field.empty()) {
                fs::create_directories(g.out);
                export_grid_field(sol, export_field, (fs::path(g.out) / (export_field + ".bin")).string());
            }
            write_json(fs::path(g.out) / "continuum.json", out);
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (metrics->parsed()) {
            const auto s = generate_from_json(descriptor(sys, g));
            const Separation sep = min_separation(s.config);
            const WinfBound w = winf_upper_bound(s.config, s.density);
            json out{{"N", s.config.N()},
                     {"c_pair", sep.c_pair},
                     {"c_wall", sep.c_wall},
                     {"winf_bound", w.bound},
                     {"winf_certified", w.certified}};
            if (s.config.has_cubes()) {
                ParticleConfiguration c = s.config;
                for (auto& q : c.cubes) q.half_width *= shrink;
                const auto n = empirical_dual_norms(c, s.density);
                out["norm_rho_sigma"] = n.rho_sigma;
                out["norm_sigma_n"] = n.sigma_n;
            }
            write_json(fs::path(g.out) / "metrics.json", out);
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (plan->parsed()) {
            const json p = plan_json(base_config(g));
            write_json(fs::path(g.out) / "plan.json", p);
            std::cout << p.dump(2) << "\n";
            return 0;
        }
        if (suite->parsed()) {
            const RunConfig c = base_config(g);
            auto rs = run(c);
            auto vs = record_verdicts(rs, c.thresholds);
            if (g.config.empty() || !c.scaling_suite.is_null()) {
                auto rep = theorem1_suite(ScalingSuiteSettings::from_json(c.scaling_suite), c);
                rs.insert(rs.end(), rep.records.begin(), rep.records.end());
                vs.insert(vs.end(), rep.verdicts.begin(), rep.verdicts.end());
                sort_records(rs);
            }
            return finish_records(g, rs, vs);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
