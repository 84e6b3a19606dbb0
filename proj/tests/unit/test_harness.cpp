#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "hsettle/harness/suite.hpp"

using namespace hsettle;

namespace {

std::string csv_of(const std::vector<ExperimentRecord>& rs) {
    std::ostringstream os;
    write_records_csv(os, rs);
    return os.str();
}

RunConfig config_of(const std::string& text) { return RunConfig::from_json(json::parse(text)); }

ExperimentRecord synthetic(std::size_t N, double r) {
    ExperimentRecord x;
    x.generator = "lattice";
    x.N = N;
    x.r = r;
    x.VSt = stokes_velocity(r);
    return x;
}

} // namespace

TEST(PowerLaw, ExactCubeRootData) {
    std::vector<std::pair<double, double>> s;
    for (double N : {1e3, 4e3, 1.6e4, 6.4e4}) s.push_back({N, 3.0 * std::pow(N, -1.0 / 3.0)});
    const auto f = fit_power_law(s);
    EXPECT_NEAR(f.exponent, -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(f.log_prefactor, std::log(3.0), 1e-10);
    EXPECT_LT(f.residual, 1e-12);
    EXPECT_EQ(f.samples, 4u);
}

TEST(PowerLaw, ConstantData) {
    const auto f = fit_power_law({{2.0, 5.0}, {3.0, 5.0}, {7.0, 5.0}});
    EXPECT_NEAR(f.exponent, 0.0, 1e-14);
    EXPECT_GE(f.residual, 0.0);
}

TEST(PowerLaw, FivePercentNoise) {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k < 6; ++k) {
        const double N = 1e3 * std::pow(4.0, k);
        s.push_back({N, std::pow(N, -1.0 / 3.0) * (1.0 + noise(rng))});
    }
    EXPECT_NEAR(fit_power_law(s).exponent, -1.0 / 3.0, 0.06);
}

TEST(PowerLaw, RejectsBadSamples) {
    EXPECT_THROW(fit_power_law({{1.0, 1.0}}), PreconditionError);
    EXPECT_THROW(fit_power_law({{1.0, 1.0}, {2.0, 0.0}}), PreconditionError);
    EXPECT_THROW(fit_power_law({{1.0, 1.0}, {-2.0, 1.0}}), PreconditionError);
    EXPECT_THROW(fit_power_law({{2.0, 1.0}, {2.0, 3.0}}), PreconditionError);
}

TEST(Records, CsvRoundTripIsExact) {
    ExperimentRecord a = synthetic(1000, 0.05);
    a.E_freespace = 1.0 / 3.0;
    a.E_torus = 1e-300;
    a.E_defect = -0.0;
    a.Vsed_est = 2.0 / 7.0;
    a.norm_sigma_n = 6.02214076e23;
    ExperimentRecord b = synthetic(8, 0.1);
    b.generator = "shifted";
    b.lambda = 0.25;
    b.seed = 18446744073709551615ULL;
    b.status = csv_safe("error: energy: bad, worse\nworst");
    std::istringstream in(csv_of({a, b}));
    const auto back = read_records_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], a);
    EXPECT_EQ(back[1], b);
    EXPECT_EQ(back[1].status.find(','), std::string::npos);
    EXPECT_EQ(record_from_json(record_to_json(b)), b);
}

TEST(Records, HeaderAndParseErrors) {
    EXPECT_EQ(csv_of({}), std::string(kRecordHeader) + "\n");
    std::istringstream bad_header("a,b\n");
    EXPECT_THROW(read_records_csv(bad_header), ConfigError);
    std::istringstream bad_number(std::string(kRecordHeader) + "\n1,lattice,8,x,0,0,0,0,0,0,0,0,0,0,0,ok\n");
    try {
        read_records_csv(bad_number);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "records.csv:2");
    }
}

TEST(Records, SortedByKey) {
    std::vector<ExperimentRecord> rs{synthetic(27, 0.1), synthetic(8, 0.2), synthetic(8, 0.1)};
    sort_records(rs);
    EXPECT_EQ(rs[0].N, 8u);
    EXPECT_EQ(rs[0].r, 0.1);
    EXPECT_EQ(rs[2].N, 27u);
}

TEST(Config, SweepExpandsCartesianProduct) {
    const auto c = config_of(R"({"seed": 7, "sweeps": [{"generator": "lattice", "M": [2, 3], "r": [0.05, 0.1, 0.2],
                                 "pipelines": ["energy"]}]})");
    ASSERT_EQ(c.jobs.size(), 6u);
    EXPECT_EQ(c.jobs[0].descriptor["seed"], 7);
    EXPECT_EQ(c.jobs[5].descriptor["M"], 3);
    EXPECT_EQ(c.jobs[5].descriptor["r"], 0.2);
    EXPECT_TRUE(config_of(R"({"sweeps": [{"generator": "lattice", "M": [], "r": 0.1}]})").jobs.empty());
}

TEST(Config, DiagnosticsNameTheField) {
    auto field_of = [](const std::string& text) {
        try {
            config_of(text);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field_of(R"({"sweeps": [{"generator": "lattice", "pipelines": ["warp"]}]})"), "sweeps[0].pipelines");
    EXPECT_EQ(field_of(R"({"threads": 0})"), "threads");
    EXPECT_EQ(field_of(R"({"continuum": {"h": -1}})"), "continuum.h");
    EXPECT_EQ(field_of(R"({"thresholds": {"well_bound": "big"}})"), "thresholds.well_bound");
    EXPECT_EQ(field_of(R"({"sweeps": [{"M": 2}]})"), "sweeps[0].generator");
    EXPECT_THROW(RunConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST(Config, ThresholdsLiveInData) {
    const auto c = config_of(R"({"thresholds": {"norm_slope_lo": -0.4, "torus_gap_ratio": 0.2}})");
    EXPECT_EQ(c.thresholds.norm_slope_lo, -0.4);
    EXPECT_EQ(c.thresholds.torus_gap_ratio, 0.2);
    EXPECT_EQ(c.thresholds.well_exponent_band, Thresholds{}.well_exponent_band);
    EXPECT_EQ(Thresholds::from_json(c.thresholds.to_json()).to_json(), c.thresholds.to_json());
}

TEST(Plan, TorusNeverBeforeEnergy) {
    const auto c = config_of(R"({"sweeps": [{"generator": "lattice", "M": 2, "r": 0.1,
                                 "pipelines": ["torus", "norms", "defect"]}]})");
    const auto p = plan_json(c);
    ASSERT_EQ(p.size(), 1u);
    const auto stages = p[0]["stages"].get<std::vector<std::string>>();
    const std::vector<std::string> expect{"generate", "energy", "torus", "defect", "norms", "estimate"};
    EXPECT_EQ(stages, expect);
}

TEST(Run, EmptySweepGivesHeaderOnly) {
    const auto rs = run(config_of(R"({"sweeps": []})"));
    EXPECT_TRUE(rs.empty());
    EXPECT_EQ(csv_of(rs), std::string(kRecordHeader) + "\n");
}

TEST(Run, SingleLatticeRecord) {
    const auto rs = run(config_of(R"({"sweeps": [{"generator": "lattice", "M": 2, "r": 0.1,
                                       "pipelines": ["energy", "torus", "norms"]}]})"));
    ASSERT_EQ(rs.size(), 1u);
    const auto& x = rs[0];
    EXPECT_EQ(x.status, "ok");
    EXPECT_EQ(x.N, 8u);
    EXPECT_EQ(x.VSt, 1.0 / (6.0 * kPi * 0.1));
    EXPECT_GT(x.E_freespace, 0.0);
    EXPECT_EQ(x.Vsed_est, x.E_freespace / 4.0);
    EXPECT_NEAR(x.E_torus, lattice_energy(0.1, 1e-10).S, 1e-15);
    EXPECT_GT(x.norm_rho_sigma, 0.0);
    EXPECT_EQ(x.wall_s, 0.0);
    EXPECT_NO_THROW(x.validate());
}

TEST(Run, FailSoftKeepsOtherRecords) {
    const auto rs = run(config_of(R"({"sweeps": [{"generator": "lattice", "M": 2, "r": [0.1, 0.6],
                                       "pipelines": ["energy"]},
                                      {"generator": "hardcore_poisson", "N": 20, "r": 0.1, "pipelines": ["torus"]}]})"));
    ASSERT_EQ(rs.size(), 3u);
    int ok = 0;
    for (const auto& r : rs) ok += r.ok();
    EXPECT_EQ(ok, 1);
    EXPECT_FALSE(all_ok(rs));
    for (const auto& r : rs) {
        if (!r.ok()) {
            EXPECT_EQ(r.status.rfind("error: ", 0), 0u);
        }
    }
}

TEST(Run, ShiftedRecordDecomposes) {
    auto cfg = config_of(R"({"continuum": {"defect_cells": 64}, "sweeps": [{"generator": "shifted", "M": 2,
                             "lambda": 0.25, "r": 0.05, "pipelines": ["energy", "defect", "vstar"]}]})");
    cfg.continuum.h = 0.125;
    cfg.continuum.truncation = 4.0;
    const auto rs = run(cfg);
    ASSERT_TRUE(rs[0].ok()) << rs[0].status;
    const double w = std::cbrt(2.0) * 0.25;
    EXPECT_NEAR(rs[0].E_defect, solve_defect_poisson(w, 64).energy, 0.0);
    EXPECT_LT(rs[0].E_vstar, 1e-16); // homogeneous density
    EXPECT_TRUE(verdict_structure_identity(rs).pass);
}

TEST(Run, BytewiseReproducibleAcrossRunsAndThreads) {
    const std::string text = R"({"sweeps": [{"generator": "lattice", "M": [3, 2], "r": [0.1, 0.05],
                                 "pipelines": ["energy", "torus"]},
                                {"generator": "hardcore_poisson", "N": 30, "r": 0.1, "seed": 4, "pipelines": ["energy"]}]})";
    auto c1 = config_of(text);
    const std::string a = csv_of(run(c1)), b = csv_of(run(c1));
    c1.threads = 3;
    const std::string c = csv_of(run(c1));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
}

TEST(Run, OutputsWritten) {
    const auto dir = std::filesystem::temp_directory_path() / "hsettle_outputs_test";
    std::filesystem::remove_all(dir);
    write_outputs(dir, {synthetic(8, 0.1)}, json::array());
    for (const char* f : {"records.csv", "records.json", "verdicts.json"}) EXPECT_TRUE(std::filesystem::exists(dir / f));
    std::ifstream in(dir / "records.csv");
    EXPECT_EQ(read_records_csv(in).size(), 1u);
    std::filesystem::remove_all(dir);
}

TEST(Verdicts, WellPreparedBand) {
    std::vector<ExperimentRecord> rs;
    for (int M : {4, 6, 8}) {
        auto x = synthetic(static_cast<std::size_t>(M * M * M), 0.05);
        x.Vsed_est = x.VSt - 0.15;
        rs.push_back(x);
    }
    EXPECT_TRUE(verdict_well_prepared(rs, {}).pass);
    for (auto& x : rs) x.Vsed_est = x.VSt - 0.01 * static_cast<double>(x.N); // grows like M^3
    EXPECT_FALSE(verdict_well_prepared(rs, {}).pass);
    rs[0].status = "error: energy: x";
    EXPECT_FALSE(verdict_well_prepared(rs, {}).pass);
}

TEST(Verdicts, IllPreparedUsesLargestN) {
    std::vector<ExperimentRecord> rs;
    for (int M : {8, 16}) {
        auto x = synthetic(static_cast<std::size_t>(M * M * M), 0.2);
        x.E_vstar = 0.01;
        x.Vsed_est = (M == 16 ? 1.05 : 1.3) * 0.01 * std::pow(M, 2.0);
        rs.push_back(x);
    }
    const auto v = verdict_ill_prepared(rs, 0.0105, {});
    EXPECT_TRUE(v.pass);
    EXPECT_NEAR(v.data["ratio_at_largest"].get<double>(), 1.05, 1e-12);
    EXPECT_FALSE(verdict_ill_prepared(rs, 0.02, {}).pass); // grid not converged
}

TEST(Verdicts, RSweepExponent) {
    std::vector<ExperimentRecord> rs;
    for (double r : {0.02, 0.04, 0.08}) {
        auto x = synthetic(128, r);
        x.Vsed_est = x.VSt * (1.0 - 2.8 * r);
        rs.push_back(x);
    }
    const auto v = verdict_r_sweep(rs, {});
    EXPECT_TRUE(v.pass);
    EXPECT_NEAR(v.data["fit_r"]["exponent"].get<double>(), 1.0, 1e-12);
    for (auto& x : rs) x.Vsed_est = x.VSt - 0.1; // relative residual ~ r
    EXPECT_TRUE(verdict_r_sweep(rs, {}).pass);
    for (auto& x : rs) x.Vsed_est = x.VSt * 0.9; // constant relative residual
    EXPECT_FALSE(verdict_r_sweep(rs, {}).pass);
}

TEST(Verdicts, TorusGapAndNormSlopes) {
    std::vector<ExperimentRecord> rs;
    for (int M : {4, 8}) {
        auto x = synthetic(static_cast<std::size_t>(M * M * M), 0.05);
        x.E_torus = 0.911;
        x.E_freespace = (0.911 - 0.4 / M) * std::pow(M, 2.0);
        x.norm_rho_sigma = 2.0 / M;
        x.norm_sigma_n = 1.0 / M;
        rs.push_back(x);
    }
    const auto vs = record_verdicts(rs, {});
    ASSERT_EQ(vs.size(), 2u);
    EXPECT_TRUE(vs[0].pass);
    EXPECT_TRUE(vs[1].pass);
    rs[1].norm_sigma_n = 1.0 / 4.0; // no decay
    EXPECT_FALSE(verdict_norm_slopes(rs, {}).pass);
}

TEST(Suite, SmallRunProducesAllVerdicts) {
    ScalingSuiteSettings s;
    s.well_M = {2, 3};
    s.ill_M = {2, 3};
    s.ill_r = 0.1;
    s.ill_h = 0.125;
    s.sweep_M = 2;
    RunConfig cfg;
    cfg.continuum.truncation = 4.0;
    cfg.continuum.defect_cells = 32;
    const auto rep = theorem1_suite(s, cfg);
    EXPECT_EQ(rep.records.size(), 7u);
    ASSERT_EQ(rep.verdicts.size(), 4u);
    EXPECT_EQ(rep.verdicts[0].name, "well_prepared_bounded");
    EXPECT_EQ(rep.verdicts[1].name, "ill_prepared_scaling");
    EXPECT_EQ(rep.verdicts[2].name, "r_sweep_residual");
    EXPECT_TRUE(rep.verdicts[3].pass); // bookkeeping holds at any size
    EXPECT_TRUE(rep.verdicts[2].pass);
    for (const auto& r : rep.records) EXPECT_TRUE(r.ok()) << r.status;
    EXPECT_EQ(csv_of(rep.records), csv_of(theorem1_suite(s, cfg).records));
}

TEST(Suite, SettingsFromJson) {
    const auto s = ScalingSuiteSettings::from_json(json::parse(R"({"well": {"M": [2, 4]}, "r_sweep": {"r": [0.01, 0.02]}})"));
    EXPECT_EQ(s.well_M, (std::vector<int>{2, 4}));
    EXPECT_EQ(s.sweep_r, (std::vector<double>{0.01, 0.02}));
    EXPECT_EQ(s.ill_M, ScalingSuiteSettings{}.ill_M);
    EXPECT_THROW(ScalingSuiteSettings::from_json(json::parse(R"({"well": {"M": "x"}})")), ConfigError);
}
