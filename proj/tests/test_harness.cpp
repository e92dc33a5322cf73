#include <doctest.h>

#include <cmath>

#include "core/harness.hpp"

using namespace swiptsec;

namespace {

// First seed at the simulation defaults whose optimal scheme solves.
std::uint64_t first_feasible_seed(const SystemConfig& config, const FadingSpec& spec,
                                  ChannelSet* out_channels = nullptr) {
    for (std::uint64_t seed = 1; seed < 100; ++seed) {
        const ChannelSet cs = apply_csi_uncertainty(
            draw_legitimate_channels(config, spec, seed), config.sigma_est_sq);
        const SolveReport rep = solve(assemble({Variant::kOptimal, {}}, cs, config));
        if (rep.status == SolveStatus::kOptimal) {
            if (out_channels) *out_channels = cs;
            return seed;
        }
    }
    REQUIRE(false);
    return 0;
}

}  // namespace

TEST_CASE("dBm conversions") {
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const double w = std::pow(10.0, rng.uniform(-12.0, 2.0));
        CHECK(dbm_to_watts(watts_to_dbm(w)) == doctest::Approx(w).epsilon(1e-12));
    }
}

TEST_CASE("empirical outage endpoints") {
    SystemConfig config;
    config.n_t = 4;
    TransmitPolicy zero;
    zero.w_cov = CMat::Zero(4, 4);
    zero.an_cov = CMat::Zero(4, 4);
    zero.es_cov = CMat::Zero(4, 4);
    CHECK(empirical_outage(zero, config, 1e-3, 2000, 3) == 1.0);

    Rng rng(5);
    TransmitPolicy strong;
    CVec w(4);
    for (int i = 0; i < 4; ++i) w(i) = rng.cnormal();
    strong.w_cov = 10.0 * (w * w.adjoint());
    strong.an_cov = CMat::Zero(4, 4);
    strong.es_cov = CMat::Zero(4, 4);
    SystemConfig tolerant = config;
    tolerant.gamma_tol = 1e12;  // effectively infinite cap
    CHECK(empirical_outage(strong, tolerant, 1e-3, 2000, 3) == 1.0);
    // A hot beam with a 0 dB cap and weak noise is intercepted often.
    CHECK(empirical_outage(strong, config, 1e-3, 2000, 3) < 0.5);
}

TEST_CASE("chance certificate implies the empirical outage level") {
    SystemConfig config;  // simulation defaults, kappa = 0.99, J = 5
    const FadingSpec spec;
    ChannelSet cs;
    first_feasible_seed(config, spec, &cs);
    const SolveReport rep = solve(assemble({Variant::kOptimal, {}}, cs, config));
    REQUIRE(rep.status == SolveStatus::kOptimal);
    const double outage =
        empirical_outage(rep.policy, config, cs.sigma_tilde_sq, 100000, 77);
    CHECK(outage >= config.kappa - 0.005);
}

TEST_CASE("rho grid oracle agrees with the joint solve") {
    const FadingSpec spec;
    SUBCASE("P_min = 0 puts the optimum at the rho = 1 boundary") {
        SystemConfig config;
        config.k_total = 2;
        config.p_min_desired_w = 0.0;
        config.p_min_idle_w = {0.0};
        ChannelSet cs;
        first_feasible_seed(config, spec, &cs);
        const SolveReport joint = solve(assemble({Variant::kOptimal, {}}, cs, config));
        REQUIRE(joint.status == SolveStatus::kOptimal);
        CHECK(joint.policy.rho >= 1.0 - 1e-5);
        const auto oracle = rho_grid_oracle(cs, config, Variant::kOptimal, 9);
        REQUIRE(oracle.has_value());
        const double diff_db = std::abs(10.0 * std::log10(*oracle / joint.objective_w));
        CHECK(diff_db <= 0.05);
    }
    SUBCASE("interior optimum within 0.05 dB on default instances") {
        SystemConfig config;
        config.p_min_desired_w = 3.16227766e-3;  // binding C4, interior rho
        ChannelSet cs;
        first_feasible_seed(config, spec, &cs);
        const SolveReport joint = solve(assemble({Variant::kOptimal, {}}, cs, config));
        REQUIRE(joint.status == SolveStatus::kOptimal);
        const auto oracle = rho_grid_oracle(cs, config, Variant::kOptimal, 13);
        REQUIRE(oracle.has_value());
        CHECK(std::abs(10.0 * std::log10(*oracle / joint.objective_w)) <= 0.05);
        CHECK(*oracle >= joint.objective_w * (1.0 - 1e-6));  // grid is a restriction
    }
    SUBCASE("objective is unimodal along the rho grid") {
        SystemConfig config;
        config.p_min_desired_w = 3.16227766e-3;
        ChannelSet cs;
        first_feasible_seed(config, spec, &cs);
        std::vector<double> obj;
        for (int i = 0; i <= 12; ++i) {
            const double rho = 1e-6 + (1.0 - 2e-6) * i / 12.0;
            const SolveReport r = solve(assemble({Variant::kOptimal, rho}, cs, config));
            obj.push_back(r.status == SolveStatus::kOptimal
                              ? r.objective_w
                              : std::numeric_limits<double>::infinity());
        }
        int direction_changes = 0;
        for (std::size_t i = 2; i < obj.size(); ++i) {
            const bool was_down = obj[i - 1] <= obj[i - 2] * (1 + 1e-9);
            const bool is_down = obj[i] <= obj[i - 1] * (1 + 1e-9);
            if (was_down != is_down) ++direction_changes;
        }
        CHECK(direction_changes <= 1);
    }
}

TEST_CASE("run_trial: pairing, determinism and the kappa = 0 equivalence") {
    SystemConfig config;
    config.kappa = 0.0;
    const FadingSpec spec;
    const std::uint64_t seed = first_feasible_seed(config, spec);

    const auto recs = run_trial(config, spec, seed,
                                {Variant::kOptimal, Variant::kBenchmarkKappa0}, 1e-8, 200);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].status == "optimal");
    // kappa = 0: the chance bound is dropped, the problems coincide.
    CHECK(recs[0].objective_w == doctest::Approx(recs[1].objective_w).epsilon(1e-9));

    const auto again = run_trial(config, spec, seed,
                                 {Variant::kOptimal, Variant::kBenchmarkKappa0}, 1e-8, 200);
    CHECK(recs[0].objective_w == again[0].objective_w);
    CHECK(recs[0].empirical_outage == again[0].empirical_outage);
    CHECK(recs[0].secrecy_sampled_bps_hz == again[0].secrecy_sampled_bps_hz);
}

TEST_CASE("scheme ordering per paired trial") {
    SystemConfig config;
    const FadingSpec spec;
    int checked = 0;
    for (std::uint64_t seed = 1; seed < 60 && checked < 3; ++seed) {
        const auto recs = run_trial(
            config, spec, seed,
            {Variant::kOptimal, Variant::kSuboptimal, Variant::kBenchmarkKappa0}, 1e-8, 50);
        if (recs[0].status != "optimal") continue;
        ++checked;
        if (recs[1].status == "optimal") {
            CHECK(recs[0].objective_w <= recs[1].objective_w * (1 + 1e-6));
        }
        REQUIRE(recs[2].status == "optimal");  // benchmark relaxes the feasible set
        CHECK(recs[2].objective_w <= recs[0].objective_w * (1 + 1e-6));
        CHECK(recs[0].min_margin >= -1e-6);
        CHECK(recs[0].w_rank == 1);
    }
    CHECK(checked == 3);
}

TEST_CASE("sweep aggregation: schema, determinism, reduced counts") {
    SweepSpec spec;
    spec.swept_parameter = "gamma_req_db";
    spec.values = {10.0, 15.0};
    spec.trials = 6;
    spec.schemes = {Variant::kOptimal};
    spec.outage_groups = 50;
    spec.master_seed = 5;
    spec.jobs = 1;

    const SweepResult a = sweep(spec);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[0].trials_ok <= spec.trials);
    CHECK(a.rows[0].trials_ok >= 1);

    const std::string csv = sweep_csv(a.rows);
    CHECK(csv.rfind("sweep_param,sweep_value,scheme,trials_ok,mean_power_dbm,", 0) == 0);

    // Byte-identical reruns, independent of the worker count.
    SweepSpec par = spec;
    par.jobs = 2;
    CHECK(sweep_csv(sweep(spec).rows) == csv);
    CHECK(sweep_csv(sweep(par).rows) == csv);

    // Paired seeds: trial t sees the same channels at both sweep values,
    // so the per-trial objective is monotone in the SINR target.
    for (int t = 0; t < spec.trials; ++t) {
        const TrialRecord& lo = a.trials[0][static_cast<std::size_t>(t)];
        const TrialRecord& hi = a.trials[1][static_cast<std::size_t>(t)];
        if (lo.status == "optimal" && hi.status == "optimal") {
            CHECK(lo.objective_w <= hi.objective_w * (1 + 1e-6));
        }
    }
}
