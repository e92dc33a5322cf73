#include <doctest.h>

#include <cmath>

#include "core/recovery.hpp"
#include "core/system_model.hpp"

using namespace swiptsec;

namespace {

// Deterministic instance whose relaxed optimum has an excess-rank W:
// strong idle-harvest floors activate the C5 multipliers.
struct Rank2Fixture {
    SystemConfig config;
    FadingSpec spec;
    ChannelSet channels;
    SdpProblem problem;
    SolveReport report;

    Rank2Fixture() {
        config.p_min_idle_w = {5e-3};
        config.p_min_desired_w = 1e-3;
        config.gamma_req = std::pow(10.0, 1.8);
        spec.max_distance_m = 8.0;
        channels = apply_csi_uncertainty(draw_legitimate_channels(config, spec, 65),
                                         config.sigma_est_sq);
        problem = assemble({Variant::kOptimal, {}}, channels, config);
        SolverOptions opt;
        opt.tol = 1e-9;
        opt.polish = true;
        opt.max_iter = 300;
        report = solve(problem, opt);
    }
};

}  // namespace

TEST_CASE("prop1 certificate") {
    SystemConfig config;
    config.n_t = 4;
    config.k_total = 3;

    SUBCASE("zero C5 multipliers always satisfy the condition") {
        DualCertificate duals;
        Rng rng(1);
        for (int k = 0; k < 2; ++k) {
            CMat a(5, 5);
            for (int i = 0; i < 5; ++i) {
                for (int j = 0; j < 5; ++j) a(i, j) = rng.cnormal();
            }
            duals.d_c2.push_back(hermitize(a * a.adjoint()));
            duals.d_c5.push_back(CMat::Zero(5, 5));
        }
        const Prop1Result r = check_prop1(duals, config);
        CHECK(r.all);
    }
    SUBCASE("a crafted negative difference fails") {
        DualCertificate duals;
        duals.d_c2.push_back(CMat::Zero(5, 5));
        CMat d5 = CMat::Zero(5, 5);
        d5(0, 0) = 0.1;
        duals.d_c5.push_back(d5);
        const Prop1Result r = check_prop1(duals, config);
        CHECK_FALSE(r.all);
        CHECK_FALSE(r.per_k[0]);
    }
}

TEST_CASE("rank-one input is a no-op with the beam extracted") {
    SystemConfig config;
    config.n_t = 4;
    config.k_total = 1;
    config.j_eaves = 0;
    config.kappa = 0.0;
    config.p_min_desired_w = 0.0;
    config.sigma_est_sq = 0.0;
    Rng rng(4);
    CVec h(4);
    for (int i = 0; i < 4; ++i) h(i) = 1e-2 * rng.cnormal();
    ChannelSet cs;
    cs.h = h;
    cs.l_up_scale = 4.0;
    cs.sigma_tilde_sq = 1.0;

    const SdpProblem prob = assemble({Variant::kOptimal, {}}, cs, config);
    const SolveReport rep = solve(prob);
    REQUIRE(rep.status == SolveStatus::kOptimal);
    REQUIRE(rep.w_rank == 1);

    const RecoveryOutcome out = construct_rank_one(rep, prob);
    CHECK_FALSE(out.invoked);
    CHECK(out.success);
    REQUIRE(out.policy.beam_vector.has_value());
    const CVec& w_vec = *out.policy.beam_vector;
    CHECK((out.policy.w_cov - w_vec * w_vec.adjoint()).norm() <=
          1e-6 * std::real(out.policy.w_cov.trace()));
    CHECK((out.policy.w_cov - rep.policy.w_cov).norm() == 0.0);
}

TEST_CASE("excess-rank optimum is repaired with the objective conserved") {
    static const Rank2Fixture fx;
    REQUIRE(fx.report.status == SolveStatus::kOptimal);
    REQUIRE(numeric_rank(fx.report.policy.w_cov, 1e-6) > 1);

    const RecoveryOutcome out = construct_rank_one(fx.report, fx.problem);
    REQUIRE(out.success);
    CHECK(out.invoked);
    CHECK(std::abs(out.objective_w - fx.report.objective_w) <=
          1e-6 * fx.report.objective_w);
    CHECK(numeric_rank(out.policy.w_cov, 1e-6) == 1);
    REQUIRE(out.policy.beam_vector.has_value());

    // Totals conserved: the shed mass moved, it did not disappear.
    const double before = std::real((fx.report.policy.w_cov + fx.report.policy.an_cov +
                                     fx.report.policy.es_cov)
                                        .trace());
    const double after = std::real(
        (out.policy.w_cov + out.policy.an_cov + out.policy.es_cov).trace());
    CHECK(after == doctest::Approx(before).epsilon(1e-8));

    // Shed directions are orthogonal to the desired channel.
    if (out.workspace.upsilon.cols() > 0) {
        CHECK((fx.channels.h.adjoint() * out.workspace.upsilon).norm() <=
              1e-6 * fx.channels.h.norm());
    }

    // Full feasibility audit of the recovered policy.
    const auto pool = draw_eavesdropper_channels(fx.config, fx.spec, 10000, 5);
    const ConstraintReport audit =
        evaluate_constraints(out.policy, fx.channels, fx.config, 500, pool);
    for (const auto& e : audit.entries) {
        if (e.tag == "C3") continue;  // sampled outage, checked at scale elsewhere
        CHECK(e.margin >= -1e-6);
    }
}

TEST_CASE("mixing-weight family keeps the objective and feasibility") {
    static const Rank2Fixture fx;
    REQUIRE(fx.report.status == SolveStatus::kOptimal);
    const int n = fx.config.n_t;
    for (double pival : {0.0, 0.5, 1.0}) {
        const std::vector<double> pi(static_cast<std::size_t>(n), pival);
        const RecoveryOutcome out = construct_rank_one(fx.report, fx.problem, pi);
        REQUIRE(out.success);
        CHECK(std::abs(out.objective_w - fx.report.objective_w) <=
              1e-6 * fx.report.objective_w);
        CHECK(numeric_rank(out.policy.w_cov, 1e-6) == 1);
        const ConstraintReport audit =
            evaluate_constraints(out.policy, fx.channels, fx.config, 500, {});
        for (const auto& e : audit.entries) {
            if (e.tag == "C3") continue;
            CHECK(e.margin >= -1e-6);
        }
    }
}

TEST_CASE("rank audit tabulation") {
    SUBCASE("empty batch") {
        const RankAuditSummary s = rank_one_audit({});
        CHECK(s.total == 0);
        CHECK(s.to_csv() == "instance_id,w_rank,prop1,recovered\n");
    }
    SUBCASE("rank-one without the condition is counted, not flagged") {
        std::vector<RankAuditRow> rows;
        rows.push_back({1, 1, true, false, true});
        rows.push_back({2, 1, false, false, true});  // Remark-4 style
        rows.push_back({3, 2, false, true, true});
        const RankAuditSummary s = rank_one_audit(rows);
        CHECK(s.total == 3);
        CHECK(s.rank_one_before == 2);
        CHECK(s.prop1_true == 1);
        CHECK(s.prop1_true_rank_one == 1);
        CHECK(s.recovery_invoked == 1);
        CHECK(s.recovery_failures == 0);
        CHECK(s.to_csv().find("2,1,0,0") != std::string::npos);
    }
}

TEST_CASE("zero idle-harvest floors give the certificate and rank one") {
    SystemConfig config;
    config.n_t = 4;
    config.k_total = 3;
    config.p_min_idle_w = {0.0};
    const FadingSpec spec;
    int done = 0;
    for (int seed = 1; done < 5 && seed < 80; ++seed) {
        const ChannelSet cs = apply_csi_uncertainty(
            draw_legitimate_channels(config, spec, seed), config.sigma_est_sq);
        const SdpProblem prob = assemble({Variant::kOptimal, {}}, cs, config);
        const SolveReport rep = solve(prob);
        if (rep.status != SolveStatus::kOptimal) continue;
        ++done;
        const Prop1Result p1 = check_prop1(rep.duals, config);
        CHECK(p1.all);
        CHECK(rep.w_rank == 1);
    }
    CHECK(done == 5);
}
