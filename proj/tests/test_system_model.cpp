#include <doctest.h>

#include <cmath>

#include "core/system_model.hpp"

using namespace swiptsec;

namespace {

CMat random_psd(int n, Rng& rng, double scale) {
    CMat a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = rng.cnormal();
    }
    return hermitize(scale * a * a.adjoint());
}

CVec random_vec(int n, Rng& rng) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.cnormal();
    return v;
}

TransmitPolicy random_policy(int n, Rng& rng) {
    TransmitPolicy p;
    p.w_cov = random_psd(n, rng, 1.0);
    p.an_cov = random_psd(n, rng, 0.3);
    p.es_cov = random_psd(n, rng, 0.2);
    p.rho = rng.uniform(0.05, 0.95);
    return p;
}

// Independent evaluator: entry-by-entry complex arithmetic, no Eigen
// expressions, kept deliberately separate from the library path.
Complex oracle_quad(const CMat& x, const CVec& v) {
    Complex acc(0.0, 0.0);
    for (int i = 0; i < v.size(); ++i) {
        for (int j = 0; j < v.size(); ++j) {
            acc += std::conj(v(i)) * x(i, j) * v(j);
        }
    }
    return acc;
}

SystemConfig test_config(int n_t) {
    SystemConfig c;
    c.n_t = n_t;
    c.k_total = 2;
    c.sigma_ant_sq_w = 0.01;
    c.sigma_s_sq_w = 0.05;
    c.eta = 0.5;
    return c;
}

}  // namespace

TEST_CASE("sinr_desired matches MRT closed form and the oracle") {
    Rng rng(1);
    SystemConfig config = test_config(4);
    const CVec h = random_vec(4, rng);

    SUBCASE("MRT with no artificial noise") {
        TransmitPolicy p;
        const double power = 2.0;
        p.w_cov = power * (h * h.adjoint()) / h.squaredNorm();
        p.an_cov = CMat::Zero(4, 4);
        p.es_cov = CMat::Zero(4, 4);
        p.rho = 1.0;
        CHECK(sinr_desired(p, h, config) ==
              doctest::Approx(power * h.squaredNorm() /
                              (config.sigma_ant_sq_w + config.sigma_s_sq_w)));
    }
    SUBCASE("zero beamformer gives zero SINR") {
        TransmitPolicy p;
        p.w_cov = CMat::Zero(4, 4);
        p.an_cov = CMat::Zero(4, 4);
        p.es_cov = CMat::Zero(4, 4);
        p.rho = 0.5;
        CHECK(sinr_desired(p, h, config) == 0.0);
    }
    SUBCASE("random instance against the independent evaluator") {
        for (int t = 0; t < 20; ++t) {
            const TransmitPolicy p = random_policy(4, rng);
            const double expect =
                p.rho * std::real(oracle_quad(p.w_cov, h)) /
                (p.rho * (config.sigma_ant_sq_w + std::real(oracle_quad(p.an_cov, h))) +
                 config.sigma_s_sq_w);
            CHECK(sinr_desired(p, h, config) == doctest::Approx(expect).epsilon(1e-10));
        }
    }
    SUBCASE("rho = 0 is a contract violation") {
        TransmitPolicy p = random_policy(4, rng);
        p.rho = 0.0;
        CHECK_THROWS_AS(sinr_desired(p, h, config), std::invalid_argument);
    }
}

TEST_CASE("sinr_idle_worstsplit") {
    Rng rng(2);
    SystemConfig config = test_config(4);
    const CVec g = random_vec(4, rng);

    TransmitPolicy p = random_policy(4, rng);
    const double expect =
        std::real(oracle_quad(p.w_cov, g)) /
        (config.sigma_ant_sq_w + std::real(oracle_quad(p.an_cov, g)) + config.sigma_s_sq_w);
    CHECK(sinr_idle_worstsplit(p, g, config) == doctest::Approx(expect).epsilon(1e-10));

    // Strong artificial noise along g drives the intercept SINR to zero.
    p.an_cov = 1e9 * (g * g.adjoint());
    CHECK(sinr_idle_worstsplit(p, g, config) < 1e-6);

    p = random_policy(4, rng);
    p.w_cov = CMat::Zero(4, 4);
    CHECK(sinr_idle_worstsplit(p, g, config) == 0.0);
}

TEST_CASE("sinr_idle_worstsplit upper-bounds the split-dependent SINR") {
    Rng rng(3);
    SystemConfig config = test_config(5);
    const CVec g = random_vec(5, rng);
    for (int t = 0; t < 20; ++t) {
        const TransmitPolicy p = random_policy(5, rng);
        const double bound = sinr_idle_worstsplit(p, g, config);
        for (int i = 1; i <= 20; ++i) {
            const double rho_k = i / 20.0;
            const double sig = rho_k * std::real(oracle_quad(p.w_cov, g));
            const double den =
                rho_k * (config.sigma_ant_sq_w + std::real(oracle_quad(p.an_cov, g))) +
                config.sigma_s_sq_w;
            CHECK(sig / den <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("sinr_passive") {
    Rng rng(4);
    const CVec l = random_vec(4, rng);
    const double sigma_tilde_sq = 0.02;

    TransmitPolicy p = random_policy(4, rng);
    const double expect = std::real(oracle_quad(p.w_cov, l)) /
                          (std::real(oracle_quad(p.es_cov, l)) +
                           std::real(oracle_quad(p.an_cov, l)) + sigma_tilde_sq);
    CHECK(sinr_passive(p, l, sigma_tilde_sq) == doctest::Approx(expect).epsilon(1e-10));

    p.es_cov = 1e9 * (l * l.adjoint());
    CHECK(sinr_passive(p, l, sigma_tilde_sq) < 1e-6);

    // Aligned rank-one beam with no jamming.
    TransmitPolicy q;
    q.w_cov = 3.0 * (l * l.adjoint()) / l.squaredNorm();
    q.an_cov = CMat::Zero(4, 4);
    q.es_cov = CMat::Zero(4, 4);
    q.rho = 1.0;
    CHECK(sinr_passive(q, l, sigma_tilde_sq) ==
          doctest::Approx(3.0 * l.squaredNorm() / sigma_tilde_sq));
}

TEST_CASE("secrecy capacity") {
    Rng rng(5);
    SystemConfig config = test_config(4);
    ChannelSet cs;
    cs.h = random_vec(4, rng);
    cs.sigma_tilde_sq = 0.02;
    cs.rng_seed = 1;

    TransmitPolicy p;
    p.w_cov = 10.0 * (cs.h * cs.h.adjoint()) / cs.h.squaredNorm();
    p.an_cov = CMat::Zero(4, 4);
    p.es_cov = CMat::Zero(4, 4);
    p.rho = 1.0;

    SUBCASE("no eavesdroppers: plain capacity") {
        const double expect = std::log2(1.0 + sinr_desired(p, cs.h, config));
        CHECK(secrecy_capacity(p, cs, {}, config) == doctest::Approx(expect));
    }
    SUBCASE("worst eavesdropper at 0 dB against 15 dB desired link") {
        // Scale so the desired SINR is exactly 31.623 and hand the
        // eavesdropper a channel with SINR exactly 1.
        const double target = 31.6227766016837933;
        const double cur = sinr_desired(p, cs.h, config);
        p.w_cov *= target / cur;
        CVec l = random_vec(4, rng);
        // sinr_passive = Tr(LW) / sigma_tilde_sq; scale l to make it 1.
        const double raw = sinr_passive(p, l, cs.sigma_tilde_sq);
        l /= std::sqrt(raw);
        cs.g_true.clear();
        const double got = secrecy_capacity(p, cs, {l}, config);
        CHECK(got == doctest::Approx(std::log2(1.0 + target) - 1.0).epsilon(1e-9));
        CHECK(got == doctest::Approx(4.028).epsilon(1e-3));
    }
    SUBCASE("clamped at zero when the eavesdropper matches the desired SINR") {
        CVec l = random_vec(4, rng);
        const double raw = sinr_passive(p, l, cs.sigma_tilde_sq);
        l *= std::sqrt(sinr_desired(p, cs.h, config) / raw);
        CHECK(secrecy_capacity(p, cs, {l}, config) == 0.0);
        l *= 2.0;  // stronger eavesdropper stays clamped
        CHECK(secrecy_capacity(p, cs, {l}, config) == 0.0);
    }
}

TEST_CASE("harvested power") {
    Rng rng(6);
    SystemConfig config = test_config(4);
    const CVec h = random_vec(4, rng);

    TransmitPolicy p = random_policy(4, rng);
    SUBCASE("rho = 1 harvests nothing at the desired receiver") {
        p.rho = 1.0;
        CHECK(harvested_power_desired(p, h, config) == 0.0);
    }
    SUBCASE("pure energy signal case") {
        SystemConfig c2 = config;
        c2.eta = 1.0;
        TransmitPolicy q;
        q.rho = 0.0;
        q.w_cov = CMat::Zero(4, 4);
        q.an_cov = CMat::Zero(4, 4);
        q.es_cov = 0.7 * (h * h.adjoint()) / h.squaredNorm();
        const double received = 0.7 * h.squaredNorm();
        CHECK(harvested_power_desired(q, h, c2) ==
              doctest::Approx(received + c2.sigma_ant_sq_w));
    }
    SUBCASE("idle harvest ignores the splitting ratio") {
        const double a = harvested_power_idle(p, h, config);
        TransmitPolicy q = p;
        q.rho = 0.123;
        CHECK(harvested_power_idle(q, h, config) == a);
        TransmitPolicy z;
        z.w_cov = CMat::Zero(4, 4);
        z.an_cov = CMat::Zero(4, 4);
        z.es_cov = CMat::Zero(4, 4);
        CHECK(harvested_power_idle(z, h, config) ==
              doctest::Approx(config.eta * config.sigma_ant_sq_w));
    }
    SUBCASE("oracle check and power-splitter conservation") {
        const double received = std::real(oracle_quad(p.w_cov, h)) +
                                std::real(oracle_quad(p.an_cov, h)) +
                                std::real(oracle_quad(p.es_cov, h)) + config.sigma_ant_sq_w;
        CHECK(harvested_power_desired(p, h, config) ==
              doctest::Approx((1.0 - p.rho) * config.eta * received).epsilon(1e-10));
        // (1-rho) + rho = 1: harvested at eta=1 plus the information-stream
        // share reconstructs the full received power.
        SystemConfig c3 = config;
        c3.eta = 1.0;
        CHECK(harvested_power_desired(p, h, c3) + p.rho * received ==
              doctest::Approx(received).epsilon(1e-12));
    }
}

TEST_CASE("per-antenna power") {
    Rng rng(7);
    TransmitPolicy p = random_policy(5, rng);
    double total = 0.0;
    for (int n = 0; n < 5; ++n) total += per_antenna_power(p, n);
    CHECK(total == doctest::Approx(std::real((p.w_cov + p.an_cov + p.es_cov).trace()))
                       .epsilon(1e-12));
    CHECK_THROWS_AS(per_antenna_power(p, 5), std::out_of_range);
    CHECK_THROWS_AS(per_antenna_power(p, -1), std::out_of_range);

    TransmitPolicy d;
    d.w_cov = CMat::Identity(3, 3);
    d.an_cov = 2.0 * CMat::Identity(3, 3);
    d.es_cov = CMat::Zero(3, 3);
    CHECK(per_antenna_power(d, 1) == doctest::Approx(3.0));
}

TEST_CASE("evaluate_constraints flags an infeasible zero policy") {
    SystemConfig config = test_config(4);
    config.k_total = 1;
    config.kappa = 0.0;
    FadingSpec spec;
    ChannelSet cs;
    Rng rng(8);
    cs.h = random_vec(4, rng);
    cs.sigma_tilde_sq = 0.02;
    cs.l_up_scale = 1.0;

    TransmitPolicy z;
    z.w_cov = CMat::Zero(4, 4);
    z.an_cov = CMat::Zero(4, 4);
    z.es_cov = CMat::Zero(4, 4);
    z.rho = 0.5;

    const ConstraintReport rep = evaluate_constraints(z, cs, config, 0);
    REQUIRE(rep.find("C1") != nullptr);
    CHECK(rep.find("C1")->margin < 0.0);
    CHECK(rep.find("C8")->margin >= -1e-12);
    // Every tag appears exactly once.
    const char* tags[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10"};
    for (const char* t : tags) {
        int count = 0;
        for (const auto& e : rep.entries) {
            if (e.tag == t) ++count;
        }
        CHECK(count == 1);
    }
    // Purity: identical inputs give identical reports.
    const ConstraintReport rep2 = evaluate_constraints(z, cs, config, 0);
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        CHECK(rep.entries[i].margin == rep2.entries[i].margin);
    }
}
