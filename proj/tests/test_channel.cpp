#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/channel.hpp"

using namespace swiptsec;

namespace {

SystemConfig default_config() {
    SystemConfig c;
    c.n_t = 6;
    c.k_total = 4;
    return c;
}

}  // namespace

TEST_CASE("path gain anchors at the reference distance") {
    FadingSpec spec;
    const double lambda = 299792458.0 / spec.carrier_freq_hz;
    const double expected = 10.0 * std::pow(lambda / (4.0 * M_PI * 2.0), 2.0);
    CHECK(path_gain(2.0, spec) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("path gain is continuous at the breakpoint and monotone") {
    FadingSpec spec;
    const double below = path_gain(spec.breakpoint_m - 1e-9, spec);
    const double above = path_gain(spec.breakpoint_m + 1e-9, spec);
    CHECK(below == doctest::Approx(above).epsilon(1e-6));

    double prev = path_gain(spec.ref_distance_m, spec);
    for (double d = 2.5; d <= 20.0; d += 0.5) {
        const double g = path_gain(d, spec);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("far-segment slope follows the configured exponent") {
    FadingSpec spec;
    spec.breakpoint_m = 5.0;  // exercise the far segment inside 20 m
    const double ratio_db = 10.0 * std::log10(path_gain(20.0, spec) / path_gain(5.0, spec));
    CHECK(ratio_db == doctest::Approx(10.0 * 3.5 * std::log10(5.0 / 20.0)).epsilon(1e-9));
    CHECK(ratio_db == doctest::Approx(-21.0721).epsilon(1e-4));
}

TEST_CASE("guard zone rejected") {
    FadingSpec spec;
    CHECK_THROWS_AS(path_gain(1.0, spec), std::invalid_argument);
}

TEST_CASE("rician K-factor fixes the LOS/scatter power ratio") {
    FadingSpec spec;
    CHECK(std::pow(10.0, spec.rician_k_factor_db / 10.0) == doctest::Approx(3.981).epsilon(1e-3));
}

TEST_CASE("small-scale fading is power normalized") {
    SystemConfig config = default_config();
    config.k_total = 1;
    FadingSpec spec;
    double acc = 0.0;
    const int trials = 20000;  // 1.2e5 entries in total
    for (int t = 0; t < trials; ++t) {
        const ChannelSet cs = draw_legitimate_channels(config, spec, 1000 + t);
        const double pg = path_gain(cs.distances[0], spec);
        acc += cs.h.squaredNorm() / (pg * config.n_t);
    }
    CHECK(acc / trials == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("same seed reproduces the channel set exactly") {
    SystemConfig config = default_config();
    FadingSpec spec;
    const ChannelSet a = draw_legitimate_channels(config, spec, 77);
    const ChannelSet b = draw_legitimate_channels(config, spec, 77);
    CHECK((a.h - b.h).norm() == 0.0);
    for (std::size_t k = 0; k < a.g_true.size(); ++k) {
        CHECK((a.g_true[k] - b.g_true[k]).norm() == 0.0);
    }
    CHECK(a.distances == b.distances);
}

TEST_CASE("channel draws nest across K and N_T") {
    SystemConfig small = default_config();
    small.k_total = 2;
    small.n_t = 4;
    SystemConfig big = default_config();
    big.k_total = 5;
    big.n_t = 6;
    FadingSpec spec;
    const ChannelSet a = draw_legitimate_channels(small, spec, 31);
    const ChannelSet b = draw_legitimate_channels(big, spec, 31);
    CHECK((a.h - b.h.head(4)).norm() == 0.0);
    CHECK((a.g_true[0] - b.g_true[0].head(4)).norm() == 0.0);
    CHECK(a.distances[0] == b.distances[0]);
    CHECK(a.distances[1] == b.distances[1]);
}

TEST_CASE("csi uncertainty radius and membership") {
    SystemConfig config = default_config();
    FadingSpec spec;
    SUBCASE("zero error keeps the estimate exact") {
        const ChannelSet cs =
            apply_csi_uncertainty(draw_legitimate_channels(config, spec, 3), 0.0);
        for (std::size_t k = 0; k < cs.g_true.size(); ++k) {
            CHECK(cs.epsilon[k] == 0.0);
            CHECK((cs.g_true[k] - cs.g_hat[k]).norm() == 0.0);
        }
    }
    SUBCASE("five percent error sets the documented radius") {
        const ChannelSet base = draw_legitimate_channels(config, spec, 3);
        const ChannelSet cs = apply_csi_uncertainty(base, 0.05);
        for (std::size_t k = 0; k < cs.g_true.size(); ++k) {
            CHECK(cs.epsilon[k] ==
                  doctest::Approx(0.2236 * cs.g_true[k].norm()).epsilon(1e-3));
            CHECK((cs.g_true[k] - cs.g_hat[k]).norm() <= cs.epsilon[k] * (1.0 + 1e-12));
        }
    }
    SUBCASE("negative error rejected") {
        const ChannelSet base = draw_legitimate_channels(config, spec, 3);
        CHECK_THROWS_AS(apply_csi_uncertainty(base, -0.1), std::invalid_argument);
    }
}

TEST_CASE("uncertainty samples stay inside the ball, boundary samples on it") {
    SystemConfig config = default_config();
    FadingSpec spec;
    const ChannelSet cs =
        apply_csi_uncertainty(draw_legitimate_channels(config, spec, 8), 0.05);
    Rng rng(5);
    for (int s = 0; s < 10000; ++s) {
        const CVec dg = sample_uncertainty(cs, 0, rng, false);
        CHECK(dg.norm() <= cs.epsilon[0] * (1.0 + 1e-12));
    }
    for (int s = 0; s < 100; ++s) {
        const CVec dg = sample_uncertainty(cs, 0, rng, true);
        CHECK(dg.norm() == doctest::Approx(cs.epsilon[0]).epsilon(1e-12));
    }
}

TEST_CASE("normalized eavesdropper draws have unit mean power") {
    SystemConfig config = default_config();
    FadingSpec spec;
    const auto draws = draw_eavesdropper_channels(config, spec, 200000, 17);
    double acc = 0.0;
    for (const auto& l : draws) acc += l.squaredNorm();
    CHECK(acc / static_cast<double>(draws.size()) == doctest::Approx(1.0).epsilon(0.005));

    const auto again = draw_eavesdropper_channels(config, spec, 10, 17);
    CHECK((again[3] - draws[3]).norm() == 0.0);
}

TEST_CASE("single-antenna eavesdropper power is exponential") {
    SystemConfig config = default_config();
    config.n_t = 1;
    FadingSpec spec;
    const int n = 100000;
    const auto draws = draw_eavesdropper_channels(config, spec, n, 3);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = draws[static_cast<std::size_t>(i)].squaredNorm();
    std::sort(p.begin(), p.end());
    // Kolmogorov-Smirnov distance against Exp(1).
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-p[static_cast<std::size_t>(i)]);
        const double emp_hi = static_cast<double>(i + 1) / n;
        const double emp_lo = static_cast<double>(i) / n;
        ks = std::max({ks, std::abs(cdf - emp_hi), std::abs(cdf - emp_lo)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("sigma_tilde normalization identity") {
    SystemConfig config = default_config();
    FadingSpec spec;
    const ChannelSet cs = draw_legitimate_channels(config, spec, 4);
    CHECK(cs.l_up_scale == doctest::Approx(config.n_t * path_gain(2.0, spec)));
    CHECK(cs.sigma_tilde_sq ==
          doctest::Approx((config.sigma_ant_sq_w + config.sigma_s_sq_w) / cs.l_up_scale));
}
