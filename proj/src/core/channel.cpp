#include "core/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace swiptsec {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Substream tags; keep channel draws independent of position/validator draws.
enum : std::uint64_t {
    kStreamDistance = 0x01,
    kStreamFading = 0x02,
    kStreamCsiError = 0x03,
    kStreamEaves = 0x04,
};

}  // namespace

void FadingSpec::validate() const {
    if (!(ref_distance_m > 0.0) || !(ref_distance_m < breakpoint_m) ||
        !(ref_distance_m < max_distance_m)) {
        throw std::invalid_argument(
            "FadingSpec: need 0 < ref < breakpoint and ref < max distance");
    }
    if (!(pathloss_exp_near > 0.0) || !(pathloss_exp_far > 0.0)) {
        throw std::invalid_argument("FadingSpec: path loss exponents must be positive");
    }
    if (!(carrier_freq_hz > 0.0)) {
        throw std::invalid_argument("FadingSpec: carrier frequency must be positive");
    }
}

double path_gain(double distance_m, const FadingSpec& spec) {
    spec.validate();
    if (distance_m < spec.ref_distance_m) {
        throw std::invalid_argument("path_gain: distance inside the guard zone");
    }
    const double lambda = kSpeedOfLight / spec.carrier_freq_hz;
    const double fixed = db_to_linear(spec.antenna_gain_db + spec.shadowing_db);
    // Free-space anchor at the reference distance, then log-distance
    // segments continuous at the breakpoint.
    const double g_ref = fixed * std::pow(lambda / (4.0 * M_PI * spec.ref_distance_m), 2.0);
    const double d = distance_m;
    const double bp = spec.breakpoint_m;
    if (d <= bp) {
        return g_ref * std::pow(spec.ref_distance_m / d, spec.pathloss_exp_near);
    }
    const double g_bp = g_ref * std::pow(spec.ref_distance_m / bp, spec.pathloss_exp_near);
    return g_bp * std::pow(bp / d, spec.pathloss_exp_far);
}

namespace {

CVec rician_channel(int n_t, double gain, double k_factor_db,
                    std::uint64_t seed, int receiver_idx) {
    const double k = db_to_linear(k_factor_db);
    const double los_amp = std::sqrt(k / (k + 1.0));
    const double nlos_amp = std::sqrt(1.0 / (k + 1.0));
    const double amp = std::sqrt(gain);
    CVec v(n_t);
    for (int a = 0; a < n_t; ++a) {
        Rng rng(mix_seed(mix_seed(seed, kStreamFading),
                         (static_cast<std::uint64_t>(receiver_idx) << 20) |
                             static_cast<std::uint64_t>(a)));
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        const Complex los = los_amp * Complex(std::cos(phase), std::sin(phase));
        v(a) = amp * (los + nlos_amp * rng.cnormal());
    }
    return v;
}

}  // namespace

ChannelSet draw_legitimate_channels(const SystemConfig& config,
                                    const FadingSpec& spec,
                                    std::uint64_t seed) {
    if (config.k_total < 1) throw std::invalid_argument("draw_legitimate_channels: K >= 1");
    spec.validate();

    ChannelSet cs;
    cs.rng_seed = seed;
    const int k_idle = config.k_total - 1;
    cs.distances.resize(static_cast<std::size_t>(config.k_total));
    for (int r = 0; r < config.k_total; ++r) {
        Rng rng(mix_seed(mix_seed(seed, kStreamDistance), static_cast<std::uint64_t>(r)));
        cs.distances[static_cast<std::size_t>(r)] =
            rng.uniform(spec.ref_distance_m, spec.max_distance_m);
    }

    cs.h = rician_channel(config.n_t, path_gain(cs.distances[0], spec),
                          spec.rician_k_factor_db, seed, 0);
    cs.g_true.resize(static_cast<std::size_t>(k_idle));
    cs.g_hat.resize(static_cast<std::size_t>(k_idle));
    cs.epsilon.assign(static_cast<std::size_t>(k_idle), 0.0);
    for (int k = 0; k < k_idle; ++k) {
        cs.g_true[static_cast<std::size_t>(k)] =
            rician_channel(config.n_t, path_gain(cs.distances[static_cast<std::size_t>(k + 1)], spec),
                           spec.rician_k_factor_db, seed, k + 1);
        cs.g_hat[static_cast<std::size_t>(k)] = cs.g_true[static_cast<std::size_t>(k)];
    }

    cs.l_up_scale = static_cast<double>(config.n_t) * path_gain(spec.ref_distance_m, spec);
    cs.sigma_tilde_sq = (config.sigma_ant_sq_w + config.sigma_s_sq_w) / cs.l_up_scale;
    return cs;
}

namespace {

// Uniform over the unit ball in C^n (real dimension 2n), or over its sphere.
CVec unit_ball_point(int n, Rng& rng, bool boundary) {
    CVec dir(n);
    double norm_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        dir(i) = rng.cnormal();
        norm_sq += std::norm(dir(i));
    }
    dir /= std::sqrt(norm_sq);
    const double radius =
        boundary ? 1.0 : std::pow(rng.next_double_open(), 1.0 / (2.0 * n));
    return radius * dir;
}

}  // namespace

ChannelSet apply_csi_uncertainty(const ChannelSet& channels, double normalized_error) {
    if (!(normalized_error >= 0.0) || normalized_error >= 1.0) {
        throw std::invalid_argument("apply_csi_uncertainty: normalized error in [0, 1)");
    }
    ChannelSet cs = channels;
    Rng rng(mix_seed(mix_seed(channels.rng_seed, kStreamCsiError), 0));
    for (std::size_t k = 0; k < cs.g_true.size(); ++k) {
        const double eps = std::sqrt(normalized_error) * cs.g_true[k].norm();
        cs.epsilon[k] = eps;
        if (eps == 0.0) {
            cs.g_hat[k] = cs.g_true[k];
            continue;
        }
        const CVec dg = eps * unit_ball_point(cs.n_t(), rng, false);
        cs.g_hat[k] = cs.g_true[k] - dg;
    }
    return cs;
}

CVec sample_uncertainty(const ChannelSet& channels, int k, Rng& rng, bool boundary) {
    const double eps = channels.epsilon[static_cast<std::size_t>(k)];
    return eps * unit_ball_point(channels.n_t(), rng, boundary);
}

std::vector<CVec> draw_eavesdropper_channels(const SystemConfig& config,
                                             const FadingSpec& /*spec*/,
                                             int count,
                                             std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("draw_eavesdropper_channels: count >= 1");
    const double per_entry = 1.0 / std::sqrt(static_cast<double>(config.n_t));
    std::vector<CVec> draws(static_cast<std::size_t>(count));
    Rng rng(mix_seed(seed, kStreamEaves));
    for (auto& l : draws) {
        l.resize(config.n_t);
        for (int a = 0; a < config.n_t; ++a) l(a) = per_entry * rng.cnormal();
    }
    return draws;
}

}  // namespace swiptsec
