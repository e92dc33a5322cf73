#include "core/chance.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace swiptsec {

ChanceBound chance_quantile(int n_t, double kappa, int j) {
    if (n_t < 1) throw std::invalid_argument("chance_quantile: n_t >= 1");
    if (j < 1) throw std::invalid_argument("chance_quantile: j >= 1");
    if (!(kappa >= 0.0) || kappa >= 1.0) {
        throw std::invalid_argument("chance_quantile: kappa must lie in [0, 1)");
    }
    ChanceBound b;
    b.n_t = n_t;
    b.kappa = kappa;
    b.j = j;
    if (kappa == 0.0) {
        b.dropped = true;
        return b;
    }
    const double p = std::pow(kappa, 1.0 / static_cast<double>(j));
    const boost::math::gamma_distribution<double> dist(
        static_cast<double>(n_t), 1.0 / static_cast<double>(n_t));
    b.quantile_coeff = 1.0 / boost::math::quantile(dist, p);
    return b;
}

ChanceBound chance_quantile_scaled(int n_t, double kappa, int j, double gamma_tol,
                                   double sigma_tilde_sq) {
    ChanceBound b = chance_quantile(n_t, kappa, j);
    if (!b.dropped) b.rhs_scale = b.quantile_coeff * gamma_tol * sigma_tilde_sq;
    return b;
}

}  // namespace swiptsec
