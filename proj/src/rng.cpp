#include "osos/rng.hpp"

namespace osos {

// Poisson sampling: Knuth's product method below lambda = 10, Hormann's
// PTRD transformed rejection above. Both consume only uniforms from this
// stream, keeping draws deterministic for a given (seed, call sequence).
static long poisson_knuth(Rng& rng, double lambda) {
    const double limit = std::exp(-lambda);
    long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.next_unit();
    } while (p > limit);
    return k - 1;
}

static long poisson_ptrd(Rng& rng, double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        double u = rng.next_unit() - 0.5;
        double v = rng.next_unit();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * loglam - lambda - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<long>(kf);
    }
}

long Rng::poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 10.0) return poisson_knuth(*this, lambda);
    return poisson_ptrd(*this, lambda);
}

}  // namespace osos
