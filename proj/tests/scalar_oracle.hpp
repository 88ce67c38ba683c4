#pragma once

// Brute-force reference for the averaged scalar DDE
//   u' = p u(t - tau) e^{-u(t - tau)} - delta u,   p = e^{c0} delta,
// whose linearisation at u* = c0 has characteristic function
//   F(mu) = mu + delta - delta (1 - c0) e^{-mu tau}.
// Nothing here uses the closed-form Hopf data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

namespace oracle {

using cd = std::complex<double>;

inline cd char_fn(cd mu, double c0, double delta, double tau) {
    return mu + delta - delta * (1.0 - c0) * std::exp(-mu * tau);
}

inline std::optional<cd> newton_root(cd mu, double c0, double delta, double tau) {
    for (int it = 0; it < 100; ++it) {
        const cd f = char_fn(mu, c0, delta, tau);
        const cd df = 1.0 + tau * delta * (1.0 - c0) * std::exp(-mu * tau);
        const cd step = f / df;
        mu -= step;
        if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) return std::nullopt;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(mu))) return mu;
    }
    return std::nullopt;
}

// Rightmost root found from a grid of starting points in the upper half plane.
inline cd rightmost_root(double c0, double delta, double tau) {
    cd best(-1e300, 0.0);
    for (int i = 0; i < 17; ++i) {
        for (int j = 0; j < 17; ++j) {
            const cd start(-3.0 * delta + 4.0 * delta * i / 16.0, 0.05 + 5.0 * delta * j / 16.0);
            const auto root = newton_root(start, c0, delta, tau);
            if (root && std::abs(char_fn(*root, c0, delta, tau)) < 1e-10 && root->real() > best.real()) best = *root;
        }
    }
    return best;
}

// First delay at which the rightmost root crosses the imaginary axis, by
// scanning tau and then bisecting on the sign of its real part.
inline double hopf_delay(double c0, double delta) {
    double lo = 1e-3, hi = lo;
    while (rightmost_root(c0, delta, hi).real() < 0.0) {
        lo = hi;
        hi += 0.05;
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rightmost_root(c0, delta, mid).real() < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// d Re mu / d tau at tau0 by centred differences of the tracked root.
inline double crossing_speed(double c0, double delta, double tau0, double step) {
    const cd start = rightmost_root(c0, delta, tau0);
    const auto plus = newton_root(start, c0, delta, tau0 + step);
    const auto minus = newton_root(start, c0, delta, tau0 - step);
    return (plus->real() - minus->real()) / (2.0 * step);
}

}  // namespace oracle
