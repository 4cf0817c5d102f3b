#include "dysonprop/quadrature.hpp"

#include "dysonprop/types.hpp"

#include <cmath>
#include <numbers>

namespace dysonprop {

QuadratureSpec::QuadratureSpec(double lo, double hi, int n, QuadRule r)
    : a(lo), b(hi), npoints(n), rule(r) {
    if (n < 2) throw ValidationError("quadrature needs at least 2 points");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
        throw ValidationError("quadrature interval must be finite with b > a");
    }
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw ValidationError("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double mid = 0.5 * (b + a);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 12; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // P_n'(x) = n (x P_n − P_{n−1}) / (x² − 1)
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 4e-16) break;
        }
        // One more derivative evaluation at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = mid - half * x;
        rule.nodes[hi] = mid + half * x;
        rule.weights[lo] = half * w;
        rule.weights[hi] = half * w;
    }
    return rule;
}

QuadratureRule trapezoid(int n, double a, double b) {
    if (n < 2) throw ValidationError("trapezoid: n must be at least 2");
    QuadratureRule rule;
    const double h = (b - a) / (n - 1);
    for (int k = 0; k < n; ++k) {
        rule.nodes.push_back(a + h * k);
        rule.weights.push_back((k == 0 || k == n - 1) ? 0.5 * h : h);
    }
    return rule;
}

QuadratureRule make_rule(const QuadratureSpec& spec) {
    return spec.rule == QuadRule::gauss_legendre ? gauss_legendre(spec.npoints, spec.a, spec.b)
                                                 : trapezoid(spec.npoints, spec.a, spec.b);
}

}  // namespace dysonprop
