// quadrature.hpp — one-dimensional rules on finite intervals.

#pragma once

#include <vector>

namespace dysonprop {

enum class QuadRule { gauss_legendre, trapezoid };

struct QuadratureSpec {
    double a{0.0};
    double b{1.0};
    int npoints{2};
    QuadRule rule{QuadRule::gauss_legendre};

    QuadratureSpec(double lo, double hi, int n, QuadRule r = QuadRule::gauss_legendre);
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss–Legendre nodes/weights on [a, b]; Newton iteration on P_n from Chebyshev-like guesses.
QuadratureRule gauss_legendre(int n, double a, double b);

QuadratureRule trapezoid(int n, double a, double b);

QuadratureRule make_rule(const QuadratureSpec& spec);

}  // namespace dysonprop
