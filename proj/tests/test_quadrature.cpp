#include "dysonprop/quadrature.hpp"
#include "dysonprop/types.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace dysonprop;

namespace {

double integrate(const QuadratureRule& rule, auto&& f) {
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(rule.nodes[k]);
    return sum;
}

}  // namespace

TEST_CASE("Gauss-Legendre is exact through degree 2n-1") {
    for (int n : {1, 2, 3, 5, 8, 13}) {
        const QuadratureRule rule = gauss_legendre(n, -1.0, 2.0);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            const double exact = (std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
            CHECK(std::abs(integrate(rule, [&](double x) { return std::pow(x, p); }) - exact) <=
                  1e-13 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("Gauss-Legendre nodes are ordered and interior, weights sum to the length") {
    const QuadratureRule rule = gauss_legendre(8000, 0.0, 3.0);
    double total = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        CHECK(rule.nodes[k] > 0.0);
        CHECK(rule.nodes[k] < 3.0);
        if (k) CHECK(rule.nodes[k] > rule.nodes[k - 1]);
        CHECK(rule.weights[k] > 0.0);
        total += rule.weights[k];
    }
    CHECK(std::abs(total - 3.0) < 1e-12);
}

TEST_CASE("oscillatory integral") {
    const QuadratureRule rule = gauss_legendre(200, 0.0, 50.0);
    const double got = integrate(rule, [](double x) { return std::cos(3.0 * x) * std::exp(-0.1 * x); });
    // ∫₀^L e^{−ax}cos(bx) = [a − e^{−aL}(a cos bL − b sin bL)]/(a² + b²)
    const double a = 0.1, b = 3.0, L = 50.0;
    const double exact = (a - std::exp(-a * L) * (a * std::cos(b * L) - b * std::sin(b * L))) / (a * a + b * b);
    CHECK(std::abs(got - exact) < 1e-12);
}

TEST_CASE("trapezoid rule") {
    const QuadratureRule rule = trapezoid(101, 0.0, 1.0);
    CHECK(rule.nodes.front() == 0.0);
    CHECK(rule.nodes.back() == 1.0);
    CHECK(std::abs(integrate(rule, [](double x) { return x; }) - 0.5) < 1e-15);
    // Error of x² is h²/6 for unit length.
    CHECK(std::abs(integrate(rule, [](double x) { return x * x; }) - 1.0 / 3.0 - 1e-4 / 6.0) < 1e-14);
}

TEST_CASE("quadrature spec validation") {
    CHECK_THROWS_AS(QuadratureSpec(0.0, 1.0, 1), ValidationError);
    CHECK_THROWS_AS(QuadratureSpec(1.0, 1.0, 10), ValidationError);
    CHECK_THROWS_AS(QuadratureSpec(0.0, INFINITY, 10), ValidationError);
    const QuadratureRule r = make_rule(QuadratureSpec(0.0, 2.0, 4, QuadRule::trapezoid));
    CHECK(r.nodes.size() == 4);
    CHECK(make_rule(QuadratureSpec(0.0, 2.0, 4)).nodes.size() == 4);
}
