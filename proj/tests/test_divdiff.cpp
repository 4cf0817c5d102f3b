#include "dysonprop/divdiff.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace dysonprop;
using Float50 = boost::multiprecision::cpp_bin_float_50;

namespace {

// Partial-fraction sum for e^{−iEt} over distinct real nodes, carried at 50 digits.
cplx phase_oracle_50(const std::vector<double>& nodes, double t) {
    Float50 re = 0, im = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Float50 zi = nodes[i];
        Float50 denom = 1;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (j != i) denom *= zi - Float50(nodes[j]);
        }
        const Float50 arg = zi * Float50(t);
        re += cos(arg) / denom;
        im -= sin(arg) / denom;
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

cplx f(double z, double t) { return std::exp(-kI * z * t); }

}  // namespace

TEST_CASE("low-order closed forms") {
    const double t = 1.3;
    CHECK(std::abs(dd_phase(NodeList{0.7}, PhaseSpec(t)) - f(0.7, t)) < 1e-15);
    CHECK(std::abs(dd_phase(NodeList{0.2, 1.1}, PhaseSpec(t)) - (f(0.2, t) - f(1.1, t)) / (0.2 - 1.1)) < 1e-15);

    // Confluent values are Taylor coefficients: f[z,z] = f'(z), f[z,z,z] = f''(z)/2.
    const cplx d1 = -kI * t * f(0.4, t);
    const cplx d2 = (-kI * t) * (-kI * t) * f(0.4, t) / 2.0;
    CHECK(std::abs(dd_phase(NodeList{0.4, 0.4}, PhaseSpec(t)) - d1) < 1e-14);
    CHECK(std::abs(dd_phase(NodeList{0.4, 0.4, 0.4}, PhaseSpec(t)) - d2) < 1e-14);
}

TEST_CASE("near-coincident nodes against a 50-digit partial-fraction sum") {
    const std::vector<double> nodes{1.0, 1.0 + 1e-9, 2.0};
    const cplx value = dd_phase(NodeList::from_real(nodes), PhaseSpec(1.0));
    CHECK(std::abs(value - phase_oracle_50(nodes, 1.0)) <= 1e-10);

    for (double gap : {1e-1, 1e-3, 1e-6, 1e-9, 1e-12}) {
        for (double t : {0.5, 1.0, 3.0}) {
            const std::vector<double> z{-0.3, -0.3 + gap, 0.8, 0.8 + 2 * gap};
            const cplx got = dd_phase(NodeList::from_real(z), PhaseSpec(t));
            CHECK(std::abs(got - phase_oracle_50(z, t)) <= 1e-10);
        }
    }
}

TEST_CASE("well-separated nodes against a 50-digit partial-fraction sum") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> z(1 + trial % 6);
        for (double& x : z) x = u(rng);
        const double t = 0.1 + 2.9 * (trial % 7) / 6.0;
        const cplx got = dd_phase(NodeList::from_real(z), PhaseSpec(t));
        CHECK(std::abs(got - phase_oracle_50(z, t)) <= 1e-9);
    }
}

TEST_CASE("permutation symmetry") {
    std::vector<double> z{0.3, -1.2, 0.3001, 2.0, 0.3, 1.1};
    const cplx ref = dd_phase(NodeList::from_real(z), PhaseSpec(1.7));
    std::sort(z.begin(), z.end());
    int perms = 0;
    do {
        if (++perms % 37 != 0) continue;
        CHECK(std::abs(dd_phase(NodeList::from_real(z), PhaseSpec(1.7)) - ref) < 1e-13);
    } while (std::next_permutation(z.begin(), z.end()));
}

TEST_CASE("divided-difference recurrence") {
    const std::vector<double> z{-1.0, -0.2, 0.5, 1.4, 2.1};
    const double t = 0.9;
    for (std::size_t n = 2; n <= z.size(); ++n) {
        const std::vector<double> all(z.begin(), z.begin() + n);
        const std::vector<double> head(z.begin(), z.begin() + n - 1);
        const std::vector<double> tail(z.begin() + 1, z.begin() + n);
        const cplx lhs = dd_phase(NodeList::from_real(all), PhaseSpec(t));
        const cplx rhs = (dd_phase(NodeList::from_real(tail), PhaseSpec(t)) -
                          dd_phase(NodeList::from_real(head), PhaseSpec(t))) /
                         (all.back() - all.front());
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
}

TEST_CASE("continuity across the direct/matrix switch") {
    const double t = 1.0;
    const double threshold = divdiff::direct_gap_threshold(t);
    for (double gap : {threshold * 0.999, threshold * 1.001}) {
        const std::vector<double> z{0.0, gap, 1.0};
        CHECK(std::abs(dd_phase(NodeList::from_real(z), PhaseSpec(t)) - phase_oracle_50(z, t)) < 1e-13);
    }
    CHECK(divdiff::direct_gap_threshold(0.5) == 0.1);
    CHECK(divdiff::direct_gap_threshold(-4.0) == 0.025);
}

TEST_CASE("zero time") {
    CHECK(dd_phase(NodeList{0.5}, PhaseSpec(0.0)) == cplx(1.0));
    CHECK(dd_phase(NodeList{0.5, 1.0}, PhaseSpec(0.0)) == cplx(0.0));
    CHECK(dd_phase(NodeList{0.5, 0.5, 0.5}, PhaseSpec(0.0)) == cplx(0.0));
}

TEST_CASE("large confluent order stays finite") {
    const cplx v = dd_phase(NodeList{2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0}, PhaseSpec(3.0));
    // f^{(7)}/7! = (−it)^7 e^{−izt}/7!
    const cplx expected = std::pow(-kI * 3.0, 7) * f(2.0, 3.0) / 5040.0;
    CHECK(std::abs(v - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("complex-shifted nodes") {
    // f[z₁,z₂] for z = E ± iε still equals the difference quotient.
    const std::vector<cplx> z{{0.5, 0.01}, {1.5, -0.02}};
    const cplx expected = (std::exp(-kI * z[0] * 2.0) - std::exp(-kI * z[1] * 2.0)) / (z[0] - z[1]);
    CHECK(std::abs(dd_phase(NodeList(z), PhaseSpec(2.0)) - expected) < 1e-14);
}

TEST_CASE("table matches prefixes") {
    const NodeList nodes{0.1, 0.1, 0.7, 1.9, 0.12};
    const std::vector<cplx> table = dd_phase_table(nodes, PhaseSpec(1.4));
    REQUIRE(table.size() == nodes.size());
    for (std::size_t k = 1; k <= nodes.size(); ++k) {
        std::vector<cplx> prefix(nodes.span().begin(), nodes.span().begin() + k);
        CHECK(std::abs(table[k - 1] - dd_phase(NodeList(prefix), PhaseSpec(1.4))) < 1e-13);
    }
}

TEST_CASE("monomial identities in floating point") {
    const NodeList z{-3.0, 1.0, 2.0, 5.0};
    for (unsigned K = 0; K < 3; ++K) CHECK(std::abs(dd_monomial(z, K)) < 1e-13);
    CHECK(std::abs(dd_monomial(z, 3) - 1.0) < 1e-13);
    CHECK(std::abs(dd_monomial(z, 4) - 5.0) < 1e-12);  // sum of nodes

    // Coincident nodes: h_{K−n+1}; z²[2,2] = 4, z³[2,2] = 12.
    CHECK(dd_monomial(NodeList{2.0, 2.0}, 2) == cplx(4.0));
    CHECK(dd_monomial(NodeList{2.0, 2.0}, 3) == cplx(12.0));
    CHECK(dd_monomial(NodeList{1.0, 2.0, 2.0}, 1) == cplx(0.0));
}

TEST_CASE("denominator products") {
    const NodeList z{1.0, 2.0, 4.0};
    CHECK(denominator_d(z, 1) == cplx(3.0));
    CHECK(denominator_d(z, 2) == cplx(2.0));
    CHECK(denominator_d(z, 3) == cplx(6.0));
    CHECK_THROWS_AS(denominator_d(NodeList{1.0, 1.0 + 1e-10}, 1), SingularityError);
    CHECK_THROWS_AS(denominator_d(z, 0), ValidationError);
    CHECK_THROWS_AS(denominator_d(z, 4), ValidationError);
}

TEST_CASE("exact mode") {
    const std::vector<std::int64_t> z{-10, -3, 0, 4, 9, 10};
    CHECK(denominator_d_exact(z, 1) == BigInt(-7 * 10 * 14 * 19 * 20));
    for (unsigned K = 0; K < 5; ++K) CHECK(dd_monomial_exact(z, K) == 0);
    CHECK(dd_monomial_exact(z, 5) == 1);
    CHECK(dd_monomial_exact(z, 6) == 10);
    const std::vector<std::int64_t> dup{1, 1};
    CHECK_THROWS_AS(dd_monomial_exact(dup, 1), SingularityError);
}

TEST_CASE("node validation") {
    CHECK_THROWS_AS(NodeList(std::vector<cplx>{}), ValidationError);
    CHECK_THROWS_AS(NodeList({0.0, std::numeric_limits<double>::infinity()}), ValidationError);
    CHECK_THROWS_AS(PhaseSpec(std::nan("")), ValidationError);
    CHECK(NodeList{0.0, 0.5, 2.0}.min_gap() == 0.5);
}
