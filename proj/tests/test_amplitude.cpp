#include "dysonprop/amplitude.hpp"
#include "dysonprop/oracle.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

using namespace dysonprop;

namespace {

LatticeSpec random_lattice(std::size_t m, std::uint64_t seed, double h) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LatticeSpec spec;
    spec.points = m;
    spec.spacing = h;
    spec.mass = 0.7;
    spec.x0 = -1.0;
    for (std::size_t n = 0; n < m; ++n) {
        spec.v0.push_back(u(rng));
        spec.v1.push_back(0.3 * u(rng));
    }
    return spec;
}

LatticeSpec free_lattice(std::size_t m, double h, double mass) {
    LatticeSpec spec;
    spec.points = m;
    spec.spacing = h;
    spec.mass = mass;
    spec.v0.assign(m, 0.0);
    spec.v1.assign(m, 0.0);
    return spec;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("lattice validation and files") {
    LatticeSpec bad = free_lattice(4, 0.5, 1.0);
    bad.points = 1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = free_lattice(4, 0.0, 1.0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = free_lattice(4, 0.5, -1.0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = free_lattice(4, 0.5, 1.0);
    bad.v1.pop_back();
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = free_lattice(4, 0.5, 1.0);
    bad.v0[2] = std::nan("");
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    const LatticeSpec spec = random_lattice(5, 3, 0.25);
    const LatticeSpec back = load_lattice(emit_lattice(spec));
    CHECK(back.points == spec.points);
    CHECK(back.spacing == spec.spacing);
    CHECK(back.mass == spec.mass);
    CHECK(back.x0 == spec.x0);
    CHECK(back.v0 == spec.v0);
    CHECK(back.v1 == spec.v1);
    CHECK(spec.x(2) == -0.5);

    CHECK_THROWS_AS(load_lattice("{"), ParseError);
    CHECK_THROWS_AS(load_lattice(R"({"M": 2, "h": 1, "v0": [0, 0]})"), ParseError);
    CHECK_THROWS_AS(load_lattice(R"({"M": 3, "h": 1, "v0": [0, 0], "v1": [0, 0]})"), ValidationError);
    CHECK_THROWS_AS(load_lattice(R"({"M": 2, "h": 1, "v0": [0, 0], "v1": [0, 0], "bc": "periodic"})"),
                    ValidationError);
    CHECK_THROWS_AS(load_lattice_file("/nonexistent/lattice.json"), ParseError);
}

TEST_CASE("free lattice spectrum against the closed form") {
    const std::size_t m = 8;
    const double h = 0.5, mass = 2.0;
    const LatticeSystem sys = build_lattice(free_lattice(m, h, mass));
    for (std::size_t k = 1; k <= m; ++k) {
        const double closed = (1.0 - std::cos(k * std::numbers::pi / (m + 1))) / (mass * h * h);
        CHECK(std::abs(sys.model.energy(k - 1) - closed) < 1e-12);
    }
    CHECK(max_abs(sys.model.h1()) == 0.0);
}

TEST_CASE("basis orthonormality and the rotated perturbation") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const LatticeSpec spec = random_lattice(4 + seed, seed, 0.3);
        const LatticeSystem sys = build_lattice(spec);
        const auto m = static_cast<Eigen::Index>(sys.size());
        const RealMatrix gram = sys.h() * sys.basis.transpose() * sys.basis;
        CHECK((gram - RealMatrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10);

        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = 0; b < m; ++b) {
                double direct = 0.0;
                for (Eigen::Index n = 0; n < m; ++n) {
                    direct += sys.h() * sys.basis(n, a) * spec.v1[static_cast<std::size_t>(n)] * sys.basis(n, b);
                }
                CHECK(std::abs(sys.model.h1()(a, b) - direct) < 1e-12);
            }
        }
        // The basis diagonalizes H₀.
        const RealMatrix h0 = spec.h0();
        const RealMatrix rotated = sys.h() * sys.basis.transpose() * h0 * sys.basis;
        for (Eigen::Index g = 0; g < m; ++g) {
            CHECK(std::abs(rotated(g, g) - sys.model.energy(static_cast<std::size_t>(g))) < 1e-12);
        }
    }
}

TEST_CASE("unperturbed amplitude") {
    const LatticeSystem sys = build_lattice(random_lattice(6, 9, 0.4));
    const auto m = static_cast<Eigen::Index>(sys.size());
    for (std::size_t b = 0; b < sys.size(); ++b) {
        for (std::size_t a = 0; a < sys.size(); ++a) {
            const double expected = a == b ? 1.0 / sys.h() : 0.0;
            CHECK(std::abs(k0_amplitude(sys, b, 2.0, a, 2.0) - expected) < 1e-12);
        }
    }
    // Unitarity rows: h Σ_n K₀(n,a) conj(K₀(n,b)) = δ/h.
    const Matrix k0 = k0_matrix(sys, 1.3);
    const Matrix rows = sys.h() * k0.adjoint() * k0;
    CHECK(max_abs(rows - Matrix::Identity(m, m) / sys.h()) < 1e-12);
    CHECK(std::abs(k0(2, 4) - k0_amplitude(sys, 2, 1.8, 4, 0.5)) < 1e-15);

    // Against the matrix exponential of the lattice H₀ itself.
    const LatticeSystem free = build_lattice(free_lattice(8, 0.5, 1.0));
    const Matrix ref = oracle::exact_evolution(free.spec.h0().cast<cplx>(), 0.9) / free.h();
    CHECK(max_abs(k0_matrix(free, 0.9) - ref) < 1e-12);

    CHECK_THROWS_AS(k0_amplitude(sys, 0, 0.0, 0, 1.0), ValidationError);
    CHECK_THROWS_AS(k0_amplitude(sys, 6, 1.0, 0, 0.0), ValidationError);
}

TEST_CASE("free propagator composes") {
    const LatticeSystem sys = build_lattice(random_lattice(7, 4, 0.5));
    const Matrix k_ts = k0_matrix(sys, 0.6);
    const Matrix k_ss = k0_matrix(sys, 0.5);
    CHECK(max_abs(sys.h() * k_ts * k_ss - k0_matrix(sys, 1.1)) <= 1e-10);
}

TEST_CASE("exact and truncated amplitudes") {
    const LatticeSystem sys = build_lattice(random_lattice(6, 2, 0.5));
    const auto m = static_cast<Eigen::Index>(sys.size());
    const Matrix exact = k_exact_matrix(sys, 0.0);
    CHECK(max_abs(exact - Matrix::Identity(m, m) / sys.h()) < 1e-12);

    const Matrix ke = k_exact_matrix(sys, 1.2);
    CHECK(max_abs(sys.h() * ke.adjoint() * ke - Matrix::Identity(m, m) / sys.h()) < 1e-12);
    CHECK(std::abs(k_exact(sys, 1, 1.2, 3, 0.0) - ke(1, 3)) < 1e-15);

    // Reciprocity for a real-symmetric Hamiltonian, and conjugation under time reversal.
    const Matrix kt = k_truncated_matrix(sys, TruncationSpec(3), 1.2);
    CHECK(max_abs(ke - ke.transpose()) < 1e-12);
    CHECK(max_abs(kt - kt.transpose()) < 1e-12);
    CHECK(max_abs(k_exact_matrix(sys, -1.2) - ke.conjugate()) < 1e-12);
    CHECK(max_abs(k_truncated_matrix(sys, TruncationSpec(3), -1.2) - kt.conjugate()) < 1e-12);
    CHECK(std::abs(k_truncated_direct(sys, TruncationSpec(3), 0, 1.2, 5, 0.0) - kt(0, 5)) < 1e-15);

    CHECK_THROWS_AS(k_exact(sys, 0, 0.0, 0, 1.0), ValidationError);
    CHECK_THROWS_AS(k_truncated_direct(sys, TruncationSpec(1), 0, 0.0, 0, 1.0), ValidationError);
}

TEST_CASE("free reduction") {
    LatticeSpec spec = random_lattice(6, 8, 0.5);
    spec.v1.assign(6, 0.0);
    const LatticeSystem sys = build_lattice(spec);
    const Matrix k0 = k0_matrix(sys, 1.0);
    CHECK(max_abs(k_exact_matrix(sys, 1.0) - k0) <= 1e-12);
    CHECK(max_abs(k_truncated_matrix(sys, TruncationSpec(2), 1.0) - k0) <= 1e-12);
    CHECK(max_abs(k_via_relation_matrix(sys, TruncationSpec(2), 1e-2, 1.0) - k0) <= 1e-12);

    // C = δ(x_b − y_b) δ(y_a − x_a) on the lattice.
    const RelationKernel kernel(sys, TruncationSpec(2), 1e-2);
    for (std::size_t xb : {0u, 3u}) {
        for (std::size_t yb : {0u, 3u}) {
            for (std::size_t xa : {1u, 5u}) {
                for (std::size_t ya : {1u, 5u}) {
                    const double expected = (xb == yb && xa == ya) ? 1.0 / (sys.h() * sys.h()) : 0.0;
                    CHECK(std::abs(kernel(xb, yb, xa, ya) - expected) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("order zero relation returns the free amplitude for any potential") {
    const LatticeSystem sys = build_lattice(random_lattice(6, 10, 0.5));
    const Matrix k0 = k0_matrix(sys, 0.7);
    CHECK(max_abs(k_via_relation_matrix(sys, TruncationSpec(0), 1e-2, 0.7) - k0) <= 1e-12);
    CHECK(std::abs(k_via_relation(sys, TruncationSpec(0), 1e-2, 2, 0.7, 4, 0.0) - k0(2, 4)) <= 1e-12);
}

TEST_CASE("kernel slots") {
    const LatticeSystem sys = build_lattice(default_well_lattice(5, 0.2));
    const RelationKernel kernel(sys, TruncationSpec(2), 1e-2, Sign::minus);
    CHECK(kernel.slots() == 3);
    CHECK(kernel.eps() == 1e-2);
    CHECK(kernel.sign() == Sign::minus);
    const cplx total = kernel(1, 2, 3, 4);
    const cplx parts = kernel.slot(1, 1, 2, 3, 4) + kernel.slot(2, 1, 2, 3, 4) + kernel.slot(3, 1, 2, 3, 4);
    CHECK(std::abs(total - parts) < 1e-14);
    CHECK(std::abs(c_kernel(sys, TruncationSpec(2), 1e-2, 1, 2, 3, 4, Sign::minus) - total) < 1e-15);
    CHECK_THROWS_AS(kernel.slot(0, 0, 0, 0, 0), ValidationError);
    CHECK_THROWS_AS(kernel.slot(4, 0, 0, 0, 0), ValidationError);
    CHECK_THROWS_AS(RelationKernel(sys, TruncationSpec(1), 0.0), ValidationError);
    CHECK_THROWS_AS(c_kernel(sys, TruncationSpec(1), 1e-2, 0, 0, 0, 9), ValidationError);
}

TEST_CASE("relation assembly matches the truncated series") {
    const LatticeSystem sys = build_lattice(scale_perturbation(default_well_lattice(), 0.5));
    for (int n : {1, 2}) {
        for (Sign s : {Sign::plus, Sign::minus}) {
            const Matrix direct = k_truncated_matrix(sys, TruncationSpec(n), 1.0);
            const Matrix raw = k_via_relation_matrix(sys, TruncationSpec(n), 1e-2, 1.0, s);
            const Matrix ext = k_via_relation_extrapolated(sys, TruncationSpec(n), 1e-2, 1.0, s);
            CHECK(max_abs(ext - direct) <= 1e-4);
            CHECK(max_abs(ext - direct) < max_abs(raw - direct));
        }
    }
    const Matrix ext = k_via_relation_extrapolated(sys, TruncationSpec(1), 1e-2, 1.0);
    CHECK(std::abs(k_via_relation(sys, TruncationSpec(1), 1e-2, 0, 1.0, 3, 0.0) -
                   k_via_relation_matrix(sys, TruncationSpec(1), 1e-2, 1.0)(0, 3)) < 1e-14);
    CHECK(std::isfinite(ext.cwiseAbs().maxCoeff()));
}

TEST_CASE("truncation error scales with the coupling") {
    const LatticeSpec base = default_well_lattice();
    for (int n : {1, 2}) {
        double err[2];
        for (int k = 0; k < 2; ++k) {
            const LatticeSystem sys = build_lattice(scale_perturbation(base, k == 0 ? 0.1 : 0.05));
            err[k] = max_abs(k_truncated_matrix(sys, TruncationSpec(n), 1.0) - k_exact_matrix(sys, 1.0));
        }
        const double target = std::ldexp(1.0, n + 1);
        CHECK(std::abs(err[0] / err[1] / target - 1.0) <= 0.25);
    }
}

TEST_CASE("default well") {
    const LatticeSpec w = default_well_lattice(6, 2.0);
    CHECK(w.points == 6);
    CHECK(w.v1[2] == w.v1[3]);
    CHECK(w.v1[0] == w.v1[5]);
    CHECK(w.v1[2] < w.v1[0]);
    CHECK(w.v1[2] >= -2.0);
    const LatticeSpec s = scale_perturbation(w, 0.5);
    CHECK(s.v1[2] == 0.5 * w.v1[2]);
}
