#include "dysonprop/oracle.hpp"

#include "dysonprop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dysonprop::oracle {

namespace {

constexpr int kSweepBudget = 30;

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (Eigen::Index q = 0; q < a.cols(); ++q) {
        for (Eigen::Index p = 0; p < a.rows(); ++p) {
            if (p != q) sum += std::norm(a(p, q));
        }
    }
    return std::sqrt(sum);
}

// One complex Jacobi rotation annihilating a(p, q). J = diag(1, e^{−iφ}) · R(θ) on (p, q).
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
    const cplx apq = a(p, q);
    const double mag = std::abs(apq);
    const cplx phase = std::conj(apq) / mag;  // e^{−iφ}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double theta = (aqq - app) / (2.0 * mag);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx akp = a(k, p);
        const cplx akq = a(k, q);
        a(k, p) = c * akp - s * phase * akq;
        a(k, q) = s * akp + c * phase * akq;
    }
    const cplx cphase = std::conj(phase);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx apk = a(p, k);
        const cplx aqk = a(q, k);
        a(p, k) = c * apk - s * cphase * aqk;
        a(q, k) = s * apk + c * cphase * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();

    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx vkp = v(k, p);
        const cplx vkq = v(k, q);
        v(k, p) = c * vkp - s * phase * vkq;
        v(k, q) = s * vkp + c * phase * vkq;
    }
}

}  // namespace

EigenDecomposition hermitian_eigendecomposition(const Matrix& input) {
    if (input.rows() != input.cols() || input.rows() == 0) {
        throw ValidationError("eigendecomposition: matrix must be square and nonempty");
    }
    if (!input.allFinite()) throw ValidationError("eigendecomposition: non-finite entries");
    const double scale = std::max(1.0, input.cwiseAbs().maxCoeff());
    if ((input - input.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw ValidationError("eigendecomposition: matrix is not Hermitian");
    }

    const Eigen::Index n = input.rows();
    Matrix a = 0.5 * (input + input.adjoint());
    Matrix v = Matrix::Identity(n, n);
    const double threshold = 1e-14 * a.norm();

    int sweep = 0;
    while (off_diagonal_norm(a) > threshold) {
        if (++sweep > kSweepBudget) {
            throw SolverError("eigendecomposition: no convergence after 30 sweeps");
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) > std::numeric_limits<double>::min()) rotate(a, v, p, q);
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return a(x, x).real() < a(y, y).real();
    });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src).real();
        Vector col = v.col(src);
        Eigen::Index big = 0;
        for (Eigen::Index r = 1; r < n; ++r) {
            if (std::abs(col(r)) > std::abs(col(big)) * (1.0 + 1e-12)) big = r;
        }
        const cplx ph = std::conj(col(big)) / std::abs(col(big));
        col *= ph;
        col(big) = std::abs(col(big));
        out.vectors.col(k) = col;
    }
    return out;
}

Matrix exact_evolution(const Matrix& h, double t) {
    const EigenDecomposition eig = hermitian_eigendecomposition(h);
    const Eigen::Index n = h.rows();
    Vector phases(n);
    for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::exp(-kI * eig.values(k) * t);
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

OperatorMatrix exact_evolution(const SpectralModel& model, double t) {
    OperatorMatrix out;
    out.entries = exact_evolution(model.hamiltonian(), t);
    out.kind = OperatorKind::propagator;
    out.params.t = t;
    return out;
}

OperatorMatrix dyson_term_quadrature(const SpectralModel& model, int l, double t, int npoints) {
    if (l < 0 || l > 3) throw ValidationError("dyson_term_quadrature: order must be in [0, 3]");
    if (npoints < 16) throw ValidationError("dyson_term_quadrature: npoints must be >= 16");

    const auto d = static_cast<Eigen::Index>(model.dim());
    const auto& energies = model.energies();
    auto free = [&](double tau) {
        Vector ph(d);
        for (Eigen::Index g = 0; g < d; ++g) {
            ph(g) = std::exp(-kI * energies[static_cast<std::size_t>(g)] * tau);
        }
        return ph;
    };

    OperatorMatrix out;
    out.kind = OperatorKind::propagator;
    out.params.t = t;
    out.params.order = l;
    if (l == 0) {
        out.entries = free(t).asDiagonal();
        return out;
    }

    const QuadratureRule rule = gauss_legendre(npoints, 0.0, 1.0);
    const Matrix& h1 = model.h1();
    Matrix sum = Matrix::Zero(d, d);

    // left = e^{−iH₀(t−t₁)}H₁ ⋯ e^{−iH₀(t_{k−1}−t_k)}H₁ after level k.
    auto recurse = [&](auto&& self, int level, double t_prev, const Matrix& left,
                       double weight) -> void {
        if (level > l) {
            sum += weight * (left * free(t_prev).asDiagonal());
            return;
        }
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double tk = t_prev * rule.nodes[q];
            const Matrix next = left * free(t_prev - tk).asDiagonal() * h1;
            self(self, level + 1, tk, next, weight * rule.weights[q] * t_prev);
        }
    };
    recurse(recurse, 1, t, Matrix::Identity(d, d), 1.0);

    cplx prefactor = 1.0;
    for (int k = 0; k < l; ++k) prefactor *= -kI;
    out.entries = prefactor * sum;
    return out;
}

Matrix linear_solve(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols()) throw ValidationError("linear_solve: matrix must be square");
    if (b.rows() != a.rows()) throw ValidationError("linear_solve: right-hand side mismatch");
    const Eigen::Index n = a.rows();
    Matrix lu = a;
    Matrix x = b;
    const double tiny = std::numeric_limits<double>::epsilon() * static_cast<double>(n) *
                        std::max(a.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = k;
        for (Eigen::Index r = k + 1; r < n; ++r) {
            if (std::abs(lu(r, k)) > std::abs(lu(pivot, k))) pivot = r;
        }
        if (!(std::abs(lu(pivot, k)) > tiny)) {
            throw SolverError("linear_solve: matrix is singular to working precision",
                              std::numeric_limits<double>::infinity());
        }
        if (pivot != k) {
            lu.row(k).swap(lu.row(pivot));
            x.row(k).swap(x.row(pivot));
        }
        for (Eigen::Index r = k + 1; r < n; ++r) {
            const cplx m = lu(r, k) / lu(k, k);
            if (m == cplx(0.0)) continue;
            lu.row(r).tail(n - k) -= m * lu.row(k).tail(n - k);
            x.row(r) -= m * x.row(k);
        }
    }
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        for (Eigen::Index c = k + 1; c < n; ++c) x.row(k) -= lu(k, c) * x.row(c);
        x.row(k) /= lu(k, k);
    }
    return x;
}

double condition_estimate(const Matrix& a) {
    const Eigen::Index n = a.rows();
    auto norm1 = [](const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); };
    try {
        return norm1(a) * norm1(linear_solve(a, Matrix::Identity(n, n)));
    } catch (const SolverError&) {
        return std::numeric_limits<double>::infinity();
    }
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    const Matrix gram = a.adjoint() * a;
    const EigenDecomposition eig = hermitian_eigendecomposition(0.5 * (gram + gram.adjoint()));
    return std::sqrt(std::max(0.0, eig.values.maxCoeff()));
}

}  // namespace dysonprop::oracle
