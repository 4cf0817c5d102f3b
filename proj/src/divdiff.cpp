#include "dysonprop/divdiff.hpp"

#include "dysonprop/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dysonprop {

NodeList::NodeList(std::vector<cplx> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ValidationError("node list must be nonempty");
    for (const cplx& z : nodes_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw ValidationError("node list entries must be finite");
        }
    }
}

NodeList::NodeList(std::initializer_list<double> nodes)
    : NodeList(std::vector<cplx>(nodes.begin(), nodes.end())) {}

NodeList NodeList::from_real(std::span<const double> nodes) {
    return NodeList(std::vector<cplx>(nodes.begin(), nodes.end()));
}

double NodeList::min_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
            gap = std::min(gap, std::abs(nodes_[i] - nodes_[j]));
        }
    }
    return gap;
}

PhaseSpec::PhaseSpec(double time) : t(time) {
    if (!std::isfinite(time)) throw ValidationError("phase time must be finite");
}

namespace divdiff {

namespace {

double min_gap(std::span<const cplx> z) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            gap = std::min(gap, std::abs(z[i] - z[j]));
        }
    }
    return gap;
}

bool use_direct(std::span<const cplx> z, double t) {
    return min_gap(z) > direct_gap_threshold(t);
}

std::vector<cplx> scaled_row(std::span<const cplx> nodes, double t) {
    const cplx factor = -kI * t;
    std::vector<cplx> w(nodes.size());
    std::transform(nodes.begin(), nodes.end(), w.begin(), [&](cplx z) { return factor * z; });
    std::vector<cplx> row = exp_bidiagonal_row(w);
    // f(z) = g(−itz) ⇒ f[z₁..z_k] = (−it)^{k−1} g[w₁..w_k].
    cplx power = 1.0;
    for (auto& r : row) {
        r *= power;
        power *= factor;
    }
    return row;
}

}  // namespace

double direct_gap_threshold(double t) noexcept { return 0.1 / std::max(1.0, std::abs(t)); }

cplx phase_direct(std::span<const cplx> nodes, double t) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        cplx denom = 1.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (j != i) denom *= nodes[i] - nodes[j];
        }
        sum += std::exp(-kI * nodes[i] * t) / denom;
    }
    return sum;
}

std::vector<cplx> exp_bidiagonal_row(std::span<const cplx> w) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Matrix c = Matrix::Zero(n, n);
    double norm = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        c(k, k) = w[static_cast<std::size_t>(k)];
        if (k + 1 < n) c(k, k + 1) = 1.0;
        norm = std::max(norm, std::abs(c(k, k)) + (k + 1 < n ? 1.0 : 0.0));
    }
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    c /= std::ldexp(1.0, squarings);

    Matrix sum = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k < 64; ++k) {
        term = (term * c) / static_cast<double>(k);
        sum += term;
        const double term_norm = term.cwiseAbs().maxCoeff();
        if (term_norm < 1e-18 * sum.cwiseAbs().maxCoeff()) break;
    }
    for (int s = 0; s < squarings; ++s) {
        // Upper triangular: keep it so (products of triangular matrices stay triangular).
        sum = (sum * sum).eval();
    }
    std::vector<cplx> row(w.size());
    for (Eigen::Index k = 0; k < n; ++k) row[static_cast<std::size_t>(k)] = sum(0, k);
    return row;
}

cplx phase(std::span<const cplx> nodes, double t) {
    const std::size_t n = nodes.size();
    if (n == 1) return std::exp(-kI * nodes[0] * t);
    if (t == 0.0) return 0.0;
    if (use_direct(nodes, t)) return phase_direct(nodes, t);
    return scaled_row(nodes, t).back();
}

std::vector<cplx> phase_table(std::span<const cplx> nodes, double t) {
    const std::size_t n = nodes.size();
    std::vector<cplx> table(n, 0.0);
    if (t == 0.0) {
        table[0] = 1.0;
        return table;
    }
    if (n == 1 || use_direct(nodes, t)) {
        for (std::size_t k = 1; k <= n; ++k) table[k - 1] = phase_direct(nodes.first(k), t);
        return table;
    }
    return scaled_row(nodes, t);
}

}  // namespace divdiff

namespace {

cplx ipow(cplx z, unsigned k) {
    cplx result = 1.0;
    while (k) {
        if (k & 1u) result *= z;
        z *= z;
        k >>= 1u;
    }
    return result;
}

/// h_m(z₁..z_n), the sum of all degree-m monomials.
cplx complete_homogeneous(std::span<const cplx> z, unsigned m) {
    std::vector<cplx> h(m + 1, 0.0);
    h[0] = 1.0;
    for (const cplx& zj : z) {
        for (unsigned k = 1; k <= m; ++k) h[k] += zj * h[k - 1];
    }
    return h[m];
}

}  // namespace

cplx dd_monomial(const NodeList& nodes, unsigned K) {
    const std::size_t n = nodes.size();
    if (nodes.min_gap() > kDegeneracyTol) {
        cplx sum = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const double sign = (i % 2 == 1) ? 1.0 : -1.0;
            sum += sign * ipow(nodes[i - 1], K) / denominator_d(nodes, i);
        }
        return sum;
    }
    if (K + 1 < n) return 0.0;
    return complete_homogeneous(nodes.span(), K + 1 - static_cast<unsigned>(n));
}

cplx dd_phase(const NodeList& nodes, PhaseSpec phase) { return divdiff::phase(nodes.span(), phase.t); }

std::vector<cplx> dd_phase_table(const NodeList& nodes, PhaseSpec phase) {
    return divdiff::phase_table(nodes.span(), phase.t);
}

cplx denominator_d(const NodeList& nodes, std::size_t i) {
    const std::size_t n = nodes.size();
    if (i < 1 || i > n) throw ValidationError("denominator index out of range");
    const cplx zi = nodes[i - 1];
    cplx product = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        if (j == i) continue;
        const cplx factor = (j < i) ? nodes[j - 1] - zi : zi - nodes[j - 1];
        if (std::abs(factor) <= kDegeneracyTol) {
            throw SingularityError("denominator_d: coincident nodes " + std::to_string(j) +
                                   " and " + std::to_string(i));
        }
        product *= factor;
    }
    return product;
}

BigInt denominator_d_exact(std::span<const std::int64_t> nodes, std::size_t i) {
    const std::size_t n = nodes.size();
    if (i < 1 || i > n) throw ValidationError("denominator index out of range");
    const BigInt zi = nodes[i - 1];
    BigInt product = 1;
    for (std::size_t j = 1; j <= n; ++j) {
        if (j == i) continue;
        const BigInt zj = nodes[j - 1];
        BigInt factor = (j < i) ? BigInt(zj - zi) : BigInt(zi - zj);
        if (factor == 0) throw SingularityError("denominator_d_exact: coincident nodes");
        product *= factor;
    }
    return product;
}

Rational dd_monomial_exact(std::span<const std::int64_t> nodes, unsigned K) {
    if (nodes.empty()) throw ValidationError("node list must be nonempty");
    Rational sum = 0;
    for (std::size_t i = 1; i <= nodes.size(); ++i) {
        const BigInt power = boost::multiprecision::pow(BigInt(nodes[i - 1]), K);
        Rational term = Rational(power) / Rational(denominator_d_exact(nodes, i));
        if (i % 2 == 0) term = -term;
        sum += term;
    }
    return sum;
}

}  // namespace dysonprop
