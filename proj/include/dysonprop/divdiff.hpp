// divdiff.hpp — divided differences of the phase function e^{−iEt} and of monomials E^K.
//
// For distinct nodes z₁..z_n the divided difference is
//
//     f[z₁,…,z_n] = Σᵢ f(zᵢ) / Π_{j≠i}(zᵢ − z_j) = Σᵢ (−1)^{i−1} f(zᵢ) / dᵢ(z),
//
// with dᵢ the ordered denominator product (see denominator_d). Repeated nodes take the
// confluent (derivative) limit. Clustered node lists are evaluated through the matrix-function
// form: f[z₁,…,z_k] is entry (0, k−1) of f applied to the upper-bidiagonal matrix with the
// nodes on the diagonal and ones above it.

#pragma once

#include "dysonprop/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace dysonprop {

/// Ordered, nonempty list of finite (possibly complex-shifted) energy nodes.
class NodeList {
public:
    explicit NodeList(std::vector<cplx> nodes);
    NodeList(std::initializer_list<double> nodes);

    static NodeList from_real(std::span<const double> nodes);

    std::size_t size() const noexcept { return nodes_.size(); }
    cplx operator[](std::size_t i) const { return nodes_[i]; }
    std::span<const cplx> span() const noexcept { return nodes_; }

    /// Smallest pairwise |zᵢ − z_j|; +inf for a single node.
    double min_gap() const;

private:
    std::vector<cplx> nodes_;
};

/// Time argument of the phase function e^{−iEt}.
struct PhaseSpec {
    double t{0.0};

    explicit PhaseSpec(double time);
};

namespace divdiff {

/// Gap threshold for the direct partial-fraction sum at time t: 0.1 / max(1, |t|).
double direct_gap_threshold(double t) noexcept;

/// Span-level kernels (no validation).
cplx phase(std::span<const cplx> nodes, double t);
std::vector<cplx> phase_table(std::span<const cplx> nodes, double t);

/// Partial-fraction sum Σᵢ e^{−izᵢt}/Π_{j≠i}(zᵢ−z_j); nodes must be distinct.
cplx phase_direct(std::span<const cplx> nodes, double t);

/// First row of exp(C) for C = bidiag(w, 1): the table g[w₁], g[w₁,w₂], … for g = exp.
/// Scaling and squaring with a truncated Taylor series.
std::vector<cplx> exp_bidiagonal_row(std::span<const cplx> w);

}  // namespace divdiff

/// f[z₁,…,z_n] for f(E) = E^K. Distinct nodes use the signed sum Σᵢ(−1)^{i−1}zᵢ^K/dᵢ;
/// coincident nodes use the complete homogeneous symmetric polynomial h_{K−n+1}.
cplx dd_monomial(const NodeList& nodes, unsigned K);

/// f[z₁,…,z_n] for f(E) = e^{−iEt}, including confluent limits.
cplx dd_phase(const NodeList& nodes, PhaseSpec phase);

/// All leading divided differences f[z₁], f[z₁,z₂], …, f[z₁,…,z_n].
std::vector<cplx> dd_phase_table(const NodeList& nodes, PhaseSpec phase);

/// dᵢ = Π_{j<i}(z_j − zᵢ) · Π_{k>i}(zᵢ − z_k), i is 1-based. Throws SingularityError when
/// two nodes are within kDegeneracyTol.
cplx denominator_d(const NodeList& nodes, std::size_t i);

// --------------------------------------------------------- exact mode ---

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact dᵢ over integer nodes (1-based i). Throws SingularityError on a zero factor.
BigInt denominator_d_exact(std::span<const std::int64_t> nodes, std::size_t i);

/// Exact Σᵢ (−1)^{i−1} zᵢ^K / dᵢ over distinct integer nodes.
Rational dd_monomial_exact(std::span<const std::int64_t> nodes, unsigned K);

}  // namespace dysonprop
