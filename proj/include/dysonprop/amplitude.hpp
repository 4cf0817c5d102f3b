// amplitude.hpp — transition amplitudes on a 1D Dirichlet lattice.
//
// Lattice kets obey ⟨x_m|x_n⟩ = δ_{mn}/h, so ∫dy ↦ hΣ_n and δ(x − x′) ↦ δ_{mn}/h. With that
// normalization K(x_b,t_b;x_a,t_a) = ⟨x_b|e^{−iH(t_b−t_a)}|x_a⟩ carries a 1/h at equal times and
//
//     K = h² Σ_{y_b,y_a} C(x_b,y_b;x_a,y_a) K₀(y_b,t_b;y_a,t_a)
//
// reproduces the continuum relation term for term. The perturbation is a diagonal potential v1.

#pragma once

#include "dysonprop/model.hpp"
#include "dysonprop/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dysonprop {

enum class BoundaryCondition { dirichlet };

struct LatticeSpec {
    std::size_t points{2};  // M
    double x0{0.0};
    double spacing{1.0};  // h
    double mass{1.0};
    std::vector<double> v0;
    std::vector<double> v1;
    BoundaryCondition bc{BoundaryCondition::dirichlet};

    /// Throws ValidationError unless M ≥ 2, h > 0, mass > 0 and both potentials are finite
    /// with length M.
    void validate() const;

    /// −(1/2m)Δ_h + diag(v0), Dirichlet ends.
    RealMatrix h0() const;
    double x(std::size_t n) const { return x0 + spacing * static_cast<double>(n); }
};

LatticeSpec load_lattice(std::string_view text);
LatticeSpec load_lattice_file(const std::string& path);
std::string emit_lattice(const LatticeSpec& spec);

/// Scales v1 by lambda.
LatticeSpec scale_perturbation(LatticeSpec spec, double lambda);

struct LatticeSystem {
    LatticeSpec spec;
    SpectralModel model;  // H₀ spectrum, H₁^{γγ′} = h Σ_n φ_γ(x_n) v1(x_n) φ_γ′(x_n)
    RealMatrix basis;     // basis(n, γ) = ⟨x_n|Φ^γ⟩, orthonormal under h Σ_n

    std::size_t size() const noexcept { return spec.points; }
    double h() const noexcept { return spec.spacing; }
};

/// Diagonalizes the lattice H₀ with the oracle eigensolver.
LatticeSystem build_lattice(const LatticeSpec& spec);

/// ⟨x_b|e^{−iH₀(t_b−t_a)}|x_a⟩. Throws ValidationError if tb < ta.
cplx k0_amplitude(const LatticeSystem& sys, std::size_t xb, double tb, std::size_t xa, double ta);

/// Exact ⟨x_b|e^{−iH(t_b−t_a)}|x_a⟩ for the full lattice H = H₀ + diag(v1).
cplx k_exact(const LatticeSystem& sys, std::size_t xb, double tb, std::size_t xa, double ta);

/// Position sandwich of the N-truncated series U_N(t_b − t_a).
cplx k_truncated_direct(const LatticeSystem& sys, TruncationSpec spec, std::size_t xb, double tb,
                        std::size_t xa, double ta);

/// Whole-grid versions: entry (b, a) is the amplitude from x_a to x_b.
Matrix k0_matrix(const LatticeSystem& sys, double tau);
Matrix k_exact_matrix(const LatticeSystem& sys, double tau);
Matrix k_truncated_matrix(const LatticeSystem& sys, TruncationSpec spec, double tau);

/// The ε-regularized, N-truncated kernel
///
///   C = Σ_l Σ_i Σ_γ ⟨x_b|(G₀H₁)^{i−1}|y_b⟩ ⟨y_a|Φ^γ⟩⟨Φ^γ|(H₁G₀)^{l+1−i}|x_a⟩,
///
/// resolved by the slot i of the projector. Resolvents follow the staggered prescription
/// (slot k carries E_{γ_k} ± i(k−1)ε), which also attaches e^{±(i−1)ετ} to slot i when the
/// kernel is contracted with K₀; at ε → 0 that factor tends to 1.
class RelationKernel {
public:
    RelationKernel(const LatticeSystem& sys, TruncationSpec spec, double eps, Sign sign = Sign::plus);

    /// Σ over projector slots: the time-independent kernel value.
    cplx operator()(std::size_t xb, std::size_t yb, std::size_t xa, std::size_t ya) const;
    /// Contribution of projector slot i (1-based).
    cplx slot(int i, std::size_t xb, std::size_t yb, std::size_t xa, std::size_t ya) const;

    int slots() const noexcept { return static_cast<int>(slots_.size()); }
    double eps() const noexcept { return eps_; }
    Sign sign() const noexcept { return sign_; }

    /// h² Σ_{y_b,y_a} Σ_i e^{±(i−1)ετ} C_i(x_b,y_b;x_a,y_a) K₀(y_b,y_a;τ), explicit lattice sums.
    cplx contract(const LatticeSystem& sys, std::size_t xb, std::size_t xa, double tau) const;
    /// Same, against a precomputed K₀ grid (entry (y_b, y_a)).
    cplx contract(const Matrix& k0, double h, std::size_t xb, std::size_t xa, double tau) const;

private:
    struct SlotTerm {
        std::vector<Matrix> left;   // per γ: ⟨x_b|(G₀H₁)^{i−1}|y_b⟩ as (x_b, y_b)
        std::vector<Vector> right;  // per γ: Σ_p ⟨Φ^γ|(H₁G₀)^p|x_a⟩ over x_a
    };
    std::vector<SlotTerm> slots_;
    RealMatrix basis_;
    double eps_;
    Sign sign_;
};

cplx c_kernel(const LatticeSystem& sys, TruncationSpec spec, double eps, std::size_t xb,
              std::size_t yb, std::size_t xa, std::size_t ya, Sign sign = Sign::plus);

/// h²-weighted double lattice sum of the kernel against K₀.
cplx k_via_relation(const LatticeSystem& sys, TruncationSpec spec, double eps, std::size_t xb,
                    double tb, std::size_t xa, double ta, Sign sign = Sign::plus);

/// Whole grid at a fixed ε.
Matrix k_via_relation_matrix(const LatticeSystem& sys, TruncationSpec spec, double eps, double tau,
                             Sign sign = Sign::plus);

/// Richardson over {eps, eps/2, eps/4}.
Matrix k_via_relation_extrapolated(const LatticeSystem& sys, TruncationSpec spec, double eps,
                                   double tau, Sign sign = Sign::plus);

/// Built-in M-point well on a unit-spacing grid: v0 = 0, v1 a smooth dip of depth `depth`.
LatticeSpec default_well_lattice(std::size_t points = 6, double depth = 1.0);

}  // namespace dysonprop
