// propagator.hpp — series coefficients A_l(t) of e^{−iHt} and the truncated evolution operator.
//
//   A_l^{γγ'}(t) = Σ_{γ₂…γ_l} f[E_γ, E_{γ₂}, …, E_{γ_l}, E_{γ'}] · H₁^{γγ₂} ⋯ H₁^{γ_lγ'},
//
// f(E) = e^{−iEt}. Every index tuple is summed, coincident energies through confluent values.

#pragma once

#include "dysonprop/model.hpp"
#include "dysonprop/types.hpp"

#include <cstddef>

namespace dysonprop {

inline constexpr std::size_t kDefaultTupleBudget = 2'000'000;

/// Tuple guard: DYSONPROP_TUPLE_BUDGET if set to a positive integer, else 2×10⁶.
std::size_t tuple_budget();

/// Single coefficient by direct enumeration of the interior indices.
cplx a_coefficient(const SpectralModel& model, int l, std::size_t g, std::size_t gp, double t);

/// 𝒜_l(t) in the H₀ eigenbasis. Throws BudgetExceeded when D^{l+1} > budget.
OperatorMatrix a_matrix(const SpectralModel& model, int l, double t,
                        std::size_t budget = tuple_budget());

/// U_N(t) = Σ_{l=0}^{N} 𝒜_l(t).
OperatorMatrix truncated_evolution(const SpectralModel& model, TruncationSpec spec, double t,
                                   std::size_t budget = tuple_budget());

/// How the ±iε enters the resolvent string of the operator form.
enum class EpsilonPrescription {
    /// Slot k of an order-l term carries node E_{γ_k} ± i(k−1)ε, consistently in the resolvents
    /// and in the free phase. Converges to U_N(t) for every model, coincident levels included.
    staggered,
    /// Every resolvent is 1/(E_{γ_i} − H₀ ± iε). Only index strings with no repeated level
    /// converge; repeated ones grow like ε^{−(m−1)}.
    uniform,
};

/// Operator form Σ_l Σ_i Σ_γ (G₀H₁)^{i−1} e^{−iH₀t}|γ⟩⟨γ| (H₁G₀)^{l+1−i} with G₀ at E_γ ± iε.
/// Throws ValidationError for eps ≤ 0.
OperatorMatrix epsilon_form_evolution(
    const SpectralModel& model, TruncationSpec spec, double t, double eps, Sign sign,
    EpsilonPrescription prescription = EpsilonPrescription::staggered);

/// Two-level Richardson elimination of the O(ε) and O(ε²) terms from samples at ε, ε/2, ε/4.
template <typename T>
T richardson3(const T& f_e, const T& f_e2, const T& f_e4) {
    return (8.0 * f_e4 - 6.0 * f_e2 + f_e) / 3.0;
}

/// epsilon_form_evolution extrapolated over {eps, eps/2, eps/4}.
OperatorMatrix epsilon_form_extrapolated(const SpectralModel& model, TruncationSpec spec, double t,
                                         double eps, Sign sign);

/// ‖U†U − 1‖ (largest entry modulus).
double unitarity_defect(const Matrix& u);

}  // namespace dysonprop
