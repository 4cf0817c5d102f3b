// oracle.hpp — independent ground truth: Hermitian eigensolver, exact propagators, dense
// solves, and nested time-ordered quadrature of low-order Dyson terms.
//
// Nothing here touches divided differences; these routes exist to check the series.

#pragma once

#include "dysonprop/model.hpp"
#include "dysonprop/types.hpp"

namespace dysonprop::oracle {

struct EigenDecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // columns, unitary
};

/// Cyclic Jacobi. Deterministic: eigenvalues ascending, each eigenvector phased so its
/// largest-modulus component is real and positive.
/// Throws ValidationError for non-Hermitian input, SolverError after 30 sweeps.
EigenDecomposition hermitian_eigendecomposition(const Matrix& a);

/// V·diag(e^{−iλt})·V†.
Matrix exact_evolution(const Matrix& h, double t);
OperatorMatrix exact_evolution(const SpectralModel& model, double t);

/// The l-th time-ordered term (−i)^l ∫_{t>t₁>…>t_l>0} e^{−iH₀(t−t₁)}H₁ ⋯ H₁e^{−iH₀t_l},
/// by Gauss–Legendre on the unit cube with t_k = t·u₁⋯u_k. Requires l ≤ 3 and npoints ≥ 16.
OperatorMatrix dyson_term_quadrature(const SpectralModel& model, int l, double t, int npoints);

/// Partial-pivoted elimination. Throws SolverError (with a condition estimate) when a pivot
/// vanishes to working precision.
Matrix linear_solve(const Matrix& a, const Matrix& b);

/// ‖A‖₁·‖A⁻¹‖₁.
double condition_estimate(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);

}  // namespace dysonprop::oracle
