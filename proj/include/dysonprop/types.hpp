// types.hpp — shared numeric types, error hierarchy and the tagged operator matrix.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace dysonprop {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};

// ----------------------------------------------------------------- errors ---

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

/// Raised by the raw denominator form when two nodes coincide.
struct SingularityError : Error {
    using Error::Error;
};

/// Raised when D^(l+1) exceeds the tuple enumeration guard.
struct BudgetExceeded : Error {
    using Error::Error;
};

/// Linear solve or eigensolver breakdown. Carries a condition estimate when one is available.
struct SolverError : Error {
    SolverError(const std::string& what, double condition = 0.0)
        : Error(what), condition_estimate(condition) {}
    double condition_estimate;
};

struct QuadratureError : Error {
    using Error::Error;
};

// ------------------------------------------------------------------ sign ---

/// Selects the retarded (+iε) or advanced (−iε) prescription.
enum class Sign { plus, minus };

inline double sign_factor(Sign s) noexcept { return s == Sign::plus ? 1.0 : -1.0; }

inline char sign_char(Sign s) noexcept { return s == Sign::plus ? '+' : '-'; }

// ------------------------------------------------------- operator matrix ---

enum class OperatorKind { propagator, resolvent, green_td };

struct OperatorParams {
    std::optional<double> t;
    std::optional<double> energy;
    std::optional<double> eps;
    std::optional<Sign> sign;
    std::optional<int> order;
};

/// Dense D×D complex matrix in the H₀ eigenbasis, tagged with what it represents.
struct OperatorMatrix {
    Matrix entries;
    OperatorKind kind{OperatorKind::propagator};
    OperatorParams params;

    Eigen::Index dim() const noexcept { return entries.rows(); }
    cplx operator()(Eigen::Index r, Eigen::Index c) const { return entries(r, c); }
};

/// Largest entry modulus of a − b.
inline double max_entry_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// Truncation order N of a perturbation series (highest power of H₁ kept).
struct TruncationSpec {
    int order{0};

    explicit TruncationSpec(int n) : order(n) {
        if (n < 0) throw ValidationError("truncation order must be nonnegative");
    }
};

}  // namespace dysonprop
