#include "dysonprop/propagator.hpp"

#include "dysonprop/divdiff.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <unordered_map>
#include <vector>

namespace dysonprop {

namespace {

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
    double re = 0.0, re_c = 0.0, im = 0.0, im_c = 0.0;

    static void add(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    void operator+=(cplx z) {
        add(re, re_c, z.real());
        add(im, im_c, z.imag());
    }
    cplx value() const { return {re + re_c, im + im_c}; }
};

/// D^{l+1}, saturating at SIZE_MAX.
std::size_t tuple_count(std::size_t d, int l) {
    std::size_t count = 1;
    for (int k = 0; k <= l; ++k) {
        if (d != 0 && count > SIZE_MAX / d) return SIZE_MAX;
        count *= d;
    }
    return count;
}

}  // namespace

std::size_t tuple_budget() {
    if (const char* env = std::getenv("DYSONPROP_TUPLE_BUDGET")) {
        try {
            const long long v = std::stoll(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return kDefaultTupleBudget;
}

cplx a_coefficient(const SpectralModel& model, int l, std::size_t g, std::size_t gp, double t) {
    const std::size_t d = model.dim();
    if (l < 0) throw ValidationError("a_coefficient: order must be nonnegative");
    if (g >= d || gp >= d) throw ValidationError("a_coefficient: index out of range");
    const auto& e = model.energies();
    const Matrix& h1 = model.h1();
    if (l == 0) return g == gp ? std::exp(-kI * e[g] * t) : cplx(0.0);

    // Interior indices γ₂..γ_l run over all levels; γ₁ = g, γ_{l+1} = gp.
    std::vector<std::size_t> tuple(static_cast<std::size_t>(l) + 1, 0);
    tuple.front() = g;
    tuple.back() = gp;
    const std::size_t interior = static_cast<std::size_t>(l) - 1;
    std::vector<cplx> nodes(tuple.size());
    cplx sum = 0.0;
    std::vector<std::size_t> odometer(interior, 0);
    while (true) {
        for (std::size_t k = 0; k < interior; ++k) tuple[k + 1] = odometer[k];
        cplx product = 1.0;
        for (std::size_t k = 0; k + 1 < tuple.size(); ++k) {
            product *= h1(static_cast<Eigen::Index>(tuple[k]), static_cast<Eigen::Index>(tuple[k + 1]));
        }
        if (product != cplx(0.0)) {
            for (std::size_t k = 0; k < tuple.size(); ++k) nodes[k] = e[tuple[k]];
            sum += divdiff::phase(nodes, t) * product;
        }
        std::size_t pos = 0;
        while (pos < interior && ++odometer[pos] == d) odometer[pos++] = 0;
        if (pos == interior) break;
    }
    return sum;
}

OperatorMatrix a_matrix(const SpectralModel& model, int l, double t, std::size_t budget) {
    if (l < 0) throw ValidationError("a_matrix: order must be nonnegative");
    const std::size_t d = model.dim();
    const auto di = static_cast<Eigen::Index>(d);
    const std::size_t tuples = tuple_count(d, l);
    if (tuples > budget) {
        throw BudgetExceeded("a_matrix: D^(l+1) = " + std::to_string(tuples) +
                             " tuples exceeds budget " + std::to_string(budget));
    }

    OperatorMatrix out;
    out.kind = OperatorKind::propagator;
    out.params.t = t;
    out.params.order = l;
    const auto& e = model.energies();
    if (l == 0) {
        out.entries = Matrix::Zero(di, di);
        for (Eigen::Index g = 0; g < di; ++g) {
            out.entries(g, g) = std::exp(-kI * e[static_cast<std::size_t>(g)] * t);
        }
        return out;
    }

    const Matrix& h1 = model.h1();
    const bool compensated = d >= 8;
    Matrix plain = Matrix::Zero(di, di);
    std::vector<CompensatedSum> comp(compensated ? d * d : 0);

    // Divided differences are symmetric in their nodes, so tuples sharing a multiset of
    // indices share one evaluation (nodes taken in sorted-index order).
    std::unordered_map<std::uint64_t, cplx> cache;
    const std::size_t len = static_cast<std::size_t>(l) + 1;
    std::vector<std::size_t> tuple(len);
    std::vector<std::size_t> sorted(len);
    std::vector<cplx> nodes(len);

    auto leaf = [&](cplx product) {
        std::copy(tuple.begin(), tuple.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        std::uint64_t key = 0;
        for (std::size_t s : sorted) key = key * d + s;
        auto it = cache.find(key);
        if (it == cache.end()) {
            for (std::size_t k = 0; k < len; ++k) nodes[k] = e[sorted[k]];
            it = cache.emplace(key, divdiff::phase(nodes, t)).first;
        }
        const cplx term = it->second * product;
        if (compensated) {
            comp[tuple.front() * d + tuple.back()] += term;
        } else {
            plain(static_cast<Eigen::Index>(tuple.front()), static_cast<Eigen::Index>(tuple.back())) += term;
        }
    };

    auto descend = [&](auto&& self, std::size_t depth, cplx product) -> void {
        if (depth == len) {
            leaf(product);
            return;
        }
        const auto prev = static_cast<Eigen::Index>(tuple[depth - 1]);
        for (std::size_t g = 0; g < d; ++g) {
            const cplx link = h1(prev, static_cast<Eigen::Index>(g));
            if (link == cplx(0.0)) continue;
            tuple[depth] = g;
            self(self, depth + 1, product * link);
        }
    };

    for (std::size_t g = 0; g < d; ++g) {
        tuple[0] = g;
        descend(descend, 1, cplx(1.0));
    }

    if (compensated) {
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                plain(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = comp[r * d + c].value();
            }
        }
    }
    out.entries = std::move(plain);
    return out;
}

OperatorMatrix truncated_evolution(const SpectralModel& model, TruncationSpec spec, double t,
                                   std::size_t budget) {
    const auto di = static_cast<Eigen::Index>(model.dim());
    // Validate the whole request before doing any work.
    for (int l = 0; l <= spec.order; ++l) {
        if (tuple_count(model.dim(), l) > budget) {
            throw BudgetExceeded("truncated_evolution: order " + std::to_string(l) +
                                 " exceeds tuple budget " + std::to_string(budget));
        }
    }
    OperatorMatrix out;
    out.kind = OperatorKind::propagator;
    out.params.t = t;
    out.params.order = spec.order;
    out.entries = Matrix::Zero(di, di);
    for (int l = 0; l <= spec.order; ++l) out.entries += a_matrix(model, l, t, budget).entries;
    return out;
}

OperatorMatrix epsilon_form_evolution(const SpectralModel& model, TruncationSpec spec, double t,
                                      double eps, Sign sign, EpsilonPrescription prescription) {
    if (!(eps > 0.0)) throw ValidationError("epsilon_form_evolution: eps must be positive");
    const auto d = static_cast<Eigen::Index>(model.dim());
    const auto& e = model.energies();
    const Matrix& h1 = model.h1();
    const double s = sign_factor(sign);
    const bool staggered = prescription == EpsilonPrescription::staggered;

    // Resolvent diagonal at distance `dist` from the projector slot; `left` selects (G₀H₁)
    // versus (H₁G₀) strings.
    auto resolvent = [&](double center, int dist, bool left) {
        double shift = s * eps;
        if (staggered) shift = (left ? 1.0 : -1.0) * s * eps * dist;
        Vector r(d);
        for (Eigen::Index g = 0; g < d; ++g) {
            r(g) = 1.0 / (center - e[static_cast<std::size_t>(g)] + kI * shift);
        }
        return r;
    };

    Matrix u = Matrix::Zero(d, d);
    for (int l = 0; l <= spec.order; ++l) {
        for (int i = 1; i <= l + 1; ++i) {
            for (Eigen::Index g = 0; g < d; ++g) {
                const double eg = e[static_cast<std::size_t>(g)];
                Vector col = Vector::Zero(d);
                col(g) = 1.0;
                for (int dist = 1; dist <= i - 1; ++dist) {
                    col = resolvent(eg, dist, true).cwiseProduct(h1 * col);
                }
                Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(d);
                row(g) = 1.0;
                for (int dist = 1; dist <= l + 1 - i; ++dist) {
                    row = (row * h1).cwiseProduct(resolvent(eg, dist, false).transpose());
                }
                cplx phase = std::exp(-kI * eg * t);
                if (staggered) phase *= std::exp(s * (i - 1) * eps * t);
                u.noalias() += phase * (col * row);
            }
        }
    }

    OperatorMatrix out;
    out.entries = std::move(u);
    out.kind = OperatorKind::propagator;
    out.params.t = t;
    out.params.eps = eps;
    out.params.sign = sign;
    out.params.order = spec.order;
    return out;
}

OperatorMatrix epsilon_form_extrapolated(const SpectralModel& model, TruncationSpec spec, double t,
                                         double eps, Sign sign) {
    const Matrix f1 = epsilon_form_evolution(model, spec, t, eps, sign).entries;
    const Matrix f2 = epsilon_form_evolution(model, spec, t, eps / 2.0, sign).entries;
    const Matrix f4 = epsilon_form_evolution(model, spec, t, eps / 4.0, sign).entries;
    OperatorMatrix out;
    out.entries = richardson3<Matrix>(f1, f2, f4);
    out.kind = OperatorKind::propagator;
    out.params.t = t;
    out.params.eps = eps;
    out.params.sign = sign;
    out.params.order = spec.order;
    return out;
}

double unitarity_defect(const Matrix& u) {
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace dysonprop
