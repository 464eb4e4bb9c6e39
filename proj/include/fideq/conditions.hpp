#pragma once

// Necessary and sufficient conditions for F^AB = F^A, evaluated on the
// coefficients of phi in psi's Schmidt frame.
//
//   (1) sqrt(lambda)|c01| = sqrt(1-lambda)|c10|
//   (2) Re(c00 c11*) = |c00 c11|
//   (3) c_ij = 0 for all j >= 2
//   (4) |c00 c11| - |c01 c10| = |c00 c11 - c01 c10|

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "fideq/error.hpp"
#include "fideq/fidelity.hpp"
#include "fideq/numerics.hpp"
#include "fideq/states.hpp"

namespace fideq {

inline constexpr double kDefaultConditionTolerance = 1e-9;
inline constexpr double kDefaultGapTolerance = 1e-8;

struct ConditionReport {
    std::array<double, 4> residuals{};
    std::array<bool, 4> flags{};
    std::optional<double> k;
    std::optional<double> p;
    bool verdict = false;
    /// psi is a product state (lambda <= tol^2). Conditions (2) and (4) carry an
    /// overall factor sqrt(lambda(1-lambda)) and are vacuous there, while (1) and
    /// (3) reduce to the row-1 support test c_1j = 0 for j != 1.
    bool separableFrame = false;
};

namespace detail {

inline void require_tolerance(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw Error(ErrorKind::InvalidTolerance, "tolerance must be positive and finite");
}

} // namespace detail

/// If Re(alpha beta*) = |alpha beta| (to tol |alpha beta|) and |alpha| > tol,
/// returns the real k with beta = k alpha.
inline std::optional<double> lemma1_extract_k(Complex alpha, Complex beta, double tol) {
    const double mag = std::abs(alpha * beta);
    if (std::abs((alpha * std::conj(beta)).real() - mag) > tol * mag) return std::nullopt;
    if (std::abs(alpha) <= tol) return std::nullopt;
    const double k = (beta * std::conj(alpha)).real() / std::norm(alpha);
    if (std::abs(beta - k * alpha) > 10.0 * tol) return std::nullopt;
    return k;
}

/// If |alpha| - |beta| = |alpha - beta| (to tol) and |alpha| > tol, returns the
/// non-negative p with beta = p alpha.
inline std::optional<double> lemma1_extract_p(Complex alpha, Complex beta, double tol) {
    if (std::abs(std::abs(alpha) - std::abs(beta) - std::abs(alpha - beta)) > tol) return std::nullopt;
    if (std::abs(alpha) <= tol) return std::nullopt;
    const double p = std::abs(beta) / std::abs(alpha);
    if (std::abs(beta - p * alpha) > 10.0 * tol) return std::nullopt;
    return p;
}

/// Evaluates the four conditions on coefficients `c` of phi in the Schmidt frame
/// of psi with parameter `lambda`.
inline ConditionReport check_equality_conditions(double lambda, const Matrix2xD& c,
                                                 double tol = kDefaultConditionTolerance) {
    detail::require_lambda(lambda);
    detail::require_tolerance(tol);

    const std::size_t d = c.dimB();
    const Complex c00 = c(0, 0), c01 = c(0, 1), c10 = c(1, 0), c11 = c(1, 1);
    const Complex diag = c00 * c11;
    const Complex cross = c01 * c10;
    const Complex phaseTerm = c00 * std::conj(c11);

    ConditionReport r;
    r.separableFrame = lambda <= tol * tol;

    r.residuals[0] = std::abs(std::sqrt(lambda) * std::abs(c01) - std::sqrt(1.0 - lambda) * std::abs(c10));
    // Distance of c00 c11* from the point |c00 c11| on the non-negative real axis:
    // zero exactly when Re(z) = |z|, and linear in the phase error.
    r.residuals[1] = std::abs(phaseTerm - Complex{std::abs(phaseTerm), 0.0});
    double tail0 = 0.0, tail1 = 0.0;
    for (std::size_t j = 2; j < d; ++j) {
        tail0 += std::norm(c(0, j));
        tail1 += std::norm(c(1, j));
    }
    r.residuals[2] = tail0 + tail1;
    r.residuals[3] = std::abs(std::abs(diag) - std::abs(cross) - std::abs(diag - cross));

    if (r.separableFrame) {
        // Row-1 weights as they enter F^A - F^AB = sum_{j != 1} |c1j|^2.
        r.residuals[0] = std::norm(c10);
        r.residuals[1] = 0.0;
        r.residuals[2] = tail1;
        r.residuals[3] = 0.0;
    }

    // Coefficients are normalized, so every magnitude entering a residual is at
    // most 1 and the tolerance is used unscaled.
    r.verdict = true;
    for (std::size_t n = 0; n < 4; ++n) {
        r.flags[n] = r.residuals[n] <= tol;
        r.verdict = r.verdict && r.flags[n];
    }

    if (std::abs(c00) > tol) {
        const double re = phaseTerm.real();
        const double sign = re < 0.0 ? -1.0 : 1.0;
        r.k = sign * std::abs(c11) / std::abs(c00);
    }
    if (std::abs(diag) > tol) r.p = std::abs(cross) / std::abs(diag);
    return r;
}

/// Schmidt-decomposes psi, expresses phi in that frame and evaluates the conditions.
struct FramedCheck {
    SchmidtForm frame;
    Matrix2xD coefficients;
    ConditionReport report;
};

inline FramedCheck check_pair(const BipartitePureState& psi, const BipartitePureState& phi,
                              double tol = kDefaultConditionTolerance) {
    detail::require_same_dim(psi, phi);
    SchmidtForm frame = schmidt_decompose(psi);
    Matrix2xD c = express_in_frame(phi, frame);
    ConditionReport report = check_equality_conditions(frame.lambda, c, tol);
    return {std::move(frame), std::move(c), report};
}

/// True iff |F^A - F^AB| <= tol.
inline bool numeric_equality_verdict(const BipartitePureState& psi, const BipartitePureState& phi,
                                     double tol = kDefaultGapTolerance) {
    detail::require_tolerance(tol);
    const FidelityPair f = fidelity_pair(psi, phi);
    return std::abs(f.fLocal - f.fGlobal) <= tol;
}

/// For psi = |11>: equality holds iff c_1j = 0 for all j != 1.
inline bool check_separable_case(const Matrix2xD& c, double tol = kDefaultConditionTolerance) {
    double off = 0.0;
    for (std::size_t j = 0; j < c.dimB(); ++j)
        if (j != 1) off += std::norm(c(1, j));
    return off <= tol;
}

} // namespace fideq
