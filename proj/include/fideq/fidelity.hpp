#pragma once

// Global and local fidelities of two bipartite pure states; the local one via
// the qubit closed form in the Schmidt frame of the first state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "fideq/error.hpp"
#include "fideq/numerics.hpp"
#include "fideq/states.hpp"

namespace fideq {

struct FidelityPair {
    double fGlobal = 0.0;  ///< F^AB
    double fLocal = 0.0;   ///< F^A

    [[nodiscard]] double gap() const noexcept { return fLocal - fGlobal; }
};

namespace detail {

inline void require_same_dim(const BipartitePureState& a, const BipartitePureState& b) {
    if (a.dimB() != b.dimB())
        throw Error(ErrorKind::DimensionMismatch,
                    "dimB " + std::to_string(a.dimB()) + " vs " + std::to_string(b.dimB()));
}

inline void require_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 0.5))
        throw Error(ErrorKind::InvalidLambda, "lambda must lie in [0, 1/2], got " + std::to_string(lambda));
}

/// Above this width the middle term uses the Gram form (O(d)) instead of the
/// pairwise antisymmetrized sum (O(d^2)).
inline constexpr std::size_t kPairwiseSumMaxDim = 16;

} // namespace detail

/// |<psi|phi>|^2 from the raw coefficient matrices.
inline double global_fidelity(const BipartitePureState& psi, const BipartitePureState& phi) {
    detail::require_same_dim(psi, phi);
    return std::clamp(std::norm(inner(psi.coeffs().entries(), phi.coeffs().entries())), 0.0, 1.0);
}

/// |sqrt(lambda) c00 + sqrt(1-lambda) c11|^2 with c expressed in psi's Schmidt frame.
inline double global_fidelity_in_frame(double lambda, const Matrix2xD& c) {
    detail::require_lambda(lambda);
    return std::norm(std::sqrt(lambda) * c(0, 0) + std::sqrt(1.0 - lambda) * c(1, 1));
}

/// Operator L = sqrt(rho_psi) rho_phi sqrt(rho_psi) in psi's Schmidt frame, where
/// rho_psi = diag(lambda, 1 - lambda) and rhoPhi is already expressed in that frame.
inline HermitianQubitOperator sandwich_operator(double lambda, const DensityMatrixQubit& rhoPhi) {
    return HermitianQubitOperator{lambda * rhoPhi.p00, (1.0 - lambda) * rhoPhi.p11,
                                  std::sqrt(lambda * (1.0 - lambda)) * rhoPhi.p01};
}

/// Rotates a reduced state into the A basis whose columns are given by basisA.
inline DensityMatrixQubit rotate_into_frame(const DensityMatrixQubit& rho, const Matrix2& basisA) {
    const Matrix2 r = basisA.adjoint() * to_matrix(rho.as_operator()) * basisA;
    const auto h = hermitian_part(r);
    return DensityMatrixQubit{h.a00, h.a11, h.a01};
}

/// F^A = a00 + a11 + 2 sqrt(a00 a11 - |a01|^2) for the operator L.
inline double local_fidelity_from_operator(const HermitianQubitOperator& l) {
    const double det = clamp_psd(l.determinant(), "det L");
    return std::clamp(l.a00 + l.a11 + 2.0 * std::sqrt(det), 0.0, 1.0);
}


/// Both sides of the Gram identity
///   sum_{j>l} |r0_j r1_l - r0_l r1_j|^2 = |r0|^2 |r1|^2 - <r1|r0><r0|r1>
/// evaluated independently (lhs pairwise, rhs from inner products).
struct GramSides {
    double lhs = 0.0;
    double rhs = 0.0;
};

inline double antisymmetrized_pair_sum(std::span<const Complex> row0, std::span<const Complex> row1) {
    double acc = 0.0;
    for (std::size_t j = 1; j < row0.size(); ++j)
        for (std::size_t l = 0; l < j; ++l) acc += std::norm(row0[j] * row1[l] - row0[l] * row1[j]);
    return acc;
}

inline double gram_determinant(std::span<const Complex> row0, std::span<const Complex> row1) {
    // conj(r1).r0 times conj(r0).r1 = |<r1|r0>|^2, real by construction.
    return squared_norm(row0) * squared_norm(row1) - std::norm(inner(row1, row0));
}

inline GramSides gram_identity_sides(std::span<const Complex> row0, std::span<const Complex> row1) {
    if (row0.size() != row1.size()) throw Error(ErrorKind::DimensionMismatch, "rows differ in length");
    if (row0.size() < 2) throw Error(ErrorKind::DimensionMismatch, "rows need at least two entries");
    return {antisymmetrized_pair_sum(row0, row1), gram_determinant(row0, row1)};
}

/// lambda sum|c0j|^2 + 2 sqrt(lambda(1-lambda)) sqrt(sum_{j>l}|c0j c1l - c0l c1j|^2)
///   + (1-lambda) sum|c1j|^2
inline double local_fidelity_closed_form(double lambda, const Matrix2xD& c) {
    detail::require_lambda(lambda);
    const double middle = c.dimB() <= detail::kPairwiseSumMaxDim
                              ? antisymmetrized_pair_sum(c.row(0), c.row(1))
                              : clamp_psd(gram_determinant(c.row(0), c.row(1)), "Gram determinant");
    return lambda * squared_norm(c.row(0)) + 2.0 * std::sqrt(lambda * (1.0 - lambda)) * std::sqrt(middle) +
           (1.0 - lambda) * squared_norm(c.row(1));
}

inline double local_fidelity(const BipartitePureState& psi, const BipartitePureState& phi) {
    detail::require_same_dim(psi, phi);
    const SchmidtForm frame = schmidt_decompose(psi);
    const DensityMatrixQubit rhoPhi = rotate_into_frame(reduced_qubit(phi), frame.basisA);
    const HermitianQubitOperator l = sandwich_operator(frame.lambda, rhoPhi);
    // det L = lambda(1-lambda) det rho_phi. The entrywise p00 p11 - |p01|^2 cancels
    // to round-off when phi is nearly a product state, and the square root turns
    // 1e-17 into 1e-9; the sum of squared 2x2 minors has no such cancellation.
    const auto& c = phi.coeffs();
    const double detRho = c.dimB() <= detail::kPairwiseSumMaxDim
                              ? antisymmetrized_pair_sum(c.row(0), c.row(1))
                              : clamp_psd(gram_determinant(c.row(0), c.row(1)), "Gram determinant");
    const double root = std::sqrt(frame.lambda * (1.0 - frame.lambda) * detRho);
    return std::clamp(l.a00 + l.a11 + 2.0 * root, 0.0, 1.0);
}

inline FidelityPair fidelity_pair(const BipartitePureState& psi, const BipartitePureState& phi) {
    return {global_fidelity(psi, phi), local_fidelity(psi, phi)};
}

} // namespace fideq
