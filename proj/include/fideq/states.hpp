#pragma once

// Bipartite pure states on C^2 (x) C^d, their Schmidt frames and reduced states.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fideq/error.hpp"
#include "fideq/numerics.hpp"

namespace fideq {

/// Construction-time normalization tolerance (accepts decimal round trips).
inline constexpr double kNormalizationTolerance = 1e-8;

enum class Normalize { Reject, Auto };

/// Normalized pure state of a qubit A and a d-level system B, stored as its
/// coefficient matrix in the computational product basis.
class BipartitePureState {
public:
    [[nodiscard]] std::size_t dimB() const noexcept { return coeffs_.dimB(); }
    [[nodiscard]] const Matrix2xD& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] Complex amplitude(std::size_t i, std::size_t j) const { return coeffs_(i, j); }

    friend BipartitePureState new_state(std::size_t, std::span<const Complex>, Normalize);
    friend BipartitePureState new_state(Matrix2xD, Normalize);

private:
    explicit BipartitePureState(Matrix2xD c) : coeffs_(std::move(c)) {}
    Matrix2xD coeffs_;
};

/// Validates and normalizes a coefficient matrix.
inline BipartitePureState new_state(Matrix2xD coeffs, Normalize policy = Normalize::Reject) {
    for (const auto& z : coeffs.entries())
        if (!is_finite(z)) throw Error(ErrorKind::NonFinite, "amplitudes must be finite");
    const double nrm = coeffs.frobenius_norm();
    if (nrm < 1e-14) throw Error(ErrorKind::ZeroState, "state has zero norm");
    if (policy == Normalize::Reject && std::abs(nrm - 1.0) > kNormalizationTolerance)
        throw Error(ErrorKind::NotNormalized, "state norm is " + std::to_string(nrm));
    for (std::size_t i = 0; i < 2; ++i)
        for (auto& z : coeffs.row(i)) z /= nrm;
    return BipartitePureState(std::move(coeffs));
}

/// Amplitudes are row-major: index i * dimB + j holds <i^A j^B|state>.
inline BipartitePureState new_state(std::size_t dimB, std::span<const Complex> amplitudes,
                                    Normalize policy = Normalize::Reject) {
    if (dimB < 2) throw Error(ErrorKind::DimensionMismatch, "dimB must be at least 2");
    if (amplitudes.size() != 2 * dimB)
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(2 * dimB) + " amplitudes, got " +
                                                      std::to_string(amplitudes.size()));
    return new_state(Matrix2xD(dimB, std::vector<Complex>(amplitudes.begin(), amplitudes.end())), policy);
}

/// psi = sqrt(lambda) |a0 b0> + sqrt(1 - lambda) |a1 b1>, lambda in [0, 1/2].
struct SchmidtForm {
    double lambda = 0.0;
    Matrix2 basisA;                       ///< columns are |0>^A, |1>^A
    std::array<ComplexVector, 2> basisB;  ///< |0>^B, |1>^B

    [[nodiscard]] std::size_t dimB() const noexcept { return basisB[0].size(); }

    [[nodiscard]] std::array<Complex, 2> vectorA(std::size_t k) const { return basisA.column(k); }

    /// |0>^B, |1>^B followed by the Gram-Schmidt completion of C^d.
    [[nodiscard]] std::vector<ComplexVector> full_basis_b() const {
        return complete_orthonormal_basis({basisB[0], basisB[1]}, dimB());
    }

    /// Coefficients of sqrt(lambda)|00> + sqrt(1-lambda)|11> in the computational basis.
    [[nodiscard]] Matrix2xD reconstruct() const {
        const std::size_t d = dimB();
        Matrix2xD out(d);
        const std::array<double, 2> weights{std::sqrt(lambda), std::sqrt(1.0 - lambda)};
        for (std::size_t k = 0; k < 2; ++k) {
            const auto a = vectorA(k);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < d; ++j) out(i, j) += weights[k] * a[i] * basisB[k][j];
        }
        return out;
    }
};

/// Schmidt decomposition. The smaller singular value feeds lambda and its
/// directions occupy the (0,0) slot, so a product state reads |11>. Degenerate
/// singular values (|s0 - s1| < 1e-12) keep the SVD's own ordering.
inline SchmidtForm schmidt_decompose(const BipartitePureState& psi) {
    const Svd2xD svd = svd_2xd(psi.coeffs());
    // psi_ij = sum_k s_k u_k[i] conj(v_k[j]), so the B basis vectors are conj(v_k).
    auto conjugated = [](const ComplexVector& v) {
        ComplexVector out(v.size());
        std::transform(v.begin(), v.end(), out.begin(), [](Complex z) { return std::conj(z); });
        return out;
    };
    const bool degenerate = std::abs(svd.s[0] - svd.s[1]) < 1e-12;
    const std::size_t small = degenerate ? 0 : 1;
    const std::size_t large = 1 - small;

    SchmidtForm form;
    const double total = svd.s[0] * svd.s[0] + svd.s[1] * svd.s[1];
    form.lambda = std::clamp(svd.s[small] * svd.s[small] / total, 0.0, 0.5);
    form.basisA = Matrix2{{svd.uA(0, small), svd.uA(0, large), svd.uA(1, small), svd.uA(1, large)}};
    form.basisB = {conjugated(svd.vRows[small]), conjugated(svd.vRows[large])};
    return form;
}

/// c_ij = <i^A j^B|phi> in the frame's bases (B completed to a full basis).
inline Matrix2xD express_in_frame(const BipartitePureState& phi, const SchmidtForm& frame) {
    const std::size_t d = phi.dimB();
    if (frame.dimB() != d) throw Error(ErrorKind::DimensionMismatch, "frame and state dimB differ");
    const auto basisB = frame.full_basis_b();

    // Rotate rows into the A frame first: t_i = sum_m conj(a_i[m]) phi_m.
    Matrix2xD rotated(d);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto a = frame.vectorA(i);
        for (std::size_t j = 0; j < d; ++j)
            rotated(i, j) = std::conj(a[0]) * phi.amplitude(0, j) + std::conj(a[1]) * phi.amplitude(1, j);
    }
    Matrix2xD out(d);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < d; ++j) out(i, j) = inner(basisB[j], rotated.row(i));
    return out;
}

/// Inverse of express_in_frame: sum_ij c_ij |a_i> (x) |b_j>.
inline Matrix2xD embed_from_frame(const Matrix2xD& c, const SchmidtForm& frame) {
    const std::size_t d = c.dimB();
    if (frame.dimB() != d) throw Error(ErrorKind::DimensionMismatch, "frame and coefficient dimB differ");
    bool tail = false;
    for (std::size_t i = 0; i < 2 && !tail; ++i)
        for (std::size_t j = 2; j < d; ++j)
            if (c(i, j) != Complex{0.0, 0.0}) { tail = true; break; }
    const auto basisB = tail ? frame.full_basis_b() : std::vector<ComplexVector>{frame.basisB[0], frame.basisB[1]};

    Matrix2xD out(d);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto a = frame.vectorA(i);
        for (std::size_t j = 0; j < basisB.size(); ++j) {
            const Complex cij = c(i, j);
            if (cij == Complex{0.0, 0.0}) continue;
            for (std::size_t m = 0; m < 2; ++m)
                for (std::size_t n = 0; n < d; ++n) out(m, n) += cij * a[m] * basisB[j][n];
        }
    }
    return out;
}

/// 2x2 reduced state on A; p01 = <0|rho|1>.
struct DensityMatrixQubit {
    double p00 = 0.0;
    double p11 = 0.0;
    Complex p01{0.0, 0.0};

    [[nodiscard]] HermitianQubitOperator as_operator() const { return {p00, p11, p01}; }
    [[nodiscard]] double trace() const noexcept { return p00 + p11; }
    [[nodiscard]] double determinant() const noexcept { return p00 * p11 - std::norm(p01); }
};

inline DensityMatrixQubit reduced_from_coeffs(const Matrix2xD& c) {
    return DensityMatrixQubit{squared_norm(c.row(0)), squared_norm(c.row(1)), inner(c.row(1), c.row(0))};
}

/// Partial trace over B.
inline DensityMatrixQubit reduced_qubit(const BipartitePureState& state) {
    return reduced_from_coeffs(state.coeffs());
}

inline double generic_uhlmann_fidelity(const DensityMatrixQubit& rho, const DensityMatrixQubit& sigma) {
    return generic_uhlmann_fidelity(rho.as_operator(), sigma.as_operator());
}

/// (I (x) u)|state>: each coefficient row becomes row * u^T.
inline BipartitePureState apply_local_unitary_B(const BipartitePureState& state, const DenseMatrix& u) {
    const std::size_t d = state.dimB();
    if (u.size() != d) throw Error(ErrorKind::DimensionMismatch, "unitary size differs from dimB");
    if (u.unitarity_defect() > 1e-12) throw Error(ErrorKind::NotUnitary, "matrix is not unitary to 1e-12");
    Matrix2xD out(d);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Complex acc{0.0, 0.0};
            for (std::size_t n = 0; n < d; ++n) acc += u(j, n) * state.amplitude(i, n);
            out(i, j) = acc;
        }
    return new_state(std::move(out));
}

/// (u (x) I)|state>.
inline BipartitePureState apply_local_unitary_A(const BipartitePureState& state, const Matrix2& u) {
    const Matrix2 g = u.adjoint() * u;
    const double defect = std::max({std::abs(g(0, 0) - 1.0), std::abs(g(1, 1) - 1.0), std::abs(g(0, 1)),
                                    std::abs(g(1, 0))});
    if (defect > 1e-12) throw Error(ErrorKind::NotUnitary, "matrix is not unitary to 1e-12");
    const std::size_t d = state.dimB();
    Matrix2xD out(d);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out(i, j) = u(i, 0) * state.amplitude(0, j) + u(i, 1) * state.amplitude(1, j);
    return new_state(std::move(out));
}

} // namespace fideq
