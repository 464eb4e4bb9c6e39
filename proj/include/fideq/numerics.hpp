#pragma once

// Small dense complex linear algebra for a qubit (system A) paired with a
// d-dimensional system B. Everything here is a pure function of its inputs.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fideq/error.hpp"

namespace fideq {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Roundoff allowance for quantities that are non-negative in exact arithmetic.
inline constexpr double kPsdClampTolerance = 1e-12;

inline bool is_finite(Complex z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Treats values in (-kPsdClampTolerance, 0) as zero; deeper negatives are an error.
inline double clamp_psd(double x, std::string_view what) {
    if (x >= 0.0) return x;
    if (x > -kPsdClampTolerance) return 0.0;
    throw Error(ErrorKind::Numerical,
                std::string(what) + " is negative beyond roundoff: " + std::to_string(x));
}

// ---------------------------------------------------------------------------
// Vectors

inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

inline double squared_norm(std::span<const Complex> a) {
    double acc = 0.0;
    for (const auto& z : a) acc += std::norm(z);
    return acc;
}

inline double norm(std::span<const Complex> a) { return std::sqrt(squared_norm(a)); }

/// Rotates `v` by a global phase so that its largest-magnitude entry is real and
/// non-negative. Entries within 1e-12 (relative) of the maximum count as ties;
/// the lowest index wins.
inline void apply_phase_convention(std::span<Complex> v) {
    double best = 0.0;
    for (const auto& z : v) best = std::max(best, std::abs(z));
    if (best == 0.0) return;
    for (auto& pivot : v) {
        if (std::abs(pivot) >= best * (1.0 - 1e-12)) {
            const Complex phase = std::conj(pivot) / std::abs(pivot);
            for (auto& z : v) z *= phase;
            pivot = Complex{std::abs(pivot), 0.0};
            return;
        }
    }
}

/// Removes from `v` its components along the (orthonormal) `basis`, twice for
/// numerical orthogonality, and returns the remaining norm.
inline double orthogonalize(ComplexVector& v, std::span<const ComplexVector> basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            const Complex overlap = inner(b, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= overlap * b[i];
        }
    }
    return norm(v);
}

/// Extends an orthonormal set to `targetCount` (default: all of C^dim) vectors by
/// Gram-Schmidt over the computational basis vectors, skipping candidates whose
/// residual norm falls below `skipThreshold`.
inline std::vector<ComplexVector> complete_orthonormal_basis(std::vector<ComplexVector> basis,
                                                             std::size_t dim,
                                                             std::size_t targetCount = 0,
                                                             double skipThreshold = 1e-8) {
    if (targetCount == 0 || targetCount > dim) targetCount = dim;
    for (std::size_t e = 0; e < dim && basis.size() < targetCount; ++e) {
        ComplexVector candidate(dim, Complex{0.0, 0.0});
        candidate[e] = 1.0;
        const double residual = orthogonalize(candidate, basis);
        if (residual < skipThreshold) continue;
        for (auto& z : candidate) z /= residual;
        basis.push_back(std::move(candidate));
    }
    if (basis.size() != targetCount)
        throw Error(ErrorKind::Numerical, "basis completion failed to reach full dimension");
    return basis;
}

// ---------------------------------------------------------------------------
// 2x2 operators

/// Hermitian operator on a qubit; the lower-left entry is conj(a01).
struct HermitianQubitOperator {
    double a00 = 0.0;
    double a11 = 0.0;
    Complex a01{0.0, 0.0};

    [[nodiscard]] double trace() const noexcept { return a00 + a11; }
    [[nodiscard]] double determinant() const noexcept { return a00 * a11 - std::norm(a01); }
};

/// Row-major 2x2 complex matrix.
struct Matrix2 {
    std::array<Complex, 4> m{};

    static Matrix2 identity() { return Matrix2{{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}}}; }

    Complex& operator()(std::size_t i, std::size_t j) { return m[2 * i + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return m[2 * i + j]; }

    [[nodiscard]] std::array<Complex, 2> column(std::size_t k) const { return {m[k], m[2 + k]}; }

    [[nodiscard]] Matrix2 adjoint() const {
        return Matrix2{{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
    }

    friend Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
        Matrix2 r;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
        return r;
    }
};

inline Matrix2 to_matrix(const HermitianQubitOperator& h) {
    return Matrix2{{Complex{h.a00}, h.a01, std::conj(h.a01), Complex{h.a11}}};
}

/// Reads the Hermitian part of a (numerically near-Hermitian) matrix.
inline HermitianQubitOperator hermitian_part(const Matrix2& a) {
    return HermitianQubitOperator{a(0, 0).real(), a(1, 1).real(), 0.5 * (a(0, 1) + std::conj(a(1, 0)))};
}

struct QubitEigenvalues {
    double plus = 0.0;
    double minus = 0.0;
};

/// Eigenvalues (T ± sqrt((a00 - a11)^2 + 4|a01|^2)) / 2, the trace-T form of the
/// standard qubit formula. plus >= minus always.
inline QubitEigenvalues hermitian2_eigenvalues(const HermitianQubitOperator& h) noexcept {
    const double mean = 0.5 * (h.a00 + h.a11);
    const double radius = std::hypot(0.5 * (h.a00 - h.a11), std::abs(h.a01));
    return {mean + radius, mean - radius};
}

struct QubitEigensystem {
    QubitEigenvalues values;
    /// Columns are the eigenvectors for `values.plus` and `values.minus`.
    Matrix2 vectors;
};

/// Single Jacobi rotation; exact up to roundoff for any Hermitian 2x2. When
/// a01 == 0 and the diagonal is degenerate the identity frame is returned.
inline QubitEigensystem hermitian2_eigensystem(const HermitianQubitOperator& h) {
    const double offMag = std::abs(h.a01);
    const Complex phase = offMag > 0.0 ? std::conj(h.a01) / offMag : Complex{1.0, 0.0};
    const double theta = 0.5 * std::atan2(2.0 * offMag, h.a00 - h.a11);
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    QubitEigensystem out;
    out.values = hermitian2_eigenvalues(h);
    std::array<Complex, 2> vPlus{Complex{c}, phase * s};
    std::array<Complex, 2> vMinus{Complex{-s}, phase * c};
    apply_phase_convention(vPlus);
    apply_phase_convention(vMinus);
    out.vectors = Matrix2{{vPlus[0], vMinus[0], vPlus[1], vMinus[1]}};
    return out;
}

/// Square root of a PSD qubit operator via its eigendecomposition.
inline Matrix2 psd_sqrt(const HermitianQubitOperator& h) {
    const auto es = hermitian2_eigensystem(h);
    const double rp = std::sqrt(clamp_psd(es.values.plus, "eigenvalue"));
    const double rm = std::sqrt(clamp_psd(es.values.minus, "eigenvalue"));
    const Matrix2 diag{{Complex{rp}, Complex{0.0}, Complex{0.0}, Complex{rm}}};
    return es.vectors * diag * es.vectors.adjoint();
}

/// F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 evaluated through two
/// eigendecompositions. Independent of any closed-form qubit expression; used as
/// a cross-validation oracle. Clamped to [0, 1].
inline double generic_uhlmann_fidelity(const HermitianQubitOperator& rho,
                                       const HermitianQubitOperator& sigma) {
    const Matrix2 root = psd_sqrt(rho);
    const auto inner_op = hermitian_part(root * to_matrix(sigma) * root);
    const auto ev = hermitian2_eigenvalues(inner_op);
    const double tr = std::sqrt(clamp_psd(ev.plus, "eigenvalue")) +
                      std::sqrt(clamp_psd(ev.minus, "eigenvalue"));
    return std::clamp(tr * tr, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// 2 x d coefficient matrices

/// Row-major 2 x d complex matrix: row = system-A index, column = system-B index.
class Matrix2xD {
public:
    explicit Matrix2xD(std::size_t dimB) : dimB_(dimB), entries_(2 * dimB, Complex{0.0, 0.0}) {
        if (dimB < 2) throw Error(ErrorKind::DimensionMismatch, "dimB must be at least 2");
    }

    Matrix2xD(std::size_t dimB, std::vector<Complex> entries) : dimB_(dimB), entries_(std::move(entries)) {
        if (dimB < 2) throw Error(ErrorKind::DimensionMismatch, "dimB must be at least 2");
        if (entries_.size() != 2 * dimB)
            throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(2 * dimB) +
                                                          " entries, got " + std::to_string(entries_.size()));
    }

    [[nodiscard]] std::size_t dimB() const noexcept { return dimB_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * dimB_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * dimB_ + j]; }

    [[nodiscard]] std::span<const Complex> row(std::size_t i) const {
        return std::span<const Complex>(entries_).subspan(i * dimB_, dimB_);
    }
    [[nodiscard]] std::span<Complex> row(std::size_t i) {
        return std::span<Complex>(entries_).subspan(i * dimB_, dimB_);
    }

    [[nodiscard]] std::span<const Complex> entries() const noexcept { return entries_; }
    [[nodiscard]] double frobenius_norm() const { return norm(entries_); }

    friend bool operator==(const Matrix2xD&, const Matrix2xD&) = default;

private:
    std::size_t dimB_;
    std::vector<Complex> entries_;
};

/// Largest absolute entrywise difference.
inline double max_abs_diff(const Matrix2xD& a, const Matrix2xD& b) {
    if (a.dimB() != b.dimB()) throw Error(ErrorKind::DimensionMismatch, "matrix widths differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k)
        worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
    return worst;
}

/// Square complex matrix, row-major. Used for local unitaries on B.
class DenseMatrix {
public:
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, Complex{0.0, 0.0}) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix id(n);
        for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
        return id;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    [[nodiscard]] DenseMatrix adjoint() const {
        DenseMatrix r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.n_ != b.n_) throw Error(ErrorKind::DimensionMismatch, "matrix sizes differ");
        DenseMatrix r(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i)
            for (std::size_t k = 0; k < a.n_; ++k) {
                const Complex aik = a(i, k);
                for (std::size_t j = 0; j < a.n_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    /// max |(U^dagger U - I)_ij|
    [[nodiscard]] double unitarity_defect() const {
        const DenseMatrix g = adjoint() * (*this);
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                worst = std::max(worst, std::abs(g(i, j) - (i == j ? Complex{1.0} : Complex{0.0})));
        return worst;
    }

private:
    std::size_t n_;
    std::vector<Complex> data_;
};

// ---------------------------------------------------------------------------
// SVD of a 2 x d matrix

/// C = uA * diag(s[0], s[1]) * V^dagger, with V's columns stored as vRows.
struct Svd2xD {
    Matrix2 uA;                          ///< columns are left singular vectors
    std::array<double, 2> s{};           ///< s[0] >= s[1] >= 0
    std::array<ComplexVector, 2> vRows;  ///< orthonormal right singular vectors
};

/// Singular value decomposition through the 2x2 Gram matrix C C^dagger.
///
/// Left vectors come from a Jacobi rotation of the Gram matrix and carry the
/// phase convention; each right vector is then C^dagger u_k / s_k, so the pair
/// (u_k, v_k) is fixed jointly. Singular values are the norms of C^dagger u_k,
/// which keeps reconstruction exact to roundoff even when s[1] is tiny. A right
/// vector whose singular value is negligible is completed by Gram-Schmidt
/// over the computational basis.
inline Svd2xD svd_2xd(const Matrix2xD& c) {
    const std::size_t d = c.dimB();
    if (c.frobenius_norm() < 1e-14)
        throw Error(ErrorKind::ZeroMatrix, "cannot decompose a matrix with Frobenius norm below 1e-14");

    const HermitianQubitOperator gram{squared_norm(c.row(0)), squared_norm(c.row(1)), inner(c.row(1), c.row(0))};
    const auto es = hermitian2_eigensystem(gram);

    // w_k = C^dagger u_k
    std::array<ComplexVector, 2> w{ComplexVector(d), ComplexVector(d)};
    std::array<double, 2> s{};
    for (std::size_t k = 0; k < 2; ++k) {
        const auto u = es.vectors.column(k);
        for (std::size_t j = 0; j < d; ++j) w[k][j] = std::conj(c(0, j)) * u[0] + std::conj(c(1, j)) * u[1];
        s[k] = norm(w[k]);
    }

    Svd2xD out;
    out.uA = es.vectors;
    if (s[1] > s[0]) {
        std::swap(s[0], s[1]);
        std::swap(w[0], w[1]);
        out.uA = Matrix2{{es.vectors(0, 1), es.vectors(0, 0), es.vectors(1, 1), es.vectors(1, 0)}};
    }
    out.s = s;

    ComplexVector v0 = std::move(w[0]);
    for (auto& z : v0) z /= s[0];
    const std::vector<ComplexVector> first{v0};

    ComplexVector v1;
    bool completed = false;
    if (s[1] > 1e-14 * s[0]) {
        v1 = std::move(w[1]);
        const double residual = orthogonalize(v1, first);
        if (residual > 0.0) {
            for (auto& z : v1) z /= residual;
            completed = true;
        }
    }
    if (!completed) {
        auto full = complete_orthonormal_basis(first, d, 2);
        v1 = std::move(full[1]);
    }
    out.vRows = {std::move(v0), std::move(v1)};
    return out;
}

} // namespace fideq
