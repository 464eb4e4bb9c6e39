#pragma once

// Constructs states achieving F^AB = F^A against a given psi, and draws
// Haar-random states and unitaries from a counter-based generator.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fideq/error.hpp"
#include "fideq/numerics.hpp"
#include "fideq/states.hpp"

namespace fideq {

// ---------------------------------------------------------------------------
// Random numbers

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream key from a parent key and an index.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(parent) ^ splitmix64(index + 0xD1B54A32D192ED03ULL));
}

/// Counter-based stream: the n-th draw is a pure function of (key, n), so
/// parallel consumers with disjoint keys reproduce regardless of scheduling.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(splitmix64(seed)) {}

    std::uint64_t next_u64() noexcept { return splitmix64(key_ ^ (0xA0761D6478BD642FULL * ++counter_)); }

    /// Uniform on (0, 1].
    double uniform_open0() noexcept { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard complex Gaussian: real and imaginary parts are N(0, 1/2).
    Complex complex_normal() noexcept {
        const double r = std::sqrt(-std::log(uniform_open0()));
        const double t = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Haar-random pure state: normalized i.i.d. complex Gaussian amplitudes.
inline BipartitePureState haar_sample(std::size_t dimB, std::uint64_t seed) {
    if (dimB < 2) throw Error(ErrorKind::DimensionMismatch, "dimB must be at least 2");
    CounterRng rng(seed);
    std::vector<Complex> amps(2 * dimB);
    for (auto& z : amps) z = rng.complex_normal();
    return new_state(Matrix2xD(dimB, std::move(amps)), Normalize::Auto);
}

/// Haar-random n x n unitary: Gram-Schmidt of a complex Gaussian matrix with the
/// phases of R's diagonal absorbed (so the distribution is exactly Haar).
inline DenseMatrix haar_unitary(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<ComplexVector> columns;
    columns.reserve(n);
    while (columns.size() < n) {
        ComplexVector v(n);
        for (auto& z : v) z = rng.complex_normal();
        const double r = orthogonalize(v, columns);
        if (r < 1e-8) continue;
        for (auto& z : v) z /= r;
        columns.push_back(std::move(v));
    }
    DenseMatrix u(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) u(i, j) = columns[j][i];
    return u;
}

// ---------------------------------------------------------------------------
// Equality families

/// Parameters of the entangled-psi family; the overall amplitude c00 is fixed
/// by normalization.
struct EqualityFamilyParams {
    double lambda = 0.5;  ///< in (0, 1/2]
    double k = 0.0;       ///< c11 = k c00, k >= 0
    double p = 0.0;       ///< c01 c10 = p c00 c11, 0 <= p <= 1
    double theta01 = 0.0;
    double theta10 = 0.0;

    [[nodiscard]] Complex alpha() const { return std::polar(1.0, 0.5 * (theta01 - theta10)); }
};

/// phi = c11 |11> + sum_j c0j |0j> against psi = |11>.
struct SeparableFamilyParams {
    Complex c11{1.0, 0.0};
    std::vector<Complex> tail;  ///< c0j, j = 0..d-1
};

/// Frame with identity bases: psi = sqrt(lambda)|00> + sqrt(1-lambda)|11>.
inline SchmidtForm canonical_frame(double lambda, std::size_t dimB) {
    if (dimB < 2) throw Error(ErrorKind::DimensionMismatch, "dimB must be at least 2");
    if (!(lambda >= 0.0 && lambda <= 0.5)) throw Error(ErrorKind::InvalidLambda, "lambda must lie in [0, 1/2]");
    SchmidtForm f;
    f.lambda = lambda;
    f.basisA = Matrix2::identity();
    f.basisB = {ComplexVector(dimB), ComplexVector(dimB)};
    f.basisB[0][0] = 1.0;
    f.basisB[1][1] = 1.0;
    return f;
}

/// psi of a frame as a validated state.
inline BipartitePureState frame_state(const SchmidtForm& frame) {
    return new_state(frame.reconstruct(), Normalize::Auto);
}

inline void validate(const EqualityFamilyParams& params) {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(params.lambda) || !finite(params.k) || !finite(params.p) || !finite(params.theta01) ||
        !finite(params.theta10))
        throw Error(ErrorKind::InvalidParams, "parameters must be finite");
    if (params.lambda <= 0.0)
        throw Error(ErrorKind::InvalidParams,
                    "lambda = 0 means psi is separable; use the separable family (c11, tail) instead");
    if (params.lambda > 0.5) throw Error(ErrorKind::InvalidParams, "lambda must not exceed 1/2");
    if (params.k < 0.0) throw Error(ErrorKind::InvalidParams, "k must be non-negative");
    if (params.p < 0.0) throw Error(ErrorKind::InvalidParams, "p must be non-negative");
    if (params.p > 1.0) throw Error(ErrorKind::InvalidParams, "p must not exceed 1");
}

/// Frame coefficients (unnormalized, c00 = 1) of the family member:
///   |00> + sqrt(r p k) alpha |01> + sqrt(p k / r) alpha* |10> + k |11>,
/// with r = sqrt(1-lambda)/sqrt(lambda).
inline Matrix2xD equality_family_coefficients(const EqualityFamilyParams& params, std::size_t dimB) {
    validate(params);
    const double ratio = std::sqrt(1.0 - params.lambda) / std::sqrt(params.lambda);
    const double pk = params.p * params.k;
    const Complex alpha = params.alpha();
    Matrix2xD c(dimB);
    c(0, 0) = 1.0;
    c(0, 1) = std::sqrt(ratio * pk) * alpha;
    c(1, 0) = std::sqrt(pk / ratio) * std::conj(alpha);
    c(1, 1) = params.k;
    const double nrm = c.frobenius_norm();
    for (std::size_t i = 0; i < 2; ++i)
        for (auto& z : c.row(i)) z /= nrm;
    return c;
}

namespace detail {

inline void require_matching_frame(const EqualityFamilyParams& params, const SchmidtForm& frame) {
    if (std::abs(frame.lambda - params.lambda) > 1e-12)
        throw Error(ErrorKind::InvalidParams, "frame lambda " + std::to_string(frame.lambda) +
                                                  " differs from params lambda " + std::to_string(params.lambda));
}

} // namespace detail

inline BipartitePureState generate_equality_state(const EqualityFamilyParams& params, const SchmidtForm& frame) {
    validate(params);
    detail::require_matching_frame(params, frame);
    return new_state(embed_from_frame(equality_family_coefficients(params, frame.dimB()), frame), Normalize::Auto);
}

/// At p = 1 the family member factorizes:
///   (|0> + sqrt(k / r) alpha* |1>)_A (x) (|0> + sqrt(r k) alpha |1>)_B.
inline BipartitePureState generate_separable_product_state(const EqualityFamilyParams& params,
                                                           const SchmidtForm& frame) {
    validate(params);
    if (params.p != 1.0) throw Error(ErrorKind::InvalidParams, "product form requires p = 1");
    detail::require_matching_frame(params, frame);
    const double ratio = std::sqrt(1.0 - params.lambda) / std::sqrt(params.lambda);
    const Complex alpha = params.alpha();
    const std::array<Complex, 2> partA{Complex{1.0}, std::sqrt(params.k / ratio) * std::conj(alpha)};
    const std::array<Complex, 2> partB{Complex{1.0}, std::sqrt(ratio * params.k) * alpha};
    Matrix2xD c(frame.dimB());
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) c(i, j) = partA[i] * partB[j];
    return new_state(embed_from_frame(c, frame), Normalize::Auto);
}

/// phi = c11 |11> + sum_j c0j |0j> in the computational basis (psi = |11>).
inline BipartitePureState generate_separable_psi_family(const SeparableFamilyParams& params, std::size_t dimB) {
    if (dimB < 2) throw Error(ErrorKind::DimensionMismatch, "dimB must be at least 2");
    if (params.tail.size() != dimB)
        throw Error(ErrorKind::DimensionMismatch, "tail must have dimB = " + std::to_string(dimB) + " entries");
    Matrix2xD c(dimB);
    for (std::size_t j = 0; j < dimB; ++j) c(0, j) = params.tail[j];
    c(1, 1) = params.c11;
    if (std::abs(c.frobenius_norm() - 1.0) > 1e-10)
        throw Error(ErrorKind::NotNormalized, "|c11|^2 + sum |c0j|^2 must equal 1");
    return new_state(std::move(c), Normalize::Auto);
}

/// Draws valid family parameters: lambda ~ U(0.01, 0.5], k ~ U[0, 4], p ~ U[0, 1],
/// angles ~ U[0, 2 pi).
inline EqualityFamilyParams random_family_params(std::uint64_t seed) {
    CounterRng rng(seed);
    EqualityFamilyParams params;
    params.lambda = 0.5 - 0.49 * rng.uniform();
    params.k = 4.0 * rng.uniform();
    params.p = rng.uniform();
    params.theta01 = 2.0 * std::numbers::pi * rng.uniform();
    params.theta10 = 2.0 * std::numbers::pi * rng.uniform();
    return params;
}

/// Draws a normalized separable-family member with random c11 and tail.
inline SeparableFamilyParams random_separable_params(std::size_t dimB, std::uint64_t seed) {
    CounterRng rng(seed);
    SeparableFamilyParams params;
    params.c11 = rng.complex_normal();
    params.tail.resize(dimB);
    for (auto& z : params.tail) z = rng.complex_normal();
    double total = std::norm(params.c11) + squared_norm(params.tail);
    const double scale = 1.0 / std::sqrt(total);
    params.c11 *= scale;
    for (auto& z : params.tail) z *= scale;
    return params;
}

} // namespace fideq
