#include "fideq/conditions.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "fideq/generator.hpp"
#include "oracles.hpp"

namespace fideq {
namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

BipartitePureState make(std::size_t d, std::initializer_list<Complex> amps) {
    const std::vector<Complex> v(amps);
    return new_state(d, v, Normalize::Auto);
}

Matrix2xD coeffs(std::size_t d, std::initializer_list<Complex> amps) { return make(d, amps).coeffs(); }

TEST(Conditions, PhiMinusAgainstPhiPlusFailsOnPhase) {
    const auto psi = make(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
    const auto phi = make(2, {kInvSqrt2, 0.0, 0.0, -kInvSqrt2});
    const auto r = check_pair(psi, phi).report;
    EXPECT_TRUE(r.flags[0]);
    EXPECT_FALSE(r.flags[1]);
    EXPECT_TRUE(r.flags[2]);
    EXPECT_TRUE(r.flags[3]);
    EXPECT_FALSE(r.verdict);
    ASSERT_TRUE(r.k.has_value());
    EXPECT_NEAR(*r.k, -1.0, 1e-14);
    ASSERT_TRUE(r.p.has_value());
    EXPECT_NEAR(*r.p, 0.0, 1e-15);
}

TEST(Conditions, IdenticalStatesPassAll) {
    const auto psi = make(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
    const auto r = check_pair(psi, psi).report;
    EXPECT_TRUE(r.verdict);
    EXPECT_NEAR(*r.k, 1.0, 1e-14);
}

TEST(Conditions, TailWeightFailsCondition3) {
    // Canonical frame at lambda = 1/4 with weight outside span{b0, b1}.
    Matrix2xD c(3);
    c(0, 0) = 0.6;
    c(1, 1) = 0.6;
    c(0, 2) = std::sqrt(0.28);
    const auto r = check_equality_conditions(0.25, c);
    EXPECT_FALSE(r.flags[2]);
    EXPECT_NEAR(r.residuals[2], 0.28, 1e-15);
    EXPECT_FALSE(r.verdict);
}

TEST(Conditions, ImbalancedOffDiagonalFailsCondition1) {
    const auto c = coeffs(2, {0.5, 0.5, 0.5, 0.5});
    const auto r = check_equality_conditions(0.25, c);
    EXPECT_FALSE(r.flags[0]);
    EXPECT_NEAR(r.residuals[0], std::abs(0.5 * 0.5 - std::sqrt(0.75) * 0.5), 1e-15);
}

TEST(Conditions, CrossTermPhaseFailsCondition4) {
    // |c00 c11| - |c01 c10| = |c00 c11 - c01 c10| fails when c01 c10 opposes c00 c11.
    const auto c = coeffs(2, {0.5, 0.5, -0.5, 0.5});
    const auto r = check_equality_conditions(0.5, c);
    EXPECT_FALSE(r.flags[3]);
    EXPECT_NEAR(r.residuals[3], 0.5, 1e-15);
}

TEST(Conditions, RejectsInvalidArguments) {
    Matrix2xD c(2);
    c(0, 0) = 1.0;
    EXPECT_THROW(check_equality_conditions(0.7, c), Error);
    EXPECT_THROW(check_equality_conditions(0.25, c, 0.0), Error);
    EXPECT_THROW(check_equality_conditions(0.25, c, -1.0), Error);
    EXPECT_THROW(check_equality_conditions(0.25, c, std::nan("")), Error);
}

TEST(Extractors, ExtractK) {
    EXPECT_NEAR(*lemma1_extract_k({1.0, 1.0}, {2.0, 2.0}, 1e-12), 2.0, 1e-15);
    EXPECT_FALSE(lemma1_extract_k({1.0, 0.0}, {0.0, 1.0}, 1e-12).has_value());
    EXPECT_FALSE(lemma1_extract_k({0.0, 0.0}, {1.0, 0.0}, 1e-12).has_value());
    // beta = 0: k = 0.
    EXPECT_NEAR(*lemma1_extract_k({0.3, -0.4}, {0.0, 0.0}, 1e-12), 0.0, 1e-15);
}

TEST(Extractors, ExtractP) {
    EXPECT_NEAR(*lemma1_extract_p({0.0, 2.0}, {0.0, 0.5}, 1e-12), 0.25, 1e-15);
    EXPECT_FALSE(lemma1_extract_p({1.0, 0.0}, {2.0, 0.0}, 1e-12).has_value());
    EXPECT_FALSE(lemma1_extract_p({1.0, 0.0}, {0.0, 0.5}, 1e-12).has_value());
}

TEST(EqualityCriterion, VerdictMatchesNumericGapOnEqualityFamily) {
    for (std::uint64_t n = 0; n < 2000; ++n) {
        const auto params = random_family_params(derive_seed(71, n));
        const std::size_t d = 2 + n % 5;
        const auto frame = canonical_frame(params.lambda, d);
        const auto phi = generate_equality_state(params, frame);
        const auto psi = frame_state(frame);
        const auto fc = check_pair(psi, phi);
        ASSERT_TRUE(fc.report.verdict) << "n=" << n;
        ASSERT_TRUE(numeric_equality_verdict(psi, phi));
        ASSERT_NEAR(global_fidelity(psi, phi), local_fidelity(psi, phi), 1e-10);
    }
}

TEST(EqualityCriterion, VerdictMatchesNumericGapOnRandomPairs) {
    oracle::TestRng rng(72);
    for (int n = 0; n < 5000; ++n) {
        const std::size_t d = rng.index(2, 6);
        const auto psi = rng.state(d);
        const auto phi = rng.state(d);
        const bool cond = check_pair(psi, phi).report.verdict;
        const bool numeric = numeric_equality_verdict(psi, phi);
        ASSERT_EQ(cond, numeric);
        ASSERT_FALSE(cond);
    }
}

TEST(EqualityCriterion, PerturbationsOfFamilyMembersBreakEquality) {
    oracle::TestRng rng(73);
    for (std::uint64_t n = 0; n < 500; ++n) {
        auto params = random_family_params(derive_seed(74, n));
        params.k = std::max(params.k, 0.2);
        params.p = std::min(std::max(params.p, 0.1), 0.9);
        const auto frame = canonical_frame(params.lambda, 3);
        const auto psi = frame_state(frame);
        Matrix2xD c = generate_equality_state(params, frame).coeffs();
        // Weight outside span{b0, b1}, or a relative phase on c11; both leave the family.
        if (n % 2 == 0) {
            c(rng.index(0, 1), 2) += 1e-2 * rng.gaussian();
        } else {
            c(1, 1) *= std::polar(1.0, rng.uniform(0.05, 3.0));
        }
        const auto phi = new_state(c, Normalize::Auto);
        const auto fc = check_pair(psi, phi);
        ASSERT_EQ(fc.report.verdict, numeric_equality_verdict(psi, phi)) << "n=" << n;
        ASSERT_FALSE(fc.report.verdict);
    }
}

TEST(EqualityCriterion, ConsequencesHoldWheneverVerdictIsTrue) {
    for (std::uint64_t n = 0; n < 2000; ++n) {
        const auto params = random_family_params(derive_seed(75, n));
        const auto frame = canonical_frame(params.lambda, 2);
        const auto fc = check_pair(frame_state(frame), generate_equality_state(params, frame));
        ASSERT_TRUE(fc.report.verdict);
        const auto& c = fc.coefficients;
        ASSERT_GE(std::abs(c(0, 0) * c(1, 1)), std::abs(c(0, 1) * c(1, 0)) - 1e-9);
        if (fc.report.p) {
            ASSERT_LE(*fc.report.p, 1.0 + 1e-9);
        }
        if (fc.report.k && params.k > 1e-6) {
            ASSERT_NEAR(*fc.report.k, params.k, 1e-6 * (1 + params.k));
        }
    }
}

TEST(EqualityCriterion, InvariantUnderFrameChoiceAtHalf) {
    // Re-gauging the Schmidt frame of phi+ by a_k -> W a_k, b_k -> conj(W) b_k
    // may change individual coefficients but not the verdict.
    oracle::TestRng rng(76);
    const auto psi = make(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
    for (int n = 0; n < 100; ++n) {
        const auto params = random_family_params(derive_seed(77, static_cast<std::uint64_t>(n)));
        BipartitePureState phi = (n % 2 == 0) ? rng.state(2)
                                              : generate_equality_state({0.5, params.k, params.p, params.theta01,
                                                                         params.theta10},
                                                                        canonical_frame(0.5, 2));
        const bool base = check_pair(psi, phi).report.verdict;
        const DenseMatrix w = haar_unitary(2, 900 + static_cast<std::uint64_t>(n));
        SchmidtForm frame = canonical_frame(0.5, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) frame.basisA(i, j) = w(i, j);
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t j = 0; j < 2; ++j) frame.basisB[k][j] = std::conj(w(j, k));
        const auto r = check_equality_conditions(0.5, express_in_frame(phi, frame));
        ASSERT_EQ(r.verdict, base) << "n=" << n;
        ASSERT_EQ(base, numeric_equality_verdict(psi, phi));
    }
}

TEST(SeparableCase, ComputationalBasisExamples) {
    const auto psi = make(2, {0.0, 0.0, 0.0, 1.0});
    const auto same = make(2, {0.0, 0.0, 0.0, 1.0});
    const auto mixed = make(2, {0.6, 0.0, 0.0, 0.8});
    const auto leak = make(2, {0.0, 0.0, 0.6, 0.8});
    EXPECT_TRUE(check_separable_case(same.coeffs()));
    EXPECT_TRUE(check_separable_case(mixed.coeffs()));
    EXPECT_FALSE(check_separable_case(leak.coeffs()));
    EXPECT_TRUE(check_pair(psi, mixed).report.verdict);
    EXPECT_TRUE(check_pair(psi, mixed).report.separableFrame);
    EXPECT_FALSE(check_pair(psi, leak).report.verdict);
}

TEST(SeparableCase, ProductPsiCounterexamplesResolvedByDispatch) {
    // With psi = |11>, phi = |02> and phi = (|00> - |11>)/sqrt2 both give
    // F^A = F^AB. The entangled-frame conditions would reject them.
    const auto psi = make(3, {0.0, 0.0, 0.0, 0.0, 1.0, 0.0});
    const auto a = make(3, {0.0, 0.0, 1.0, 0.0, 0.0, 0.0});
    const auto b = make(3, {kInvSqrt2, 0.0, 0.0, 0.0, -kInvSqrt2, 0.0});
    for (const auto* phi : {&a, &b}) {
        ASSERT_NEAR(local_fidelity(psi, *phi), global_fidelity(psi, *phi), 1e-14);
        const auto fc = check_pair(psi, *phi);
        EXPECT_TRUE(fc.report.separableFrame);
        EXPECT_TRUE(fc.report.verdict);
    }
}

TEST(SeparableCase, AgreesWithNumericGapAndBasisCheck) {
    oracle::TestRng rng(78);
    for (std::uint64_t n = 0; n < 3000; ++n) {
        const std::size_t d = 2 + n % 6;
        Matrix2xD raw(d);
        raw(1, 1) = 1.0;
        const auto psi = new_state(raw);
        BipartitePureState phi = (n % 2 == 0)
                                     ? rng.state(d)
                                     : generate_separable_psi_family(random_separable_params(d, n), d);
        const auto fc = check_pair(psi, phi);
        const bool basis = check_separable_case(phi.coeffs());
        ASSERT_EQ(fc.report.verdict, basis) << "n=" << n;
        ASSERT_EQ(basis, numeric_equality_verdict(psi, phi)) << "n=" << n;
        if (n % 2 == 1) {
            ASSERT_TRUE(basis);
            ASSERT_NEAR(global_fidelity(psi, phi), std::norm(phi.amplitude(1, 1)), 1e-12);
            ASSERT_NEAR(local_fidelity(psi, phi), std::norm(phi.amplitude(1, 1)), 1e-12);
        }
    }
}

TEST(NumericVerdict, RejectsBadTolerance) {
    const auto psi = make(2, {1.0, 0.0, 0.0, 0.0});
    EXPECT_THROW(numeric_equality_verdict(psi, psi, 0.0), Error);
    EXPECT_TRUE(numeric_equality_verdict(psi, psi));
}

TEST(Conditions, UniformCoefficientsAtHalfPassAll) {
    const auto r = check_equality_conditions(0.5, coeffs(2, {0.5, 0.5, 0.5, 0.5}));
    for (std::size_t n = 0; n < 4; ++n) EXPECT_TRUE(r.flags[n]) << n;
    EXPECT_TRUE(r.verdict);
    EXPECT_NEAR(*r.p, 1.0, 1e-15);
}

TEST(SeparableCase, RowSupportExamples) {
    EXPECT_FALSE(check_separable_case(coeffs(2, {0.0, kInvSqrt2, kInvSqrt2, 0.0})));
    EXPECT_TRUE(check_separable_case(coeffs(2, {1.0, 0.0, 0.0, 0.0})));
    EXPECT_TRUE(check_separable_case(coeffs(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2})));
}

TEST(Extractors, PhaseAlignedExamples) {
    const Complex e7 = std::polar(1.0, std::numbers::pi / 7.0);
    EXPECT_FALSE(lemma1_extract_k(3.0 * e7, -0.5 * e7, 1e-12).has_value());
    const Complex e3 = std::polar(1.0, std::numbers::pi / 3.0);
    EXPECT_NEAR(*lemma1_extract_p(2.0 * e3, 0.5 * e3, 1e-12), 0.25, 1e-15);
    EXPECT_FALSE(lemma1_extract_p(1.0, -1.0, 1e-12).has_value());
    EXPECT_NEAR(*lemma1_extract_p({1.0, 1.0}, {0.3, 0.3}, 1e-12), 0.3, 1e-15);
}

} // namespace
} // namespace fideq
