#pragma once

// Fixed-seed consistency suites run by `fideq selftest`.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fideq/conditions.hpp"
#include "fideq/fidelity.hpp"
#include "fideq/generator.hpp"
#include "fideq/numerics.hpp"
#include "fideq/states.hpp"

namespace fideq {

struct SelftestSuite {
    std::string name;
    std::size_t cases = 0;
    double maxError = 0.0;
    bool passed = false;
};

struct SelftestOptions {
    double tol = kDefaultConditionTolerance;
    std::size_t casesPerSuite = 10000;
    std::uint64_t seed = 0x5E1F7E57ULL;
    /// Flips the sign of the cross term in the closed form; the oracle suite must
    /// then fail. Used to check the harness itself.
    bool injectFault = false;
};

inline std::vector<SelftestSuite> run_selftest(const SelftestOptions& opt = {}) {
    std::vector<SelftestSuite> out;

    {
        SelftestSuite suite{"gram-identity"};
        for (std::size_t n = 0; n < opt.casesPerSuite; ++n) {
            CounterRng rng(derive_seed(opt.seed, n));
            const std::size_t d = 2 + static_cast<std::size_t>(rng.next_u64() % 15);
            ComplexVector r0(d), r1(d);
            for (auto& z : r0) z = rng.complex_normal();
            for (auto& z : r1) z = rng.complex_normal();
            const double scale = norm(r0) * norm(r1);
            for (auto& z : r0) z /= std::sqrt(scale);
            for (auto& z : r1) z /= std::sqrt(scale);
            const auto sides = gram_identity_sides(r0, r1);
            suite.maxError = std::max(suite.maxError, std::abs(sides.lhs - sides.rhs) / std::max(1.0, sides.rhs));
            ++suite.cases;
        }
        out.push_back(suite);
    }

    {
        SelftestSuite suite{"closed-form-vs-oracle"};
        constexpr std::array<std::size_t, 4> dims{2, 3, 5, 8};
        for (std::size_t n = 0; n < opt.casesPerSuite; ++n) {
            const std::size_t d = dims[n % dims.size()];
            const auto psi = haar_sample(d, derive_seed(opt.seed + 1, 2 * n));
            const auto phi = haar_sample(d, derive_seed(opt.seed + 1, 2 * n + 1));
            const SchmidtForm frame = schmidt_decompose(psi);
            const Matrix2xD c = express_in_frame(phi, frame);
            const double lambda = frame.lambda;
            const double middle = std::sqrt(antisymmetrized_pair_sum(c.row(0), c.row(1)));
            const double sign = opt.injectFault ? -1.0 : 1.0;
            const double closed = lambda * squared_norm(c.row(0)) +
                                  sign * 2.0 * std::sqrt(lambda * (1.0 - lambda)) * middle +
                                  (1.0 - lambda) * squared_norm(c.row(1));
            const double oracle = generic_uhlmann_fidelity(reduced_qubit(psi), reduced_qubit(phi));
            suite.maxError = std::max(suite.maxError, std::abs(closed - oracle));
            ++suite.cases;
        }
        out.push_back(suite);
    }

    {
        SelftestSuite suite{"eigenvalue-trace-determinant"};
        for (std::size_t n = 0; n < opt.casesPerSuite; ++n) {
            CounterRng rng(derive_seed(opt.seed + 2, n));
            const HermitianQubitOperator h{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                                           rng.complex_normal()};
            const auto ev = hermitian2_eigenvalues(h);
            const double err = std::max(std::abs(ev.plus + ev.minus - h.trace()),
                                        std::abs(ev.plus * ev.minus - h.determinant()));
            suite.maxError = std::max(suite.maxError, err);
            ++suite.cases;
        }
        out.push_back(suite);
    }

    for (auto& suite : out) suite.passed = suite.maxError <= opt.tol;
    return out;
}

} // namespace fideq
