#include <doctest.h>

#include <cmath>
#include <random>

#include "eitsim/criteria.hpp"
#include "support/covariance_gen.hpp"

using namespace eitsim;
using eitsim_test::random_separable_cov;
using eitsim_test::two_mode_squeezed_cov;

TEST_SUITE("criteria") {

    TEST_CASE("vacuum sits exactly on both boundaries") {
        const Eigen::Matrix4d v = Eigen::Matrix4d::Identity();
        const ReidResult r = reid_product(v);
        CHECK(r.product == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.eta0 == 0.0);
        CHECK(r.eta_pi2 == 0.0);
        const EprSumResult d = dgcz_sum(v);
        CHECK(d.sum == doctest::Approx(4.0).epsilon(1e-15));
        const EntanglementReport rep = classify(v, 1.0);
        CHECK_FALSE(rep.entangled_reid);
        CHECK_FALSE(rep.entangled_dgcz);
        CHECK(rep.depth_reid == doctest::Approx(0.0));
        CHECK(rep.depth_dgcz == doctest::Approx(0.0));
    }

    TEST_CASE("two-mode squeezing reproduces the closed forms") {
        for (double r : {0.05, 0.3, 0.8, 1.5}) {
            const Eigen::Matrix4d v = two_mode_squeezed_cov(r);
            const double c2 = std::cosh(2.0 * r);
            const ReidResult reid = reid_product(v);
            CHECK(reid.product == doctest::Approx(1.0 / (c2 * c2)).epsilon(1e-12));
            CHECK(reid.eta0 == doctest::Approx(std::tanh(2.0 * r)).epsilon(1e-12));
            CHECK(reid.eta_pi2 == doctest::Approx(std::tanh(2.0 * r)).epsilon(1e-12));
            const EprSumResult d = dgcz_sum(v);
            CHECK(d.sum == doctest::Approx(4.0 * std::exp(-2.0 * r)).epsilon(1e-12));
            CHECK(d.sign_x == -1);  // cross = s - (-s) > 0, so u = X1 - X2
            const EntanglementReport rep = classify(v, 0.0);
            CHECK(rep.entangled_reid);
            CHECK(rep.entangled_dgcz);
            CHECK(uncertainty_residual(v) >= -1e-12);
        }
    }

    TEST_CASE("closed-form gains beat every gain on a dense grid") {
        std::mt19937_64 rng(91);
        for (int trial = 0; trial < 40; ++trial) {
            const Eigen::Matrix4d v = trial % 4 == 0 ? two_mode_squeezed_cov(0.07 * trial)
                                                     : random_separable_cov(rng);
            const ReidResult r = reid_product(v);
            for (int k = -60; k <= 60; ++k) {
                const double eta = 0.1 * k;
                const double vx = v(2, 2) - 2.0 * eta * v(0, 2) + eta * eta * v(0, 0);
                const double vp = v(3, 3) + 2.0 * eta * v(1, 3) + eta * eta * v(1, 1);
                CHECK(vx >= (v(2, 2) - v(0, 2) * v(0, 2) / v(0, 0)) - 1e-9 * v(2, 2));
                CHECK(vp >= (v(3, 3) - v(1, 3) * v(1, 3) / v(1, 1)) - 1e-9 * v(3, 3));
            }
            // Both sign assignments, never below the reported minimum.
            const EprSumResult d = dgcz_sum(v);
            const double plus = v.trace() + 2.0 * (v(0, 2) - v(1, 3));
            const double minus = v.trace() - 2.0 * (v(0, 2) - v(1, 3));
            CHECK(d.sum == doctest::Approx(std::min(plus, minus)));
        }
    }

    TEST_CASE("separable covariances are never flagged") {
        std::mt19937_64 rng(12021);
        for (int trial = 0; trial < 2000; ++trial) {
            const Eigen::Matrix4d v = random_separable_cov(rng);
            CHECK(reid_product(v).product >= 1.0 - 1e-9);
            CHECK(dgcz_sum(v).sum >= 4.0 - 1e-9);
        }
    }

    TEST_CASE("uncorrelated added noise never strengthens a verdict") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 25; ++trial) {
            const Eigen::Matrix4d v = trial % 3 == 0 ? two_mode_squeezed_cov(0.1 * trial)
                                                     : random_separable_cov(rng);
            const double reid0 = reid_product(v).product;
            const double dgcz0 = dgcz_sum(v).sum;
            for (double c : {0.05, 0.4, 2.0}) {
                const Eigen::Matrix4d w = v + c * Eigen::Matrix4d::Identity();
                CHECK(reid_product(w).product >= reid0 - 1e-12);
                CHECK(dgcz_sum(w).sum >= dgcz0 - 1e-12);
            }
        }
    }

    TEST_CASE("uncertainty residual separates physical from unphysical") {
        CHECK(uncertainty_residual(Eigen::Matrix4d::Identity()) >= -1e-12);
        CHECK(uncertainty_residual(two_mode_squeezed_cov(1.0)) >= -1e-12);
        // Uniformly sub-vacuum noise violates the commutator bound.
        CHECK(uncertainty_residual(0.5 * Eigen::Matrix4d::Identity()) < -0.4);
        std::mt19937_64 rng(55);
        for (int trial = 0; trial < 200; ++trial) {
            CHECK(uncertainty_residual(random_separable_cov(rng)) >= -1e-9);
        }
    }
}
