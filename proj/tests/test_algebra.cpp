#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "eitsim/algebra.hpp"
#include "eitsim/params.hpp"
#include "support/random_state.hpp"

using eitsim::AtomicOp;
using eitsim::cplx;
using eitsim::PhysicalParams;
using eitsim_test::means_from_density;
using eitsim_test::random_density_matrix;
using eitsim_test::random_operator;
using eitsim_test::to_matrix;

namespace {

bool matrix_close(const Eigen::Matrix3cd& a, const Eigen::Matrix3cd& b, double rtol = 1e-13) {
    return (a - b).norm() <= rtol * (1.0 + a.norm() + b.norm());
}

Eigen::Matrix3cd unit_matrix(int a, int b) {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(a, b) = 1.0;
    return m;
}

// Reference adjoint Liouvillian, written directly over 3x3 matrices with no
// use of the operator algebra: atomic Hamiltonian part plus the two emission
// channels and the pure ground-coherence decay.
Eigen::Matrix3cd reference_atomic_drift(const Eigen::Matrix3cd& y, const PhysicalParams& p) {
    const cplx im(0.0, 1.0);
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    h(0, 0) = -p.deltaL1;
    h(2, 2) = -(p.deltaL1 - p.deltaL2);

    const Eigen::Matrix3cd s00 = unit_matrix(0, 0);
    const Eigen::Matrix3cd s01 = unit_matrix(0, 1), s10 = unit_matrix(1, 0);
    const Eigen::Matrix3cd s02 = unit_matrix(0, 2), s20 = unit_matrix(2, 0);

    Eigen::Matrix3cd d = im * (h * y - y * h);
    d += p.Gamma1 * s01 * y * s10 + p.Gamma2 * s02 * y * s20;
    d -= 0.5 * p.Gamma() * (s00 * y + y * s00);
    d -= p.gamma12 * (y(1, 2) * unit_matrix(1, 2) + y(2, 1) * unit_matrix(2, 1));
    return d;
}

}  // namespace

TEST_SUITE("algebra") {

    TEST_CASE("sigma products contract exactly") {
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int c = 0; c < 3; ++c) {
                    for (int d = 0; d < 3; ++d) {
                        const AtomicOp prod = AtomicOp::sigma(a, b) * AtomicOp::sigma(c, d);
                        Eigen::Matrix3cd expected = Eigen::Matrix3cd::Zero();
                        if (b == c) expected(a, d) = 1.0;
                        CHECK(matrix_close(to_matrix(prod), expected));
                    }
                }
            }
        }
    }

    TEST_CASE("general products, sums and adjoints match 3x3 linear algebra") {
        std::mt19937_64 rng(42);
        for (int trial = 0; trial < 64; ++trial) {
            const AtomicOp x = random_operator(rng);
            const AtomicOp y = random_operator(rng);
            CHECK(matrix_close(to_matrix(x * y), to_matrix(x) * to_matrix(y)));
            CHECK(matrix_close(to_matrix(x + y), to_matrix(x) + to_matrix(y)));
            CHECK(matrix_close(to_matrix(x - y), to_matrix(x) - to_matrix(y)));
            CHECK(matrix_close(to_matrix(x.adjoint()), to_matrix(x).adjoint()));
            CHECK(matrix_close(to_matrix((x * y).adjoint()),
                               to_matrix(y).adjoint() * to_matrix(x).adjoint()));
            CHECK(matrix_close(to_matrix(eitsim::commutator(x, y)),
                               to_matrix(x) * to_matrix(y) - to_matrix(y) * to_matrix(x)));
        }
    }

    TEST_CASE("expectation equals the density-matrix trace") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 32; ++trial) {
            const Eigen::Matrix3cd rho = random_density_matrix(rng);
            const auto means = means_from_density(rho);
            const AtomicOp x = random_operator(rng);
            const cplx expected = (rho * to_matrix(x)).trace();
            CHECK(std::abs(x.expectation(means) - expected) <= 1e-12 * (1.0 + std::abs(expected)));
        }
    }

    TEST_CASE("operator drift reproduces the matrix Liouvillian") {
        PhysicalParams p = PhysicalParams::lambda_defaults();
        p.deltaL1 = 0.37 * p.Gamma();
        p.deltaL2 = -0.11 * p.Gamma();

        std::mt19937_64 rng(3);
        std::vector<AtomicOp> cases;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) cases.push_back(AtomicOp::sigma(a, b));
        }
        for (int trial = 0; trial < 8; ++trial) cases.push_back(random_operator(rng));

        const cplx im(0.0, 1.0);
        const Eigen::Matrix3cd s01 = unit_matrix(0, 1), s10 = unit_matrix(1, 0);
        const Eigen::Matrix3cd s02 = unit_matrix(0, 2), s20 = unit_matrix(2, 0);

        for (const AtomicOp& y : cases) {
            const Eigen::Matrix3cd ym = to_matrix(y);
            const eitsim::OperatorDrift d = eitsim::operator_drift(y, p);
            const double s = p.Gamma();
            CHECK(matrix_close(to_matrix(d.c0) / s, reference_atomic_drift(ym, p) / s));
            CHECK(matrix_close(to_matrix(d.cA1) / s, im * p.g1 * (s01 * ym - ym * s01) / s));
            CHECK(matrix_close(to_matrix(d.cA1d) / s, im * p.g1 * (s10 * ym - ym * s10) / s));
            CHECK(matrix_close(to_matrix(d.cA2) / s, im * p.g2 * (s02 * ym - ym * s02) / s));
            CHECK(matrix_close(to_matrix(d.cA2d) / s, im * p.g2 * (s20 * ym - ym * s20) / s));
        }
    }

    TEST_CASE("identity is conserved by the drift") {
        const PhysicalParams p = PhysicalParams::lambda_defaults();
        const eitsim::OperatorDrift d = eitsim::operator_drift(AtomicOp::identity(), p);
        CHECK(d.c0.norm1() / p.Gamma() < 1e-14);
        CHECK(d.cA1.norm1() / p.Gamma() < 1e-14);
        CHECK(d.cA1d.norm1() / p.Gamma() < 1e-14);
        CHECK(d.cA2.norm1() / p.Gamma() < 1e-14);
        CHECK(d.cA2d.norm1() / p.Gamma() < 1e-14);
    }

    TEST_CASE("drift of the adjoint is the adjoint of the drift") {
        PhysicalParams p = PhysicalParams::lambda_defaults();
        p.deltaL1 = 0.2 * p.Gamma();
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 16; ++trial) {
            const AtomicOp y = random_operator(rng);
            const auto dy = eitsim::operator_drift(y, p);
            const auto dyd = eitsim::operator_drift(y.adjoint(), p);
            CHECK(matrix_close(to_matrix(dyd.c0), to_matrix(dy.c0).adjoint()));
            // A1 multiplies cA1; under adjoint the A1^dag coefficient appears.
            CHECK(matrix_close(to_matrix(dyd.cA1d), to_matrix(dy.cA1).adjoint()));
            CHECK(matrix_close(to_matrix(dyd.cA1), to_matrix(dy.cA1d).adjoint()));
            CHECK(matrix_close(to_matrix(dyd.cA2d), to_matrix(dy.cA2).adjoint()));
            CHECK(matrix_close(to_matrix(dyd.cA2), to_matrix(dy.cA2d).adjoint()));
        }
    }
}
