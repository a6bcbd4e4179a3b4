#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fafl/matrix_core.hpp"
#include "test_support.hpp"

using namespace fafl;
using fafl::testing::gaussian;
using fafl::testing::max_abs;

TEST(Svd, IdentityAndDiagonal) {
    const SvdResult id = svd(Mat::Identity(3, 3));
    EXPECT_NEAR(max_abs(id.singular_values - Vec::Ones(3)), 0.0, 1e-14);

    const Mat d = Vec((Vec(3) << 3, 2, 1).finished()).asDiagonal();
    const SvdResult dd = svd(d);
    EXPECT_NEAR(dd.singular_values(0), 3.0, 1e-14);
    EXPECT_NEAR(dd.singular_values(1), 2.0, 1e-14);
    EXPECT_NEAR(dd.singular_values(2), 1.0, 1e-14);
}

TEST(Svd, RankOneNormProduct) {
    Vec u(4), v(3);
    u << 1, 1, 1, 1;  // |u| = 2
    v << 3, 4, 0;     // |v| = 5
    const SvdResult dec = svd(u * v.transpose());
    EXPECT_NEAR(dec.singular_values(0), u.norm() * v.norm(), 1e-12);
    EXPECT_NEAR(dec.singular_values(0), 10.0, 1e-12);
    EXPECT_NEAR(dec.singular_values(1), 0.0, 1e-12);
}

TEST(Svd, InvariantsOnRandomMatrices) {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 30; ++rep) {
        const Index rows = fafl::testing::uniform_int(1, 40, gen);
        const Index cols = fafl::testing::uniform_int(1, 40, gen);
        const Mat a = gaussian(rows, cols, gen);
        const SvdResult dec = svd(a);
        const Index p = std::min(rows, cols);
        ASSERT_EQ(dec.singular_values.size(), p);
        for (Index j = 0; j < p; ++j) {
            EXPECT_GE(dec.singular_values(j), 0.0);
            if (j > 0) {
                EXPECT_LE(dec.singular_values(j), dec.singular_values(j - 1));
            }
        }
        EXPECT_LE(max_abs(dec.left_vectors.transpose() * dec.left_vectors - Mat::Identity(p, p)), 1e-10);
        EXPECT_LE(max_abs(dec.right_vectors.transpose() * dec.right_vectors - Mat::Identity(p, p)), 1e-10);
        const Mat back = dec.left_vectors * dec.singular_values.asDiagonal() * dec.right_vectors.transpose();
        EXPECT_LE((back - a).norm() / a.norm(), 1e-10);
    }
}

TEST(Svd, RejectsNonFinite) {
    Mat a = Mat::Identity(2, 2);
    a(0, 1) = std::nan("");
    EXPECT_THROW(svd(a), InvalidArgument);
}

TEST(Norms, OperatorNorm) {
    EXPECT_EQ(operator_norm(Mat::Zero(3, 2)), 0.0);
    EXPECT_NEAR(operator_norm(Vec((Vec(3) << 3, 2, 1).finished()).asDiagonal()), 3.0, 1e-14);
    EXPECT_NEAR(operator_norm(Mat::Ones(2, 2)), 2.0, 1e-14);
}

TEST(Norms, NuclearNorm) {
    EXPECT_EQ(nuclear_norm(Mat::Zero(2, 2)), 0.0);
    EXPECT_NEAR(nuclear_norm(Vec((Vec(3) << 3, 2, 1).finished()).asDiagonal()), 6.0, 1e-13);
    std::mt19937_64 gen(5);
    const Mat a = gaussian(5, 4, gen);
    EXPECT_NEAR(nuclear_norm(a), svd(a).singular_values.sum(), 1e-10);
    EXPECT_GE(nuclear_norm(a), frobenius_norm(a));
}

TEST(Norms, FrobeniusInner) {
    std::mt19937_64 gen(3);
    const Mat a = gaussian(4, 3, gen);
    const Mat b = gaussian(4, 3, gen);
    EXPECT_NEAR(frobenius_inner(a, a), a.squaredNorm(), 1e-12);
    EXPECT_NEAR(frobenius_inner(a, b), frobenius_inner(b, a), 1e-14);
    EXPECT_NEAR(frobenius_inner(a, b), (a.transpose() * b).trace(), 1e-12);

    Mat swap(2, 2);
    swap << 0, 1, 1, 0;
    EXPECT_EQ(frobenius_inner(Mat::Identity(2, 2), swap), 0.0);

    Mat x(2, 2), y(2, 2);
    x << 1, 2, 3, 4;
    y << 5, 6, 7, 8;
    EXPECT_EQ(frobenius_inner(x, y), 70.0);
    EXPECT_THROW(frobenius_inner(x, Mat::Zero(2, 3)), ShapeError);
}

TEST(TruncatedApprox, EdgeRanks) {
    std::mt19937_64 gen(9);
    const Mat a = gaussian(6, 4, gen);
    EXPECT_LE(max_abs(truncated_approx(a, 4) - a), 1e-10);
    EXPECT_EQ(max_abs(truncated_approx(a, 0)), 0.0);
    EXPECT_THROW(truncated_approx(a, 5), InvalidArgument);
    EXPECT_THROW(truncated_approx(a, -1), InvalidArgument);

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 5;
    d(1, 1) = 1;
    Mat expected = Mat::Zero(2, 2);
    expected(0, 0) = 5;
    EXPECT_LE(max_abs(truncated_approx(d, 1) - expected), 1e-14);
}

TEST(TruncatedApprox, EckartYoungOperatorNorm) {
    std::mt19937_64 gen(21);
    for (int rep = 0; rep < 40; ++rep) {
        const Index rows = fafl::testing::uniform_int(2, 25, gen);
        const Index cols = fafl::testing::uniform_int(2, 25, gen);
        const Mat a = gaussian(rows, cols, gen);
        const Vec s = singular_values(a);
        const Index p = std::min(rows, cols);
        for (Index r = 0; r < p; ++r) {
            const Mat approx = truncated_approx(a, r);
            EXPECT_NEAR(operator_norm(a - approx), s(r), 1e-9);
            EXPECT_LE(numerical_rank(approx), r);
        }
    }
}

TEST(Weyl, SingularValuesMoveByAtMostOperatorNorm) {
    std::mt19937_64 gen(33);
    for (int rep = 0; rep < 50; ++rep) {
        const Index rows = fafl::testing::uniform_int(2, 30, gen);
        const Index cols = fafl::testing::uniform_int(2, 30, gen);
        const Mat a = gaussian(rows, cols, gen, 3.0);
        const Mat z = gaussian(rows, cols, gen, 0.5);
        const Vec sa = singular_values(a);
        const Vec sz = singular_values(a + z);
        EXPECT_LE((sz - sa).cwiseAbs().maxCoeff(), operator_norm(z) + 1e-9);
    }
}

TEST(Projector, FromVectors) {
    EXPECT_EQ(max_abs(projector_from_vectors(Mat(3, 0), 3)), 0.0);

    Mat e1 = Mat::Zero(3, 1);
    e1(0, 0) = 1;
    Mat expected = Mat::Zero(3, 3);
    expected(0, 0) = 1;
    EXPECT_LE(max_abs(projector_from_vectors(e1, 3) - expected), 1e-15);

    Mat u(2, 1);
    u << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    EXPECT_LE(max_abs(projector_from_vectors(u, 2) - Mat::Constant(2, 2, 0.5)), 1e-15);

    Mat bad(2, 1);
    bad << 1, 1;
    EXPECT_THROW(projector_from_vectors(bad, 2), InvalidArgument);
    EXPECT_THROW(projector_from_vectors(u, 3), ShapeError);
}

TEST(Projector, SymmetricIdempotentAndSignInvariant) {
    std::mt19937_64 gen(44);
    for (int rep = 0; rep < 30; ++rep) {
        const Index n = fafl::testing::uniform_int(2, 30, gen);
        const Index r = fafl::testing::uniform_int(1, n, gen);
        const Mat q = svd(gaussian(n, r, gen)).left_vectors;
        const Mat p = projector_from_vectors(q, n);
        EXPECT_TRUE(is_symmetric(p));
        EXPECT_LE(max_abs(p * p - p), 1e-10);
        EXPECT_EQ(numerical_rank(p), r);

        Vec signs(r);
        for (Index j = 0; j < r; ++j) signs(j) = (gen() & 1) ? 1.0 : -1.0;
        const Mat flipped = q * signs.asDiagonal();
        EXPECT_LE(max_abs(projector_from_vectors(flipped, n) - p), 1e-12);
    }
}

TEST(Annihilator, Basics) {
    EXPECT_EQ(max_abs(annihilator(Mat::Zero(3, 3)) - Mat::Identity(3, 3)), 0.0);
    EXPECT_EQ(max_abs(annihilator(Mat::Identity(3, 3))), 0.0);
    Mat p = Mat::Zero(2, 2);
    p(0, 0) = 1;
    Mat expected = Mat::Zero(2, 2);
    expected(1, 1) = 1;
    EXPECT_EQ(max_abs(annihilator(p) - expected), 0.0);

    Mat not_projector(2, 2);
    not_projector << 1, 2, 0, 1;
    EXPECT_THROW(annihilator(not_projector), InvalidArgument);
    EXPECT_THROW(annihilator(Mat::Zero(2, 3)), ShapeError);
}

TEST(Annihilator, Involution) {
    std::mt19937_64 gen(45);
    for (int rep = 0; rep < 20; ++rep) {
        const Index n = fafl::testing::uniform_int(2, 20, gen);
        const Index r = fafl::testing::uniform_int(0, n, gen);
        const Mat p = projector_from_vectors(r ? svd(gaussian(n, r, gen)).left_vectors : Mat(n, 0), n);
        const Mat m = annihilator(p);
        if (r == n) {
            EXPECT_LE(max_abs(m), 1e-12);
        } else {
            EXPECT_EQ(numerical_rank(m), n - r);
        }
        EXPECT_LE(max_abs(annihilator(m) - p), 1e-12);
    }
}

TEST(Stacking, HorizontalAndTransposed) {
    Mat a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 5, 6, 7, 8;
    EXPECT_EQ(hstack({a}), a);
    Mat ab(2, 4);
    ab << 1, 2, 5, 6, 3, 4, 7, 8;
    EXPECT_EQ(hstack({a, b}), ab);
    EXPECT_EQ(hstack_transposed({a}), Mat(a.transpose()));
    EXPECT_EQ(hstack_transposed({a, b}), hstack({Mat(a.transpose()), Mat(b.transpose())}));
    EXPECT_THROW(hstack({a, Mat::Zero(3, 2)}), ShapeError);
    EXPECT_THROW(hstack_transposed({a, Mat::Zero(2, 3)}), ShapeError);
}
