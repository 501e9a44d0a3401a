#include "ihox/conjugation.hpp"
#include "ihox/fock.hpp"

#include <gtest/gtest.h>

using namespace ihox;

namespace {

// Dense reference at a padded dimension: F Y F^-1 for the chain, first factor innermost.
Mat dense_conjugate(const Poly& y, const Chain& chain, int dim) {
    const PhysicalParams pp{1.0, 1.0, 1.0, dim};
    auto [a, ad] = ladder_matrices(pp);
    Mat m = y.matrix(dim);
    for (const auto& f : chain) {
        Mat g;
        switch (f.gen) {
            case Generator::Lower2: g = a * a; break;
            case Generator::Raise2: g = ad * ad; break;
            default: g = ad * a + 0.5 * Mat::Identity(dim, dim);
        }
        const Mat e = matrix_exponential(f.coeff * g), ei = matrix_exponential(-f.coeff * g);
        m = e * m * ei;
    }
    return m;
}
}  // namespace

TEST(Poly, MatrixElements) {
    const Mat n = Poly::number_half().matrix(5);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(n(i, i).real(), i + 0.5, 1e-15);
    auto [a, ad] = ladder_matrices({1.0, 1.0, 1.0, 6});
    EXPECT_LT(max_abs(Mat(Poly::lower2().matrix(6) - a * a)), 1e-14);
    EXPECT_LT(max_abs(Mat(Poly::raise2().matrix(6) - ad * ad)), 1e-14);
    EXPECT_EQ((Poly::raise2() + Poly::lower()).degree(), 2);
}

TEST(Conjugation, NilpotentFactorMatchesDense) {
    const Chain c = {{Generator::Lower2, cplx(0.0, -0.25)}};
    const Mat got = conjugate(Poly::raise(), c, 16);
    const Mat want = dense_conjugate(Poly::raise(), c, 40);
    EXPECT_LT(block_residual(got, want.topLeftCorner(16, 16), 16), 1e-12);
    // exp(c a^2) a^dag exp(-c a^2) = a^dag + 2c a exactly
    auto [a, ad] = ladder_matrices({1.0, 1.0, 1.0, 16});
    EXPECT_LT(block_residual(got, Mat(ad + 2.0 * cplx(0.0, -0.25) * a), 16), 1e-14);
}

TEST(Conjugation, NumberFactorScales) {
    const Chain c = {{Generator::NumberHalf, cplx(0.3, 0.1)}};
    const Mat got = conjugate(Poly::lower2(), c, 12);
    const Mat want = std::exp(-2.0 * cplx(0.3, 0.1)) * Poly::lower2().matrix(12);
    EXPECT_LT(block_residual(got, want, 12), 1e-14);
}

TEST(Conjugation, ChainRoundTripIsIdentity) {
    const Chain fwd = {{Generator::Raise2, cplx(0.0, 0.5)}, {Generator::Lower2, cplx(0.0, -0.25)}};
    Chain back;
    for (auto it = fwd.rbegin(); it != fwd.rend(); ++it) back.push_back({it->gen, -it->coeff});
    Chain both = fwd;
    both.insert(both.end(), back.begin(), back.end());
    const Poly y = Poly::raise() + 2.0 * Poly::lower();
    EXPECT_LT(block_residual(conjugate(y, both, 16), y.matrix(16), 16), 1e-12);
}

TEST(Conjugation, ShrinkAccounting) {
    const Chain c = {{Generator::Raise2, 1.0}, {Generator::NumberHalf, 1.0}, {Generator::Lower2, 1.0}};
    EXPECT_EQ(chain_shrink(2, c), 8);
    const MatL wide = Poly::number_half().matrix_wide(30);
    EXPECT_EQ(conjugate_wide(wide, 2, c).rows(), 22);
}

TEST(ApplyChain, InverseChainUndoes) {
    const Chain fwd = {{Generator::Raise2, cplx(0.0, 0.5)}, {Generator::Lower2, cplx(0.0, -0.25)}};
    Chain inv;
    for (auto it = fwd.rbegin(); it != fwd.rend(); ++it) inv.push_back({it->gen, -it->coeff});
    VecL v = VecL::Zero(40);
    v(0) = 1.0L;
    v(3) = cplxl(0.0L, 0.5L);
    const VecL back = apply_chain(apply_chain(v, fwd), inv);
    EXPECT_LT(static_cast<double>((back.head(10) - v.head(10)).cwiseAbs().maxCoeff()), 1e-12);
}

TEST(ApplyChain, MatchesDenseMatrix) {
    const Chain c = {{Generator::Lower2, cplx(0.1, -0.2)}, {Generator::NumberHalf, cplx(0.2, 0.0)}};
    const MatL m = chain_matrix_wide(c, 12);
    VecL v = VecL::Zero(12);
    v(4) = 1.0L;
    const VecL got = apply_chain(v, c);
    EXPECT_LT(static_cast<double>((m * v - got).cwiseAbs().maxCoeff()), 1e-15);
}
