#include "ihox/coherent.hpp"
#include "ihox/fock.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ihox;

namespace {
PhysicalParams unit(int n) { return {1.0, 1.0, 1.0, n}; }

class Inverted : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        p_ = new PhysicalParams(unit(64));
        dm_ = new DysonMap(build_inverted_dyson(*p_));
    }
    static void TearDownTestSuite() {
        delete dm_;
        delete p_;
    }
    static PhysicalParams* p_;
    static DysonMap* dm_;
};
PhysicalParams* Inverted::p_ = nullptr;
DysonMap* Inverted::dm_ = nullptr;
}  // namespace

TEST(Oscillator, VacuumAtZero) {
    const CoherentState s = coherent_oscillator(unit(16), 0.0);
    EXPECT_LT(max_abs(Vec(s.coeffs - basis_vector(0, 16))), 1e-15);
}

TEST(Oscillator, Eigenvector) {
    const PhysicalParams p = unit(32);
    const cplx alpha(0.5, 0.3);
    auto [a, ad] = ladder_matrices(p);
    const Vec v = coherent_oscillator(p, alpha).coeffs;
    EXPECT_LT(max_abs(project(Vec(a * v - alpha * v), 24)), 1e-10);
}

TEST(Oscillator, DisplacementMatchesCoefficients) {
    const PhysicalParams p = unit(32);
    const cplx alpha(0.5, 0.3);
    const Vec v = coherent_oscillator(p, alpha).coeffs;
    EXPECT_LT(max_abs(Vec(displacement_operator(p, alpha).col(0) - v)), 1e-10);
}

TEST(Oscillator, TruncationGuard) {
    EXPECT_THROW(coherent_oscillator(unit(16), 2.0), TruncationInadequate);
    EXPECT_LT(poisson_tail(0.25, 30), 1e-30);
}

TEST_F(Inverted, VacuumIsAnnihilated) {
    const Vec v0 = coherent_inverted(*p_, *dm_, 0.0).coeffs;
    const LadderPair lp = transformed_ladder(*p_, *dm_);
    EXPECT_LT(max_abs(project(Vec(lp.A * v0), 16)), 1e-10);
}

TEST_F(Inverted, EtaNormalised) {
    const Vec v = coherent_inverted(*p_, *dm_, 0.5).coeffs;
    EXPECT_NEAR(eta_norm2(*dm_, v, eta_working_dim(0.25)), 1.0, 1e-8);
}

TEST_F(Inverted, DisplacedVacuum) {
    // exp(alpha Abar - alpha* A) on |0>^r, built from the transformed ladder pair
    const PhysicalParams p = unit(96);
    const DysonMap dm = build_inverted_dyson(p);
    const cplx alpha(0.3, 0.2);
    const LadderPair lp = transformed_ladder(p, dm);
    const Mat dr = matrix_exponential(Mat(alpha * lp.Abar - std::conj(alpha) * lp.A));
    const Vec got = dr * coherent_inverted(p, dm, 0.0).coeffs;
    const Vec want = coherent_inverted(p, dm, alpha).coeffs;
    EXPECT_LT(max_abs(project(Vec(got - want), 12)), 1e-8);
}

TEST_F(Inverted, ClosedFormAtTimeZero) {
    const CoherentState s = coherent_inverted(*p_, *dm_, 0.5);
    const EvolvedState e = evolve_closed_form(*p_, *dm_, s, 0.0);
    EXPECT_LT(max_abs(Vec(e.coeffs - s.coeffs)), 1e-14);
    EXPECT_LT(max_abs(Vec(evolve_direct(*p_, *dm_, s, 0.0, 16) - s.coeffs)), 1e-14);
}

TEST(Evolution, ClosedFormMatchesDirect) {
    const PhysicalParams p = unit(128);
    const DysonMap dm = build_inverted_dyson(p);
    const CoherentState s = coherent_inverted(p, dm, 0.5);
    const Vec c = project(evolve_closed_form(p, dm, s, 0.5).coeffs, 32);
    const Vec d = project(evolve_direct(p, dm, s, 0.5, 32), 32);
    EXPECT_LT(max_abs(Vec(c - d)) / std::max(1.0, max_abs(c)), 1e-6);
}

TEST_F(Inverted, EvolvedEtaNorm) {
    // grows as e^{omega t} times the norm ratio of the grown coherent state
    const CoherentState s = coherent_inverted(*p_, *dm_, 0.5);
    const EvolvedState e = evolve_closed_form(*p_, *dm_, s, 0.5);
    const double b2 = std::norm(e.grown_alpha);
    const double want = std::exp(0.5) * std::exp(b2 - 0.25);
    EXPECT_NEAR(eta_norm2(*dm_, e.coeffs, eta_working_dim(b2)) / want, 1.0, 1e-6);
}

TEST(Evolution, PlainNormPreserved) {
    const PhysicalParams p = unit(64);
    const Propagator u(p, 128);
    const DysonMap dm = build_inverted_dyson(p.with_dim(128));
    const Vec v = coherent_inverted(p.with_dim(128), dm, 0.5).coeffs;
    EXPECT_NEAR(u.evolve(v, 0.7).norm(), v.norm(), 1e-10 * v.norm());
}

TEST(Evolution, HarmonicRotation) {
    const PhysicalParams p = unit(40);
    const cplx alpha(0.5, 0.0);
    const double t = 0.8;
    const Vec rot = exp_hermitian(harmonic_hamiltonian(p), cplx(0, -t)) * coherent_oscillator(p, alpha).coeffs;
    const Vec want = std::exp(cplx(0, -t / 2)) * coherent_oscillator(p, alpha * std::exp(cplx(0, -t))).coeffs;
    EXPECT_LT(max_abs(Vec(rot - want)), 1e-10);
}

TEST(Evolution, GuardRejectsLongTimes) {
    const PhysicalParams p = unit(64);
    const DysonMap dm = build_inverted_dyson(p);
    const CoherentState s = coherent_inverted(p, dm, 0.5);
    EXPECT_THROW(evolve_closed_form(p, dm, s, 1.5), Error);
}

TEST_F(Inverted, ExpectationValues) {
    const int w = eta_working_dim(1.0);
    const Vec one = coherent_inverted(*p_, *dm_, 1.0).coeffs;
    EXPECT_NEAR(std::abs(eta_expectation(*p_, *dm_, one, Mat::Identity(64, 64), 0, w) - 1.0), 0.0, 1e-8);
    const MomentReport m = moments(*p_, *dm_, one, w);
    EXPECT_NEAR(m.mean_X.real(), std::sqrt(2.0), 1e-8);
    EXPECT_LT(std::abs(m.mean_P), 1e-8);

    const Vec vac = coherent_inverted(*p_, *dm_, 0.0).coeffs;
    const MomentReport mv = moments(*p_, *dm_, vac, eta_working_dim(0.0));
    EXPECT_NEAR(mv.mean_X2.real(), 0.5, 1e-8);
}

TEST_F(Inverted, MinimumUncertaintyAlongEvolution) {
    const CoherentState s = coherent_inverted(*p_, *dm_, 0.5);
    const MomentReport m0 = moments(*p_, *dm_, s.coeffs, eta_working_dim(0.25));
    const EvolvedState e = evolve_closed_form(*p_, *dm_, s, 0.4);
    const MomentReport m = moments(*p_, *dm_, e.coeffs, eta_working_dim(std::norm(e.grown_alpha)));
    EXPECT_NEAR(m.product, 0.5, 1e-8);
    EXPECT_NEAR(m.mean_X.real() / m0.mean_X.real(), std::exp(0.4), 1e-6);
}

TEST(Moments, ClosedForms) {
    const PhysicalParams p{2.0, 0.5, 3.0, 64};
    const ClosedMoments c = closed_moments(p, cplx(0.3, 0.2));
    EXPECT_NEAR(c.x, std::sqrt(2.0 / 3.0) * 0.6, 1e-14);
    EXPECT_NEAR(c.p, std::sqrt(1.5) * 0.4, 1e-14);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
    const Quadrature q = gauss_legendre(8);
    double s0 = 0, s6 = 0;
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        s0 += q.weights[i];
        s6 += q.weights[i] * std::pow(q.nodes[i], 6);
    }
    EXPECT_NEAR(s0, 2.0, 1e-14);
    EXPECT_NEAR(s6, 2.0 / 7.0, 1e-14);
}

TEST(Identity, ResolutionBothFrames) {
    const PhysicalParams p = unit(128);
    const DysonMap dm = build_inverted_dyson(p);
    const IdentityReport os = resolution_of_identity(p, Frame::Oscillator, 6.0, 128, 128, 8);
    const IdentityReport inv = resolution_of_identity(p, Frame::Inverted, 6.0, 128, 128, 8, &dm);
    EXPECT_LT(os.max_deviation, 1e-3);
    EXPECT_LT(os.diag_deviation, 1e-3);
    EXPECT_LT(inv.max_deviation, 1e-3);
    EXPECT_LT(max_abs(Mat(inv.block - os.block)), 1e-8);
}

TEST(Trajectory, AgreesWithClosedForm) {
    const PhysicalParams p = unit(64);
    const DysonMap dm = build_inverted_dyson(p);
    std::vector<double> times;
    for (int i = 0; i <= 20; ++i) times.push_back(0.05 * i);
    const Trajectory tr = classical_trajectory(p, dm, 0.5, times, 16);
    ASSERT_EQ(tr.rows.size(), times.size());
    EXPECT_TRUE(tr.warning.empty());
    for (const auto& r : tr.rows) {
        EXPECT_NEAR(r.x_matrix / r.x_closed, 1.0, 1e-6);
        EXPECT_EQ(r.p_closed, 0.0);
        EXPECT_NEAR(r.product, 0.5, 1e-8);
    }
    EXPECT_NEAR(tr.rows[0].x_closed, std::sqrt(2.0) * 0.5, 1e-15);
}
