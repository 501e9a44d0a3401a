#pragma once

#include "ihox/dyson.hpp"
#include "ihox/types.hpp"

#include <string>
#include <vector>

namespace ihox {

enum class Frame { Oscillator, Inverted };

struct CoherentState {
    cplx alpha{};
    Frame frame = Frame::Oscillator;
    Vec coeffs;
    double tail_mass = 0.0;
};

struct EvolvedState {
    CoherentState base;
    double t = 0.0;
    cplx grown_alpha{};     // alpha e^{omega t}
    cplx prefactor{};       // e^{omega t / 2}
    double norm_factor = 1.0;  // e^{(|grown|^2 - |alpha|^2)/2}, from the normalisation of the grown state
    Vec coeffs;
};

struct MomentReport {
    cplx mean_X{}, mean_P{}, mean_X2{}, mean_P2{};
    double delta_X = 0.0, delta_P = 0.0, product = 0.0;
};

// sum_{n >= n0} e^{-lam} lam^n / n!
double poisson_tail(double lam, int n0);

// Throws TruncationInadequate if |alpha|^2 > n_trunc/8 or the tail mass exceeds tail_tol.
CoherentState coherent_oscillator(const PhysicalParams& params, cplx alpha, double tail_tol = 1e-10);
Mat displacement_operator(const PhysicalParams& params, cplx alpha);
// rho^-1 |alpha>^os; dyson must come from build_inverted_dyson.
CoherentState coherent_inverted(const PhysicalParams& params, const DysonMap& dyson, cplx alpha,
                                double tail_tol = 1e-10);

EvolvedState evolve_closed_form(const PhysicalParams& params, const DysonMap& dyson, const CoherentState& state,
                                double t, bool unsafe = false);
// exp(-i H^r t / hbar) applied to the state, propagated at a padded dimension so the
// first k levels are exact; returns n_trunc coefficients.
Vec evolve_direct(const PhysicalParams& params, const DysonMap& dyson, const CoherentState& state, double t, int k,
                  bool unsafe = false);

// Spectral propagator for H^r at a fixed working dimension.
class Propagator {
public:
    Propagator(const PhysicalParams& params, int dim);
    Vec evolve(const Vec& psi, double t) const;
    int dim() const { return dim_; }

private:
    int dim_;
    double hbar_;
    Eigen::MatrixXd vecs_;
    Eigen::VectorXd vals_;
};

// Dimension for eta round trips: smallest W >= 16 whose os-frame Poisson tail is negligible.
int eta_working_dim(double grown_abs2);

// <psi| eta O |psi> / <psi| eta |psi> with eta = rho^dag rho. O has the given polynomial degree
// and is exact on its whole extent.
cplx eta_expectation(const PhysicalParams& params, const DysonMap& dyson, const Vec& psi, const Mat& observable,
                     int degree, int w_eta);
double eta_norm2(const DysonMap& dyson, const Vec& psi, int w_eta);

// Caches the oscillator-frame images of X, P, X^2, P^2.
class MomentEvaluator {
public:
    MomentEvaluator(const PhysicalParams& params, const DysonMap& dyson);
    MomentReport at(const Vec& psi, int w_eta) const;

private:
    PhysicalParams params_;
    const DysonMap* dyson_;
    Mat x_, p_, x2_, p2_;
};

MomentReport moments(const PhysicalParams& params, const DysonMap& dyson, const Vec& psi, int w_eta);

struct ClosedMoments {
    double x = 0.0, p = 0.0, x2 = 0.0, p2 = 0.0;
    cplx p2_imaginary_prefactor{};  // same magnitude pattern with a -i prefactor; not real, kept for comparison
};
ClosedMoments closed_moments(const PhysicalParams& params, cplx grown_alpha);

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

struct IdentityReport {
    Mat block;
    double max_deviation = 0.0;
    double diag_deviation = 0.0;
};
IdentityReport resolution_of_identity(const PhysicalParams& params, Frame frame, double radius, int n_radial,
                                      int n_angular, int k, const DysonMap* dyson = nullptr);

struct TrajectoryRow {
    double t = 0.0;
    double x_closed = 0.0, x_matrix = 0.0, p_closed = 0.0, p_matrix = 0.0;
    double dX = 0.0, dP = 0.0, product = 0.0;
    double imag_x = 0.0, imag_p = 0.0;
};
struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::string warning;  // non-empty when the grid was cut at the truncation guard
};
Trajectory classical_trajectory(const PhysicalParams& params, const DysonMap& dyson, cplx alpha,
                                const std::vector<double>& times, int k, bool unsafe = false);

}  // namespace ihox
