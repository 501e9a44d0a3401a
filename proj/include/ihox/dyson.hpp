#pragma once

#include "ihox/conjugation.hpp"
#include "ihox/fock.hpp"
#include "ihox/types.hpp"

#include <string>
#include <vector>

namespace ihox {

struct DisentangleParams {
    double epsilon = 0.0;
    cplx mu_plus{};
    cplx mu_minus{};
    cplx theta{};
    cplx chi{};
    cplx v_plus{};
    cplx v_zero{};
    cplx v_minus{};

    // |v_zero - (v_plus v_minus - chi)|: the identity that actually holds.
    double consistency_residual() const;
    // |v_zero - (mu_plus mu_minus - chi)|: the mu-product variant, informational only.
    double mu_form_residual() const;
};

// Throws DegenerateError when cosh(theta) - eps sinh(theta)/theta vanishes.
DisentangleParams disentangle(double epsilon, cplx mu_plus, cplx mu_minus);
DisentangleParams from_transform_coefficients(cplx v_plus, cplx v_minus, cplx v_zero);

// True iff (v_plus, v_minus, v_zero) = (-i, i/2, 1) within tol.
bool constraint_check(const DisentangleParams& d, double tol = 1e-10);

struct QuadraticCoefficients {
    cplx number;  // coefficient of a^dag a + 1/2
    cplx raise2;  // of a^dag^2
    cplx lower2;  // of a^2
};
// Coefficients of the transformed oscillator Hamiltonian, in units of hbar*omega.
QuadraticCoefficients transformed_coefficients(const DisentangleParams& d);
Mat transformed_hamiltonian_general(const PhysicalParams& params, const DisentangleParams& d);

// rho = F_1 F_2 ... F_m with F_i = exp(c_i G_i); dense matrices are kept for
// inspection, all identity checks go through the factor chains.
struct DysonMap {
    std::vector<Factor> factors;
    Mat rho;
    Mat rho_inv;
    Mat eta;
    Mat eta_inv;

    // Chains for Y -> rho^-1 Y rho, rho Y rho^-1, rho^dag Y rho^-dag, rho^-dag Y rho^dag.
    Chain inv_similarity() const;
    Chain fwd_similarity() const;
    Chain dag_similarity() const;
    Chain inv_dag_similarity() const;

    // Vector application: the first chain applies rho^-1, the second rho.
    Chain apply_inv() const { return inv_similarity(); }
    Chain apply_fwd() const;

    MatL rho_wide(int dim) const;
    MatL rho_inv_wide(int dim) const;
};

DysonMap build_general_dyson(const PhysicalParams& params, const DisentangleParams& d);
DysonMap build_inverted_dyson(const PhysicalParams& params);
// The dense single-generator reference exp(-2[(eps/2)(N+1/2) + mu_-/2 a^2 + mu_+/2 a^dag^2]).
Mat single_generator_exponential(const PhysicalParams& params, const DisentangleParams& d);

struct Check {
    std::string name;
    std::string paper_ref;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

Check make_check(std::string name, std::string ref, double residual, double tol);

struct SignResolution {
    int sigma = 0;
    double residual = 0.0;        // winning candidate, relative block residual
    double other_residual = 0.0;  // losing candidate, same metric
    double hr_scale = 0.0;        // max |P_k H^r|
};
// Throws SignUnresolved if neither candidate reaches tol or both do.
SignResolution resolve_similarity_sign(const PhysicalParams& params, const DysonMap& dyson, int k,
                                       double tol = 1e-8);

struct LadderPair {
    Mat A;
    Mat Abar;
    Mat A_closed;
    Mat Abar_closed;
};
LadderPair transformed_ladder(const PhysicalParams& params, const DysonMap& dyson);

// x and p as polynomials in a, a^dag.
Poly position_poly(const PhysicalParams& params);
Poly momentum_poly(const PhysicalParams& params);

Pair pseudo_quadratures(const PhysicalParams& params, const DysonMap& dyson);
Mat hamiltonian_from_ladder(const PhysicalParams& params, const Mat& A, const Mat& Abar);
// (i/2)(P^2/m + m omega^2 X^2)
Mat hamiltonian_from_quadratures(const PhysicalParams& params, const Mat& X, const Mat& P);

std::vector<Check> conjugation_identities_check(const PhysicalParams& params, const DisentangleParams& d, int k,
                                                double tol);

struct PseudoHermiticityReport {
    double residual_eta = 0.0;        // (iH)^dag vs eta (iH) eta^-1, eta = rho^dag rho
    double residual_eta_tilde = 0.0;  // (iH)^dag vs eta~^-1 (iH) eta~, eta~ = rho rho^dag
    std::string metric;               // "rho_dag_rho" | "rho_rho_dag" | "none" | "both"
    double orthonormality = 0.0;      // max |<n^r|eta|m^r> - delta|, n,m < k_ortho
    double abar_adjoint = 0.0;        // Abar vs eta^-1 A^dag eta
};
PseudoHermiticityReport pseudo_hermiticity_check(const PhysicalParams& params, const DysonMap& dyson, int k,
                                                 int k_ortho, double tol = 1e-8);

struct HeisenbergReport {
    double unitarity = 0.0;     // ||U^dag U - I|| for one step
    double second_order = 0.0;  // max_t ||X'' - omega^2 X|| / ||X||
    double first_order_x = 0.0; // max_t ||X' - iP/m|| / ||iP/m||
    double first_order_p = 0.0; // max_t ||P' + i m omega^2 X|| / ||m omega^2 X||
    double at_zero = 0.0;       // (1/i hbar)[X, H^r] vs iP/m
    int samples = 0;
};
// Times sampled on [h, t_max - h] with at most max_samples points; h is the finite-difference step.
HeisenbergReport heisenberg_dynamics_check(const PhysicalParams& params, const DysonMap& dyson, double t_max,
                                           double h, int k, int max_samples = 11);

// Working dimension for propagating with H^r up to time t while keeping the first k levels exact.
int propagation_dim(int n_trunc, int k, double omega_t);

}  // namespace ihox
