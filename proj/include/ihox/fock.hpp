#pragma once

#include "ihox/types.hpp"

#include <utility>

namespace ihox {

struct Pair {
    Mat first;
    Mat second;
};

// Annihilation a and creation a^dag on the truncated Fock space.
Pair ladder_matrices(const PhysicalParams& params);
// Position x and momentum p.
Pair quadrature_matrices(const PhysicalParams& params);
Mat harmonic_hamiltonian(const PhysicalParams& params);
Mat inverted_hamiltonian(const PhysicalParams& params);
// Ladder pair of the oscillator continued to imaginary frequency; second is not the adjoint of first.
Pair naive_ladder(const PhysicalParams& params);

struct ExpmOptions {
    double tol = 1e-16;
    // Largest scaled norm accepted before giving up with NumericalError.
    double max_norm = 700.0;
};

Mat matrix_exponential(const Mat& m, const ExpmOptions& opts = {});
// exp(z * h) for Hermitian h via its eigendecomposition.
Mat exp_hermitian(const Mat& h, cplx z);

Mat commutator(const Mat& m1, const Mat& m2);
Mat adjoint(const Mat& m);
// Throws NumericalError when the condition estimate exceeds 1/tol.
Mat inverse(const Mat& m, double tol = 1e-12);
Mat project(const Mat& m, int k);
Vec project(const Vec& v, int k);
Vec basis_vector(int n, int dim);

double max_abs(const Mat& m);
double max_abs(const Vec& v);
// max|P_k(m - ref)| / max(1, max|P_k ref|)
double block_residual(const Mat& m, const Mat& ref, int k);
double hermiticity_residual(const Mat& m, int k);

// True when m is strictly triangular (so nilpotent); used for the exact exponential path.
bool is_strictly_triangular(const Mat& m);

}  // namespace ihox
