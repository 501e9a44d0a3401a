#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ihox {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Wide types for the ill-conditioned conjugation and round-trip paths.
using cplxl = std::complex<long double>;
using MatL = Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<cplxl, Eigen::Dynamic, 1>;

struct PhysicalParams {
    double hbar = 1.0;
    double mass = 1.0;
    double omega = 1.0;
    int n_trunc = 128;

    void validate() const;
    PhysicalParams with_dim(int n) const {
        PhysicalParams p = *this;
        p.n_trunc = n;
        return p;
    }
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Degenerate inputs: singular disentangling denominator, zero eta-norm (CLI exit code 3).
class DegenerateError : public Error {
public:
    using Error::Error;
};

class TruncationInadequate : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class BranchCutError : public Error {
public:
    using Error::Error;
};

class SignUnresolved : public Error {
public:
    using Error::Error;
};

}  // namespace ihox
