#pragma once

// Conjugation of polynomial operators by products of exp(c a^2), exp(c a^dag^2)
// and exp(c (a^dag a + 1/2)), one factor at a time.
//
// Dense products with the full Dyson operator cancel entries of size 1e13 and
// more, so instead each factor is applied through its adjoint series, which
// terminates after `degree` terms for a polynomial of that degree. The working
// dimension is padded so the truncation edge never reaches the returned block,
// and everything runs in long double.

#include "ihox/types.hpp"

#include <vector>

namespace ihox {

// sum_i coeff_i * (a^dag)^p_i a^q_i, normal ordered.
class Poly {
public:
    struct Term {
        cplx coeff;
        int p;
        int q;
    };

    Poly() = default;
    static Poly monomial(cplx c, int p, int q) {
        Poly r;
        r.terms_.push_back({c, p, q});
        return r;
    }
    static Poly identity(cplx c = 1.0) { return monomial(c, 0, 0); }
    static Poly lower() { return monomial(1.0, 0, 1); }
    static Poly raise() { return monomial(1.0, 1, 0); }
    // a^dag a + 1/2
    static Poly number_half() { return monomial(1.0, 1, 1) + identity(0.5); }
    static Poly lower2() { return monomial(1.0, 0, 2); }
    static Poly raise2() { return monomial(1.0, 2, 0); }

    Poly operator+(const Poly& o) const {
        Poly r = *this;
        r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
        return r;
    }
    Poly operator-(const Poly& o) const { return *this + o * cplx(-1.0); }
    Poly operator*(cplx c) const {
        Poly r = *this;
        for (auto& t : r.terms_) t.coeff *= c;
        return r;
    }
    friend Poly operator*(cplx c, const Poly& p) { return p * c; }

    int degree() const;
    const std::vector<Term>& terms() const { return terms_; }

    // Exact matrix elements of the infinite operator restricted to the first `dim` levels.
    MatL matrix_wide(int dim) const;
    Mat matrix(int dim) const;

private:
    std::vector<Term> terms_;
};

enum class Generator { Lower2, Raise2, NumberHalf };

inline Generator adjoint_generator(Generator g) {
    switch (g) {
        case Generator::Lower2: return Generator::Raise2;
        case Generator::Raise2: return Generator::Lower2;
        default: return g;
    }
}

// exp(coeff * G)
struct Factor {
    Generator gen;
    cplx coeff;
};

// Ordered list; the first entry is the innermost conjugation, Y -> F Y F^-1.
using Chain = std::vector<Factor>;

// Conjugate a matrix whose entries are exact on its whole extent and that represents a
// polynomial of the given degree. Returns the block that is still exact (the input
// shrinks by 2*degree per nilpotent factor).
MatL conjugate_wide(const MatL& y, int degree, const Chain& chain);
// Rows lost by conjugate_wide.
int chain_shrink(int degree, const Chain& chain);

// Conjugate a polynomial and return the n_out x n_out block in double precision.
Mat conjugate(const Poly& y, const Chain& chain, int n_out);
// Conjugate a matrix input (degree given by the caller). The result has size
// rows - chain_shrink; the caller projects.
Mat conjugate(const Mat& y, int degree, const Chain& chain);

// Factor-wise application to vectors: F_last ... F_first v, exact nilpotent series.
VecL apply_chain(const VecL& v, const Chain& chain);
// Dense matrix of F_last ... F_first at dimension dim.
MatL chain_matrix_wide(const Chain& chain, int dim);

}  // namespace ihox
