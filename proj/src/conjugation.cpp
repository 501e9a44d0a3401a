#include "ihox/conjugation.hpp"

#include <cmath>

namespace ihox {

namespace {

using real = long double;

cplxl widen(cplx c) { return {static_cast<real>(c.real()), static_cast<real>(c.imag())}; }

// a^2 has elements sqrt((i+1)(i+2)) at (i, i+2).
real lower2_elem(Eigen::Index i) { return std::sqrt(static_cast<real>(i + 1) * static_cast<real>(i + 2)); }

MatL left_mul(Generator g, const MatL& t) {
    const Eigen::Index w = t.rows();
    MatL r = MatL::Zero(w, t.cols());
    if (g == Generator::Lower2) {
        for (Eigen::Index i = 0; i + 2 < w; ++i) r.row(i) = lower2_elem(i) * t.row(i + 2);
    } else {
        for (Eigen::Index i = 2; i < w; ++i) r.row(i) = lower2_elem(i - 2) * t.row(i - 2);
    }
    return r;
}

MatL right_mul(Generator g, const MatL& t) {
    const Eigen::Index w = t.cols();
    MatL r = MatL::Zero(t.rows(), w);
    if (g == Generator::Lower2) {
        for (Eigen::Index j = 2; j < w; ++j) r.col(j) = lower2_elem(j - 2) * t.col(j - 2);
    } else {
        for (Eigen::Index j = 0; j + 2 < w; ++j) r.col(j) = lower2_elem(j) * t.col(j + 2);
    }
    return r;
}

void clean_band(MatL& m, int band, Eigen::Index valid) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (i >= valid || j >= valid || std::abs(static_cast<long>(i - j)) > band) m(i, j) = 0;
}

VecL apply_generator(Generator g, const VecL& v) {
    const Eigen::Index w = v.size();
    VecL r = VecL::Zero(w);
    if (g == Generator::Lower2) {
        for (Eigen::Index i = 0; i + 2 < w; ++i) r(i) = lower2_elem(i) * v(i + 2);
    } else if (g == Generator::Raise2) {
        for (Eigen::Index i = 2; i < w; ++i) r(i) = lower2_elem(i - 2) * v(i - 2);
    } else {
        for (Eigen::Index i = 0; i < w; ++i) r(i) = (static_cast<real>(i) + 0.5L) * v(i);
    }
    return r;
}

real log_factorial_ratio(int hi, int lo) {
    // log(hi! / lo!)
    real s = 0;
    for (int k = lo + 1; k <= hi; ++k) s += std::log(static_cast<real>(k));
    return s;
}

}  // namespace

int Poly::degree() const {
    int d = 0;
    for (const auto& t : terms_)
        if (t.coeff != cplx(0.0)) d = std::max(d, t.p + t.q);
    return d;
}

MatL Poly::matrix_wide(int dim) const {
    MatL m = MatL::Zero(dim, dim);
    for (const auto& t : terms_) {
        const cplxl c = widen(t.coeff);
        for (int col = t.q; col < dim; ++col) {
            const int mid = col - t.q;
            const int row = mid + t.p;
            if (row >= dim) break;
            const real mag = std::exp(0.5L * (log_factorial_ratio(col, mid) + log_factorial_ratio(row, mid)));
            m(row, col) += c * mag;
        }
    }
    return m;
}

Mat Poly::matrix(int dim) const { return matrix_wide(dim).cast<cplx>(); }

int chain_shrink(int degree, const Chain& chain) {
    int s = 0;
    for (const auto& f : chain)
        if (f.gen != Generator::NumberHalf) s += 2 * degree;
    return s;
}

MatL conjugate_wide(const MatL& y, int degree, const Chain& chain) {
    MatL cur = y;
    Eigen::Index valid = y.rows();
    for (const auto& f : chain) {
        const cplxl c = widen(f.coeff);
        if (f.gen == Generator::NumberHalf) {
            for (Eigen::Index j = 0; j < cur.cols(); ++j)
                for (Eigen::Index i = 0; i < cur.rows(); ++i)
                    if (cur(i, j) != cplxl(0)) cur(i, j) *= std::exp(c * static_cast<real>(i - j));
            continue;
        }
        // exp(X) Y exp(-X) = sum_n ad_X^n(Y) / n!, finite for polynomial Y.
        MatL sum = cur;
        MatL term = cur;
        for (int n = 1; n <= degree; ++n) {
            term = (c / static_cast<real>(n)) * (left_mul(f.gen, term) - right_mul(f.gen, term));
            clean_band(term, degree, valid);
            sum += term;
        }
        valid -= 2 * degree;
        if (valid < 0) valid = 0;
        clean_band(sum, degree, valid);
        cur = std::move(sum);
    }
    return cur.topLeftCorner(valid, valid);
}

Mat conjugate(const Poly& y, const Chain& chain, int n_out) {
    const int d = std::max(1, y.degree());
    const int w = n_out + chain_shrink(d, chain);
    return conjugate_wide(y.matrix_wide(w), d, chain).topLeftCorner(n_out, n_out).cast<cplx>();
}

Mat conjugate(const Mat& y, int degree, const Chain& chain) {
    return conjugate_wide(y.cast<cplxl>(), std::max(1, degree), chain).cast<cplx>();
}

VecL apply_chain(const VecL& v, const Chain& chain) {
    VecL cur = v;
    for (const auto& f : chain) {
        const cplxl c = widen(f.coeff);
        if (f.gen == Generator::NumberHalf) {
            for (Eigen::Index i = 0; i < cur.size(); ++i) cur(i) *= std::exp(c * (static_cast<real>(i) + 0.5L));
            continue;
        }
        VecL sum = cur;
        VecL term = cur;
        for (Eigen::Index n = 1; n <= cur.size(); ++n) {
            term = (c / static_cast<real>(n)) * apply_generator(f.gen, term);
            if (term.isZero(0)) break;
            sum += term;
        }
        cur = std::move(sum);
    }
    return cur;
}

MatL chain_matrix_wide(const Chain& chain, int dim) {
    MatL m(dim, dim);
    for (int j = 0; j < dim; ++j) {
        VecL e = VecL::Zero(dim);
        e(j) = 1;
        m.col(j) = apply_chain(e, chain);
    }
    return m;
}

}  // namespace ihox
