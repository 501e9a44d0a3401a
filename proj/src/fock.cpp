#include "ihox/fock.hpp"

#include <cmath>
#include <sstream>

namespace ihox {

void PhysicalParams::validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("hbar must be positive");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass must be positive");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
    if (n_trunc < 2) throw ConfigError("n_trunc must be at least 2");
}

Pair ladder_matrices(const PhysicalParams& params) {
    params.validate();
    const int n = params.n_trunc;
    Mat a = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) a(i - 1, i) = std::sqrt(static_cast<double>(i));
    return {a, a.adjoint()};
}

Pair quadrature_matrices(const PhysicalParams& params) {
    auto [a, ad] = ladder_matrices(params);
    const double sx = std::sqrt(params.hbar / (2.0 * params.mass * params.omega));
    const double sp = std::sqrt(params.hbar * params.mass * params.omega / 2.0);
    Mat x = sx * (ad + a);
    Mat p = cplx(0.0, sp) * (ad - a);
    return {x, p};
}

Mat harmonic_hamiltonian(const PhysicalParams& params) {
    params.validate();
    const int n = params.n_trunc;
    Mat h = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = params.hbar * params.omega * (i + 0.5);
    return h;
}

Mat inverted_hamiltonian(const PhysicalParams& params) {
    params.validate();
    const int n = params.n_trunc;
    Mat h = Mat::Zero(n, n);
    // Built entrywise so the last rows carry the exact matrix elements, not a truncated product.
    for (int i = 0; i + 2 < n; ++i) {
        const double v = -0.5 * params.hbar * params.omega * std::sqrt((i + 1.0) * (i + 2.0));
        h(i, i + 2) = v;
        h(i + 2, i) = v;
    }
    return h;
}

Pair naive_ladder(const PhysicalParams& params) {
    auto [x, p] = quadrature_matrices(params);
    const double cx = std::sqrt(params.mass * params.omega / (2.0 * params.hbar));
    const double cp = 1.0 / std::sqrt(2.0 * params.mass * params.omega * params.hbar);
    const cplx phase = std::polar(1.0, M_PI / 4.0);
    Mat A = phase * (cx * x + cp * p);
    Mat Abar = phase * (cx * x - cp * p);
    return {A, Abar};
}

bool is_strictly_triangular(const Mat& m) {
    const Eigen::Index n = m.rows();
    bool upper = true, lower = true;
    for (Eigen::Index j = 0; j < n && (upper || lower); ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            if (m(i, j) == cplx(0.0)) continue;
            if (i >= j) upper = false;
            if (i <= j) lower = false;
        }
    return upper || lower;
}

namespace {

Mat exp_nilpotent(const Mat& m) {
    const Eigen::Index n = m.rows();
    Mat result = Mat::Identity(n, n);
    Mat term = Mat::Identity(n, n);
    for (Eigen::Index j = 1; j <= n; ++j) {
        term = (term * m) / static_cast<double>(j);
        if (term.isZero(0.0)) break;
        result += term;
    }
    return result;
}

double norm1(const Mat& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

Mat matrix_exponential(const Mat& m, const ExpmOptions& opts) {
    if (m.rows() != m.cols()) throw ConfigError("matrix_exponential needs a square matrix");
    if (!m.allFinite()) throw NumericalError("matrix_exponential: non-finite input");
    const Eigen::Index n = m.rows();
    if (n == 0) return m;
    if (is_strictly_triangular(m)) {
        Mat r = exp_nilpotent(m);
        if (!r.allFinite()) throw NumericalError("matrix_exponential: nilpotent series overflowed");
        return r;
    }

    const double nrm = norm1(m);
    if (nrm > opts.max_norm) {
        std::ostringstream os;
        os << "matrix_exponential: norm " << nrm << " too large (limit " << opts.max_norm << ")";
        throw NumericalError(os.str());
    }
    int s = 0;
    if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    const Mat ms = m / std::ldexp(1.0, s);

    Mat result = Mat::Identity(n, n);
    Mat term = Mat::Identity(n, n);
    for (int j = 1; j < 40; ++j) {
        term = (term * ms) / static_cast<double>(j);
        result += term;
        if (max_abs(term) <= opts.tol * max_abs(result)) break;
    }
    for (int i = 0; i < s; ++i) result = result * result;
    if (!result.allFinite()) throw NumericalError("matrix_exponential: result overflowed");
    return result;
}

Mat exp_hermitian(const Mat& h, cplx z) {
    if (h.imag().isZero(0.0)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
        if (es.info() != Eigen::Success) throw NumericalError("exp_hermitian: eigensolver failed");
        Vec d = (z * es.eigenvalues().cast<cplx>()).array().exp();
        Mat v = es.eigenvectors().cast<cplx>();
        return v * d.asDiagonal() * v.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("exp_hermitian: eigensolver failed");
    Vec d = (z * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

Mat commutator(const Mat& m1, const Mat& m2) {
    if (m1.rows() != m2.rows() || m1.cols() != m2.cols())
        throw ConfigError("commutator: dimension mismatch");
    return m1 * m2 - m2 * m1;
}

Mat adjoint(const Mat& m) { return m.adjoint(); }

Mat inverse(const Mat& m, double tol) {
    if (m.rows() != m.cols()) throw ConfigError("inverse needs a square matrix");
    Eigen::PartialPivLU<Mat> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > tol)) {
        std::ostringstream os;
        os << "inverse: matrix is ill-conditioned (condition estimate " << (rcond > 0 ? 1.0 / rcond : INFINITY)
           << ")";
        throw NumericalError(os.str());
    }
    return lu.inverse();
}

Mat project(const Mat& m, int k) {
    if (k < 0 || k > m.rows() || k > m.cols()) throw ConfigError("project: block larger than matrix");
    return m.topLeftCorner(k, k);
}

Vec project(const Vec& v, int k) {
    if (k < 0 || k > v.size()) throw ConfigError("project: block larger than vector");
    return v.head(k);
}

Vec basis_vector(int n, int dim) {
    if (n < 0 || n >= dim) throw ConfigError("basis_vector: index out of range");
    Vec v = Vec::Zero(dim);
    v(n) = 1.0;
    return v;
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double block_residual(const Mat& m, const Mat& ref, int k) {
    const Mat pr = project(ref, k);
    const double scale = std::max(1.0, max_abs(pr));
    return max_abs(Mat(project(m, k) - pr)) / scale;
}

double hermiticity_residual(const Mat& m, int k) {
    const Mat b = project(m, k);
    return max_abs(Mat(b - b.adjoint())) / std::max(1.0, max_abs(b));
}

}  // namespace ihox
