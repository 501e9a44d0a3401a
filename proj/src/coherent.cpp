#include "ihox/coherent.hpp"

#include "ihox/fock.hpp"

#include <cmath>
#include <sstream>

namespace ihox {

double poisson_tail(double lam, int n0) {
    if (n0 <= 0) return 1.0;
    if (lam <= 0.0) return 0.0;
    double sum = 0.0;
    for (int j = n0; j < n0 + 100000; ++j) {
        const double term = std::exp(-lam + j * std::log(lam) - std::lgamma(j + 1.0));
        sum += term;
        if (j > lam && term <= 1e-18 * sum) break;
        if (j > lam && term < 1e-300) break;
    }
    return sum;
}

namespace {

void check_guard(const PhysicalParams& params, cplx alpha, double tail_tol, double& tail) {
    const double a2 = std::norm(alpha);
    if (a2 > params.n_trunc / 8.0) {
        std::ostringstream os;
        os << "|alpha|^2 = " << a2 << " exceeds n_trunc/8 = " << params.n_trunc / 8.0;
        throw TruncationInadequate(os.str());
    }
    tail = poisson_tail(a2, params.n_trunc);
    if (tail > tail_tol) {
        std::ostringstream os;
        os << "coherent state tail mass " << tail << " above " << tail_tol;
        throw TruncationInadequate(os.str());
    }
}

Vec coherent_coeffs(cplx alpha, int dim) {
    Vec c(dim);
    c(0) = std::exp(-std::norm(alpha) / 2.0);
    for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

VecL widen(const Vec& v) { return v.cast<cplxl>(); }

}  // namespace

CoherentState coherent_oscillator(const PhysicalParams& params, cplx alpha, double tail_tol) {
    params.validate();
    CoherentState s;
    check_guard(params, alpha, tail_tol, s.tail_mass);
    s.alpha = alpha;
    s.frame = Frame::Oscillator;
    s.coeffs = coherent_coeffs(alpha, params.n_trunc);
    return s;
}

Mat displacement_operator(const PhysicalParams& params, cplx alpha) {
    auto [a, ad] = ladder_matrices(params);
    return matrix_exponential(alpha * ad - std::conj(alpha) * a);
}

CoherentState coherent_inverted(const PhysicalParams& params, const DysonMap& dyson, cplx alpha, double tail_tol) {
    params.validate();
    CoherentState s;
    check_guard(params, alpha, tail_tol, s.tail_mass);
    s.alpha = alpha;
    s.frame = Frame::Inverted;
    // rho^-1 first lowers then raises; padding keeps the upper-triangular step fed with the true tail.
    const int pad = params.n_trunc + 64;
    const VecL psi = apply_chain(widen(coherent_coeffs(alpha, pad)), dyson.apply_inv());
    s.coeffs = psi.head(params.n_trunc).cast<cplx>();
    return s;
}

EvolvedState evolve_closed_form(const PhysicalParams& params, const DysonMap& dyson, const CoherentState& state,
                                double t, bool unsafe) {
    if (!unsafe && params.omega * t > 1.0 + 1e-12)
        throw TruncationInadequate("omega*t above 1; pass unsafe to override");
    EvolvedState e;
    e.base = state;
    e.t = t;
    e.grown_alpha = state.alpha * std::exp(params.omega * t);
    e.prefactor = std::exp(params.omega * t / 2.0);
    e.norm_factor = std::exp((std::norm(e.grown_alpha) - std::norm(state.alpha)) / 2.0);
    const CoherentState grown = coherent_inverted(params, dyson, e.grown_alpha);
    e.coeffs = (e.prefactor * e.norm_factor) * grown.coeffs;
    return e;
}

Propagator::Propagator(const PhysicalParams& params, int dim) : dim_(dim), hbar_(params.hbar) {
    const Eigen::MatrixXd h = inverted_hamiltonian(params.with_dim(dim)).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("propagator: eigensolver failed");
    vecs_ = es.eigenvectors();
    vals_ = es.eigenvalues();
}

Vec Propagator::evolve(const Vec& psi, double t) const {
    if (psi.size() != dim_) throw ConfigError("propagator: dimension mismatch");
    Vec c = vecs_.transpose().cast<cplx>() * psi;
    for (int i = 0; i < dim_; ++i) c(i) *= std::exp(cplx(0.0, -vals_(i) * t / hbar_));
    return vecs_.cast<cplx>() * c;
}

Vec evolve_direct(const PhysicalParams& params, const DysonMap& dyson, const CoherentState& state, double t, int k,
                  bool unsafe) {
    if (!unsafe && params.omega * t > 1.0 + 1e-12)
        throw TruncationInadequate("omega*t above 1; pass unsafe to override");
    const int w = propagation_dim(params.n_trunc, k, params.omega * t);
    const PhysicalParams pw = params.with_dim(w);
    Vec psi0;
    if (state.frame == Frame::Inverted)
        psi0 = coherent_inverted(pw, dyson, state.alpha).coeffs;
    else
        psi0 = coherent_oscillator(pw, state.alpha).coeffs;
    // The inverted-frame coefficients do not decay, so the state is rebuilt at the working dimension.
    const Propagator prop(params, w);
    return prop.evolve(psi0, t).head(params.n_trunc);
}

int eta_working_dim(double grown_abs2) {
    int w = 16;
    while (w < 400 && poisson_tail(grown_abs2, w) > 1e-20) ++w;
    return w;
}

namespace {

VecL to_os_frame(const DysonMap& dyson, const Vec& psi, int w) {
    if (psi.size() < w) throw ConfigError("state shorter than the eta working dimension");
    return apply_chain(widen(psi.head(w)), dyson.apply_fwd());
}

MatL os_image(const DysonMap& dyson, const Mat& observable, int degree) {
    return conjugate_wide(observable.cast<cplxl>(), degree, dyson.fwd_similarity());
}

cplxl quadratic_form(const VecL& phi, const MatL& o) {
    const Eigen::Index w = phi.size();
    if (o.rows() < w) throw ConfigError("observable too small for the eta working dimension");
    return phi.dot(o.topLeftCorner(w, w) * phi);
}

}  // namespace

double eta_norm2(const DysonMap& dyson, const Vec& psi, int w_eta) {
    return static_cast<double>(to_os_frame(dyson, psi, w_eta).squaredNorm());
}

cplx eta_expectation(const PhysicalParams& params, const DysonMap& dyson, const Vec& psi, const Mat& observable,
                     int degree, int w_eta) {
    (void)params;
    const VecL phi = to_os_frame(dyson, psi, w_eta);
    const long double den = phi.squaredNorm();
    if (!(den > 1e-12L)) throw DegenerateError("eta-norm below 1e-12");
    const cplxl num = quadratic_form(phi, os_image(dyson, observable, degree));
    return cplx(static_cast<double>(num.real() / den), static_cast<double>(num.imag() / den));
}

MomentEvaluator::MomentEvaluator(const PhysicalParams& params, const DysonMap& dyson)
    : params_(params), dyson_(&dyson) {
    const auto [X, P] = pseudo_quadratures(params, dyson);
    const int n = params.n_trunc;
    // Products of truncated band-1 matrices are exact except in the last row and column.
    const Mat X2 = project(Mat(X * X), n - 1);
    const Mat P2 = project(Mat(P * P), n - 1);
    x_ = os_image(dyson, X, 1).cast<cplx>();
    p_ = os_image(dyson, P, 1).cast<cplx>();
    x2_ = os_image(dyson, X2, 2).cast<cplx>();
    p2_ = os_image(dyson, P2, 2).cast<cplx>();
}

MomentReport MomentEvaluator::at(const Vec& psi, int w_eta) const {
    const VecL phi = to_os_frame(*dyson_, psi, w_eta);
    const long double den = phi.squaredNorm();
    if (!(den > 1e-12L)) throw DegenerateError("eta-norm below 1e-12");
    auto ev = [&](const Mat& o) {
        const cplxl v = quadratic_form(phi, o.cast<cplxl>()) / den;
        return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    };
    MomentReport r;
    r.mean_X = ev(x_);
    r.mean_P = ev(p_);
    r.mean_X2 = ev(x2_);
    r.mean_P2 = ev(p2_);
    const double vx = (r.mean_X2 - r.mean_X * r.mean_X).real();
    const double vp = (r.mean_P2 - r.mean_P * r.mean_P).real();
    const double floor = -1e-10 * std::max(1.0, std::abs(r.mean_X2) + std::abs(r.mean_P2));
    if (vx < floor || vp < floor) {
        std::ostringstream os;
        os << "negative variance: var X = " << vx << ", var P = " << vp;
        throw NumericalError(os.str());
    }
    r.delta_X = std::sqrt(std::max(0.0, vx));
    r.delta_P = std::sqrt(std::max(0.0, vp));
    r.product = r.delta_X * r.delta_P;
    return r;
}

MomentReport moments(const PhysicalParams& params, const DysonMap& dyson, const Vec& psi, int w_eta) {
    return MomentEvaluator(params, dyson).at(psi, w_eta);
}

ClosedMoments closed_moments(const PhysicalParams& params, cplx b) {
    const double sx2 = params.hbar / (2.0 * params.mass * params.omega);
    const double sp2 = params.hbar * params.mass * params.omega / 2.0;
    const cplx sum = b + std::conj(b), diff = b - std::conj(b);
    ClosedMoments c;
    c.x = std::sqrt(sx2) * sum.real();
    c.p = (cplx(0.0, -std::sqrt(sp2)) * diff).real();
    c.x2 = (sx2 * (sum * sum + 1.0)).real();
    c.p2 = (-sp2 * (diff * diff - 1.0)).real();
    c.p2_imaginary_prefactor = cplx(0.0, -sp2) * (diff * diff - 1.0);
    return c;
}

Quadrature gauss_legendre(int n) {
    if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        q.nodes[i] = -x;
        q.nodes[n - 1 - i] = x;
        q.weights[i] = q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

IdentityReport resolution_of_identity(const PhysicalParams& params, Frame frame, double radius, int n_radial,
                                      int n_angular, int k, const DysonMap* dyson) {
    if (radius <= 0 || n_radial < 1 || n_angular < 1 || k < 1) throw ConfigError("resolution_of_identity: bad grid");
    if (frame == Frame::Inverted && dyson == nullptr) throw ConfigError("inverted frame needs a Dyson map");
    // Inverted frame: rho rho^-1 round trip at a modest dimension, where it is clean in long double.
    const int w = frame == Frame::Inverted ? std::max(k, std::min(params.n_trunc, 64)) : k;
    const Quadrature gl = gauss_legendre(n_radial);
    IdentityReport rep;
    rep.block = Mat::Zero(k, k);
    for (int i = 0; i < n_radial; ++i) {
        const double r = radius * (gl.nodes[i] + 1.0) / 2.0;
        const double wr = radius / 2.0 * gl.weights[i] * r;
        Mat acc = Mat::Zero(k, k);
        for (int j = 0; j < n_angular; ++j) {
            const cplx alpha = std::polar(r, 2.0 * M_PI * j / n_angular);
            Vec v = coherent_coeffs(alpha, w);
            if (frame == Frame::Inverted) {
                const VecL psi = apply_chain(widen(v), dyson->apply_inv());
                v = apply_chain(psi, dyson->apply_fwd()).cast<cplx>();
            }
            const Vec h = v.head(k);
            acc.noalias() += h * h.adjoint();
        }
        rep.block += (wr * 2.0 * M_PI / n_angular / M_PI) * acc;
    }
    const Mat dev = rep.block - Mat::Identity(k, k);
    rep.max_deviation = max_abs(dev);
    rep.diag_deviation = dev.diagonal().cwiseAbs().maxCoeff();
    return rep;
}

Trajectory classical_trajectory(const PhysicalParams& params, const DysonMap& dyson, cplx alpha,
                                const std::vector<double>& times, int k, bool unsafe) {
    params.validate();
    Trajectory tr;
    std::vector<double> ts;
    for (double t : times) {
        const double b2 = std::norm(alpha * std::exp(params.omega * t));
        if ((!unsafe && params.omega * t > 1.0 + 1e-12) || b2 > params.n_trunc / 8.0) {
            std::ostringstream os;
            os << "truncation guard reached at t=" << t << "; trajectory cut after " << ts.size() << " rows";
            tr.warning = os.str();
            break;
        }
        ts.push_back(t);
    }
    if (ts.empty()) return tr;

    double t_last = 0.0;
    for (double t : ts) t_last = std::max(t_last, t);
    const int w_eta_max = eta_working_dim(std::norm(alpha * std::exp(params.omega * t_last)));
    const int w = propagation_dim(params.n_trunc, std::max(k, w_eta_max), params.omega * t_last);
    const Propagator prop(params, w);
    const Vec psi0 = coherent_inverted(params.with_dim(w), dyson, alpha).coeffs;
    const MomentEvaluator ev(params, dyson);

    for (double t : ts) {
        const cplx beta = alpha * std::exp(params.omega * t);
        const Vec psi = prop.evolve(psi0, t);
        const MomentReport m = ev.at(psi, eta_working_dim(std::norm(beta)));
        const ClosedMoments c = closed_moments(params, beta);
        TrajectoryRow row;
        row.t = t;
        row.x_closed = c.x;
        row.p_closed = c.p;
        row.x_matrix = m.mean_X.real();
        row.p_matrix = m.mean_P.real();
        row.imag_x = m.mean_X.imag();
        row.imag_p = m.mean_P.imag();
        row.dX = m.delta_X;
        row.dP = m.delta_P;
        row.product = m.product;
        tr.rows.push_back(row);
    }
    return tr;
}

}  // namespace ihox
