#include "ihox/dyson.hpp"

#include <cmath>
#include <sstream>

namespace ihox {

namespace {

constexpr cplx I1{0.0, 1.0};

Poly generator_poly(Generator g) {
    switch (g) {
        case Generator::Lower2: return Poly::lower2();
        case Generator::Raise2: return Poly::raise2();
        default: return Poly::number_half();
    }
}

Mat factor_exponential(Generator g, cplx c, int n) {
    if (g == Generator::NumberHalf) {
        Mat d = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = std::exp(c * (i + 0.5));
        return d;
    }
    return matrix_exponential(c * generator_poly(g).matrix(n));
}

DysonMap assemble(const PhysicalParams& params, std::vector<Factor> factors) {
    params.validate();
    const int n = params.n_trunc;
    DysonMap m;
    m.factors = std::move(factors);
    m.rho = Mat::Identity(n, n);
    m.rho_inv = Mat::Identity(n, n);
    for (const auto& f : m.factors) {
        m.rho = m.rho * factor_exponential(f.gen, f.coeff, n);
        m.rho_inv = factor_exponential(f.gen, -f.coeff, n) * m.rho_inv;
    }
    m.eta = m.rho.adjoint() * m.rho;
    m.eta_inv = m.rho_inv * m.rho_inv.adjoint();
    return m;
}

}  // namespace

// ---------------------------------------------------------------- disentangling

double DisentangleParams::consistency_residual() const { return std::abs(v_zero - (v_plus * v_minus - chi)); }

double DisentangleParams::mu_form_residual() const {
    return std::abs(v_zero - (mu_plus * mu_minus - chi));
}

DisentangleParams disentangle(double epsilon, cplx mu_plus, cplx mu_minus) {
    if (!std::isfinite(epsilon) || !std::isfinite(std::abs(mu_plus)) || !std::isfinite(std::abs(mu_minus)))
        throw ConfigError("disentangle: non-finite input");
    DisentangleParams d;
    d.epsilon = epsilon;
    d.mu_plus = mu_plus;
    d.mu_minus = mu_minus;
    d.theta = std::sqrt(cplx(epsilon * epsilon) - 4.0 * mu_plus * mu_minus);

    // sinh(t)/t and cosh(t), with the series near t = 0
    cplx sh, ch;
    if (std::abs(d.theta) < 1e-6) {
        const cplx t2 = d.theta * d.theta;
        sh = 1.0 + t2 / 6.0;
        ch = 1.0 + t2 / 2.0;
    } else {
        sh = std::sinh(d.theta) / d.theta;
        ch = std::cosh(d.theta);
    }
    const cplx den = ch - epsilon * sh;
    if (!(std::abs(den) > 1e-12)) {
        std::ostringstream os;
        os << "degenerate disentangling denominator at epsilon=" << epsilon << ", mu_plus=" << mu_plus
           << ", mu_minus=" << mu_minus;
        throw DegenerateError(os.str());
    }
    d.v_plus = 2.0 * mu_plus * sh / den;
    d.v_minus = 2.0 * mu_minus * sh / den;
    d.v_zero = 1.0 / (den * den);
    d.chi = -(ch + epsilon * sh) / den;
    return d;
}

DisentangleParams from_transform_coefficients(cplx v_plus, cplx v_minus, cplx v_zero) {
    DisentangleParams d;
    d.v_plus = v_plus;
    d.v_minus = v_minus;
    d.v_zero = v_zero;
    return d;
}

bool constraint_check(const DisentangleParams& d, double tol) {
    return std::abs(d.v_plus - cplx(0.0, -1.0)) <= tol && std::abs(d.v_minus - cplx(0.0, 0.5)) <= tol &&
           std::abs(d.v_zero - 1.0) <= tol;
}

QuadraticCoefficients transformed_coefficients(const DisentangleParams& d) {
    if (d.v_zero == cplx(0.0)) throw DegenerateError("transformed Hamiltonian: v_zero is zero");
    const cplx vp = d.v_plus, vm = d.v_minus, v0 = d.v_zero;
    return {(v0 - 2.0 * vp * vm) / v0, (vm * vp * vp - v0 * vp) / v0, vm / v0};
}

Mat transformed_hamiltonian_general(const PhysicalParams& params, const DisentangleParams& d) {
    params.validate();
    const auto c = transformed_coefficients(d);
    const Poly h = c.number * Poly::number_half() + c.raise2 * Poly::raise2() + c.lower2 * Poly::lower2();
    return (params.hbar * params.omega) * h.matrix(params.n_trunc);
}

// ---------------------------------------------------------------- Dyson maps

Chain DysonMap::inv_similarity() const {
    Chain c;
    for (const auto& f : factors) c.push_back({f.gen, -f.coeff});
    return c;
}

Chain DysonMap::fwd_similarity() const {
    Chain c;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) c.push_back(*it);
    return c;
}

Chain DysonMap::dag_similarity() const {
    Chain c;
    for (const auto& f : factors) c.push_back({adjoint_generator(f.gen), std::conj(f.coeff)});
    return c;
}

Chain DysonMap::inv_dag_similarity() const {
    Chain c;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it)
        c.push_back({adjoint_generator(it->gen), -std::conj(it->coeff)});
    return c;
}

Chain DysonMap::apply_fwd() const { return fwd_similarity(); }

MatL DysonMap::rho_wide(int dim) const { return chain_matrix_wide(apply_fwd(), dim); }
MatL DysonMap::rho_inv_wide(int dim) const { return chain_matrix_wide(apply_inv(), dim); }

DysonMap build_general_dyson(const PhysicalParams& params, const DisentangleParams& d) {
    if (d.v_zero == cplx(0.0)) throw DegenerateError("v_zero is zero");
    if (d.v_zero.imag() == 0.0 && d.v_zero.real() < 0.0) {
        std::ostringstream os;
        os << "ln(v_zero) is on the branch cut: v_zero=" << d.v_zero;
        throw BranchCutError(os.str());
    }
    return assemble(params, {{Generator::Lower2, -d.v_minus / 2.0},
                             {Generator::NumberHalf, -std::log(d.v_zero) / 2.0},
                             {Generator::Raise2, -d.v_plus / 2.0}});
}

DysonMap build_inverted_dyson(const PhysicalParams& params) {
    return assemble(params, {{Generator::Lower2, cplx(0.0, -0.25)}, {Generator::Raise2, cplx(0.0, 0.5)}});
}

Mat single_generator_exponential(const PhysicalParams& params, const DisentangleParams& d) {
    params.validate();
    const Poly g = -2.0 * (cplx(d.epsilon / 2.0) * Poly::number_half() + (d.mu_minus / 2.0) * Poly::lower2() +
                           (d.mu_plus / 2.0) * Poly::raise2());
    return matrix_exponential(g.matrix(params.n_trunc));
}

// ---------------------------------------------------------------- checks

Check make_check(std::string name, std::string ref, double residual, double tol) {
    Check c;
    c.name = std::move(name);
    c.paper_ref = std::move(ref);
    c.residual = residual;
    c.tol = tol;
    c.pass = std::isfinite(residual) && residual < tol;
    return c;
}

SignResolution resolve_similarity_sign(const PhysicalParams& params, const DysonMap& dyson, int k, double tol) {
    const int n = params.n_trunc;
    const Poly hos = (params.hbar * params.omega) * Poly::number_half();
    const Mat m = conjugate(hos, dyson.inv_similarity(), n);
    const Mat hr = inverted_hamiltonian(params);
    const double rp = block_residual(m, I1 * hr, k);
    const double rm = block_residual(m, -I1 * hr, k);

    SignResolution s;
    s.hr_scale = max_abs(project(hr, k));
    const double abs_scale = std::max(1.0, s.hr_scale);
    s.sigma = rp <= rm ? 1 : -1;
    s.residual = std::min(rp, rm);
    s.other_residual = std::max(rp, rm);
    if (!(s.residual < tol) || !(s.other_residual * abs_scale > 0.1 * s.hr_scale)) {
        std::ostringstream os;
        os << "similarity sign unresolved: residuals +i " << rp << ", -i " << rm;
        throw SignUnresolved(os.str());
    }
    return s;
}

LadderPair transformed_ladder(const PhysicalParams& params, const DysonMap& dyson) {
    const int n = params.n_trunc;
    const Chain c = dyson.inv_similarity();
    LadderPair lp;
    lp.A = conjugate(Poly::lower(), c, n);
    lp.Abar = conjugate(Poly::raise(), c, n);
    lp.A_closed = (Poly::lower() + I1 * Poly::raise()).matrix(n);
    lp.Abar_closed = (0.5 * (Poly::raise() + I1 * Poly::lower())).matrix(n);
    return lp;
}

Poly position_poly(const PhysicalParams& p) {
    return std::sqrt(p.hbar / (2.0 * p.mass * p.omega)) * (Poly::raise() + Poly::lower());
}

Poly momentum_poly(const PhysicalParams& p) {
    return cplx(0.0, std::sqrt(p.hbar * p.mass * p.omega / 2.0)) * (Poly::raise() - Poly::lower());
}

Pair pseudo_quadratures(const PhysicalParams& params, const DysonMap& dyson) {
    const Chain c = dyson.inv_similarity();
    return {conjugate(position_poly(params), c, params.n_trunc), conjugate(momentum_poly(params), c, params.n_trunc)};
}

Mat hamiltonian_from_ladder(const PhysicalParams& params, const Mat& A, const Mat& Abar) {
    return (I1 * params.hbar * params.omega / 2.0) * (Abar * A + A * Abar);
}

Mat hamiltonian_from_quadratures(const PhysicalParams& params, const Mat& X, const Mat& P) {
    return (I1 / 2.0) * (P * P / params.mass + (params.mass * params.omega * params.omega) * (X * X));
}

std::vector<Check> conjugation_identities_check(const PhysicalParams& params, const DisentangleParams& d, int k,
                                                double tol) {
    params.validate();
    const int n = params.n_trunc;
    const Mat num = Poly::number_half().matrix(n);
    const Mat low = Poly::lower2().matrix(n);
    const Mat up = Poly::raise2().matrix(n);
    const cplx vm = d.v_minus, vp = d.v_plus, v0 = d.v_zero;
    const cplx lv0 = std::log(v0);

    const Mat em = matrix_exponential((vm / 2.0) * low), em_i = matrix_exponential((-vm / 2.0) * low);
    const Mat ep = matrix_exponential((vp / 2.0) * up), ep_i = matrix_exponential((-vp / 2.0) * up);
    const Mat e0 = factor_exponential(Generator::NumberHalf, lv0 / 2.0, n);
    const Mat e0_i = factor_exponential(Generator::NumberHalf, -lv0 / 2.0, n);

    const std::string ref = "factor conjugation identities";
    std::vector<Check> out;
    out.push_back(make_check("lower_factor_number", ref, block_residual(em * num * em_i, num + vm * low, k), tol));
    out.push_back(make_check("lower_factor_raise2", ref,
                             block_residual(em * up * em_i, up + 2.0 * vm * num + vm * vm * low, k), tol));
    out.push_back(make_check("number_factor_lower2", ref, block_residual(e0 * low * e0_i, low / v0, k), tol));
    out.push_back(make_check("number_factor_raise2", ref, block_residual(e0 * up * e0_i, v0 * up, k), tol));
    out.push_back(make_check("raise_factor_lower2", ref,
                             block_residual(ep * low * ep_i, low - 2.0 * vp * num + vp * vp * up, k), tol));
    out.push_back(make_check("raise_factor_number", ref, block_residual(ep * num * ep_i, num - vp * up, k), tol));
    return out;
}

PseudoHermiticityReport pseudo_hermiticity_check(const PhysicalParams& params, const DysonMap& dyson, int k,
                                                 int k_ortho, double tol) {
    PseudoHermiticityReport r;
    const Poly g = cplx(0.0, params.hbar * params.omega) * Poly::number_half();
    const Mat gd = (cplx(0.0, -params.hbar * params.omega) * Poly::number_half()).matrix(k);

    Chain c_eta = dyson.fwd_similarity();
    for (const auto& f : dyson.dag_similarity()) c_eta.push_back(f);
    Chain c_tilde = dyson.inv_similarity();
    for (const auto& f : dyson.inv_dag_similarity()) c_tilde.push_back(f);

    r.residual_eta = block_residual(conjugate(g, c_eta, k), gd, k);
    r.residual_eta_tilde = block_residual(conjugate(g, c_tilde, k), gd, k);
    const bool e = r.residual_eta < tol, t = r.residual_eta_tilde < tol;
    r.metric = e && t ? "both" : e ? "rho_dag_rho" : t ? "rho_rho_dag" : "none";

    // <n^r| rho^dag rho |m^r> with |n^r> = rho^-1 |n>
    const int w = std::max(k_ortho + 4, 16);
    MatL phi(w, k_ortho);
    for (int j = 0; j < k_ortho; ++j) {
        VecL e_j = VecL::Zero(w);
        e_j(j) = 1;
        phi.col(j) = apply_chain(apply_chain(e_j, dyson.apply_inv()), dyson.apply_fwd());
    }
    const Mat gram = (phi.adjoint() * phi).cast<cplx>();
    r.orthonormality = max_abs(Mat(gram - Mat::Identity(k_ortho, k_ortho)));

    // Abar against eta^-1 A^dag eta = rho^-1 rho^-dag A^dag rho^dag rho
    Chain c_adj = dyson.inv_dag_similarity();
    for (const auto& f : dyson.inv_similarity()) c_adj.push_back(f);
    const int wa = k + chain_shrink(1, c_adj);
    const Mat a_big = conjugate(Poly::lower(), dyson.inv_similarity(), wa);
    const Mat rhs = conjugate(Mat(a_big.adjoint()), 1, c_adj);
    const Mat abar = conjugate(Poly::raise(), dyson.inv_similarity(), k);
    r.abar_adjoint = block_residual(rhs, abar, k);
    return r;
}

int propagation_dim(int n_trunc, int k, double omega_t) {
    // Weight at level n drifts to about n e^{2 omega t}; the margin was measured, not derived.
    const double need = (2.0 * k + 32.0) * std::exp(2.0 * std::max(0.0, omega_t));
    const int w = 64 * static_cast<int>(std::ceil(need / 64.0));
    return std::max(n_trunc, w);
}

HeisenbergReport heisenberg_dynamics_check(const PhysicalParams& params, const DysonMap& dyson, double t_max,
                                           double h, int k, int max_samples) {
    params.validate();
    HeisenbergReport rep;
    const int w = propagation_dim(params.n_trunc, k, params.omega * t_max);
    const PhysicalParams pw = params.with_dim(w);
    const Chain inv = dyson.inv_similarity();
    const Mat X = conjugate(position_poly(params), inv, w);
    const Mat P = conjugate(momentum_poly(params), inv, w);

    const Eigen::MatrixXd hr = inverted_hamiltonian(pw).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hr);
    if (es.info() != Eigen::Success) throw NumericalError("heisenberg: eigensolver failed");
    const Eigen::MatrixXd& Vr = es.eigenvectors();
    const Eigen::VectorXd lam = es.eigenvalues() / params.hbar;
    // V is real, so rotate real and imaginary parts separately with real products.
    auto rotate = [&](const Mat& m) -> Mat {
        const Eigen::MatrixXd re = Vr.transpose() * m.real() * Vr;
        const Eigen::MatrixXd im = Vr.transpose() * m.imag() * Vr;
        Mat r(re.rows(), re.cols());
        r.real() = re;
        r.imag() = im;
        return r;
    };
    const Mat Xt = rotate(X);
    const Mat Pt = rotate(P);
    const Mat V = Vr.cast<cplx>();
    const Mat Vk = V.topRows(k);

    auto evolve = [&](const Mat& tilde, double t) -> Mat {
        Vec ph(w);
        for (int i = 0; i < w; ++i) ph(i) = std::exp(cplx(0.0, lam(i) * t));
        const Mat left = Vk * ph.asDiagonal();
        const Mat right = ph.conjugate().asDiagonal() * Vk.transpose();
        return left * tilde * right;
    };

    {
        // U = C - iS with C, S real symmetric; U^dag U = C^2 + S^2 + i(SC - CS).
        Eigen::VectorXd c(w), sn(w);
        for (int i = 0; i < w; ++i) {
            c(i) = std::cos(lam(i) * h);
            sn(i) = std::sin(lam(i) * h);
        }
        const Eigen::MatrixXd C = Vr * c.asDiagonal() * Vr.transpose();
        const Eigen::MatrixXd S = Vr * sn.asDiagonal() * Vr.transpose();
        const Eigen::MatrixXd re = C * C + S * S - Eigen::MatrixXd::Identity(w, w);
        const Eigen::MatrixXd im = S * C - C * S;
        rep.unitarity = std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff());
    }

    const double m = params.mass, om2 = params.omega * params.omega;
    const int ns = std::max(1, std::min(max_samples, static_cast<int>((t_max - 2 * h) / h)));
    for (int j = 0; j < ns; ++j) {
        const double t = ns == 1 ? h : h + (t_max - 2 * h) * j / (ns - 1);
        const Mat xm = evolve(Xt, t - h), x0 = evolve(Xt, t), xp = evolve(Xt, t + h);
        const Mat pm = evolve(Pt, t - h), p0 = evolve(Pt, t), pp = evolve(Pt, t + h);
        const Mat d2 = (xp - 2.0 * x0 + xm) / (h * h) - om2 * x0;
        rep.second_order = std::max(rep.second_order, max_abs(d2) / max_abs(x0));
        const Mat ipm = (cplx(0.0, 1.0) / m) * p0;
        rep.first_order_x = std::max(rep.first_order_x, max_abs(Mat((xp - xm) / (2 * h) - ipm)) / max_abs(ipm));
        const Mat fx = cplx(0.0, -m * om2) * x0;
        rep.first_order_p = std::max(rep.first_order_p, max_abs(Mat((pp - pm) / (2 * h) - fx)) / max_abs(fx));
        ++rep.samples;
    }

    const int n = params.n_trunc;
    const Mat xn = project(X, n), pn = project(P, n);
    const Mat lhs = commutator(xn, inverted_hamiltonian(params)) / cplx(0.0, params.hbar);
    rep.at_zero = block_residual(lhs, Mat((cplx(0.0, 1.0) / m) * pn), k);
    return rep;
}

}  // namespace ihox
