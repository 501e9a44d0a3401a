#include "ihox/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace ihox {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<double> RunConfig::time_grid() const {
    const double tm = t_max_value(), step = dt_value();
    const int steps = static_cast<int>(std::floor(tm / step + 1e-9));
    std::vector<double> ts;
    for (int i = 0; i <= steps; ++i) ts.push_back(i * step);
    return ts;
}

void RunConfig::validate() const {
    params().validate();
    const int kk = k();
    if (kk < 1) throw ConfigError("sub_block must be positive");
    if (kk >= n_trunc - 2) {
        std::ostringstream os;
        os << "sub_block " << kk << " too large: must be below n_trunc - 2 = " << n_trunc - 2;
        throw ConfigError(os.str());
    }
    if (!(tol_exact > 0) || !(tol_evolution > 0) || !(tol_quadrature > 0))
        throw ConfigError("tolerances must be positive");
    if (!(dt_value() > 0) || !std::isfinite(dt_value())) throw ConfigError("dt must be positive");
    if (!(t_max_value() >= 0) || !std::isfinite(t_max_value())) throw ConfigError("t_max must be non-negative");
    if (!std::isfinite(alpha_re) || !std::isfinite(alpha_im)) throw ConfigError("alpha must be finite");
    if (!unsafe && t_max_value() * omega > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "t_max * omega = " << t_max_value() * omega << " exceeds 1 (use --unsafe to override)";
        throw ConfigError(os.str());
    }
}

std::vector<BoxSample> parameter_box_samples(std::uint64_t seed, int count) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto disk = [&]() {
        const double r = 0.5 * std::sqrt(u(gen));
        return std::polar(r, 2.0 * M_PI * u(gen));
    };
    std::vector<BoxSample> out;
    for (int i = 0; i < count; ++i) {
        BoxSample s;
        s.epsilon = u(gen) - 0.5;
        s.mu_plus = disk();
        s.mu_minus = disk();
        out.push_back(s);
    }
    return out;
}

namespace {

using nlohmann::ordered_json;

ordered_json config_object(const RunConfig& c) {
    ordered_json j;
    j["n_trunc"] = c.n_trunc;
    j["sub_block"] = c.k();
    j["tol_exact"] = c.tol_exact;
    j["tol_evolution"] = c.tol_evolution;
    j["tol_quadrature"] = c.tol_quadrature;
    j["hbar"] = c.hbar;
    j["mass"] = c.mass;
    j["omega"] = c.omega;
    j["alpha_re"] = c.alpha_re;
    j["alpha_im"] = c.alpha_im;
    j["t_max"] = c.t_max_value();
    j["dt"] = c.dt_value();
    j["seed"] = c.seed;
    j["unsafe"] = c.unsafe;
    return j;
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json cplx_object(cplx z) {
    ordered_json j;
    j["re"] = z.real();
    j["im"] = z.imag();
    return j;
}

}  // namespace

std::string config_json(const RunConfig& config) { return config_object(config).dump(2); }

std::string report_json(const VerificationReport& r) {
    ordered_json j;
    j["config"] = config_object(r.config);
    j["sigma"] = r.sigma;
    j["metric"] = r.metric;
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["paper_ref"] = c.paper_ref;
        e["residual"] = number_or_null(c.residual);
        e["tol"] = c.tol;
        e["pass"] = c.pass;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["pass"] = r.pass;
    return j.dump(2) + "\n";
}

std::string disentangle_json(const DisentangleParams& d) {
    ordered_json j;
    j["epsilon"] = d.epsilon;
    j["mu_plus"] = cplx_object(d.mu_plus);
    j["mu_minus"] = cplx_object(d.mu_minus);
    j["theta"] = cplx_object(d.theta);
    j["chi"] = cplx_object(d.chi);
    j["v_plus"] = cplx_object(d.v_plus);
    j["v_zero"] = cplx_object(d.v_zero);
    j["v_minus"] = cplx_object(d.v_minus);
    j["consistency_residual"] = d.consistency_residual();
    j["mu_form_residual"] = d.mu_form_residual();
    return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,X_closed,X_matrix,P_closed,P_matrix,dX,dP,product\n";
    for (const auto& r : tr.rows) {
        os << format_number(r.t) << ',' << format_number(r.x_closed) << ',' << format_number(r.x_matrix) << ','
           << format_number(r.p_closed) << ',' << format_number(r.p_matrix) << ',' << format_number(r.dX) << ','
           << format_number(r.dP) << ',' << format_number(r.product) << '\n';
    }
}

std::vector<DivergenceRow> demo_divergence(const PhysicalParams& params, double box_l, int grid_n) {
    params.validate();
    if (!(box_l > 0) || !std::isfinite(box_l)) throw ConfigError("box length must be positive");
    if (grid_n < 101 || grid_n % 2 == 0) throw ConfigError("grid_n must be odd and at least 101");
    const double amp = std::sqrt(params.mass * params.omega / (M_PI * params.hbar));
    const double width = params.mass * params.omega / params.hbar;
    std::vector<DivergenceRow> rows;
    for (int j = 4; j >= 0; --j) {
        const double L = box_l / std::ldexp(1.0, j);
        const double h = 2.0 * L / (grid_n - 1);
        double naive = 0.0, herm = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            const double x = -L + i * h;
            const double w = (i == 0 || i == grid_n - 1) ? 0.5 * h : h;
            // |psi_0^r|^2 for omega -> i omega: the Gaussian becomes a pure phase.
            naive += w * amp;
            herm += w * amp * std::exp(-width * x * x);
        }
        rows.push_back({L, naive, herm});
    }
    return rows;
}

void write_divergence_csv(std::ostream& os, const std::vector<DivergenceRow>& rows) {
    os << "L,naive_norm,hermitian_norm\n";
    for (const auto& r : rows)
        os << format_number(r.box) << ',' << format_number(r.naive_norm) << ',' << format_number(r.hermitian_norm)
           << '\n';
}

}  // namespace ihox
