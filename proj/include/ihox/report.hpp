#pragma once

#include "ihox/coherent.hpp"
#include "ihox/dyson.hpp"
#include "ihox/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ihox {

struct RunConfig {
    int n_trunc = 128;
    std::optional<int> sub_block;  // default n_trunc / 4
    double tol_exact = 1e-10;
    double tol_evolution = 1e-6;
    double tol_quadrature = 1e-3;
    double hbar = 1.0;
    double mass = 1.0;
    double omega = 1.0;
    double alpha_re = 0.5;
    double alpha_im = 0.0;
    std::optional<double> t_max;  // default 1 / omega
    std::optional<double> dt;     // default 0.01 / omega
    std::uint64_t seed = 20240611;
    bool unsafe = false;

    PhysicalParams params() const { return {hbar, mass, omega, n_trunc}; }
    int k() const { return sub_block.value_or(n_trunc / 4); }
    double t_max_value() const { return t_max.value_or(1.0 / omega); }
    double dt_value() const { return dt.value_or(0.01 / omega); }
    cplx alpha() const { return {alpha_re, alpha_im}; }
    std::vector<double> time_grid() const;
    // Throws ConfigError.
    void validate() const;
};

struct VerificationReport {
    RunConfig config;
    int sigma = 0;
    std::string metric;
    std::vector<Check> checks;
    bool pass = false;
};

// Seeded samples (epsilon, mu_plus, mu_minus) with |epsilon|, |mu| <= 0.5.
struct BoxSample {
    double epsilon;
    cplx mu_plus;
    cplx mu_minus;
};
std::vector<BoxSample> parameter_box_samples(std::uint64_t seed, int count);

VerificationReport run_verify(const RunConfig& config);

std::string report_json(const VerificationReport& report);
std::string config_json(const RunConfig& config);
std::string disentangle_json(const DisentangleParams& d);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

struct DivergenceRow {
    double box = 0.0;
    double naive_norm = 0.0;
    double hermitian_norm = 0.0;
};
// Nested boxes L = box_l / 2^j, j = 4..0, each integrated on grid_n points.
std::vector<DivergenceRow> demo_divergence(const PhysicalParams& params, double box_l, int grid_n);
void write_divergence_csv(std::ostream& os, const std::vector<DivergenceRow>& rows);

// Shortest round-trip formatting used in every CSV and JSON number.
std::string format_number(double v);

}  // namespace ihox
