#include "ihox/coherent.hpp"
#include "ihox/dyson.hpp"
#include "ihox/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ihox;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

struct Options {
    RunConfig cfg;
    int sub_block = 0;
    double t_max = 0.0;
    double dt = 0.0;
    std::vector<CLI::Option*> sub_block_opts, t_max_opts, dt_opts;
    std::string output;
    // disentangle
    double epsilon = 1.0;
    double mu_plus_re = 0, mu_plus_im = 0, mu_minus_re = 0, mu_minus_im = 0;
    // demo-divergence
    double box_l = 8.0;
    int grid_n = 1001;
};

void add_run_flags(CLI::App* app, Options& o) {
    app->add_option("--n-trunc", o.cfg.n_trunc, "Fock truncation dimension")->capture_default_str();
    o.sub_block_opts.push_back(app->add_option("--sub-block", o.sub_block, "Checked sub-block size (default n_trunc/4)"));
    app->add_option("--tol-exact", o.cfg.tol_exact, "Tolerance for exact identities")->capture_default_str();
    app->add_option("--tol-evolution", o.cfg.tol_evolution, "Tolerance for time evolution")->capture_default_str();
    app->add_option("--tol-quadrature", o.cfg.tol_quadrature, "Tolerance for quadrature integrals")
        ->capture_default_str();
    app->add_option("--hbar", o.cfg.hbar)->capture_default_str();
    app->add_option("--mass", o.cfg.mass)->capture_default_str();
    app->add_option("--omega", o.cfg.omega)->capture_default_str();
    app->add_option("--alpha-re", o.cfg.alpha_re)->capture_default_str();
    app->add_option("--alpha-im", o.cfg.alpha_im)->capture_default_str();
    o.t_max_opts.push_back(app->add_option("--t-max", o.t_max, "Final time (default 1/omega)"));
    o.dt_opts.push_back(app->add_option("--dt", o.dt, "Time step (default 0.01/omega)"));
    app->add_option("--seed", o.cfg.seed, "Seed for parameter-box sampling (IHOX_SEED overrides)")
        ->capture_default_str();
    app->add_flag("--unsafe", o.cfg.unsafe, "Allow omega*t_max > 1");
    app->add_option("--output", o.output, "Write output to PATH instead of stdout");
}

void finalize(Options& o) {
    auto given = [](const std::vector<CLI::Option*>& opts) {
        for (auto* opt : opts)
            if (opt->count() > 0) return true;
        return false;
    };
    if (given(o.sub_block_opts)) o.cfg.sub_block = o.sub_block;
    if (given(o.t_max_opts)) o.cfg.t_max = o.t_max;
    if (given(o.dt_opts)) o.cfg.dt = o.dt;
    if (const char* env = std::getenv("IHOX_SEED")) {
        try {
            size_t used = 0;
            const unsigned long long v = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
            o.cfg.seed = v;
        } catch (const std::exception&) {
            throw ConfigError(std::string("IHOX_SEED is not an unsigned integer: ") + env);
        }
    }
}

void emit(const Options& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + o.output);
    f << text;
}

int cmd_verify(Options& o) {
    finalize(o);
    const VerificationReport r = run_verify(o.cfg);
    emit(o, report_json(r));
    if (!r.pass) {
        for (const auto& c : r.checks)
            if (!c.pass) std::cerr << "FAIL " << c.name << " residual " << format_number(c.residual) << " tol "
                                   << format_number(c.tol) << "\n";
    }
    return r.pass ? kExitPass : kExitFail;
}

int cmd_trajectory(Options& o) {
    finalize(o);
    o.cfg.validate();
    const PhysicalParams p = o.cfg.params();
    const DysonMap dm = build_inverted_dyson(p);
    const Trajectory tr = classical_trajectory(p, dm, o.cfg.alpha(), o.cfg.time_grid(), o.cfg.k(), o.cfg.unsafe);
    if (!tr.warning.empty()) std::cerr << "warning: " << tr.warning << "\n";
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    emit(o, os.str());
    return kExitPass;
}

int cmd_disentangle(Options& o) {
    const DisentangleParams d =
        disentangle(o.epsilon, cplx(o.mu_plus_re, o.mu_plus_im), cplx(o.mu_minus_re, o.mu_minus_im));
    emit(o, disentangle_json(d));
    return kExitPass;
}

int cmd_divergence(Options& o) {
    finalize(o);
    const auto rows = demo_divergence(o.cfg.params(), o.box_l, o.grid_n);
    std::ostringstream os;
    write_divergence_csv(os, rows);
    emit(o, os.str());
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-algebra checks for the oscillator / inverted oscillator mapping"};
    app.require_subcommand(1);
    Options o;

    auto* verify = app.add_subcommand("verify", "Run the verification suite and print a JSON report");
    add_run_flags(verify, o);
    auto* traj = app.add_subcommand("trajectory", "Print <X>, <P> and uncertainties along a time grid as CSV");
    add_run_flags(traj, o);
    auto* dis = app.add_subcommand("disentangle", "Evaluate the disentangling parameters");
    dis->add_option("--epsilon", o.epsilon)->capture_default_str();
    dis->add_option("--mu-plus-re", o.mu_plus_re)->capture_default_str();
    dis->add_option("--mu-plus-im", o.mu_plus_im)->capture_default_str();
    dis->add_option("--mu-minus-re", o.mu_minus_re)->capture_default_str();
    dis->add_option("--mu-minus-im", o.mu_minus_im)->capture_default_str();
    dis->add_option("--output", o.output, "Write output to PATH instead of stdout");
    auto* div = app.add_subcommand("demo-divergence", "Naive vs Hermitian ground-state norms on growing boxes");
    div->add_option("--box-l", o.box_l, "Largest half-width L")->capture_default_str();
    div->add_option("--grid-n", o.grid_n, "Grid points per box (odd, >= 101)")->capture_default_str();
    div->add_option("--hbar", o.cfg.hbar)->capture_default_str();
    div->add_option("--mass", o.cfg.mass)->capture_default_str();
    div->add_option("--omega", o.cfg.omega)->capture_default_str();
    div->add_option("--output", o.output, "Write output to PATH instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*verify) return cmd_verify(o);
        if (*traj) return cmd_trajectory(o);
        if (*dis) return cmd_disentangle(o);
        if (*div) return cmd_divergence(o);
    } catch (const DegenerateError& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TruncationInadequate& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitConfig;
}
