// Experiment runner: coefficient/SOE audits, single solves, convergence
// sweeps and mode comparisons, all emitted as round-trip-exact CSV.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracstep/csv.hpp"
#include "fracstep/errors.hpp"
#include "fracstep/mesh.hpp"
#include "fracstep/operators.hpp"
#include "fracstep/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fracstep;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double alpha = 0.5;
    double horizon = -1.0;  // default depends on the example
    std::size_t n_steps = 100;
    double grading = 1.0;
    Scheme scheme = Scheme::Standard;
    CoeffMode mode = CoeffMode::TCTE;
    Thresholds thresholds = Thresholds::defaults();
    SoeSettings soe;
    int space_n = -1;
    std::string example = "ex1";
    long long seed = 0;
};

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    require_keys(j,
                 {"alpha", "T", "N", "r", "scheme", "mode", "theta_s1", "theta_s2", "theta_f1",
                  "theta_f2", "soe", "space", "example"},
                 "top level");
    RunConfig cfg;
    if (j.contains("example")) cfg.example = j["example"].get<std::string>();
    if (cfg.example != "ex1" && cfg.example != "ex2" && cfg.example != "custom")
        throw ConfigError("example must be one of ex1, ex2, custom");
    cfg.horizon = cfg.example == "ex2" ? 10.0 : 1.0;
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("T")) cfg.horizon = j["T"].get<double>();
    if (j.contains("N")) cfg.n_steps = j["N"].get<std::size_t>();
    if (j.contains("r")) cfg.grading = j["r"].get<double>();
    if (j.contains("scheme")) {
        const std::string s = j["scheme"].get<std::string>();
        if (s == "standard")
            cfg.scheme = Scheme::Standard;
        else if (s == "fast")
            cfg.scheme = Scheme::Fast;
        else
            throw ConfigError("scheme must be 'standard' or 'fast'");
    }
    if (j.contains("mode")) {
        const std::string s = j["mode"].get<std::string>();
        if (s == "direct")
            cfg.mode = CoeffMode::Direct;
        else if (s == "tcte")
            cfg.mode = CoeffMode::TCTE;
        else if (s == "gk")
            cfg.mode = CoeffMode::GaussKronrod;
        else
            throw ConfigError("mode must be 'direct', 'tcte' or 'gk'");
    }
    if (j.contains("theta_s1")) cfg.thresholds.theta_s1 = j["theta_s1"].get<double>();
    if (j.contains("theta_s2")) cfg.thresholds.theta_s2 = j["theta_s2"].get<double>();
    if (j.contains("theta_f1")) cfg.thresholds.theta_f1 = j["theta_f1"].get<double>();
    if (j.contains("theta_f2")) cfg.thresholds.theta_f2 = j["theta_f2"].get<double>();
    if (j.contains("soe")) {
        const json& s = j["soe"];
        if (!s.is_object()) throw ConfigError("'soe' must be an object");
        require_keys(s, {"eps", "T", "dt"}, "soe");
        if (s.contains("eps")) cfg.soe.eps = s["eps"].get<double>();
        if (s.contains("T")) cfg.soe.t_soe = s["T"].get<double>();
        if (s.contains("dt")) cfg.soe.dt_cut = s["dt"].get<double>();
    }
    if (j.contains("space")) {
        const json& s = j["space"];
        if (!s.is_object()) throw ConfigError("'space' must be an object");
        require_keys(s, {"n"}, "space");
        if (s.contains("n")) cfg.space_n = s["n"].get<int>();
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(cfg.horizon > 0.0)) throw ConfigError("T must be positive");
    if (cfg.n_steps == 0) throw ConfigError("N must be positive");
    if (!(cfg.grading >= 1.0)) throw ConfigError("r must be >= 1");
    return cfg;
}

ProblemSpec make_problem(const RunConfig& cfg) {
    ProblemSpec p;
    if (cfg.example == "ex1")
        p = example1(cfg.alpha, cfg.n_steps, cfg.grading, cfg.horizon);
    else if (cfg.example == "ex2")
        p = example2(cfg.alpha, cfg.n_steps, cfg.grading, cfg.horizon);
    else {
        p.alpha = cfg.alpha;
        p.horizon = cfg.horizon;
        p.n_steps = cfg.n_steps;
        p.grading = cfg.grading;
        p.space_n = 5;
        p.label = "custom";
    }
    p.scheme = cfg.scheme;
    p.mode = cfg.mode;
    p.soe = cfg.soe;
    if (cfg.space_n > 0) p.space_n = cfg.space_n;
    return p;
}

const char* mode_name(CoeffMode m) {
    switch (m) {
        case CoeffMode::Direct: return "direct";
        case CoeffMode::TCTE: return "tcte";
        case CoeffMode::GaussKronrod: return "gk";
    }
    return "?";
}

/// Tracks files written by one subcommand so partial outputs can be removed
/// when the run fails midway.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : paths_) fs::remove(p, ec);
    }
    std::ofstream open(const std::string& name) {
        const fs::path p = dir_ / name;
        paths_.push_back(p);
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot open output file " + p.string());
        return out;
    }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> paths_;
    bool committed_ = false;
};

int cmd_coeffs(const RunConfig& cfg, OutputSet& out, std::size_t k_arg) {
    const TimeMesh mesh = build_graded_mesh(cfg.n_steps, cfg.grading, cfg.horizon);
    const std::size_t k = k_arg == 0 ? mesh.num_steps() : k_arg;
    if (k < 2 || k > mesh.num_steps()) throw ConfigError("coeffs: need 2 <= k <= N");
    auto csv = out.open("coeffs.csv");
    csv << "j,k,a,c_tilde,mode,theta\n";
    for (std::size_t j = 1; j <= k - 1; ++j) {
        const StencilPair sp = coeff_pair(mesh, j, k, cfg.alpha, cfg.thresholds, cfg.mode);
        const double theta = mesh.step(j) / ((mesh.t(k) - mesh.t(j)) + mesh.step(j));
        csv << j << "," << k << "," << format_double(sp.a) << "," << format_double(sp.c_tilde)
            << "," << mode_name(cfg.mode) << "," << format_double(theta) << "\n";
    }
    const LastPair last = coeff_last(mesh, k, cfg.alpha, cfg.mode);
    csv << k << "," << k << "," << format_double(last.a_last) << ","
        << format_double(last.c_last) << "," << mode_name(cfg.mode) << ",\n";
    out.commit();
    return 0;
}

int cmd_derivative(const RunConfig& cfg, OutputSet& out, const std::string& fn_name) {
    const TimeMesh mesh = build_graded_mesh(cfg.n_steps, cfg.grading, cfg.horizon);
    const double alpha = cfg.alpha;
    std::function<double(double)> u, exact;
    if (fn_name == "one") {
        u = [](double) { return 1.0; };
        exact = [](double) { return 0.0; };
    } else if (fn_name == "t") {
        u = [](double t) { return t; };
        exact = [alpha](double t) { return std::pow(t, 1.0 - alpha) / gamma_fn(2.0 - alpha); };
    } else if (fn_name == "t2") {
        u = [](double t) { return t * t; };
        exact = [alpha](double t) {
            return 2.0 * std::pow(t, 2.0 - alpha) / gamma_fn(3.0 - alpha);
        };
    } else if (fn_name == "talpha") {
        u = [alpha](double t) { return std::pow(t, alpha); };
        exact = [alpha](double) { return gamma_fn(1.0 + alpha); };
    } else {
        throw ConfigError("derivative: --function must be one, t, t2 or talpha");
    }
    const std::size_t n = mesh.num_steps();
    std::vector<double> series(n + 1);
    for (std::size_t j = 0; j <= n; ++j) series[j] = u(mesh.t(j));

    auto csv = out.open("derivative.csv");
    csv << "t_k,value,exact,error\n";
    auto emit = [&](std::size_t k, double value) {
        const double ex = exact(mesh.t(k));
        csv << format_double(mesh.t(k)) << "," << format_double(value) << ","
            << format_double(ex) << "," << format_double(value - ex) << "\n";
    };
    if (cfg.scheme == Scheme::Standard) {
        for (std::size_t k = 1; k <= n; ++k) {
            emit(k, l2_caputo({series, mesh}, alpha, k, cfg.thresholds, cfg.mode));
        }
    } else {
        const double dt_cut = cfg.soe.dt_cut > 0.0 ? cfg.soe.dt_cut : mesh.step(2);
        const double t_soe = cfg.soe.t_soe > 0.0 ? cfg.soe.t_soe : cfg.horizon;
        const SoeApproximation soe = build_soe(alpha, cfg.soe.eps, dt_cut, t_soe);
        FastHistoryState state(soe.count());
        emit(1, l2_caputo({series, mesh}, alpha, 1, cfg.thresholds, cfg.mode));
        for (std::size_t k = 2; k <= n; ++k) {
            emit(k, fast_l2_caputo(state, series[k - 2], series[k - 1], series[k], mesh, alpha, k,
                                   soe, cfg.thresholds, cfg.mode));
        }
    }
    out.commit();
    return 0;
}

int cmd_soe_check(const RunConfig& cfg, bool check) {
    const double t_soe = cfg.soe.t_soe > 0.0 ? cfg.soe.t_soe : cfg.horizon;
    double dt_cut = cfg.soe.dt_cut;
    if (!(dt_cut > 0.0)) {
        const TimeMesh mesh = build_graded_mesh(cfg.n_steps, cfg.grading, cfg.horizon);
        dt_cut = mesh.step(2);
    }
    const SoeApproximation soe = build_soe(cfg.alpha, cfg.soe.eps, dt_cut, t_soe);
    const double err = soe.sampled_max_rel_error();
    std::cout << "N_q " << soe.count() << "\n";
    std::cout << "max_rel_error " << format_double(err) << "\n";
    if (check && err > cfg.soe.eps) {
        std::cerr << "soe-check: sampled error exceeds eps\n";
        return 4;
    }
    return 0;
}

int cmd_solve(const RunConfig& cfg, OutputSet& out, bool no_timing) {
    const ProblemSpec p = make_problem(cfg);
    const SpatialGrid grid = build_grid(p.space_n);
    const SolveReport rep = solve(p, grid, cfg.thresholds);
    const TimeMesh mesh = build_graded_mesh(cfg.n_steps, cfg.grading, cfg.horizon);

    auto report = out.open("report.csv");
    report << "k,t_k,err_tk\n";
    for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
        report << k << "," << format_double(mesh.t(k)) << ",";
        if (p.exact) report << format_double(rep.err_per_step[k]);
        report << "\n";
    }
    auto summary = out.open("summary.csv");
    if (no_timing) {
        summary << "err_max,err_T\n";
        summary << format_double(rep.err_max) << "," << format_double(rep.err_T) << "\n";
    } else {
        summary << "err_max,err_T,seconds\n";
        summary << format_double(rep.err_max) << "," << format_double(rep.err_T) << ","
                << format_double(rep.wall_seconds) << "\n";
    }
    out.commit();
    return 0;
}

int cmd_convergence(const RunConfig& cfg, OutputSet& out, const std::vector<std::size_t>& n_list,
                    const std::vector<double>& r_list, bool no_timing) {
    if (n_list.size() < 2) throw ConfigError("convergence: need --n-list with at least 2 values");
    const ProblemSpec base = make_problem(cfg);
    const SpatialGrid grid = build_grid(base.space_n);
    const auto rows = convergence_study(base, n_list, r_list, grid, cfg.thresholds);
    auto csv = out.open("convergence.csv");
    csv << (no_timing ? "N,r,err_max,err_T,rate_max,rate_T\n"
                      : "N,r,err_max,err_T,rate_max,rate_T,seconds\n");
    for (const auto& row : rows) {
        csv << row.n_steps << "," << format_double(row.grading) << ","
            << format_double(row.err_max) << "," << format_double(row.err_T) << ","
            << format_double(row.rate_max) << "," << format_double(row.rate_T);
        if (!no_timing) csv << "," << format_double(row.seconds);
        csv << "\n";
    }
    out.commit();
    return 0;
}

int cmd_compare_modes(const RunConfig& cfg, OutputSet& out, std::optional<double> check_tol,
                      bool no_timing) {
    ProblemSpec p = make_problem(cfg);
    const SpatialGrid grid = build_grid(p.space_n);
    p.mode = CoeffMode::TCTE;
    const SolveReport rep_tcte = solve(p, grid, cfg.thresholds);
    p.mode = CoeffMode::GaussKronrod;
    const SolveReport rep_gk = solve(p, grid, cfg.thresholds);
    const TimeMesh mesh = build_graded_mesh(cfg.n_steps, cfg.grading, cfg.horizon);

    double max_diff = 0.0;
    auto csv = out.open("errdiff.csv");
    csv << "k,t_k,err_tcte,err_gk,diff\n";
    for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
        const double d = rep_gk.err_per_step[k] - rep_tcte.err_per_step[k];
        max_diff = std::max(max_diff, std::abs(d));
        csv << k << "," << format_double(mesh.t(k)) << ","
            << format_double(rep_tcte.err_per_step[k]) << ","
            << format_double(rep_gk.err_per_step[k]) << "," << format_double(d) << "\n";
    }
    if (!no_timing) {
        auto timing = out.open("timing.csv");
        timing << "mode,seconds\n";
        timing << "tcte," << format_double(rep_tcte.wall_seconds) << "\n";
        timing << "gk," << format_double(rep_gk.wall_seconds) << "\n";
    }
    out.commit();
    if (check_tol && max_diff > *check_tol) {
        std::cerr << "compare-modes: max |err difference| " << max_diff << " exceeds "
                  << *check_tol << "\n";
        return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Standard and fast L2 Caputo discretizations with roundoff-safe coefficients"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    long long seed = 0;
    bool no_timing = false;
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed recorded for reproducibility");
    app.add_flag("--no-timing", no_timing, "omit timing columns from CSV outputs");

    auto* sc_coeffs = app.add_subcommand("coeffs", "dump one coefficient row as CSV");
    std::size_t coeffs_k = 0;
    sc_coeffs->add_option("--k", coeffs_k, "row index k (default N)");

    auto* sc_deriv = app.add_subcommand("derivative", "evaluate the discrete Caputo operator");
    std::string deriv_fn = "t2";
    sc_deriv->add_option("--function", deriv_fn, "sampled function: one, t, t2, talpha");

    auto* sc_soe = app.add_subcommand("soe-check", "report SOE node count and sampled error");
    bool soe_check_flag = false;
    sc_soe->add_flag("--check", soe_check_flag, "exit 4 if the sampled error exceeds eps");

    auto* sc_solve = app.add_subcommand("solve", "run one subdiffusion solve");

    auto* sc_conv = app.add_subcommand("convergence", "N-sweep with observed rates");
    std::vector<std::size_t> n_list;
    std::vector<double> r_list;
    sc_conv->add_option("--n-list", n_list, "comma-separated N values")->delimiter(',');
    sc_conv->add_option("--r-list", r_list, "comma-separated grading values")->delimiter(',');

    auto* sc_cmp = app.add_subcommand("compare-modes", "TCTE vs Gauss-Kronrod comparison");
    double cmp_check_tol = -1.0;
    sc_cmp->add_option("--check", cmp_check_tol, "exit 4 if max |err difference| exceeds TOL");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        const RunConfig cfg = parse_config(config_path);
        (void)seed;  // recorded via CLI history; no randomized paths here
        if (*sc_soe) return cmd_soe_check(cfg, soe_check_flag);
        OutputSet out{fs::path(out_dir)};
        if (*sc_coeffs) return cmd_coeffs(cfg, out, coeffs_k);
        if (*sc_deriv) return cmd_derivative(cfg, out, deriv_fn);
        if (*sc_solve) return cmd_solve(cfg, out, no_timing);
        if (*sc_conv) return cmd_convergence(cfg, out, n_list, r_list, no_timing);
        if (*sc_cmp)
            return cmd_compare_modes(cfg, out,
                                     cmp_check_tol >= 0.0 ? std::optional<double>(cmp_check_tol)
                                                          : std::nullopt,
                                     no_timing);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ToleranceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
