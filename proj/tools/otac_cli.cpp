// otac: design and verify sum-computation constellations under Cauchy noise.
//
//   otac optimize --k 100 --q 4 --snr-db 10
//   otac mse      --k 10 --q 4 --gamma 0.1 --d1 0.3 --d2 0.5 --trials 100000
//   otac sweep    --k 100 --q 8 --trials 50000 --out q8_K100.dat
//   otac validate [--quick]

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <otac/otac.hpp>

#ifndef OTAC_VERSION
#define OTAC_VERSION "0.0.0"
#endif

namespace {

using json = nlohmann::json;

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_domain = 3,
    exit_io = 4,
    exit_validation = 5,
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Args {
    int K = 0;
    int q = 0;
    double power = 1.0;
    std::optional<double> gamma;
    std::optional<double> snr_db;
    double snr_start = 0.0;
    double snr_stop = 20.0;
    double snr_step = 1.0;
    std::int64_t trials = 50'000;
    std::uint64_t seed = 1;
    std::string mode = "per-node-uniform";
    std::string baseline = "power-matched";
    unsigned workers = 1;
    std::string out;
    bool quick = false;
    std::string fault;
    std::optional<double> d1;
    std::optional<double> d2;
    std::vector<std::string> argv;
};

otac::SymbolMode parse_mode(const std::string& s) {
    return s == "uniform-grid" ? otac::SymbolMode::uniform_grid : otac::SymbolMode::per_node_uniform;
}

otac::Baseline parse_baseline(const std::string& s) {
    return s == "caption" ? otac::Baseline::caption : otac::Baseline::power_matched;
}

double resolve_gamma(const Args& a) {
    if (a.gamma) return *a.gamma;
    return otac::gamma_from_snr_db(*a.snr_db, a.power);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("write to '" + path + "' failed");
}

json manifest(const Args& a, const std::string& command) {
    json m;
    m["tool"] = "otac";
    m["version"] = OTAC_VERSION;
    m["timestamp"] = utc_timestamp();
    m["command"] = command;
    m["argv"] = a.argv;
    json in;
    in["K"] = a.K;
    in["q"] = a.q;
    in["power"] = a.power;
    if (a.gamma) in["gamma"] = *a.gamma;
    if (a.snr_db) in["snr_db"] = *a.snr_db;
    in["snr_start"] = a.snr_start;
    in["snr_stop"] = a.snr_stop;
    in["snr_step"] = a.snr_step;
    in["trials"] = a.trials;
    in["seed"] = a.seed;
    in["mode"] = a.mode;
    in["baseline"] = a.baseline;
    in["workers"] = a.workers;
    m["inputs"] = in;
    return m;
}

void add_shape_options(CLI::App* cmd, Args& a, bool required) {
    cmd->add_option("--k", a.K, "number of transmitters K")->required(required)->check(CLI::PositiveNumber);
    cmd->add_option("--q", a.q, "per-axis alphabet size q (Q = q^2)")->required(required);
    cmd->add_option("--power", a.power, "average power P")->capture_default_str();
}

void add_noise_options(CLI::App* cmd, Args& a) {
    auto* g = cmd->add_option("--gamma", a.gamma, "Cauchy scale gamma");
    auto* s = cmd->add_option("--snr-db", a.snr_db, "SNR 10 log10(P/gamma) in dB");
    g->excludes(s);
    s->excludes(g);
}

void add_mc_options(CLI::App* cmd, Args& a) {
    cmd->add_option("--trials", a.trials, "Monte-Carlo trials")->capture_default_str();
    cmd->add_option("--seed", a.seed, "random seed")->capture_default_str();
    cmd->add_option("--mode", a.mode, "symbol mode")
        ->check(CLI::IsMember({"per-node-uniform", "uniform-grid"}))
        ->capture_default_str();
    cmd->add_option("--workers", a.workers, "worker threads (0 = all cores); never changes results")
        ->capture_default_str();
}

void require_noise(const Args& a) {
    if (!a.gamma && !a.snr_db) throw CLI::RequiredError("--gamma or --snr-db");
}

// ---------------------------------------------------------------------------

int cmd_optimize(const Args& a) {
    require_noise(a);
    const otac::ConstellationParams shape(a.q, a.K, 1.0, 1.0);
    const otac::NoiseModel model(resolve_gamma(a));
    const otac::PowerBudget budget(a.power, shape.Q());

    const auto root = otac::optimized_design(a.q, a.K, model.gamma(), budget);
    const auto scan = otac::exact_scan(a.q, a.K, model.gamma(), budget.rho(), 2001);
    const double eq = otac::equal_spacing(budget, parse_baseline(a.baseline));
    const double mse_opt = otac::closed_form_mse(shape.with_spacing(root.d1_star, root.d2_star), model);
    const double mse_scan = otac::closed_form_mse(shape.with_spacing(scan.d1_star, scan.d2_star), model);
    const double mse_eq = otac::closed_form_mse(shape.with_spacing(eq, eq), model);

    fmt::print("K={} q={} Q={} N={} P={} gamma={:.6g} snr_db={:.4f} rho={:.10g}\n", a.K, a.q, shape.Q(), shape.N(),
               a.power, model.gamma(), 10.0 * std::log10(a.power / model.gamma()), budget.rho());
    fmt::print("t*            {:.12f}\n", root.t_star);
    fmt::print("d1*           {:.12g}\n", root.d1_star);
    fmt::print("d2*           {:.12g}\n", root.d2_star);
    fmt::print("G(t*)         {:.6e}\n", root.g_residual);
    fmt::print("KKT residual  {:.6e}\n", root.kkt_residual);
    fmt::print("MSE optimized {:.10g}\n", mse_opt);
    fmt::print("MSE equal     {:.10g}  (d1=d2={:.10g}, {})\n", mse_eq, eq, a.baseline);
    fmt::print("exact scan    t={:.12f} MSE={:.10g} excess={:.3e}\n", scan.t_star, mse_scan, mse_opt / mse_scan - 1.0);

    if (!a.out.empty()) {
        json rec = manifest(a, "optimize");
        rec["result"] = {{"t_star", root.t_star},       {"d1_star", root.d1_star},
                         {"d2_star", root.d2_star},     {"g_residual", root.g_residual},
                         {"kkt_residual", root.kkt_residual}, {"method", otac::to_string(root.method)},
                         {"mse_opt", mse_opt},          {"mse_eq", mse_eq},
                         {"d_eq", eq},                  {"scan_t_star", scan.t_star},
                         {"mse_scan", mse_scan}};
        write_text(a.out, rec.dump(2) + "\n");
    }
    return exit_ok;
}

int cmd_mse(const Args& a) {
    require_noise(a);
    if (a.d1.has_value() != a.d2.has_value()) throw CLI::ValidationError("--d1/--d2", "give both or neither");
    const otac::ConstellationParams shape(a.q, a.K, 1.0, 1.0);
    const otac::NoiseModel model(resolve_gamma(a));
    const otac::PowerBudget budget(a.power, shape.Q());

    struct Row {
        std::string label;
        double d1, d2;
    };
    std::vector<Row> rows;
    if (a.d1) {
        rows.push_back({"given", *a.d1, *a.d2});
    } else {
        const auto root = otac::optimized_design(a.q, a.K, model.gamma(), budget);
        const double eq = otac::equal_spacing(budget, parse_baseline(a.baseline));
        rows.push_back({"optimized", root.d1_star, root.d2_star});
        rows.push_back({"equal", eq, eq});
    }

    fmt::print("K={} q={} N={} gamma={:.6g}\n", a.K, a.q, shape.N(), model.gamma());
    fmt::print("{:<10} {:>14} {:>14} {:>16} {:>16} {:>16} {:>12}\n", "design", "d1", "d2", "closed_form",
               "exact_uniform", "monte_carlo", "std_error");
    for (const auto& r : rows) {
        const auto p = shape.with_spacing(r.d1, r.d2);
        std::string mc = "-", se = "-";
        if (a.trials > 0) {
            const otac::McConfig cfg{p, model, a.trials, a.seed, parse_mode(a.mode)};
            const auto res = otac::run_monte_carlo(cfg, a.workers);
            mc = fmt::format("{:.8g}", res.mse);
            se = fmt::format("{:.3g}", res.std_error);
        }
        fmt::print("{:<10} {:>14.8g} {:>14.8g} {:>16.8g} {:>16.8g} {:>16} {:>12}\n", r.label, r.d1, r.d2,
                   otac::closed_form_mse(p, model), otac::exact_uniform_grid_mse(p, model), mc, se);
    }
    return exit_ok;
}

int cmd_sweep(const Args& a) {
    if (a.out.empty()) throw CLI::RequiredError("--out");
    if (a.trials < 1) throw otac::DomainError("--trials must be >= 1");
    const otac::ConstellationParams shape(a.q, a.K, 1.0, 1.0);
    const otac::PowerBudget budget(a.power, shape.Q());
    const auto grid = otac::snr_grid(a.snr_start, a.snr_stop, a.snr_step);

    const otac::McConfig base{shape, otac::NoiseModel(1.0), a.trials, a.seed, parse_mode(a.mode)};
    otac::SweepOptions opts;
    opts.baseline = parse_baseline(a.baseline);
    opts.workers = a.workers;
    const auto rows = otac::sweep_snr(base, budget, grid, opts);

    // The data file must not depend on workers or wall-clock time.
    std::ostringstream os;
    otac::write_sweep_table(
        os, rows,
        {fmt::format("otac {} sweep", OTAC_VERSION),
         fmt::format("K={} q={} P={} trials={} seed={} mode={} baseline={}", a.K, a.q, a.power, a.trials, a.seed,
                     a.mode, a.baseline),
         fmt::format("snr_start={} snr_stop={} snr_step={}", a.snr_start, a.snr_stop, a.snr_step)});
    write_text(a.out, os.str());

    json m = manifest(a, "sweep");
    m["output"] = a.out;
    m["rows"] = rows.size();
    write_text(a.out + ".manifest.json", m.dump(2) + "\n");

    fmt::print("wrote {} rows to {}\n", rows.size(), a.out);
    return exit_ok;
}

int cmd_validate(const Args& a) {
    otac::validation::Options opt;
    opt.budget = a.quick ? otac::validation::Budget::quick() : otac::validation::Budget{};
    opt.corrupt_alpha = a.fault == "alpha";
    opt.workers = a.workers;
    opt.seed = a.seed;

    const auto rep = otac::validation::run_all(opt);
    int failed = 0;
    for (const auto& c : rep.checks) {
        fmt::print("{} {:<28} measured={:<12.6g} tol={:<10.3g} {}\n", c.passed ? "PASS" : "FAIL", c.name, c.measured,
                   c.tolerance, c.detail);
        failed += !c.passed;
    }
    fmt::print("info closed-form / simulated MSE (uniform grid, K=10 q=4 10 dB) = {:.4f}\n",
               rep.lemma_to_simulator_ratio);
    if (failed) {
        fmt::print("{} check(s) failed:", failed);
        for (const auto& c : rep.checks)
            if (!c.passed) fmt::print(" {}", c.name);
        fmt::print("\n");
        return exit_validation;
    }
    fmt::print("all {} checks passed\n", rep.checks.size());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    Args a;
    a.argv.assign(argv, argv + argc);

    CLI::App app{"Constellation design for over-the-air sum computation under Cauchy noise"};
    app.set_version_flag("--version", OTAC_VERSION);
    app.require_subcommand(1);

    auto* optimize = app.add_subcommand("optimize", "optimal (d1, d2) for a configuration");
    add_shape_options(optimize, a, true);
    add_noise_options(optimize, a);
    optimize->add_option("--baseline", a.baseline, "equal-spacing reference")
        ->check(CLI::IsMember({"power-matched", "caption"}));
    optimize->add_option("--out", a.out, "write a JSON record here");

    auto* mse = app.add_subcommand("mse", "closed-form and simulated MSE of a design");
    add_shape_options(mse, a, true);
    add_noise_options(mse, a);
    add_mc_options(mse, a);
    mse->get_option("--trials")->default_val(0);
    mse->add_option("--d1", a.d1, "in-phase spacing");
    mse->add_option("--d2", a.d2, "quadrature spacing");
    mse->add_option("--baseline", a.baseline, "equal-spacing reference")
        ->check(CLI::IsMember({"power-matched", "caption"}));

    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo MSE over an SNR grid, optimized vs equal spacing");
    add_shape_options(sweep, a, true);
    add_mc_options(sweep, a);
    sweep->add_option("--snr-start", a.snr_start, "first SNR point (dB)")->capture_default_str();
    sweep->add_option("--snr-stop", a.snr_stop, "last SNR point (dB)")->capture_default_str();
    sweep->add_option("--snr-step", a.snr_step, "SNR step (dB)")->capture_default_str();
    sweep->add_option("--baseline", a.baseline, "equal-spacing reference")
        ->check(CLI::IsMember({"power-matched", "caption"}))
        ->capture_default_str();
    sweep->add_option("--out", a.out, "data file path")->required();

    auto* validate = app.add_subcommand("validate", "run the cross-module self-check suite");
    validate->add_flag("--quick", a.quick, "reduced trial counts, wider tolerances");
    validate->add_option("--inject-fault", a.fault, "corrupt a component to exercise the harness")
        ->check(CLI::IsMember({"alpha"}));
    validate->add_option("--seed", a.seed, "random seed")->capture_default_str();
    validate->add_option("--workers", a.workers, "worker threads")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*optimize) return cmd_optimize(a);
        if (*mse) return cmd_mse(a);
        if (*sweep) return cmd_sweep(a);
        if (*validate) return cmd_validate(a);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const otac::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return exit_domain;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_domain;
    }
    return exit_usage;
}
