#include "app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "modopo/config.hpp"
#include "modopo/csv.hpp"
#include "modopo/errors.hpp"
#include "modopo/fluctuations.hpp"
#include "modopo/positivep.hpp"
#include "modopo/qsd.hpp"
#include "modopo/semiclassical.hpp"

#ifndef MODOPO_VERSION
#define MODOPO_VERSION "0.0.0"
#endif

namespace modopo::app {
namespace {

constexpr std::size_t kCurvePoints = 400;  // per period
constexpr std::size_t kCurvePeriods = 2;
constexpr std::size_t kStochasticPoints = 40;  // per period
constexpr std::size_t kCompareMaxAutoNmax = 40;

std::vector<double> curve_grid(double period)
{
    std::vector<double> t(kCurvePoints * kCurvePeriods + 1);
    for (std::size_t j = 0; j < t.size(); ++j) {
        t[j] = period * static_cast<double>(j) / kCurvePoints;
    }
    return t;
}

std::vector<double> stochastic_grid(double period)
{
    std::vector<double> t(kStochasticPoints + 1);
    for (std::size_t j = 0; j < t.size(); ++j) {
        t[j] = period * static_cast<double>(j) / kStochasticPoints;
    }
    return t;
}

std::string fmt(double x) { return format_double(x); }

std::vector<std::string> base_metadata(const std::string& command, const ResolvedModel& m, const RunConfig& cfg)
{
    const DerivedParams d = derive_params(m.params);
    std::vector<std::string> meta{
        "modopo " MODOPO_VERSION " " + command,
        "config " + to_json(m.config),
        "lambda_over_gamma " + fmt(d.lambda / m.params.gamma),
        "regime " + std::string(to_string(regime_classify(m.params))),
        "seed " + std::to_string(cfg.seed),
    };
    return meta;
}

void add_validity_warning(RunReport& report, const ModelParams& p, const FluctuationOptions& opts = {})
{
    const double ratio = linearization_validity(p);
    if (!(ratio >= opts.validity_factor)) {
        report.warnings.push_back("linearization validity ratio " + fmt(ratio) + " < " + fmt(opts.validity_factor) +
                                  ": linear theory is outside its validity range");
    }
}

void write(RunReport& report, const RunConfig& cfg, const std::string& name, const CsvTable& table)
{
    const auto path = cfg.out_dir / name;
    write_csv(path, table);
    report.files.push_back(path);
}

void write_gnuplot(RunReport& report, const RunConfig& cfg, const std::string& name, const std::string& csv,
                   const std::string& xlabel, const std::string& ylabel, const std::vector<std::string>& titles,
                   int first_column = 2, const std::string& extra = "")
{
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set datafile commentschars '#'\n"
       << "set key autotitle columnhead\n"
       << "set xlabel '" << xlabel << "'\n"
       << "set ylabel '" << ylabel << "'\n"
       << extra << "plot ";
    for (std::size_t i = 0; i < titles.size(); ++i) {
        os << (i ? ", \\\n     " : "") << "'" << csv << "' using 1:" << first_column + static_cast<int>(i)
           << " with lines title '" << titles[i] << "'";
    }
    os << "\n";
    const auto path = cfg.out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::filesystem::filesystem_error("cannot open output file", path,
                                                std::make_error_code(std::errc::permission_denied));
    }
    out << os.str();
    report.files.push_back(path);
}

/// n0 on the curve grid: ODE from the periodic point, zero off the periodic branch.
std::vector<double> n0_curve(const ModelParams& p, const std::vector<double>& grid)
{
    if (regime_classify(p) != Regime::AboveThreshold) {
        return std::vector<double>(grid.size(), 0.0);
    }
    const SemiclassicalTrajectory orbit = periodic_steady_state(p);
    return integrate_n0(p, grid, orbit.n0.front()).n0;
}

/// V and n0 from the linearized variance equation on the curve grid.
std::pair<std::vector<double>, std::vector<double>> variance_curve(const ModelParams& p)
{
    FluctuationOptions opts;
    opts.n_scan = kCurvePoints;
    const VarianceTrajectory vt = periodic_variance(p, opts);
    std::vector<double> V(kCurvePoints * kCurvePeriods + 1);
    std::vector<double> n0(V.size());
    for (std::size_t j = 0; j < V.size(); ++j) {
        V[j] = vt.V[j % kCurvePoints];
        n0[j] = vt.n0_ref.n0[j % kCurvePoints];
    }
    return {V, n0};
}

std::size_t traj_or(const RunConfig& cfg, std::size_t fallback) { return cfg.traj.value_or(fallback); }

std::vector<double> sweep_fbar_grid()
{
    // 0.10, 0.15, ..., 4.00 built from integers so that 1.00 is exact
    std::vector<double> g;
    for (int j = 0; j <= 78; ++j) {
        g.push_back(static_cast<double>(10 + 5 * j) / 100.0);
    }
    return g;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows, std::vector<std::string> meta, RunReport& report)
{
    CsvTable table;
    table.metadata = std::move(meta);
    table.columns = {"fbar_over_fth", "f1_over_fbar", "v_min", "t0", "n0_at_t0", "inseparable", "epr",
                     "validity_ratio"};
    for (const SweepRow& r : rows) {
        if (!r.ok) {
            report.warnings.push_back("sweep cell fbar/fth=" + fmt(r.fbar_over_fth) + " f1/fbar=" +
                                      fmt(r.f1_over_fbar) + " failed: " + r.error);
            table.metadata.push_back("failed fbar_over_fth=" + fmt(r.fbar_over_fth) +
                                     " f1_over_fbar=" + fmt(r.f1_over_fbar) + ": " + r.error);
            continue;
        }
        table.add_row({r.fbar_over_fth, r.f1_over_fbar, r.result.v_min, r.result.t0, r.result.n0_at_t0,
                       std::int64_t{r.result.criteria.inseparable}, std::int64_t{r.result.criteria.epr},
                       r.result.validity_ratio});
    }
    return table;
}

PositivePOptions pp_options(const RunConfig& cfg)
{
    PositivePOptions o;
    o.dt = cfg.dt.value_or(o.dt);
    o.workers = cfg.workers;
    return o;
}

QsdOptions qsd_options(const RunConfig& cfg)
{
    QsdOptions o;
    o.dt = cfg.dt.value_or(o.dt);
    o.workers = cfg.workers;
    return o;
}

}  // namespace

ResolvedModel resolve_model(const RunConfig& cfg, DimensionlessConfig defaults, std::optional<double> default_lambda)
{
    ResolvedModel m;
    m.config = cfg.config_path ? load_config(*cfg.config_path, defaults) : defaults;
    if (cfg.fbar) {
        m.config.fbar_over_fth = *cfg.fbar;
    }
    if (cfg.f1) {
        m.config.f1_over_fbar = *cfg.f1;
    }
    if (cfg.delta) {
        m.config.delta_over_gamma = *cfg.delta;
    }
    m.lambda_over_gamma = cfg.lambda ? cfg.lambda : default_lambda;
    if (m.lambda_over_gamma) {
        m.params = make_params_with_lambda(m.config, *m.lambda_over_gamma);
        m.config.k_over_gamma = m.params.k / m.params.gamma;
    } else {
        m.params = make_params(m.config);
    }
    validate(m.params);
    return m;
}

void check_run_config(const RunConfig& cfg)
{
    if (!std::filesystem::is_directory(cfg.out_dir)) {
        throw std::filesystem::filesystem_error("output directory does not exist", cfg.out_dir,
                                                std::make_error_code(std::errc::no_such_file_or_directory));
    }
    if (cfg.traj && *cfg.traj < 2) {
        throw InvalidParameter("--traj must be at least 2");
    }
    if (cfg.dt && !(*cfg.dt > 0.0 && *cfg.dt <= 0.1)) {
        throw InvalidParameter("--dt must lie in (0, 0.1]");
    }
    if (cfg.workers < 1 || cfg.workers > 256) {
        throw InvalidParameter("--workers must lie in [1, 256]");
    }
    if (cfg.n_max == 1) {
        throw InvalidParameter("--nmax must be 0 (automatic) or at least 2");
    }
    if (cfg.lambda && !(*cfg.lambda > 0.0)) {
        throw InvalidParameter("--lambda must be positive");
    }
}

RunReport run_semiclassical(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const ResolvedModel m = resolve_model(cfg, {});
    const DerivedParams d = derive_params(m.params);
    const auto grid = curve_grid(d.period);
    const auto n0 = n0_curve(m.params, grid);
    CsvTable table;
    table.metadata = base_metadata("semiclassical", m, cfg);
    table.columns = {"t", "n0"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        table.add_row({grid[j], n0[j]});
    }
    write(report, cfg, "semiclassical.csv", table);
    report.summary.push_back("max n0 = " + fmt(*std::max_element(n0.begin(), n0.end())));
    return report;
}

RunReport run_variance(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const ResolvedModel m = resolve_model(cfg, {});
    const DerivedParams d = derive_params(m.params);
    const auto grid = curve_grid(d.period);
    const auto [V, n0] = variance_curve(m.params);
    const VminResult vmin = find_vmin(m.params);
    add_validity_warning(report, m.params);

    CsvTable table;
    table.metadata = base_metadata("variance", m, cfg);
    table.metadata.push_back("v_min " + fmt(vmin.v_min) + " t0 " + fmt(vmin.t0) + " n0_at_t0 " + fmt(vmin.n0_at_t0));
    table.metadata.push_back("validity_ratio " + fmt(vmin.validity_ratio) +
                             (vmin.validity_ok ? "" : " (warning: linear theory outside validity range)"));
    table.columns = {"t", "V", "n0"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        table.add_row({grid[j], V[j], n0[j]});
    }
    write(report, cfg, "variance.csv", table);
    report.summary.push_back("V_min = " + fmt(vmin.v_min) + " at t0 = " + fmt(vmin.t0) +
                             (vmin.criteria.epr ? " (EPR)" : vmin.criteria.inseparable ? " (inseparable)" : ""));
    return report;
}

RunReport run_sweep(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const ResolvedModel m = resolve_model(cfg, {});
    const auto fbar = sweep_fbar_grid();
    const std::vector<double> levels{m.config.f1_over_fbar};
    const auto rows = sweep_vmin(m.params, fbar, levels, {}, cfg.workers);
    write(report, cfg, "sweep.csv", sweep_table(rows, base_metadata("sweep", m, cfg), report));
    return report;
}

RunReport run_positivep(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const ResolvedModel m = resolve_model(cfg, {});
    const DerivedParams d = derive_params(m.params);
    const auto grid = stochastic_grid(d.period);
    const PositivePOptions opts = pp_options(cfg);
    const EnsembleMoments e = simulate_ensemble(m.params, traj_or(cfg, 1000), grid, cfg.seed, opts);
    const ResidualReport res = check_moment_equations(e, m.params);

    CsvTable table;
    table.metadata = base_metadata("positivep", m, cfg);
    table.metadata.push_back("dt " + fmt(e.dt) + " relaxation " + fmt(opts.relaxation));
    table.metadata.push_back("moment_residual_max_z " + fmt(res.max_abs_z) + (res.pass ? " pass" : " fail"));
    table.columns = {"t",      "n_plus_mean", "n_plus_stderr", "R_mean", "R_stderr", "Z_mean",
                     "Z_stderr", "V_mean",    "V_stderr",      "n_traj", "discarded"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        table.add_row({grid[j], e.n_plus[j].mean, e.n_plus[j].std_error, e.R[j].mean, e.R[j].std_error, e.Z[j].mean,
                       e.Z[j].std_error, e.V[j].mean, e.V[j].std_error, static_cast<std::int64_t>(e.n_traj),
                       static_cast<std::int64_t>(e.discarded)});
    }
    write(report, cfg, "positivep.csv", table);
    if (!res.pass) {
        report.warnings.push_back("moment-equation residuals exceed 3 standard errors (max |z| = " +
                                  fmt(res.max_abs_z) + ")");
    }
    report.summary.push_back(std::to_string(e.n_traj) + " trajectories, " + std::to_string(e.discarded) +
                             " discarded, max |z| = " + fmt(res.max_abs_z));
    return report;
}

RunReport run_qsd(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const ResolvedModel m = resolve_model(cfg, {}, 0.1);
    const DerivedParams d = derive_params(m.params);
    const auto grid = stochastic_grid(d.period);
    const QsdOptions opts = qsd_options(cfg);
    const QsdEnsemble e = simulate_qsd_ensemble(m.params, cfg.n_max, traj_or(cfg, 200), grid, cfg.seed, opts);

    CsvTable table;
    table.metadata = base_metadata("qsd", m, cfg);
    table.metadata.push_back("n_max " + std::to_string(e.n_max) + " dt " + fmt(e.dt) + " relaxation " +
                             fmt(opts.relaxation));
    table.columns = {"t", "V_mean", "V_stderr", "n1_mean", "n2_mean", "tail_pop", "n_traj"};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        table.add_row({grid[j], e.V_mean[j], e.V_stderr[j], e.n1_mean[j], e.n2_mean[j], e.tail_pop[j],
                       static_cast<std::int64_t>(e.n_traj)});
    }
    write(report, cfg, "qsd.csv", table);
    report.summary.push_back(std::to_string(e.n_traj) + " trajectories at n_max = " + std::to_string(e.n_max));
    return report;
}

RunReport run_compare(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const ResolvedModel m = resolve_model(cfg, {}, 0.1);
    const DerivedParams d = derive_params(m.params);
    const double lam = d.lambda / m.params.gamma;
    const auto grid = stochastic_grid(d.period);
    add_validity_warning(report, m.params);

    const AsymptoticVariance linear(m.params);
    const EnsembleMoments pp = simulate_ensemble(m.params, traj_or(cfg, 2000), grid, cfg.seed, pp_options(cfg));

    std::optional<QsdEnsemble> qsd;
    const std::size_t auto_nmax = default_n_max(m.params);
    if (cfg.n_max != 0 || auto_nmax <= kCompareMaxAutoNmax) {
        qsd = simulate_qsd_ensemble(m.params, cfg.n_max, traj_or(cfg, 2000) / 10 + 2, grid, cfg.seed,
                                    qsd_options(cfg));
    } else {
        report.warnings.push_back("state diffusion skipped: automatic cutoff " + std::to_string(auto_nmax) +
                                  " exceeds " + std::to_string(kCompareMaxAutoNmax) + " (pass --nmax to force)");
    }

    CsvTable table;
    table.metadata = base_metadata("compare", m, cfg);
    table.metadata.push_back("tolerance max(3*stderr, 2*lambda/gamma) = max(3*stderr, " + fmt(2.0 * lam) + ")");
    table.metadata.push_back("validity_ratio " + fmt(linearization_validity(m.params)));
    table.columns = {"t",        "V_linear", "V_positivep", "V_positivep_stderr", "V_qsd", "V_qsd_stderr",
                     "dev_positivep", "dev_qsd", "pass_positivep", "pass_qsd"};
    bool all_pp = true;
    bool all_qsd = true;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double vl = linear(grid[j]);
        const double dev_pp = pp.V[j].mean - vl;
        const bool ok_pp = std::abs(dev_pp) <= std::max(3.0 * pp.V[j].std_error, 2.0 * lam);
        double vq = std::nan("");
        double sq = std::nan("");
        double dev_q = std::nan("");
        bool ok_q = true;
        if (qsd) {
            vq = qsd->V_mean[j];
            sq = qsd->V_stderr[j];
            dev_q = vq - vl;
            ok_q = std::abs(dev_q) <= std::max(3.0 * sq, 2.0 * lam);
        }
        all_pp = all_pp && ok_pp;
        all_qsd = all_qsd && ok_q;
        table.add_row({grid[j], vl, pp.V[j].mean, pp.V[j].std_error, vq, sq, dev_pp, dev_q, std::int64_t{ok_pp},
                       std::int64_t{ok_q}});
    }
    write(report, cfg, "compare.csv", table);
    report.summary.push_back(std::string("positive-P vs linear: ") + (all_pp ? "pass" : "fail"));
    report.summary.push_back(std::string("state diffusion vs linear: ") +
                             (qsd ? (all_qsd ? "pass" : "fail") : "skipped"));
    return report;
}

RunReport run_fig1(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const std::vector<double> levels{0.0, 0.4, 1.2};
    CsvTable table;
    table.columns = {"t", "n0_curve1", "n0_curve2", "n0_curve3"};
    std::vector<std::vector<double>> curves;
    std::vector<double> grid;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        DimensionlessConfig defaults;
        defaults.f1_over_fbar = levels[i];
        RunConfig c = cfg;
        c.f1.reset();
        const ResolvedModel m = resolve_model(c, defaults);
        if (i == 0) {
            table.metadata = base_metadata("fig1", m, cfg);
            grid = curve_grid(derive_params(m.params).period);
        }
        table.metadata.push_back("curve" + std::to_string(i + 1) + " f1_over_fbar " + fmt(levels[i]));
        curves.push_back(n0_curve(m.params, grid));
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        table.add_row({grid[j], curves[0][j], curves[1][j], curves[2][j]});
    }
    write(report, cfg, "fig1.csv", table);
    write_gnuplot(report, cfg, "fig1.gp", "fig1.csv", "gamma t", "n0",
                  {"f1=0", "f1=0.4 fbar", "f1=1.2 fbar"});
    return report;
}

RunReport run_fig2(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const std::vector<double> levels{0.0, 0.4, 1.2};
    CsvTable table;
    CsvTable minima;
    table.columns = {"t", "V_curve1", "V_curve2", "V_curve3"};
    minima.columns = {"f1_over_fbar", "v_min", "t0", "n0_at_t0", "inseparable", "epr", "validity_ratio"};
    std::vector<std::vector<double>> curves;
    std::vector<double> grid;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        DimensionlessConfig defaults;
        defaults.f1_over_fbar = levels[i];
        RunConfig c = cfg;
        c.f1.reset();
        const ResolvedModel m = resolve_model(c, defaults);
        if (i == 0) {
            table.metadata = base_metadata("fig2", m, cfg);
            minima.metadata = table.metadata;
            grid = curve_grid(derive_params(m.params).period);
        }
        curves.push_back(variance_curve(m.params).first);
        const VminResult v = find_vmin(m.params);
        minima.add_row({levels[i], v.v_min, v.t0, v.n0_at_t0, std::int64_t{v.criteria.inseparable},
                        std::int64_t{v.criteria.epr}, v.validity_ratio});
        report.summary.push_back("curve " + std::to_string(i + 1) + ": V_min = " + fmt(v.v_min) + " at t0 = " +
                                 fmt(v.t0) + ", n0 = " + fmt(v.n0_at_t0));
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        table.add_row({grid[j], curves[0][j], curves[1][j], curves[2][j]});
    }
    write(report, cfg, "fig2.csv", table);
    write(report, cfg, "fig2_minima.csv", minima);
    write_gnuplot(report, cfg, "fig2.gp", "fig2.csv", "gamma t", "V", {"f1=0", "f1=0.4 fbar", "f1=1.2 fbar"});
    return report;
}

RunReport run_fig3(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    const ResolvedModel m = resolve_model(cfg, {});
    const auto fbar = sweep_fbar_grid();
    const std::vector<double> levels{0.0, 0.75, 2.0};
    const auto rows = sweep_vmin(m.params, fbar, levels, {}, cfg.workers);
    write(report, cfg, "fig3.csv", sweep_table(rows, base_metadata("fig3", m, cfg), report));
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set datafile commentschars '#'\n"
       << "set xlabel 'fbar/f_th'\nset ylabel 'V_min'\n"
       << "plot for [lvl in '0 0.75 2'] 'fig3.csv' using 1:($2==real(lvl) ? $3 : 1/0) with linespoints "
          "title 'f1/fbar='.lvl\n";
    const auto path = cfg.out_dir / "fig3.gp";
    std::ofstream(path, std::ios::binary | std::ios::trunc) << os.str();
    report.files.push_back(path);
    return report;
}

RunReport run_fig4(const RunConfig& cfg)
{
    check_run_config(cfg);
    RunReport report;
    DimensionlessConfig defaults;
    defaults.fbar_over_fth = 1.0;
    defaults.f1_over_fbar = 0.5;
    const ResolvedModel m = resolve_model(cfg, defaults, cfg.full ? 0.01 : 0.1);
    const DerivedParams d = derive_params(m.params);
    const auto grid = stochastic_grid(d.period);
    add_validity_warning(report, m.params);

    const AsymptoticVariance linear(m.params);
    const QsdEnsemble e =
        simulate_qsd_ensemble(m.params, cfg.n_max, traj_or(cfg, 400), grid, cfg.seed, qsd_options(cfg));

    CsvTable table;
    table.metadata = base_metadata("fig4", m, cfg);
    table.metadata.push_back("n_max " + std::to_string(e.n_max) + " dt " + fmt(e.dt) + " n_traj " +
                             std::to_string(e.n_traj));
    table.columns = {"t", "V_analytic", "V_qsd", "V_qsd_stderr"};
    double mean_dev = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double vl = linear(grid[j]);
        table.add_row({grid[j], vl, e.V_mean[j], e.V_stderr[j]});
        mean_dev += std::abs(e.V_mean[j] - vl) / static_cast<double>(grid.size());
    }
    write(report, cfg, "fig4.csv", table);
    write_gnuplot(report, cfg, "fig4.gp", "fig4.csv", "gamma t", "V", {"analytic", "state diffusion"}, 2,
                  "set bars small\n");
    report.summary.push_back("time-averaged |V_qsd - V_analytic| = " + fmt(mean_dev) + " (lambda/gamma = " +
                             fmt(d.lambda / m.params.gamma) + ")");
    return report;
}

int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Entanglement in a time-modulated nondegenerate optical parametric oscillator"};
    app.set_version_flag("--version", MODOPO_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string config_path;
    double fbar = 0.0, f1 = 0.0, delta = 0.0, lambda = 0.0, dt = 0.0;
    std::size_t traj = 0;
    auto* o_config = app.add_option("--config", config_path, "JSON model configuration")->check(CLI::ExistingFile);
    app.add_option("--out", cfg.out_dir, "Output directory (must exist)");
    app.add_option("--seed", cfg.seed, "Random seed");
    auto* o_traj = app.add_option("--traj", traj, "Number of stochastic trajectories");
    auto* o_dt = app.add_option("--dt", dt, "Stochastic time step (units of 1/gamma)");
    app.add_flag("--full", cfg.full, "Small-lambda fig4 run (lambda/gamma = 0.01)");
    auto* o_fbar = app.add_option("--fbar", fbar, "fbar / f_th");
    auto* o_f1 = app.add_option("--f1", f1, "f1 / fbar");
    auto* o_delta = app.add_option("--delta", delta, "delta / gamma");
    auto* o_lambda = app.add_option("--lambda", lambda, "lambda / gamma (sets k)");
    app.add_option("--workers", cfg.workers, "Worker threads");
    app.add_option("--nmax", cfg.n_max, "Fock cutoff per mode (0 = automatic)");

    using Runner = RunReport (*)(const RunConfig&);
    const std::vector<std::tuple<const char*, const char*, Runner>> commands{
        {"semiclassical", "Periodic mean photon number n0(t)", &run_semiclassical},
        {"variance", "Linearized two-mode variance V(t)", &run_variance},
        {"sweep", "Minimum variance versus fbar/f_th", &run_sweep},
        {"positivep", "Positive-P ensemble moments", &run_positivep},
        {"qsd", "Quantum state diffusion ensemble", &run_qsd},
        {"compare", "Linear theory vs positive-P vs state diffusion", &run_compare},
        {"fig1", "Photon number curves", &run_fig1},
        {"fig2", "Variance curves and minima", &run_fig2},
        {"fig3", "Minimum variance sweep at three modulation levels", &run_fig3},
        {"fig4", "State diffusion vs linear theory", &run_fig4},
    };
    for (const auto& [name, help, fn] : commands) {
        app.add_subcommand(name, help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    if (*o_config) {
        cfg.config_path = config_path;
    }
    if (*o_traj) {
        cfg.traj = traj;
    }
    if (*o_dt) {
        cfg.dt = dt;
    }
    if (*o_fbar) {
        cfg.fbar = fbar;
    }
    if (*o_f1) {
        cfg.f1 = f1;
    }
    if (*o_delta) {
        cfg.delta = delta;
    }
    if (*o_lambda) {
        cfg.lambda = lambda;
    }

    const CLI::App* sub = app.get_subcommands().front();
    Runner runner = nullptr;
    for (const auto& [name, help, fn] : commands) {
        if (sub->get_name() == name) {
            runner = fn;
        }
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        const RunReport report = runner(cfg);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (const auto& w : report.warnings) {
            err << "warning: " << w << "\n";
        }
        for (const auto& s : report.summary) {
            out << s << "\n";
        }
        std::ofstream log(cfg.out_dir / "run.log", std::ios::binary | std::ios::trunc);
        log << "modopo " << MODOPO_VERSION << " " << sub->get_name() << "\n";
        log << "seed " << cfg.seed << "\n";
        log << "wall_clock_seconds " << seconds << "\n";
        for (const auto& f : report.files) {
            log << "file " << f.filename().string() << "\n";
            out << "wrote " << f.string() << "\n";
        }
        for (const auto& w : report.warnings) {
            log << "warning " << w << "\n";
        }
        return 0;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace modopo::app
