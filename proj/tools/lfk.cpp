// lfk — command-line front end: kernel evaluation, single simulations,
// parameter campaigns, test-function diagnostics, and trace reports.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfk/asymptotics.hpp"
#include "lfk/campaign.hpp"
#include "lfk/config.hpp"
#include "lfk/kernel.hpp"
#include "lfk/operators.hpp"
#include "lfk/snapshot.hpp"
#include "lfk/solver.hpp"
#include "lfk/testfn.hpp"

namespace fs = std::filesystem;
using namespace lfk;

namespace {

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        try {
            std::size_t idx = 0;
            out.push_back(std::stod(piece, &idx));
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("bad ") + what +
                                        " entry: " + piece);
        }
    }
    if (out.empty())
        throw std::invalid_argument(std::string(what) + " must not be empty");
    return out;
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? csv_num(*v) : std::string();
}

int exit_code(Outcome o) {
    switch (o) {
        case Outcome::completed: return 0;
        case Outcome::blown_up: return 2;
        case Outcome::under_resolved: return 3;
    }
    return 3;
}

// --- kernel ---------------------------------------------------------------

struct KernelArgs {
    double alpha = 1.0;
    int dim = 1;
    double t = 1.0;
    std::string x = "0";
    bool grid = false;
    double length = 40.0;
    std::size_t points = 512;
    std::string out;
};

int cmd_kernel(const KernelArgs& a) {
    KernelSpec spec{a.alpha, a.dim};
    if (a.grid) {
        if (a.out.empty())
            throw std::invalid_argument("--grid needs --out FILE");
        Grid grid(a.dim, a.points, a.length);
        Field k = kernel_grid(spec, grid, a.t);
        write_snapshot(a.out, k, a.t);
        std::printf("wrote %s (mass = %s)\n", a.out.c_str(),
                    csv_num(integrate(k)).c_str());
        return 0;
    }
    std::vector<double> xs = parse_list(a.x, "--x");
    if (static_cast<int>(xs.size()) != a.dim)
        throw std::invalid_argument("--x needs one coordinate per dimension");
    std::array<double, 2> x{xs[0], xs.size() > 1 ? xs[1] : 0.0};
    std::printf("%s\n", csv_num(kernel_value(spec, x, a.t)).c_str());
    return 0;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out;
    std::string snapshots;
    double eps = 1.0;
};

int cmd_simulate(const SimulateArgs& a) {
    RunConfig rc = parse_config_file(a.config);
    MaterializedRun mat = materialize(rc, a.eps);
    SolverConfig scfg = mat.solver;
    if (!a.snapshots.empty())
        scfg.snapshot_times = parse_list(a.snapshots, "--snapshots");

    RunResult res = run(scfg, mat.u0);

    fs::create_directories(a.out);
    {
        std::ofstream cf(fs::path(a.out) / "config.resolved", std::ios::trunc);
        cf << render_config(rc);
        cf << "# epsilon_scale = " << csv_num(a.eps) << "\n";
    }
    write_trace_csv((fs::path(a.out) / "trace.csv").string(), res.trace);
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%04zu.lfk", i);
        write_snapshot((fs::path(a.out) / name).string(),
                       res.snapshots[i].second, res.snapshots[i].first);
    }

    const char* label = res.outcome == Outcome::completed ? "completed"
                        : res.outcome == Outcome::blown_up ? "blown_up"
                                                           : "under_resolved";
    std::printf("outcome = %s\n", label);
    if (res.blowup_time_estimate)
        std::printf("blowup_T = %s\n",
                    csv_num(*res.blowup_time_estimate).c_str());
    if (!res.diagnostic.empty())
        std::printf("diagnostic = %s\n", res.diagnostic.c_str());
    std::printf("final mass = %s\n", csv_num(res.trace.back().mass).c_str());
    return exit_code(res.outcome);
}

// --- campaign ---------------------------------------------------------------

CampaignSpec parse_campaign_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec: " + path);
    CampaignSpec spec;
    std::string base_text, raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string stripped = raw;
        std::size_t hash = stripped.find('#');
        if (hash != std::string::npos) stripped = stripped.substr(0, hash);
        std::size_t eq = stripped.find('=');
        std::string key;
        if (eq != std::string::npos) {
            key = stripped.substr(0, eq);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
        }
        std::string value =
            eq == std::string::npos ? "" : stripped.substr(eq + 1);
        auto list = [&](const char* what) { return parse_list(value, what); };
        if (key == "alpha_list") spec.alpha_list = list(key.c_str());
        else if (key == "p_list") spec.p_list = list(key.c_str());
        else if (key == "lambda_list") spec.lambda_list = list(key.c_str());
        else if (key == "eps_list") spec.eps_list = list(key.c_str());
        else if (key == "snapshot_times") spec.snapshot_times = list(key.c_str());
        else if (key == "max_runs") spec.max_runs = static_cast<std::size_t>(std::stod(value));
        else if (key == "max_parallel") spec.max_parallel = static_cast<int>(std::stod(value));
        else base_text += raw + "\n";
    }
    spec.base = parse_config(base_text);
    return spec;
}

struct CampaignArgs {
    std::string spec;
    std::string out;
    bool force = false;
};

int cmd_campaign(const CampaignArgs& a) {
    CampaignSpec spec = parse_campaign_spec(a.spec);
    std::vector<CampaignRow> rows = run_campaign(spec, a.out, a.force);
    std::size_t failures = 0;
    for (const auto& r : rows)
        if (r.outcome == "error") ++failures;
    std::printf("%zu run(s), %zu error(s); summary at %s/summary.csv\n",
                rows.size(), failures, a.out.c_str());
    return failures == 0 ? 0 : 1;
}

// --- testfn -----------------------------------------------------------------

struct TestfnArgs {
    double alpha = 1.0;
    double p = 2.0;
    int dim = 1;
    std::string R_list;
    std::string B_list;
    double R = 2.0;
    double eps = 0.0;  // 0: 1/(2*ell)
    std::string out;
};

int cmd_testfn(const TestfnArgs& a) {
    fs::create_directories(a.out);
    TestFunctionConfig cfg;
    cfg.alpha = a.alpha;
    cfg.p = a.p;
    cfg.dim = a.dim;

    ScalingFit fit = scaling_law_fit(cfg, parse_list(a.R_list, "--R-list"));
    {
        std::ofstream out(fs::path(a.out) / "scaling.csv",
                          std::ios::trunc | std::ios::binary);
        out << "R,integral_space_term,integral_time_term,total\n";
        for (const auto& r : fit.rows)
            out << csv_num(r.R) << ',' << csv_num(r.integral_space_term) << ','
                << csv_num(r.integral_time_term) << ',' << csv_num(r.total)
                << '\n';
    }
    std::printf("scaling: fitted exponent %s, theory %s\n",
                csv_num(fit.fitted_exponent).c_str(),
                csv_num(fit.theory_exponent).c_str());

    if (a.B_list.empty()) return 0;

    std::vector<double> Bs = parse_list(a.B_list, "--B-list");
    double p_c = critical_exponent(a.alpha, a.dim);
    if (std::abs(a.p - p_c) > 1e-9)
        throw std::invalid_argument(
            "--B-list requires the critical power p = 1 + alpha/dim = " +
            csv_num(p_c));

    // One absorption run at the critical power feeds every budget row;
    // snapshots must cover [0, 2R^alpha] including R^alpha.
    double Bmax = *std::max_element(Bs.begin(), Bs.end());
    double Bmin = *std::min_element(Bs.begin(), Bs.end());
    double Ra = std::pow(a.R, a.alpha);
    double L = 8.0 * Bmax * a.R;
    double h_needed = Bmin * a.R / 16.0;
    std::size_t points = 64;
    std::size_t points_cap = a.dim == 1 ? (1u << 18) : (1u << 11);
    while (L / static_cast<double>(points) > h_needed && points < points_cap)
        points *= 2;
    Grid grid(a.dim, points, L);

    SolverConfig scfg;
    scfg.alpha = a.alpha;
    scfg.p = a.p;
    scfg.lambda = -1.0;
    scfg.t_end = 2.0 * Ra;
    scfg.dt_max = Ra / 64.0;
    for (int k = 0; k <= 32; ++k)
        scfg.snapshot_times.push_back(2.0 * Ra * k / 32.0);

    Field u0(grid);
    for (std::size_t i = 0; i < u0.values.size(); ++i) {
        double x0 = grid.coordinate(a.dim == 1 ? i : i / grid.n());
        double x1 = a.dim == 1 ? 0.0 : grid.coordinate(i % grid.n());
        u0.values[i] = std::exp(-(x0 * x0 + x1 * x1));
    }
    RunResult res = run(scfg, u0);

    std::vector<BudgetRow> rows =
        critical_budget(res, scfg, grid, a.R, a.eps, Bs);
    std::ofstream out(fs::path(a.out) / "budget.csv",
                      std::ios::trunc | std::ios::binary);
    out << "B,lhs,rhs_term1,rhs_term2\n";
    for (const auto& r : rows)
        out << csv_num(r.B) << ',' << csv_num(r.lhs) << ','
            << csv_num(r.rhs_term1) << ',' << csv_num(r.rhs_term2) << '\n';
    std::printf("budget: %zu row(s) at R = %s\n", rows.size(),
                csv_num(a.R).c_str());
    return 0;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
    std::string in;
    std::string q = "1,2";
};

double config_alpha(const fs::path& dir) {
    std::ifstream cf(dir / "config.resolved");
    if (!cf) return 1.0;
    std::string line;
    while (std::getline(cf, line)) {
        if (line.rfind("alpha", 0) == 0) {
            std::size_t eq = line.find('=');
            if (eq != std::string::npos)
                return std::strtod(line.c_str() + eq + 1, nullptr);
        }
    }
    return 1.0;
}

int cmd_report(const ReportArgs& a) {
    fs::path dir(a.in);
    MassTrace trace = read_trace_csv((dir / "trace.csv").string());
    double alpha = config_alpha(dir);
    std::vector<double> qs = parse_list(a.q, "--q");

    DichotomyVerdict verdict;
    try {
        verdict = estimate_mass_limit(trace);
    } catch (const std::exception& e) {
        verdict.regime = Regime::inconclusive;
        verdict.diagnostic = e.what();
    }
    const char* regime =
        verdict.regime == Regime::positive_limit ? "positive_limit"
        : verdict.regime == Regime::vanishing    ? "vanishing"
                                                 : "inconclusive";

    std::optional<double> gap1, gap2;
    if (verdict.regime == Regime::positive_limit) {
        std::vector<SnapshotData> snaps;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".lfk")
                snaps.push_back(read_snapshot(entry.path().string()));
        std::sort(snaps.begin(), snaps.end(),
                  [](const auto& x, const auto& y) { return x.time < y.time; });
        if (!snaps.empty() && snaps.back().time > 0.0) {
            for (double q : qs) {
                double g = scaled_profile_gap(snaps.back().field,
                                              verdict.M_inf_estimate,
                                              snaps.back().time, q, alpha);
                if (q == 1.0) gap1 = g;
                if (q == 2.0) gap2 = g;
            }
        }
    }

    std::printf("regime         = %s\n", regime);
    if (verdict.regime == Regime::positive_limit)
        std::printf("M_inf          = %s\n",
                    csv_num(verdict.M_inf_estimate).c_str());
    std::printf("plateau_rate   = %s\n", csv_num(verdict.plateau_rate).c_str());
    std::printf("fit window     = [%s, %s]\n", csv_num(verdict.fit_t_lo).c_str(),
                csv_num(verdict.fit_t_hi).c_str());
    if (gap1) std::printf("gap_q1_last    = %s\n", csv_num(*gap1).c_str());
    if (gap2) std::printf("gap_q2_last    = %s\n", csv_num(*gap2).c_str());
    if (!verdict.diagnostic.empty())
        std::printf("diagnostic     = %s\n", verdict.diagnostic.c_str());

    std::ofstream out(dir / "report.csv", std::ios::trunc | std::ios::binary);
    out << "regime,M_inf,plateau_rate,t_lo,t_hi,gap_q1_last,gap_q2_last\n";
    out << regime << ','
        << (verdict.regime == Regime::positive_limit
                ? csv_num(verdict.M_inf_estimate)
                : std::string())
        << ',' << csv_num(verdict.plateau_rate) << ','
        << csv_num(verdict.fit_t_lo) << ',' << csv_num(verdict.fit_t_hi) << ','
        << opt_cell(gap1) << ',' << opt_cell(gap2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"levy-fujita: fractional heat solver and verification tools"};
    app.require_subcommand(1);

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "evaluate P_alpha(x, t)");
    kernel->add_option("--alpha", ka.alpha, "stability index in (0,2]");
    kernel->add_option("--dim", ka.dim, "space dimension (1 or 2)");
    kernel->add_option("--t", ka.t, "time > 0");
    kernel->add_option("--x", ka.x, "evaluation point X1[,X2]");
    kernel->add_flag("--grid", ka.grid, "sample the torus kernel to a snapshot");
    kernel->add_option("--length", ka.length, "torus side (with --grid)");
    kernel->add_option("--points", ka.points, "points per axis (with --grid)");
    kernel->add_option("--out", ka.out, "output snapshot path (with --grid)");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "run one configuration");
    simulate->add_option("--config", sa.config, "run config file")->required();
    simulate->add_option("--out", sa.out, "output directory")->required();
    simulate->add_option("--snapshots", sa.snapshots, "snapshot times t1,t2,...");
    simulate->add_option("--eps", sa.eps, "scale factor on the initial data");

    CampaignArgs ca;
    auto* campaign = app.add_subcommand("campaign", "run a parameter sweep");
    campaign->add_option("--spec", ca.spec, "campaign spec file")->required();
    campaign->add_option("--out", ca.out, "output directory")->required();
    campaign->add_flag("--force", ca.force, "re-run existing run directories");

    TestfnArgs ta;
    auto* testfn = app.add_subcommand("testfn", "test-function diagnostics");
    testfn->add_option("--alpha", ta.alpha, "stability index")->required();
    testfn->add_option("--p", ta.p, "nonlinearity power")->required();
    testfn->add_option("--dim", ta.dim, "space dimension")->required();
    testfn->add_option("--R-list", ta.R_list, "scaling radii R1,R2,...")->required();
    testfn->add_option("--B-list", ta.B_list, "critical budget dilations");
    testfn->add_option("--R", ta.R, "budget rescaling radius");
    testfn->add_option("--eps", ta.eps, "Young epsilon (default 1/(2 ell))");
    testfn->add_option("--out", ta.out, "output directory")->required();

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "classify a finished run");
    report->add_option("--in", ra.in, "run directory")->required();
    report->add_option("--q", ra.q, "profile-gap norms (subset of 1,2)");

    std::string sd;
    auto* summ = app.add_subcommand("summarize", "print a campaign summary");
    summ->add_option("--in", sd, "campaign directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernel->parsed()) return cmd_kernel(ka);
        if (simulate->parsed()) return cmd_simulate(sa);
        if (campaign->parsed()) return cmd_campaign(ca);
        if (testfn->parsed()) return cmd_testfn(ta);
        if (report->parsed()) return cmd_report(ra);
        if (summ->parsed()) {
            std::fputs(summarize(sd).c_str(), stdout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
