#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lfk/campaign.hpp"
#include "lfk/config.hpp"
#include "lfk/operators.hpp"

using namespace lfk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const char* tag) {
        path = fs::temp_directory_path() /
               (std::string("lfk_") + tag + "_" + std::to_string(getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// The cheap dichotomy sweep: torus large enough that the p=3 plateau and the
// p<=p_c decay are both visible by t = 100.
CampaignSpec cheap_sweep() {
    CampaignSpec spec;
    spec.base = parse_config(
        "alpha = 1\n"
        "dim = 1\n"
        "grid_points = 1024\n"
        "domain_length = 100\n"
        "t_end = 100\n"
        "dt_max = 0.25\n"
        "initial_condition = gaussian(1, 1)\n");
    spec.p_list = {1.5, 2.0, 3.0};
    return spec;
}

}  // namespace

TEST_CASE("parse_config: defaults and full precision") {
    RunConfig d = parse_config("");
    CHECK(d.alpha == 1.0);
    CHECK(d.p == 2.0);
    CHECK(d.lambda == -1.0);
    CHECK(d.dim == 1);
    CHECK(d.grid_points == 256);
    CHECK(d.domain_length == 40.0);
    CHECK(d.scheme == Scheme::ETD2);
    CHECK(d.dt_init == 1e-3);
    CHECK(d.dt_min == 1e-10);
    CHECK(d.dt_max == 0.5);
    CHECK(d.safety_theta == 0.1);
    CHECK(d.blowup_threshold == 1e6);
    CHECK(d.t_end == 10.0);
    CHECK(d.clamp_tol == -1.0);
    CHECK(d.initial_condition.kind == InitialCondition::Kind::gaussian);
    CHECK(d.initial_condition.a == 1.0);
    CHECK(d.initial_condition.b == 1.0);
    CHECK(d.seed == 0);

    RunConfig c = parse_config(
        "# comment line\n"
        "alpha = 1.23456789012345\n"
        "\n"
        "p = 2.5\n"
        "seed = 42\n");
    CHECK(c.alpha == 1.23456789012345);
    CHECK(c.p == 2.5);
    CHECK(c.seed == 42);
}

TEST_CASE("parse_config: error messages carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_config("alpha = 3\n"),
                         "line 1: alpha must lie in (0,2]",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("alpha = 1\nalpha = 1.5\n"),
                         "line 2: duplicate key 'alpha'",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("p = 2\n\nwobble = 1\n"),
                         "line 3: unknown key 'wobble'",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("p = 0.5\n"), "line 1: p must exceed 1",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("lambda = 2\n"),
                         "line 1: lambda must be -1 or +1",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("dim = 3\n"),
                         "line 1: dim must be 1 or 2", std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("grid_points = 100\n"),
                         "line 1: grid_points must be a power of two >= 8",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("scheme = RK4\n"),
                         "line 1: scheme must be ETD1 or ETD2",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("alpha = fast\n"),
                         "line 1: invalid number for 'alpha': fast",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("alpha 1\n"),
                         "line 1: expected 'key = value'",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("dt_init = 1\ndt_max = 0.5\n"),
                         "dt_min <= dt_init <= dt_max required",
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config("seed = -3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("grid_points = 1e3\n"),
                    std::invalid_argument);
}

TEST_CASE("parse_config: initial condition forms") {
    RunConfig g = parse_config("initial_condition = gaussian( 2 , 0.5 )\n");
    CHECK(g.initial_condition.kind == InitialCondition::Kind::gaussian);
    CHECK(g.initial_condition.a == 2.0);
    CHECK(g.initial_condition.b == 0.5);

    RunConfig c = parse_config("initial_condition = constant(3)\n");
    CHECK(c.initial_condition.kind == InitialCondition::Kind::constant);
    CHECK(c.initial_condition.a == 3.0);

    RunConfig i = parse_config("initial_condition = indicator(1, 0.25)\n");
    CHECK(i.initial_condition.kind == InitialCondition::Kind::indicator);
    CHECK(i.initial_condition.b == 0.25);

    CHECK_THROWS_WITH_AS(parse_config("initial_condition = gaussian(1)\n"),
                         "line 1: gaussian takes (mass, width)",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("initial_condition = constant(1, 2)\n"),
                         "line 1: constant takes (c)", std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("initial_condition = blob(1)\n"),
                         "line 1: unknown initial condition 'blob'",
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config("initial_condition = gaussian(-1, 1)\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config("initial_condition = gaussian(1, 0)\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config("initial_condition = gaussian\n"),
                    std::invalid_argument);
}

TEST_CASE("render_config round-trips at 15 significant digits") {
    RunConfig cfg;
    cfg.alpha = 1.70000000000001;
    cfg.p = 2.19999999999999;
    cfg.lambda = 1.0;
    cfg.dim = 2;
    cfg.grid_points = 64;
    cfg.domain_length = 123.456789012345;
    cfg.scheme = Scheme::ETD1;
    cfg.dt_init = 7.77777777777777e-4;
    cfg.dt_min = 1e-12;
    cfg.dt_max = 0.333333333333333;
    cfg.safety_theta = 0.05;
    cfg.blowup_threshold = 2.5e7;
    cfg.t_end = 99.9999999999999;
    cfg.clamp_tol = 1e-9;
    cfg.initial_condition.kind = InitialCondition::Kind::indicator;
    cfg.initial_condition.a = 1.11111111111111;
    cfg.initial_condition.b = 0.99999999999999;
    cfg.seed = 123456789;

    RunConfig back = parse_config(render_config(cfg));
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.p == cfg.p);
    CHECK(back.lambda == cfg.lambda);
    CHECK(back.dim == cfg.dim);
    CHECK(back.grid_points == cfg.grid_points);
    CHECK(back.domain_length == cfg.domain_length);
    CHECK(back.scheme == cfg.scheme);
    CHECK(back.dt_init == cfg.dt_init);
    CHECK(back.dt_min == cfg.dt_min);
    CHECK(back.dt_max == cfg.dt_max);
    CHECK(back.safety_theta == cfg.safety_theta);
    CHECK(back.blowup_threshold == cfg.blowup_threshold);
    CHECK(back.t_end == cfg.t_end);
    CHECK(back.clamp_tol == cfg.clamp_tol);
    CHECK(back.initial_condition.kind == cfg.initial_condition.kind);
    CHECK(back.initial_condition.a == cfg.initial_condition.a);
    CHECK(back.initial_condition.b == cfg.initial_condition.b);
    CHECK(back.seed == cfg.seed);
    // Render is canonical: rendering the round-trip reproduces the text.
    CHECK(render_config(back) == render_config(cfg));
}

TEST_CASE("build_initial_condition masses and materialize scaling") {
    Grid g1(1, 512, 40.0);
    InitialCondition gauss{InitialCondition::Kind::gaussian, 2.0, 0.7};
    CHECK(integrate(build_initial_condition(gauss, g1)) ==
          doctest::Approx(2.0).epsilon(1e-12));

    InitialCondition cst{InitialCondition::Kind::constant, 3.0, 1.0};
    CHECK(integrate(build_initial_condition(cst, g1)) ==
          doctest::Approx(3.0 * 40.0).epsilon(1e-12));

    // Indicator: height a/(2b) inside, zero outside; the grid-sum mass is a
    // up to the h/b sampling error of the sharp edge.
    Grid gi(1, 64, 16.0);
    InitialCondition ind{InitialCondition::Kind::indicator, 1.0, 0.5};
    Field fi = build_initial_condition(ind, gi);
    CHECK(fi.values[32] == doctest::Approx(1.0));  // x = 0 -> a/(2b) = 1
    CHECK(fi.values[0] == 0.0);
    CHECK(integrate(fi) == doctest::Approx(1.0).epsilon(0.5 + 1e-12));

    Grid g2(2, 64, 20.0);
    InitialCondition gauss2{InitialCondition::Kind::gaussian, 1.5, 1.0};
    CHECK(integrate(build_initial_condition(gauss2, g2)) ==
          doctest::Approx(1.5).epsilon(1e-12));

    RunConfig cfg = parse_config(
        "grid_points = 128\ndomain_length = 30\n"
        "initial_condition = gaussian(1, 1)\nclamp_tol = 0.125\n");
    MaterializedRun m = materialize(cfg, 0.25);
    CHECK(m.grid.n() == 128);
    CHECK(m.grid.length() == 30.0);
    CHECK(integrate(m.u0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.solver.clamp_tol == 0.125);
    CHECK(m.solver.alpha == cfg.alpha);
    CHECK(m.solver.t_end == cfg.t_end);
    CHECK_THROWS_AS(materialize(cfg, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(materialize(cfg, -1.0), std::invalid_argument);
}

TEST_CASE("param_hash: canonical FNV-1a of the parameter tuple") {
    std::string h = param_hash(1.0, 2.0, -1.0, 1.0);
    CHECK(h.size() == 16);
    CHECK(h == "2af6e956eccda551");
    CHECK(param_hash(1.0, 2.0, -1.0, 1.0) == h);  // stable
    CHECK(param_hash(1.0, 2.0, -1.0, 0.5) != h);
    CHECK(param_hash(1.0, 2.0, 1.0, 1.0) != h);

    // Independent FNV-1a 64 oracle over the documented canonical string.
    std::string canon = "alpha=1;p=2;lambda=-1;eps=1";
    std::uint64_t acc = 14695981039346656037ull;
    for (unsigned char ch : canon) {
        acc ^= ch;
        acc *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(acc));
    CHECK(h == buf);
}

TEST_CASE("trace csv round-trip and header enforcement") {
    TempDir tmp("trace");
    MassTrace tr;
    // all literals use <= 15 significant digits so they survive %.15g exactly
    tr.push_back(TraceEntry{0.0, 1.0, 0.564189583547756, 0.4, 0.0, 0.0, 1e-3});
    tr.push_back(TraceEntry{0.123456789012345, 0.987654321098765, 0.5, 0.39,
                            0.0123456789012345, 1e-30, 2.5e-3});
    std::string path = (tmp.path / "trace.csv").string();
    write_trace_csv(path, tr);

    std::string text = slurp(tmp.path / "trace.csv");
    CHECK(text.substr(0, 35) == "t,mass,linf,l2,absorbed,clamped,dt\n");
    CHECK(text.find('\r') == std::string::npos);  // LF endings only

    MassTrace back = read_trace_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1].t == tr[1].t);
    CHECK(back[1].mass == tr[1].mass);
    CHECK(back[1].absorbed == tr[1].absorbed);
    CHECK(back[1].clamped == tr[1].clamped);
    CHECK(back[0].linf == tr[0].linf);

    std::ofstream bad(tmp.path / "bad.csv", std::ios::binary);
    bad << "time,mass\n0,1\n";
    bad.close();
    CHECK_THROWS_AS(read_trace_csv((tmp.path / "bad.csv").string()),
                    std::runtime_error);
    std::ofstream bad2(tmp.path / "bad2.csv", std::ios::binary);
    bad2 << "t,mass,linf,l2,absorbed,clamped,dt\n0,1,2\n";
    bad2.close();
    CHECK_THROWS_AS(read_trace_csv((tmp.path / "bad2.csv").string()),
                    std::runtime_error);
}

TEST_CASE("campaign: dichotomy sweep, persistence, determinism") {
    TempDir tmp("campaign");
    CampaignSpec spec = cheap_sweep();
    std::vector<CampaignRow> rows = run_campaign(spec, tmp.str());
    REQUIRE(rows.size() == 3);

    CHECK(rows[0].p == 1.5);
    CHECK(rows[0].regime == "vanishing");
    CHECK(rows[1].p == 2.0);
    CHECK(rows[1].regime == "vanishing");
    CHECK(rows[2].p == 3.0);
    CHECK(rows[2].regime == "positive_limit");
    for (const CampaignRow& r : rows) {
        CHECK(r.p_critical == 2.0);
        CHECK(r.outcome == "completed");
    }
    REQUIRE(rows[2].M_inf.has_value());
    CHECK(*rows[2].M_inf == doctest::Approx(0.904422119393472).epsilon(1e-9));

    // Per-run artifacts.
    fs::path run_dir = rows[2].run_dir;
    CHECK(fs::exists(run_dir / "config.resolved"));
    CHECK(fs::exists(run_dir / "trace.csv"));
    CHECK(fs::exists(run_dir / "report.csv"));
    CHECK(fs::exists(run_dir / "run.meta"));
    std::string resolved = slurp(run_dir / "config.resolved");
    CHECK(resolved.find("p = 3\n") != std::string::npos);
    CHECK(resolved.find("# epsilon_scale = 1\n") != std::string::npos);
    std::string report = slurp(run_dir / "report.csv");
    CHECK(report.find("regime,M_inf,plateau_rate,t_lo,t_hi,gap_q1_last,"
                      "gap_q2_last\n") == 0);

    // summary.csv is deterministic byte-for-byte across a re-run (runs are
    // reused, so this also exercises resumability).
    std::string summary1 = slurp(tmp.path / "summary.csv");
    CHECK(summary1.find("alpha,p,lambda,eps,p_critical,regime,M_inf,blowup_T,"
                        "outcome\n") == 0);
    std::vector<CampaignRow> again = run_campaign(spec, tmp.str());
    CHECK(slurp(tmp.path / "summary.csv") == summary1);

    // Reuse really reads the sidecar: tamper with run.meta and observe the
    // tampered value flow back; force recomputes the truth.
    std::string meta = slurp(run_dir / "run.meta");
    std::string tampered;
    for (std::string::size_type i = 0; i < meta.size();) {
        std::string::size_type e = meta.find('\n', i);
        std::string line = meta.substr(i, e - i);
        if (line.rfind("M_inf", 0) == 0) line = "M_inf = 7.5";
        tampered += line + "\n";
        i = e + 1;
    }
    {
        std::ofstream out(run_dir / "run.meta", std::ios::binary);
        out << tampered;
    }
    std::vector<CampaignRow> reused = run_campaign(spec, tmp.str());
    REQUIRE(reused[2].M_inf.has_value());
    CHECK(*reused[2].M_inf == 7.5);
    std::vector<CampaignRow> forced = run_campaign(spec, tmp.str(), true);
    REQUIRE(forced[2].M_inf.has_value());
    CHECK(*forced[2].M_inf == doctest::Approx(0.904422119393472).epsilon(1e-9));
}

TEST_CASE("campaign: blown-up sibling never disturbs its neighbours") {
    TempDir tmp("mixed");
    CampaignSpec spec;
    spec.base = parse_config(
        "p = 2\n"
        "grid_points = 16\n"
        "domain_length = 10\n"
        "t_end = 50\n"
        "initial_condition = constant(1)\n");
    spec.lambda_list = {-1.0, 1.0};
    spec.max_parallel = 2;
    std::vector<CampaignRow> rows = run_campaign(spec, tmp.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].lambda == -1.0);
    CHECK(rows[0].outcome == "completed");
    CHECK(rows[1].lambda == 1.0);
    CHECK(rows[1].outcome == "blown_up");
    REQUIRE(rows[1].blowup_T.has_value());
    CHECK(*rows[1].blowup_T == doctest::Approx(1.0).epsilon(0.05));
    CHECK(!rows[1].M_inf.has_value());
}

TEST_CASE("campaign: empty sweep lists run the base configuration once") {
    TempDir tmp("single");
    CampaignSpec spec;
    spec.base = parse_config(
        "t_end = 0.05\ninitial_condition = gaussian(1, 1)\n");
    std::vector<CampaignRow> rows = run_campaign(spec, tmp.str());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].alpha == spec.base.alpha);
    CHECK(rows[0].eps == 1.0);
    CHECK(rows[0].outcome == "completed");
    CHECK(rows[0].regime == "inconclusive");  // trace spans < two decades
}

TEST_CASE("campaign: max_runs guard") {
    TempDir tmp("cap");
    CampaignSpec spec;
    spec.base = parse_config("grid_points = 16\n");
    spec.p_list = {1.5, 2.0, 3.0};
    spec.eps_list = {0.5, 1.0};
    spec.max_runs = 4;
    CHECK_THROWS_WITH_AS(run_campaign(spec, tmp.str()),
                         "campaign size 6 exceeds max_runs 4",
                         std::invalid_argument);
}

TEST_CASE("summarize groups rows by sign(p - p_c)") {
    TempDir tmp("summ");
    CampaignSpec spec = cheap_sweep();
    run_campaign(spec, tmp.str());
    std::string text = summarize(tmp.str());
    CHECK(text.find("p_c = 1 + alpha/dim; rows grouped by sign(p - p_c)\n") ==
          0);
    std::size_t lt = text.find("[p < p_c]");
    std::size_t eq = text.find("[p = p_c]");
    std::size_t gt = text.find("[p > p_c]");
    REQUIRE(lt != std::string::npos);
    REQUIRE(eq != std::string::npos);
    REQUIRE(gt != std::string::npos);
    CHECK(lt < eq);
    CHECK(eq < gt);
    std::size_t sub_row = text.find(",1.5,", lt);
    REQUIRE(sub_row != std::string::npos);
    CHECK(sub_row < eq);  // the subcritical run sits in the first section
    std::size_t pos_row = text.find("positive_limit", gt);
    CHECK(pos_row != std::string::npos);
    CHECK(text.find("[corrupt rows]") == std::string::npos);

    // A corrupt row is quarantined, not fatal.
    {
        std::ofstream app(tmp.path / "summary.csv",
                          std::ios::binary | std::ios::app);
        app << "not,a,valid,row\n";
    }
    std::string with_bad = summarize(tmp.str());
    std::size_t corrupt = with_bad.find("[corrupt rows]");
    REQUIRE(corrupt != std::string::npos);
    CHECK(with_bad.find("not,a,valid,row,error", corrupt) > corrupt);

    // Header-only output when the campaign directory has no summary yet.
    TempDir empty("summ_empty");
    std::string none = summarize(empty.str());
    CHECK(none.find("p_c = 1 + alpha/dim") == 0);
    CHECK(none.find("[p < p_c]") == std::string::npos);
}

TEST_CASE("campaign honours the thread cap environment variable") {
    TempDir tmp("threads");
    setenv("LEVY_FUJITA_THREADS", "1", 1);
    CampaignSpec spec;
    spec.base = parse_config(
        "t_end = 0.05\ninitial_condition = gaussian(1, 1)\n");
    spec.p_list = {1.5, 2.0};
    spec.max_parallel = 8;
    std::vector<CampaignRow> rows = run_campaign(spec, tmp.str());
    unsetenv("LEVY_FUJITA_THREADS");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].outcome == "completed");
    CHECK(rows[1].outcome == "completed");
}
