#include "lfk/campaign.hpp"

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lfk/asymptotics.hpp"
#include "lfk/operators.hpp"

namespace fs = std::filesystem;

namespace lfk {

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string param_hash(double alpha, double p, double lambda, double eps) {
    std::string canon = "alpha=" + csv_num(alpha) + ";p=" + csv_num(p) +
                        ";lambda=" + csv_num(lambda) + ";eps=" + csv_num(eps);
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a 64
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_trace_csv(const std::string& path, const MassTrace& trace) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    out << "t,mass,linf,l2,absorbed,clamped,dt\n";
    for (const auto& e : trace)
        out << csv_num(e.t) << ',' << csv_num(e.mass) << ',' << csv_num(e.linf)
            << ',' << csv_num(e.l2) << ',' << csv_num(e.absorbed) << ','
            << csv_num(e.clamped) << ',' << csv_num(e.dt) << '\n';
}

MassTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,mass,linf,l2,absorbed,clamped,dt")
        throw std::runtime_error("unexpected trace header in " + path);
    MassTrace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double v[7];
        for (int i = 0; i < 7; ++i) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("short trace row in " + path);
            v[i] = std::strtod(cell.c_str(), nullptr);
        }
        trace.push_back(TraceEntry{v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
    }
    return trace;
}

namespace {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::positive_limit: return "positive_limit";
        case Regime::vanishing: return "vanishing";
        case Regime::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::completed: return "completed";
        case Outcome::blown_up: return "blown_up";
        case Outcome::under_resolved: return "under_resolved";
    }
    return "under_resolved";
}

std::string opt_num(const std::optional<double>& v) {
    return v ? csv_num(*v) : std::string();
}

// Small key=value sidecar recording what summary.csv needs, so finished
// runs can be reused without re-simulating.
void write_meta(const std::string& path, const CampaignRow& row) {
    std::ofstream out(path, std::ios::trunc);
    out << "outcome = " << row.outcome << "\n";
    out << "regime = " << row.regime << "\n";
    if (row.M_inf) out << "M_inf = " << csv_num(*row.M_inf) << "\n";
    if (row.blowup_T) out << "blowup_T = " << csv_num(*row.blowup_T) << "\n";
}

bool read_meta(const std::string& path, CampaignRow& row) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.pop_back();
        };
        strip(key);
        strip(value);
        if (key == "outcome") row.outcome = value;
        else if (key == "regime") row.regime = value;
        else if (key == "M_inf") row.M_inf = std::strtod(value.c_str(), nullptr);
        else if (key == "blowup_T") row.blowup_T = std::strtod(value.c_str(), nullptr);
    }
    return !row.outcome.empty();
}

void write_report_csv(const std::string& path, const std::string& regime,
                      const std::optional<double>& M_inf, double plateau_rate,
                      double t_lo, double t_hi,
                      const std::optional<double>& gap1,
                      const std::optional<double>& gap2) {
    std::ofstream out(path, std::ios::trunc);
    out << "regime,M_inf,plateau_rate,t_lo,t_hi,gap_q1_last,gap_q2_last\n";
    out << regime << ',' << opt_num(M_inf) << ',' << csv_num(plateau_rate)
        << ',' << csv_num(t_lo) << ',' << csv_num(t_hi) << ',' << opt_num(gap1)
        << ',' << opt_num(gap2) << '\n';
}

CampaignRow execute_one(const CampaignSpec& spec, double alpha, double p,
                        double lambda, double eps, const fs::path& dir,
                        bool force) {
    CampaignRow row;
    row.alpha = alpha;
    row.p = p;
    row.lambda = lambda;
    row.eps = eps;
    row.p_critical = critical_exponent(alpha, spec.base.dim);
    row.run_dir = dir.string();

    try {
        if (!force && fs::exists(dir / "run.meta") &&
            fs::exists(dir / "trace.csv") && fs::exists(dir / "report.csv")) {
            CampaignRow cached = row;
            if (read_meta((dir / "run.meta").string(), cached)) return cached;
        }

        fs::create_directories(dir);
        RunConfig rc = spec.base;
        rc.alpha = alpha;
        rc.p = p;
        rc.lambda = lambda;
        MaterializedRun mat = materialize(rc, eps);
        SolverConfig scfg = mat.solver;
        scfg.snapshot_times = spec.snapshot_times;
        RunResult res = run(scfg, mat.u0);

        {
            std::ofstream cf(dir / "config.resolved", std::ios::trunc);
            cf << render_config(rc);
            cf << "# epsilon_scale = " << csv_num(eps) << "\n";
        }
        write_trace_csv((dir / "trace.csv").string(), res.trace);

        row.outcome = outcome_name(res.outcome);
        row.blowup_T = res.blowup_time_estimate;

        std::string regime;
        std::optional<double> M_inf;
        double plateau = 0.0, t_lo = 0.0, t_hi = 0.0;
        std::optional<double> gap1, gap2;
        if (res.outcome == Outcome::completed) {
            DichotomyVerdict verdict = estimate_mass_limit(res.trace);
            regime = regime_name(verdict.regime);
            plateau = verdict.plateau_rate;
            t_lo = verdict.fit_t_lo;
            t_hi = verdict.fit_t_hi;
            if (verdict.regime == Regime::positive_limit) {
                M_inf = verdict.M_inf_estimate;
                if (!res.snapshots.empty()) {
                    const auto& [st, sf] = res.snapshots.back();
                    if (st > 0.0) {
                        gap1 = scaled_profile_gap(sf, *M_inf, st, 1.0, alpha);
                        gap2 = scaled_profile_gap(sf, *M_inf, st, 2.0, alpha);
                    }
                }
            }
        }
        row.regime = regime;
        row.M_inf = M_inf;
        write_report_csv((dir / "report.csv").string(), regime, M_inf, plateau,
                         t_lo, t_hi, gap1, gap2);
        write_meta((dir / "run.meta").string(), row);
    } catch (const std::exception& e) {
        row.outcome = "error";
        row.regime.clear();
        row.M_inf.reset();
        row.blowup_T.reset();
        std::error_code ec;
        fs::create_directories(dir, ec);
        std::ofstream err(dir / "error.txt", std::ios::trunc);
        err << e.what() << "\n";
    }
    return row;
}

int parallel_cap(int requested) {
    int cap = requested > 0 ? requested : 1;
    if (const char* env = std::getenv("LEVY_FUJITA_THREADS")) {
        int limit = std::atoi(env);
        if (limit > 0 && limit < cap) cap = limit;
    }
    return cap;
}

}  // namespace

std::vector<CampaignRow> run_campaign(const CampaignSpec& spec,
                                      const std::string& output_dir,
                                      bool force) {
    auto values = [](const std::vector<double>& list, double fallback) {
        return list.empty() ? std::vector<double>{fallback} : list;
    };
    std::vector<double> alphas = values(spec.alpha_list, spec.base.alpha);
    std::vector<double> ps = values(spec.p_list, spec.base.p);
    std::vector<double> lambdas = values(spec.lambda_list, spec.base.lambda);
    std::vector<double> epss = values(spec.eps_list, 1.0);

    std::size_t total =
        alphas.size() * ps.size() * lambdas.size() * epss.size();
    if (total == 0) throw std::invalid_argument("empty campaign");
    if (total > spec.max_runs)
        throw std::invalid_argument(
            "campaign size " + std::to_string(total) + " exceeds max_runs " +
            std::to_string(spec.max_runs));

    fs::create_directories(output_dir);

    struct Job {
        double alpha, p, lambda, eps;
        fs::path dir;
    };
    std::vector<Job> jobs;
    jobs.reserve(total);
    for (double a : alphas)
        for (double p : ps)
            for (double l : lambdas)
                for (double e : epss)
                    jobs.push_back(Job{a, p, l, e,
                                       fs::path(output_dir) /
                                           param_hash(a, p, l, e)});

    std::vector<CampaignRow> rows(jobs.size());
    int workers = parallel_cap(spec.max_parallel);
    if (workers > static_cast<int>(jobs.size()))
        workers = static_cast<int>(jobs.size());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& j = jobs[i];
            rows[i] = execute_one(spec, j.alpha, j.p, j.lambda, j.eps, j.dir,
                                  force);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Sweep order, single writer: identical spec + seed => identical bytes.
    std::ofstream out(fs::path(output_dir) / "summary.csv",
                      std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary.csv");
    out << "alpha,p,lambda,eps,p_critical,regime,M_inf,blowup_T,outcome\n";
    for (const auto& r : rows)
        out << csv_num(r.alpha) << ',' << csv_num(r.p) << ','
            << csv_num(r.lambda) << ',' << csv_num(r.eps) << ','
            << csv_num(r.p_critical) << ',' << r.regime << ','
            << opt_num(r.M_inf) << ',' << opt_num(r.blowup_T) << ','
            << r.outcome << '\n';
    return rows;
}

std::string summarize(const std::string& campaign_dir) {
    const char* header =
        "alpha,p,lambda,eps,p_critical,regime,M_inf,blowup_T,outcome";
    std::ostringstream out;
    out << "p_c = 1 + alpha/dim; rows grouped by sign(p - p_c)\n";
    out << header << "\n";

    std::ifstream in(fs::path(campaign_dir) / "summary.csv");
    if (!in) return out.str();

    struct Parsed {
        int group;  // 0: p < p_c, 1: p = p_c, 2: p > p_c, 3: corrupt
        std::string text;
    };
    std::vector<Parsed> parsed;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            if (line == header) continue;  // else: treat as corrupt data row
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        while (cells.size() < 9) cells.push_back("");
        char* endp = nullptr;
        double p = std::strtod(cells[1].c_str(), &endp);
        bool p_ok = endp != cells[1].c_str();
        double pc = std::strtod(cells[4].c_str(), &endp);
        bool pc_ok = endp != cells[4].c_str();
        Parsed row;
        if (!p_ok || !pc_ok || cells.size() != 9 || cells[8].empty()) {
            row.group = 3;
            row.text = line + ",error";
        } else {
            double d = p - pc;
            row.group = std::abs(d) <= 1e-12 ? 1 : (d < 0 ? 0 : 2);
            row.text = line;
        }
        parsed.push_back(std::move(row));
    }

    const char* labels[4] = {"[p < p_c]", "[p = p_c]", "[p > p_c]",
                             "[corrupt rows]"};
    for (int g = 0; g < 4; ++g) {
        bool any = false;
        for (const auto& r : parsed) {
            if (r.group != g) continue;
            if (!any) {
                out << labels[g] << "\n";
                any = true;
            }
            out << r.text << "\n";
        }
    }
    return out.str();
}

}  // namespace lfk
