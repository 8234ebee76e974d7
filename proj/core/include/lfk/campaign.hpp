#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfk/config.hpp"

namespace lfk {

// Sweep specification: a base run config plus value lists for a subset of
// {alpha, p, lambda, epsilon_scale}.  The cartesian product is capped.
struct CampaignSpec {
    RunConfig base;
    std::vector<double> alpha_list;
    std::vector<double> p_list;
    std::vector<double> lambda_list;
    std::vector<double> eps_list;
    std::size_t max_runs = 512;
    int max_parallel = 1;
    std::vector<double> snapshot_times;
};

struct CampaignRow {
    double alpha, p, lambda, eps;
    double p_critical;
    std::string regime;              // positive_limit|vanishing|inconclusive
    std::optional<double> M_inf;
    std::optional<double> blowup_T;
    std::string outcome;             // completed|blown_up|under_resolved|error
    std::string run_dir;
};

// Stable hex digest of the four swept parameters; names the run directory.
std::string param_hash(double alpha, double p, double lambda, double eps);

// Execute the sweep with up to max_parallel workers (capped further by the
// LEVY_FUJITA_THREADS environment variable).  Each run persists
// trace.csv, report.csv and config.resolved under output_dir/<param-hash>/;
// existing directories are reused unless force.  summary.csv is written
// last, in sweep order, so identical spec and seed give identical bytes.
// A failed or blown-up run is recorded in its row and never interrupts
// siblings.
std::vector<CampaignRow> run_campaign(const CampaignSpec& spec,
                                      const std::string& output_dir,
                                      bool force = false);

// Render the summary of an existing campaign directory, grouped by the sign
// of p - p_critical.  Corrupt summary rows are flagged, not fatal.
std::string summarize(const std::string& campaign_dir);

// Shared helpers for the CLI and campaign outputs.
std::string csv_num(double v);  // 15 significant digits, '.' decimal
void write_trace_csv(const std::string& path, const MassTrace& trace);
MassTrace read_trace_csv(const std::string& path);

}  // namespace lfk
