#include "lfk/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "lfk/operators.hpp"

namespace lfk {

namespace {

double g_bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double g_bump_prime(double s) {
    return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0;
}

Field radial_bump(const Grid& grid, double radius) {
    Field f(grid);
    const std::size_t n = grid.n();
    if (grid.dim() == 1) {
        for (std::size_t i = 0; i < n; ++i)
            f.values[i] = psi(std::abs(grid.coordinate(i)) / radius);
    } else {
        for (std::size_t i0 = 0; i0 < n; ++i0) {
            double x0 = grid.coordinate(i0);
            for (std::size_t i1 = 0; i1 < n; ++i1)
                f.values[i0 * n + i1] =
                    psi(std::hypot(x0, grid.coordinate(i1)) / radius);
        }
    }
    return f;
}

double field_max(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Composite midpoint rule, the fixed 256-panel quadrature used for all
// phi2 time integrals.
double midpoint(const std::function<double(double)>& f, double a, double b,
                int panels = 256) {
    double h = (b - a) / panels;
    double s = 0.0;
    for (int j = 0; j < panels; ++j) s += f(a + (j + 0.5) * h);
    return s * h;
}

}  // namespace

double psi(double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("psi requires r >= 0");
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    double a = g_bump(2.0 - r), b = g_bump(r - 1.0);
    return a / (a + b);
}

double psi_prime(double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("psi requires r >= 0");
    if (r <= 1.0 || r >= 2.0) return 0.0;
    double a = g_bump(2.0 - r), b = g_bump(r - 1.0);
    double ap = -g_bump_prime(2.0 - r), bp = g_bump_prime(r - 1.0);
    double denom = (a + b) * (a + b);
    return (ap * b - a * bp) / denom;
}

double ell(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    return (2.0 * p - 1.0) / (p - 1.0);
}

CompositeCheck composite_inequality_violation(const Grid& grid,
                                              const TestFunctionConfig& cfg) {
    if (grid.dim() != cfg.dim)
        throw std::invalid_argument("grid/config dim mismatch");
    const double BR = cfg.B * cfg.R;
    if (grid.length() < 4.0 * BR)
        throw std::invalid_argument(
            "torus too small: need L >= 4*B*R to contain supp(phi1)");
    if (BR / grid.spacing() < 16.0)
        throw std::invalid_argument(
            "under-resolved transition annulus: need >= 16 points, have " +
            std::to_string(BR / grid.spacing()));

    const double l = ell(cfg.p);
    Field phi1 = radial_bump(grid, BR);
    Field phi1_l(grid);
    for (std::size_t i = 0; i < phi1.values.size(); ++i)
        phi1_l.values[i] = std::pow(phi1.values[i], l);

    Field lhs = fractional_laplacian(phi1_l, cfg.alpha);
    Field lam = fractional_laplacian(phi1, cfg.alpha);

    double violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lhs.values.size(); ++i) {
        double rhs = l * std::pow(phi1.values[i], l - 1.0) * lam.values[i];
        violation = std::max(violation, lhs.values[i] - rhs);
    }
    return CompositeCheck{violation, field_max(lam.values)};
}

ScalingFit scaling_law_fit(const TestFunctionConfig& cfg,
                           const std::vector<double>& R_list) {
    if (R_list.size() < 5)
        throw std::invalid_argument("scaling fit needs at least 5 R values");
    auto [mn, mx] = std::minmax_element(R_list.begin(), R_list.end());
    if (!(*mn > 0.0) || *mx / *mn < std::pow(10.0, 1.5))
        throw std::invalid_argument(
            "scaling fit needs R spanning at least 1.5 decades");

    const double l = ell(cfg.p);
    const double alpha = cfg.alpha;
    ScalingFit fit;
    fit.theory_exponent =
        cfg.dim + alpha - alpha * (l - 1.0);

    for (double R : R_list) {
        Grid grid(cfg.dim, cfg.dim == 1 ? 2048 : 256, 8.0 * R);
        Field phi1 = radial_bump(grid, R);
        Field lam = fractional_laplacian(phi1, alpha);

        double sx_osc = 0.0, sx_l = 0.0;
        for (std::size_t i = 0; i < phi1.values.size(); ++i) {
            sx_osc += phi1.values[i] *
                      std::pow(std::abs(lam.values[i]), l - 1.0);
            sx_l += std::pow(phi1.values[i], l);
        }
        double vol = grid.cell_volume();
        sx_osc *= vol;
        sx_l *= vol;

        double Ra = std::pow(R, alpha);
        double t1 = midpoint(
            [&](double t) { return std::pow(psi(t / Ra), l); }, 0.0,
            2.0 * Ra);
        double t2 = midpoint(
            [&](double t) {
                return psi(t / Ra) *
                       std::pow(std::abs(psi_prime(t / Ra)) / Ra, l - 1.0);
            },
            0.0, 2.0 * Ra);

        ScalingRow row;
        row.R = R;
        row.integral_space_term = sx_osc * t1;
        row.integral_time_term = sx_l * t2;
        row.total = row.integral_space_term + row.integral_time_term;
        fit.rows.push_back(row);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : fit.rows) {
        double x = std::log(r.R), y = std::log(r.total);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(fit.rows.size());
    fit.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

namespace {

double clamped_pow(double v, double p) {
    return v > 0.0 ? std::pow(v, p) : 0.0;
}

}  // namespace

std::vector<BudgetRow> critical_budget(const RunResult& run,
                                       const SolverConfig& run_cfg,
                                       const Grid& grid, double R, double eps,
                                       const std::vector<double>& B_list) {
    const double alpha = run_cfg.alpha;
    const double p = run_cfg.p;
    const int N = grid.dim();
    if (std::abs(p - (1.0 + alpha / N)) > 1e-9)
        throw std::invalid_argument("critical budget requires p = 1 + alpha/dim");
    if (run_cfg.lambda != -1.0)
        throw std::invalid_argument("critical budget requires lambda = -1");
    if (run.outcome != Outcome::completed)
        throw std::invalid_argument("critical budget requires a completed run");
    if (B_list.empty())
        throw std::invalid_argument("B_list must not be empty");

    const double l = ell(p);
    const double pbar = p / (p - 1.0);
    if (!(eps > 0.0)) eps = 1.0 / (2.0 * l);
    const double Ra = std::pow(R, alpha);
    const double tol = 1e-9 * Ra;

    // Snapshot nodes covering Omega2 = [0, 2R^alpha].
    std::vector<std::pair<double, const Field*>> nodes;
    for (const auto& [t, f] : run.snapshots)
        if (t <= 2.0 * Ra + tol) nodes.emplace_back(t, &f);
    if (nodes.size() < 8 || std::abs(nodes.front().first) > tol ||
        nodes.back().first < 2.0 * Ra - tol)
        throw std::invalid_argument(
            "snapshots must cover [0, 2R^alpha] with >= 8 nodes");
    std::size_t omega3 = 0;
    bool have_ra = false;
    for (const auto& [t, f] : nodes) {
        if (t >= Ra - tol) ++omega3;
        if (std::abs(t - Ra) <= tol) have_ra = true;
    }
    if (omega3 < 4 || !have_ra)
        throw std::invalid_argument(
            "snapshots must cover [R^alpha, 2R^alpha] with >= 4 nodes "
            "including R^alpha itself");

    const std::size_t nn = grid.n();
    const double vol = grid.cell_volume();
    auto radius = [&](std::size_t i) {
        if (N == 1) return std::abs(grid.coordinate(i));
        return std::hypot(grid.coordinate(i / nn), grid.coordinate(i % nn));
    };

    std::vector<BudgetRow> rows;
    for (double B : B_list) {
        const double BR = B * R;
        if (grid.length() < 4.0 * BR)
            throw std::invalid_argument(
                "torus too small for B: need L >= 4*B*R");
        if (BR / grid.spacing() < 16.0)
            throw std::invalid_argument(
                "under-resolved transition annulus at this B");

        Field phi1 = radial_bump(grid, BR);
        Field lam = fractional_laplacian(phi1, alpha);

        double sx_phi_lpbar = 0.0, sx_lam = 0.0, a0 = 0.0;
        const Field& u0 = *nodes.front().second;
        for (std::size_t i = 0; i < phi1.values.size(); ++i) {
            double ph = phi1.values[i];
            sx_phi_lpbar += std::pow(ph, l * pbar);
            sx_lam += std::pow(ph, (l - 1.0) * pbar) *
                      std::pow(std::abs(lam.values[i]), pbar);
            a0 += u0.values[i] * std::pow(ph, l);
        }
        sx_phi_lpbar *= vol;
        sx_lam *= vol;
        a0 *= vol;

        // Per-snapshot spatial reductions, then trapezoid in time.
        std::vector<double> w_phi(nodes.size()), w_p(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const Field& u = *nodes[j].second;
            double acc_phi = 0.0, acc_p = 0.0;
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                double up = clamped_pow(u.values[i], p);
                acc_phi += up * std::pow(phi1.values[i], l);
                if (radius(i) <= 2.0 * BR) acc_p += up;
            }
            double phi2 = psi(nodes[j].first / Ra);
            w_phi[j] = acc_phi * vol * std::pow(phi2, l);
            w_p[j] = acc_p * vol;
        }
        double I_phi = 0.0, I_p = 0.0, I_3 = 0.0;
        for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
            double dt = nodes[j + 1].first - nodes[j].first;
            I_phi += 0.5 * (w_phi[j] + w_phi[j + 1]) * dt;
            I_p += 0.5 * (w_p[j] + w_p[j + 1]) * dt;
            if (nodes[j].first >= Ra - tol)
                I_3 += 0.5 * (w_p[j] + w_p[j + 1]) * dt;
        }

        double q_t = sx_phi_lpbar *
                     midpoint(
                         [&](double t) {
                             return std::pow(psi(t / Ra), (l - 1.0) * pbar) *
                                    std::pow(std::abs(psi_prime(t / Ra)) / Ra,
                                             pbar);
                         },
                         Ra, 2.0 * Ra);
        double q_x = sx_lam * midpoint(
                                  [&](double t) {
                                      return std::pow(psi(t / Ra), l * pbar);
                                  },
                                  0.0, 2.0 * Ra);

        double c_eps = (p - 1.0) * std::pow(p, -p / (p - 1.0)) *
                       std::pow(eps, -1.0 / (p - 1.0));

        BudgetRow row;
        row.B = B;
        row.lhs = a0 - I_phi - eps * l * I_p;
        row.rhs_term1 = l * std::pow(I_3, 1.0 / p) * std::pow(q_t, 1.0 / pbar);
        row.rhs_term2 = l * c_eps * q_x;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lfk
