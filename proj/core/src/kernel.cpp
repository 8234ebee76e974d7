#include "lfk/kernel.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <tuple>

#include "lfk/operators.hpp"
#include "lfk/transform.hpp"

namespace lfk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
// exp(-t xi_max^alpha) = 1e-16 at the truncation point.
constexpr double kLogTrunc = 36.841361487904734;

void check_spec(const KernelSpec& spec) {
    if (!(spec.alpha > 0.0) || spec.alpha > 2.0)
        throw std::invalid_argument("alpha must lie in (0,2]");
    if (spec.dim != 1 && spec.dim != 2)
        throw std::invalid_argument("kernel dim must be 1 or 2");
}

// Gauss-Legendre nodes/weights on [-1,1], generated once by Newton on the
// Legendre recurrence.
struct GaussRule {
    std::vector<double> x, w;
};

const GaussRule& gauss16() {
    static const GaussRule rule = [] {
        const int n = 16;
        GaussRule r;
        r.x.resize(n);
        r.w.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            r.x[i] = x;
            r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

double gl_panels(const std::function<double(double)>& f, double a, double b,
                 std::size_t m) {
    const GaussRule& g = gauss16();
    const double h = (b - a) / static_cast<double>(m);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double mid = a + (static_cast<double>(j) + 0.5) * h;
        double acc = 0.0;
        for (int i = 0; i < 16; ++i)
            acc += g.w[i] * f(mid + 0.5 * h * g.x[i]);
        s += acc * 0.5 * h;
    }
    return s;
}

// Double panels until two successive composite rules agree to rtol relative
// (with an absolute floor for near-cancelling oscillatory tails).
double refine(const std::function<double(double)>& f, double a, double b,
              std::size_t m0, double rtol, double atol_floor,
              const char* what) {
    const std::size_t cap = std::size_t(1) << 22;
    if (m0 > cap)
        throw QuadratureError(std::string(what) +
                                  ": oscillation count exceeds panel budget",
                              0.0, 0.0);
    double prev = gl_panels(f, a, b, m0);
    for (std::size_t m = m0 * 2; m <= cap; m *= 2) {
        double cur = gl_panels(f, a, b, m);
        if (std::abs(cur - prev) <=
            rtol * std::max(std::abs(cur), atol_floor))
            return cur;
        prev = cur;
    }
    double last = gl_panels(f, a, b, cap);
    throw QuadratureError(
        std::string(what) + ": refinement failed to converge", last, prev);
}

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, x); }

}  // namespace

double kernel_value_quadrature(const KernelSpec& spec,
                               const std::array<double, 2>& x, double t) {
    check_spec(spec);
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("kernel time must be positive");
    const double alpha = spec.alpha;
    const int N = spec.dim;
    const double r =
        N == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    const double xi_max = std::pow(kLogTrunc / t, 1.0 / alpha);
    const double scale = std::pow(t, -double(N) / alpha);
    const double rtol = 1e-9;
    const double floor = 1e-3 * scale;

    std::function<double(double)> integrand;
    if (N == 1)
        integrand = [&](double xi) {
            return std::cos(r * xi) * std::exp(-t * std::pow(xi, alpha)) / kPi;
        };
    else
        integrand = [&](double xi) {
            return xi * bessel_j0(r * xi) *
                   std::exp(-t * std::pow(xi, alpha)) / (2.0 * kPi);
        };

    // Split where the phase r*xi reaches pi: below that the integrand does
    // not oscillate and the only difficulty is the xi^alpha cusp at 0,
    // removed by the substitution xi = xi_c v^s with s*alpha >= 4.
    const double xi_c = r > 0.0 ? std::min(xi_max, kPi / r) : xi_max;
    const double s_sub = std::ceil(4.0 / alpha);
    auto cusp = [&](double v) {
        double xi = xi_c * std::pow(v, s_sub);
        return integrand(xi) * xi_c * s_sub * std::pow(v, s_sub - 1.0);
    };
    double total = refine(cusp, 0.0, 1.0, 16, rtol, floor, "kernel cusp part");

    if (xi_c < xi_max) {
        std::size_t m0 = static_cast<std::size_t>(
            std::ceil(r * (xi_max - xi_c) / kPi));
        total += refine(integrand, xi_c, xi_max, std::max<std::size_t>(m0, 16),
                        rtol, floor, "kernel oscillatory part");
    }
    return total;
}

double kernel_value(const KernelSpec& spec, const std::array<double, 2>& x,
                    double t) {
    check_spec(spec);
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("kernel time must be positive");
    const int N = spec.dim;
    const double r2 =
        N == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
    if (spec.alpha == 2.0)
        return std::pow(4.0 * kPi * t, -0.5 * N) * std::exp(-r2 / (4.0 * t));
    if (spec.alpha == 1.0) {
        double c = N == 1 ? 1.0 / kPi : 1.0 / (2.0 * kPi);
        return c * t / std::pow(t * t + r2, 0.5 * (N + 1));
    }
    return kernel_value_quadrature(spec, x, t);
}

bool kernel_grid_resolved(const KernelSpec& spec, const Grid& grid, double t) {
    double xi_nyq = kPi * static_cast<double>(grid.n()) / grid.length();
    return std::exp(-t * std::pow(xi_nyq, spec.alpha)) < 1e-14;
}

Field kernel_grid(const KernelSpec& spec, const Grid& grid, double t) {
    check_spec(spec);
    if (grid.dim() != spec.dim)
        throw std::invalid_argument("kernel/grid dim mismatch");
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("kernel time must be positive");
    if (!kernel_grid_resolved(spec, grid, t)) {
        static std::mutex warn_mutex;
        std::lock_guard<std::mutex> lock(warn_mutex);
        std::cerr << "[lfk] warning: grid under-resolves kernel (alpha="
                  << spec.alpha << ", t=" << t << ", n=" << grid.n()
                  << ", L=" << grid.length() << ")\n";
    }
    // Spectrum of the unit-mass delta at x = 0 is 1/L^dim for every mode in
    // this normalization, so the wrapped kernel is just the multiplier row.
    Spectrum s(grid);
    std::vector<double> mag = xi_magnitudes(grid);
    double Ld = grid.length();
    for (int d = 1; d < grid.dim(); ++d) Ld *= grid.length();
    for (std::size_t i = 0; i < mag.size(); ++i)
        s.coeffs[i] = std::exp(-t * std::pow(mag[i], spec.alpha)) / Ld;
    return inverse_transform(s);
}

namespace {

double kernel_lq_norm_uncached(const KernelSpec& spec, double q) {
    if (std::isinf(q)) return kernel_value(spec, {0.0, 0.0}, 1.0);
    // Reference torus for the empirical norm of P_alpha(., 1).
    std::size_t n = spec.dim == 1 ? 8192 : 1024;
    Grid grid(spec.dim, n, 64.0);
    return lp_norm(kernel_grid(spec, grid, 1.0), q);
}

}  // namespace

double kernel_lq_norm(const KernelSpec& spec, double q) {
    check_spec(spec);
    if (!(q >= 1.0)) throw std::invalid_argument("kernel norm requires q >= 1");
    if (q == 1.0) return 1.0;
    static std::mutex memo_mutex;
    static std::map<std::tuple<double, int, double>, double> memo;
    std::lock_guard<std::mutex> lock(memo_mutex);
    auto key = std::make_tuple(spec.alpha, spec.dim, q);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    double v = kernel_lq_norm_uncached(spec, q);
    memo.emplace(key, v);
    return v;
}

DecayCheck decay_bound_check(const KernelSpec& spec, const Field& u0,
                             double t, double q) {
    check_spec(spec);
    if (u0.grid.dim() != spec.dim)
        throw std::invalid_argument("kernel/grid dim mismatch");
    if (t < 0.0) throw std::invalid_argument("time must be >= 0");
    DecayCheck out{};
    Field ut = heat_semigroup_apply(u0, t, spec.alpha);
    out.lhs = lp_norm(ut, q);
    out.u0_lq = lp_norm(u0, q);
    Field abs_u0 = u0;
    for (double& v : abs_u0.values) v = std::abs(v);
    out.u0_l1 = integrate(abs_u0);
    double sigma =
        spec.dim * (1.0 - (std::isinf(q) ? 0.0 : 1.0 / q)) / spec.alpha;
    double c_emp = kernel_lq_norm(spec, q);
    out.rhs = sigma == 0.0 ? c_emp * out.u0_l1
                           : c_emp * std::pow(t, -sigma) * out.u0_l1;
    out.nonexpansive = out.lhs <= out.u0_lq * (1.0 + 1e-9) + 1e-300;
    return out;
}

double recommended_domain_length(const KernelSpec& spec, double t_end,
                                 double tail_budget) {
    check_spec(spec);
    if (!(t_end > 0.0) || !(tail_budget > 0.0) || tail_budget >= 1.0)
        throw std::invalid_argument(
            "domain rule needs t_end > 0 and tail_budget in (0,1)");
    double budget_axis = tail_budget / spec.dim;
    double R;
    if (spec.alpha == 2.0) {
        // erfc(R / (2 sqrt(t))) = budget, bisection on R.
        double lo = 0.0, hi = 2.0 * std::sqrt(t_end);
        while (std::erfc(hi / (2.0 * std::sqrt(t_end))) > budget_axis)
            hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (std::erfc(mid / (2.0 * std::sqrt(t_end))) > budget_axis)
                lo = mid;
            else
                hi = mid;
        }
        R = hi;
    } else {
        // One-axis stable tail: P(|X| > R) ~ (2/pi) Gamma(alpha)
        // sin(pi alpha/2) t R^-alpha.
        double c = (2.0 / kPi) * std::tgamma(spec.alpha) *
                   std::sin(kPi * spec.alpha / 2.0);
        R = std::pow(c * t_end / budget_axis, 1.0 / spec.alpha);
    }
    return 4.0 * R;
}

}  // namespace lfk
