#include "lfk/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace lfk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanKey {
    int dim;
    std::size_t n;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (dim != o.dim) return dim < o.dim;
        if (n != o.n) return n < o.n;
        return sign < o.sign;
    }
};

// Out-of-place c2c plans, FFTW_ESTIMATE for run-to-run determinism,
// FFTW_UNALIGNED so they can execute on any caller buffer.
fftw_plan get_plan(int dim, std::size_t n, int sign) {
    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    PlanKey key{dim, n, sign};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::size_t nodes = n;
    for (int d = 1; d < dim; ++d) nodes *= n;
    std::vector<std::complex<double>> in(nodes), out(nodes);
    auto* fin = reinterpret_cast<fftw_complex*>(in.data());
    auto* fout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan = nullptr;
    int ni = static_cast<int>(n);
    if (dim == 1)
        plan = fftw_plan_dft_1d(ni, fin, fout, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    else
        plan = fftw_plan_dft_2d(ni, ni, fin, fout, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
    cache.emplace(key, plan);
    return plan;
}

void execute(fftw_plan plan, const std::vector<std::complex<double>>& in,
             std::vector<std::complex<double>>& out) {
    // fftw_execute_dft does not modify the input for out-of-place plans.
    auto* fin = reinterpret_cast<fftw_complex*>(
        const_cast<std::complex<double>*>(in.data()));
    auto* fout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, fin, fout);
}

// Phase factor (-1)^{k0(+k1)} mapping index-space DFT output to coefficients
// relative to physical coordinates x_j = -L/2 + j h, combined with the
// 1/n^dim forward normalization where requested.
void apply_center_phase(const Grid& g, std::vector<std::complex<double>>& c,
                        double scale) {
    const std::size_t n = g.n();
    if (g.dim() == 1) {
        for (std::size_t k = 0; k < n; ++k)
            c[k] *= (k & 1) ? -scale : scale;
    } else {
        for (std::size_t k0 = 0; k0 < n; ++k0)
            for (std::size_t k1 = 0; k1 < n; ++k1)
                c[k0 * n + k1] *= ((k0 + k1) & 1) ? -scale : scale;
    }
}

}  // namespace

Grid::Grid(int dim, std::size_t points_per_axis, double length)
    : dim_(dim), n_(points_per_axis), length_(length) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("grid dim must be 1 or 2");
    if (n_ < 8 || !is_pow2(n_))
        throw std::invalid_argument(
            "points_per_axis must be a power of two >= 8");
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("domain length must be positive");
    nodes_ = n_;
    for (int d = 1; d < dim_; ++d) nodes_ *= n_;
}

double Grid::cell_volume() const {
    double h = spacing();
    double v = h;
    for (int d = 1; d < dim_; ++d) v *= h;
    return v;
}

double Grid::coordinate(std::size_t i) const {
    return -0.5 * length_ + static_cast<double>(i) * spacing();
}

long long Grid::freq_index(std::size_t i) const {
    long long k = static_cast<long long>(i);
    long long nn = static_cast<long long>(n_);
    return k < nn / 2 ? k : k - nn;
}

double Grid::wavenumber(std::size_t i) const {
    return 2.0 * kPi * static_cast<double>(freq_index(i)) / length_;
}

std::vector<double> xi_magnitudes(const Grid& grid) {
    const std::size_t n = grid.n();
    std::vector<double> mag(grid.num_nodes());
    if (grid.dim() == 1) {
        for (std::size_t k = 0; k < n; ++k)
            mag[k] = std::abs(grid.wavenumber(k));
    } else {
        std::vector<double> w(n);
        for (std::size_t k = 0; k < n; ++k) w[k] = grid.wavenumber(k);
        for (std::size_t k0 = 0; k0 < n; ++k0)
            for (std::size_t k1 = 0; k1 < n; ++k1)
                mag[k0 * n + k1] = std::hypot(w[k0], w[k1]);
    }
    return mag;
}

Field::Field(const Grid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != g.num_nodes())
        throw std::invalid_argument("field size does not match grid");
}

Spectrum::Spectrum(const Grid& g, std::vector<std::complex<double>> c)
    : grid(g), coeffs(std::move(c)) {
    if (coeffs.size() != g.num_nodes())
        throw std::invalid_argument("spectrum size does not match grid");
}

Spectrum forward_transform(const Field& f) {
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (!std::isfinite(f.values[i]))
            throw std::invalid_argument(
                "forward_transform: non-finite value at node " +
                std::to_string(i));
    const Grid& g = f.grid;
    std::vector<std::complex<double>> in(g.num_nodes());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = f.values[i];
    Spectrum s(g);
    execute(get_plan(g.dim(), g.n(), FFTW_FORWARD), in, s.coeffs);
    apply_center_phase(g, s.coeffs, 1.0 / static_cast<double>(g.num_nodes()));
    return s;
}

Field inverse_transform(const Spectrum& s) {
    const Grid& g = s.grid;
    std::vector<std::complex<double>> twisted = s.coeffs;
    apply_center_phase(g, twisted, 1.0);
    std::vector<std::complex<double>> out(g.num_nodes());
    execute(get_plan(g.dim(), g.n(), FFTW_BACKWARD), twisted, out);
    Field f(g);
    for (std::size_t i = 0; i < out.size(); ++i) f.values[i] = out[i].real();
    return f;
}

}  // namespace lfk
