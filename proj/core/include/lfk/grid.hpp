#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lfk {

// Uniform periodic grid on the torus [-L/2, L/2)^dim with n points per axis.
// Node coordinates are x_i = -L/2 + i*h, h = L/n; the point x = 0 sits at
// index n/2 on every axis.  Storage of gridded data is row-major: for dim = 2
// the flat index is i0*n + i1 and axis 0 is the slow direction.
class Grid {
public:
    Grid(int dim, std::size_t points_per_axis, double length);

    int dim() const { return dim_; }
    std::size_t n() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_); }
    std::size_t num_nodes() const { return nodes_; }

    // Cell volume h^dim, the quadrature weight of one node.
    double cell_volume() const;

    double coordinate(std::size_t i) const;

    // Signed integer frequency for FFT slot i: i for i < n/2, i - n otherwise.
    long long freq_index(std::size_t i) const;

    // Exact torus wavenumber xi_k = 2*pi*k/L for FFT slot i (one axis).
    double wavenumber(std::size_t i) const;

    bool operator==(const Grid& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
    }

private:
    int dim_;
    std::size_t n_;
    double length_;
    std::size_t nodes_;
};

// |xi| at every node, same layout as gridded data.  The zero mode is 0.
std::vector<double> xi_magnitudes(const Grid& grid);

struct Field {
    Grid grid;
    std::vector<double> values;

    Field(const Grid& g, double fill = 0.0)
        : grid(g), values(g.num_nodes(), fill) {}
    Field(const Grid& g, std::vector<double> v);
};

// Complex Fourier coefficients c_k in FFT slot order, same row-major layout
// as Field values.  See transform.hpp for the normalization convention.
struct Spectrum {
    Grid grid;
    std::vector<std::complex<double>> coeffs;

    Spectrum(const Grid& g)
        : grid(g), coeffs(g.num_nodes(), std::complex<double>(0.0, 0.0)) {}
    Spectrum(const Grid& g, std::vector<std::complex<double>> c);
};

}  // namespace lfk
