#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lfk/kernel.hpp"
#include "lfk/operators.hpp"

using namespace lfk;

namespace {

constexpr double kPi = 3.14159265358979323846;

double cauchy_1d(double x, double t) {
    return t / (kPi * (t * t + x * x));
}

double gauss_1d(double x, double t) {
    return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

}  // namespace

TEST_CASE("quadrature matches the closed forms") {
    KernelSpec c1{1.0, 1}, g1{2.0, 1};
    for (double x : {0.0, 0.1, 0.7, 2.0, 5.5, 19.9}) {
        for (double t : {0.25, 1.0, 4.0}) {
            CHECK(kernel_value_quadrature(c1, {x, 0.0}, t) ==
                  doctest::Approx(cauchy_1d(x, t)).epsilon(1e-8));
            CHECK(kernel_value_quadrature(g1, {x, 0.0}, t) ==
                  doctest::Approx(gauss_1d(x, t)).epsilon(1e-8));
        }
    }
    // 2D closed forms at a couple of radii.
    KernelSpec c2{1.0, 2}, g2{2.0, 2};
    for (double r : {0.0, 0.8, 3.0}) {
        double v_c = kernel_value_quadrature(c2, {r, 0.0}, 1.0);
        CHECK(v_c == doctest::Approx(1.0 / (2.0 * kPi * std::pow(1.0 + r * r, 1.5)))
                         .epsilon(1e-8));
        double v_g = kernel_value_quadrature(g2, {0.0, r}, 1.0);
        CHECK(v_g == doctest::Approx(std::exp(-r * r / 4.0) / (4.0 * kPi))
                         .epsilon(1e-8));
    }
}

TEST_CASE("intermediate alpha origin values") {
    // P_alpha(0, 1) = Gamma(1 + N/alpha) / (pi N) in 1D reduces to
    // Gamma(1/alpha + 1)/pi; for alpha = 1.5 that is Gamma(5/3)/pi.
    KernelSpec s15{1.5, 1};
    CHECK(kernel_value(s15, {0.0, 0.0}, 1.0) ==
          doctest::Approx(0.2873527514521645).epsilon(1e-9));
    // 2D, alpha = 1.5 at the origin: Gamma(4/3)/(1.5 * 2 pi).
    KernelSpec s15_2{1.5, 2};
    CHECK(kernel_value(s15_2, {0.0, 0.0}, 1.0) ==
          doctest::Approx(0.09474806889735493).epsilon(1e-9));
    // Independent reference points (direct oscillatory-integral evaluation).
    CHECK(kernel_value(s15, {0.5, 0.0}, 1.0) ==
          doctest::Approx(0.2622968403540905).epsilon(1e-9));
    CHECK(kernel_value(s15_2, {0.5, 0.25}, 2.0) ==
          doctest::Approx(0.0356959335298).epsilon(1e-9));
}

TEST_CASE("self-similarity identity") {
    std::mt19937 rng(97);
    std::uniform_real_distribution<double> xd(-3.0, 3.0), td(0.3, 3.0);
    for (double alpha : {0.7, 1.3}) {
        KernelSpec spec{alpha, 1};
        for (int i = 0; i < 25; ++i) {
            double x = xd(rng), t = td(rng);
            double lhs = kernel_value(spec, {x, 0.0}, t);
            double sc = std::pow(t, -1.0 / alpha);
            double rhs = sc * kernel_value(spec, {x * sc, 0.0}, 1.0);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
    KernelSpec spec2{1.5, 2};
    for (int i = 0; i < 8; ++i) {
        double x = xd(rng) / 2.0, y = xd(rng) / 2.0, t = td(rng);
        double lhs = kernel_value(spec2, {x, y}, t);
        double sc = std::pow(t, -1.0 / 1.5);
        double rhs = sc * sc * kernel_value(spec2, {x * sc, y * sc}, 1.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("kernel_grid has unit mass and matches the Gaussian") {
    Grid grid(1, 512, 40.0);
    for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
        Field k = kernel_grid(KernelSpec{alpha, 1}, grid, 1.0);
        CHECK(integrate(k) == doctest::Approx(1.0).epsilon(1e-12));
    }
    Grid grid2(2, 64, 40.0);
    for (double alpha : {1.0, 2.0}) {
        Field k = kernel_grid(KernelSpec{alpha, 2}, grid2, 1.0);
        CHECK(integrate(k) == doctest::Approx(1.0).epsilon(1e-12));
    }

    // alpha = 2 at L=40: images and spectral tail are ~1e-44, so the wrapped
    // kernel is the free-space Gaussian to machine precision.
    Field kg = kernel_grid(KernelSpec{2.0, 1}, grid, 1.0);
    for (std::size_t j = 0; j < grid.n(); ++j)
        CHECK(std::abs(kg.values[j] - gauss_1d(grid.coordinate(j), 1.0)) <=
              1e-10);
}

TEST_CASE("wrapped Cauchy equals the method of images") {
    // Heavy tails wrap visibly, so compare against the truncated image sum
    // sum_{|m| <= 50} P_1(x + mL, t); truncation error ~ 2/(pi * 50 L) ~ 3e-9.
    Grid grid(1, 32768, 2048.0);
    Field k = kernel_grid(KernelSpec{1.0, 1}, grid, 1.0);
    for (std::size_t j = 0; j < grid.n(); j += 64) {
        double x = grid.coordinate(j);
        double sum = 0.0;
        for (int m = -50; m <= 50; ++m) sum += cauchy_1d(x + m * 2048.0, 1.0);
        CHECK(k.values[j] == doctest::Approx(sum).epsilon(1e-8));
    }
}

TEST_CASE("kernel_grid resolution check") {
    Grid grid(1, 512, 40.0);
    KernelSpec spec{1.0, 1};
    CHECK(kernel_grid_resolved(spec, grid, 1.0));
    CHECK(!kernel_grid_resolved(spec, grid, 1e-6));
    CHECK(kernel_grid_resolved(KernelSpec{2.0, 1}, grid, 0.5));
}

TEST_CASE("semigroup identities") {
    Grid grid(1, 256, 30.0);
    Field f(grid);
    for (std::size_t j = 0; j < grid.n(); ++j) {
        double x = grid.coordinate(j);
        f.values[j] = std::exp(-x * x) * (1.0 + 0.3 * std::sin(2.0 * x));
    }
    for (double alpha : {1.0, 1.5, 2.0}) {
        Field id = heat_semigroup_apply(f, 0.0, alpha);
        for (std::size_t j = 0; j < grid.n(); ++j)
            CHECK(id.values[j] == doctest::Approx(f.values[j]).epsilon(1e-13));

        // P(s) P(t) = P(s + t)
        Field two = heat_semigroup_apply(heat_semigroup_apply(f, 0.4, alpha),
                                         0.6, alpha);
        Field one = heat_semigroup_apply(f, 1.0, alpha);
        for (std::size_t j = 0; j < grid.n(); ++j)
            CHECK(two.values[j] ==
                  doctest::Approx(one.values[j]).epsilon(1e-12));

        // Mass conservation and L2 contraction.
        CHECK(integrate(one) == doctest::Approx(integrate(f)).epsilon(1e-13));
        CHECK(lp_norm(one, 2.0) <= lp_norm(f, 2.0));
    }
}

TEST_CASE("decay bound: q=1 is mass conservation") {
    Grid grid(1, 512, 60.0);
    Field u0(grid);
    for (std::size_t j = 0; j < grid.n(); ++j) {
        double x = grid.coordinate(j);
        u0.values[j] = 2.0 * std::exp(-x * x);
    }
    DecayCheck chk = decay_bound_check(KernelSpec{1.5, 1}, u0, 3.0, 1.0);
    CHECK(chk.lhs == doctest::Approx(chk.u0_l1).epsilon(1e-12));
    CHECK(chk.rhs == doctest::Approx(chk.u0_l1).epsilon(1e-12));
    CHECK(chk.nonexpansive);
}

TEST_CASE("decay bound: L2 norm decays at rate t^{-1/4} for alpha=2") {
    Grid grid(1, 1024, 80.0);
    Field u0(grid);
    for (std::size_t j = 0; j < grid.n(); ++j) {
        double x = grid.coordinate(j);
        u0.values[j] = std::exp(-x * x);
    }
    KernelSpec spec{2.0, 1};
    double l1 = decay_bound_check(spec, u0, 1.0, 2.0).lhs;
    double l4 = decay_bound_check(spec, u0, 4.0, 2.0).lhs;
    double l16 = decay_bound_check(spec, u0, 16.0, 2.0).lhs;
    double slope = std::log(l16 / l4) / std::log(4.0);
    CHECK(slope == doctest::Approx(-0.25).epsilon(0.08));
    CHECK(l1 > l4);
    CHECK(l4 > l16);
    // The smoothing bound itself holds at each probe time.
    for (double t : {1.0, 4.0, 16.0}) {
        DecayCheck chk = decay_bound_check(spec, u0, t, 2.0);
        CHECK(chk.lhs <= chk.rhs * (1.0 + 1e-9));
        CHECK(chk.nonexpansive);
    }
}

TEST_CASE("kernel Lq norms") {
    CHECK(kernel_lq_norm(KernelSpec{1.3, 1}, 1.0) == 1.0);
    // ||P_2(., 1)||_2 = (8 pi)^{-1/4}.
    CHECK(kernel_lq_norm(KernelSpec{2.0, 1}, 2.0) ==
          doctest::Approx(0.44662192086900115).epsilon(1e-6));
    // ||P_1(., 1)||_2 = (2 pi)^{-1/2}; the reference torus wraps the Cauchy
    // tails, so this is only good to a few parts in 1e3.
    CHECK(kernel_lq_norm(KernelSpec{1.0, 1}, 2.0) ==
          doctest::Approx(0.3989422804014327).epsilon(5e-3));
    CHECK(kernel_lq_norm(KernelSpec{1.0, 1},
                         std::numeric_limits<double>::infinity()) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-9));
    CHECK_THROWS_AS(kernel_lq_norm(KernelSpec{1.0, 1}, 0.5),
                    std::invalid_argument);
}

TEST_CASE("recommended domain length covers the tail budget") {
    // alpha = 1: mass of the Cauchy outside [-L/4, L/4] is
    // 1 - (2/pi) atan(L/(4t)).
    double L1 = recommended_domain_length(KernelSpec{1.0, 1}, 100.0, 1e-3);
    double tail1 = 1.0 - (2.0 / kPi) * std::atan(L1 / 400.0);
    CHECK(tail1 <= 1e-3);
    CHECK(tail1 >= 1e-5);  // not wastefully oversized

    // alpha = 2: tail mass is erfc(L / (4 sqrt(4 t))).
    double L2 = recommended_domain_length(KernelSpec{2.0, 1}, 100.0, 1e-3);
    double tail2 = std::erfc(L2 / (4.0 * std::sqrt(400.0)));
    CHECK(tail2 <= 1e-3);
    CHECK(tail2 >= 1e-6);

    // Heavy-tail rule scales like (t/budget)^{1/alpha}.
    for (double alpha : {0.5, 1.0}) {
        KernelSpec spec{alpha, 1};
        double a = recommended_domain_length(spec, 10.0, 1e-3);
        double b = recommended_domain_length(spec, 100.0, 1e-3);
        CHECK(b / a == doctest::Approx(std::pow(10.0, 1.0 / alpha)).epsilon(0.01));
    }
}

TEST_CASE("quadrature failure reports QuadratureError") {
    // r * xi_max vastly exceeds the oscillation panel budget at tiny t.
    KernelSpec spec{0.5, 1};
    CHECK_THROWS_AS(kernel_value_quadrature(spec, {1.0, 0.0}, 1e-9),
                    QuadratureError);
    CHECK_THROWS_AS(kernel_value(spec, {0.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kernel_value(spec, {0.0, 0.0}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(kernel_value(KernelSpec{2.5, 1}, {0.0, 0.0}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(kernel_value(KernelSpec{1.0, 3}, {0.0, 0.0}, 1.0),
                    std::invalid_argument);
}
