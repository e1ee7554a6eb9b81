#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "aigcfl/density.hpp"

using namespace aigcfl;

TEST_CASE("linear shapes expose closed-form cdf and moments") {
    double m = 3.0;
    Density rising = Density::rising(m);
    Density uniform = Density::uniform(m);
    Density falling = Density::falling(m);

    for (double x : {0.3, 1.0, 2.4, 3.0}) {
        CHECK(rising.cdf(x) == doctest::Approx(x * x / (m * m)).epsilon(1e-12));
        CHECK(uniform.cdf(x) == doctest::Approx(x / m).epsilon(1e-12));
        CHECK(falling.cdf(x) == doctest::Approx(2.0 * x / m - x * x / (m * m)).epsilon(1e-12));
    }
    CHECK(rising.mean() == doctest::Approx(2.0 * m / 3.0).epsilon(1e-12));
    CHECK(uniform.mean() == doctest::Approx(m / 2.0).epsilon(1e-12));
    CHECK(falling.mean() == doctest::Approx(m / 3.0).epsilon(1e-12));
    CHECK(uniform.first_moment_below(1.5) == doctest::Approx(1.5 * 1.5 / (2.0 * m)));
    CHECK(uniform.cdf(-1.0) == 0.0);
    CHECK(uniform.cdf(99.0) == 1.0);

    // pdf integrates to the cdf difference.
    for (const Density& d : {rising, uniform, falling}) {
        double v = integrate([&](double x) { return d.pdf(x); }, 0.5, 2.5);
        CHECK(v == doctest::Approx(d.cdf(2.5) - d.cdf(0.5)).epsilon(1e-9));
    }
}

TEST_CASE("tabulated densities reproduce a triangle shape") {
    // Symmetric triangle on [0, 2], peak 1 at x = 1.
    Density tri = Density::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    CHECK(tri.max() == doctest::Approx(2.0));
    CHECK(tri.pdf(0.5) == doctest::Approx(0.5));
    CHECK(tri.pdf(1.5) == doctest::Approx(0.5));
    CHECK(tri.cdf(1.0) == doctest::Approx(0.5));
    CHECK(tri.cdf(0.5) == doctest::Approx(0.125));
    CHECK(tri.mean() == doctest::Approx(1.0));
    CHECK(tri.first_moment_below(1.0) ==
          doctest::Approx(integrate([&](double x) { return x * tri.pdf(x); }, 0.0, 1.0))
              .epsilon(1e-9));
    CHECK(tri.inverse_cdf(0.5) == doctest::Approx(1.0));
    CHECK(tri.inverse_cdf(0.125) == doctest::Approx(0.5));

    CHECK_THROWS_AS(Density::tabulated({0.0, 1.0}, {1.0, 1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(Density::tabulated({0.5, 1.0}, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(Density::tabulated({0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(Density::tabulated({0.0, 1.0}, {-1.0, 3.0}), ConfigError);
    // Must integrate to 1.
    CHECK_THROWS_AS(Density::tabulated({0.0, 1.0}, {2.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(Density::rising(0.0), ConfigError);
}

TEST_CASE("quantiles invert the cdf") {
    for (const Density& d : {Density::rising(2.5), Density::uniform(2.5), Density::falling(2.5),
                             Density::tabulated({0.0, 1.0, 2.5}, {0.5, 0.5, 1.0 / 6.0})}) {
        for (double u : {1e-6, 0.1, 0.37, 0.5, 0.82, 0.999, 1.0}) {
            double x = d.inverse_cdf(u);
            CHECK(x > 0.0);
            CHECK(x <= d.max());
            CHECK(d.cdf(x) == doctest::Approx(u).epsilon(1e-9));
        }
        CHECK_THROWS_AS(d.inverse_cdf(0.0), ConfigError);
        CHECK_THROWS_AS(d.inverse_cdf(1.5), ConfigError);
    }
}

TEST_CASE("sampling matches the distribution") {
    Rng rng = make_rng(97531u);
    for (const Density& d : {Density::rising(1.0), Density::falling(2.0)}) {
        const int n = 10000;
        std::vector<double> xs(n);
        for (double& x : xs) x = d.sample(rng);
        std::sort(xs.begin(), xs.end());
        // Kolmogorov-Smirnov statistic against the exact cdf, 1% critical value.
        double ks = 0.0;
        for (int i = 0; i < n; ++i) {
            double f = d.cdf(xs[static_cast<std::size_t>(i)]);
            ks = std::max(ks, std::abs(f - (i + 1.0) / n));
            ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
        }
        CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("quadrature integrates smooth functions") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("golden section finds a parabola minimum") {
    double x = golden_minimize([](double v) { return (v - 0.3) * (v - 0.3); }, 0.0, 1.0, 1e-10);
    CHECK(x == doctest::Approx(0.3).epsilon(1e-7));
}
