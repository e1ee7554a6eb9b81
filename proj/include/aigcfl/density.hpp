#pragma once

#include <functional>
#include <vector>

#include "aigcfl/errors.hpp"
#include "aigcfl/rng.hpp"

namespace aigcfl {

enum class DensityKind { Rising, Uniform, Falling, Tabulated };

// Probability density on (0, max].  Rising is linear from 0 (acronym LID),
// Uniform is flat (UD), Falling is linear down to 0 at max (LDD).  Tabulated is
// piecewise linear between knots and must already be normalized.
class Density {
public:
    static Density rising(double max);
    static Density uniform(double max);
    static Density falling(double max);
    static Density tabulated(std::vector<double> knots, std::vector<double> pdf);

    DensityKind kind() const { return kind_; }
    double max() const { return max_; }

    double pdf(double x) const;
    // P(X <= x), clamped outside the support.
    double cdf(double x) const;
    // E[X * 1{X <= x}].
    double first_moment_below(double x) const;
    double mean() const { return first_moment_below(max_); }

    // Quantile for u in (0, 1]; strictly positive result.
    double inverse_cdf(double u) const;
    double sample(Rng& rng) const;

    // Support breakpoints, useful for exact piecewise integration.
    const std::vector<double>& knots() const { return knots_; }

private:
    Density(DensityKind kind, double max);

    DensityKind kind_;
    double max_;
    std::vector<double> knots_;  // always includes 0 and max
    std::vector<double> pdf_;    // tabulated only, values at knots
    std::vector<double> cdf_;    // tabulated only, cumulative at knots
    std::vector<double> mom_;    // tabulated only, first moment at knots
};

// Adaptive Gauss-Legendre integration of f over [a, b].  Splits intervals until
// two quadrature orders agree within tol; raises NumericError when the depth
// budget runs out before convergence.
namespace quadrature_detail {
double integrate_impl(const void* ctx, double (*call)(const void*, double), double a, double b,
                      double tol, int max_depth);
}

// Golden-section minimizer of a unimodal function on [lo, hi]; returns the
// better of the final two probes once the bracket is narrower than tol.
double golden_minimize(const std::function<double(double)>& f, double lo, double hi, double tol);

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10, int max_depth = 24) {
    auto call = [](const void* ctx, double x) -> double {
        return (*static_cast<const std::decay_t<F>*>(ctx))(x);
    };
    return quadrature_detail::integrate_impl(&f, call, a, b, tol, max_depth);
}

}  // namespace aigcfl
