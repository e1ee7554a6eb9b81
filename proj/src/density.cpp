#include "aigcfl/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace aigcfl {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

Density::Density(DensityKind kind, double max) : kind_(kind), max_(max) {
    require(max > 0.0, "density support bound must be positive");
    knots_ = {0.0, max};
}

Density Density::rising(double max) { return Density(DensityKind::Rising, max); }
Density Density::uniform(double max) { return Density(DensityKind::Uniform, max); }
Density Density::falling(double max) { return Density(DensityKind::Falling, max); }

Density Density::tabulated(std::vector<double> knots, std::vector<double> pdf) {
    require(knots.size() >= 2 && knots.size() == pdf.size(),
            "tabulated density needs matching knot and pdf arrays of size >= 2");
    require(knots.front() == 0.0, "tabulated density knots must start at 0");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        require(knots[i] > knots[i - 1], "tabulated density knots must be strictly increasing");
    }
    for (double v : pdf) require(v >= 0.0, "tabulated density values must be non-negative");

    Density d(DensityKind::Tabulated, knots.back());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        total += (knots[i + 1] - knots[i]) * (pdf[i] + pdf[i + 1]) / 2.0;
    }
    require(std::abs(total - 1.0) <= 1e-6,
            "tabulated density must integrate to 1 within 1e-6 (got " + std::to_string(total) +
                ")");
    d.knots_ = std::move(knots);
    d.pdf_ = std::move(pdf);
    // Rescale so cumulative quantities are exact.
    for (double& v : d.pdf_) v /= total;
    d.cdf_.assign(d.knots_.size(), 0.0);
    d.mom_.assign(d.knots_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < d.knots_.size(); ++i) {
        double dx = d.knots_[i + 1] - d.knots_[i];
        double slope = (d.pdf_[i + 1] - d.pdf_[i]) / dx;
        d.cdf_[i + 1] = d.cdf_[i] + d.pdf_[i] * dx + slope * dx * dx / 2.0;
        double x0 = d.knots_[i];
        d.mom_[i + 1] = d.mom_[i] + d.pdf_[i] * x0 * dx + (d.pdf_[i] + slope * x0) * dx * dx / 2.0 +
                        slope * dx * dx * dx / 3.0;
    }
    d.cdf_.back() = 1.0;
    return d;
}

double Density::pdf(double x) const {
    if (x < 0.0 || x > max_) return 0.0;
    switch (kind_) {
        case DensityKind::Rising:
            return 2.0 * x / (max_ * max_);
        case DensityKind::Uniform:
            return 1.0 / max_;
        case DensityKind::Falling:
            return 2.0 / max_ - 2.0 * x / (max_ * max_);
        case DensityKind::Tabulated: {
            auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
            std::size_t i = static_cast<std::size_t>(
                std::clamp<std::ptrdiff_t>(it - knots_.begin() - 1, 0,
                                           static_cast<std::ptrdiff_t>(knots_.size()) - 2));
            double dx = knots_[i + 1] - knots_[i];
            double t = (x - knots_[i]) / dx;
            return pdf_[i] * (1.0 - t) + pdf_[i + 1] * t;
        }
    }
    return 0.0;
}

double Density::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= max_) return 1.0;
    switch (kind_) {
        case DensityKind::Rising:
            return x * x / (max_ * max_);
        case DensityKind::Uniform:
            return x / max_;
        case DensityKind::Falling:
            return 2.0 * x / max_ - x * x / (max_ * max_);
        case DensityKind::Tabulated: {
            auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
            std::size_t i = static_cast<std::size_t>(it - knots_.begin() - 1);
            double dx = knots_[i + 1] - knots_[i];
            double slope = (pdf_[i + 1] - pdf_[i]) / dx;
            double u = x - knots_[i];
            return cdf_[i] + pdf_[i] * u + slope * u * u / 2.0;
        }
    }
    return 0.0;
}

double Density::first_moment_below(double x) const {
    if (x <= 0.0) return 0.0;
    x = std::min(x, max_);
    switch (kind_) {
        case DensityKind::Rising:
            return 2.0 * x * x * x / (3.0 * max_ * max_);
        case DensityKind::Uniform:
            return x * x / (2.0 * max_);
        case DensityKind::Falling:
            return x * x / max_ - 2.0 * x * x * x / (3.0 * max_ * max_);
        case DensityKind::Tabulated: {
            auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
            std::size_t i = static_cast<std::size_t>(
                std::clamp<std::ptrdiff_t>(it - knots_.begin() - 1, 0,
                                           static_cast<std::ptrdiff_t>(knots_.size()) - 2));
            double dx = knots_[i + 1] - knots_[i];
            double slope = (pdf_[i + 1] - pdf_[i]) / dx;
            double x0 = knots_[i];
            double u = x - x0;
            return mom_[i] + pdf_[i] * x0 * u + (pdf_[i] + slope * x0) * u * u / 2.0 +
                   slope * u * u * u / 3.0;
        }
    }
    return 0.0;
}

double Density::inverse_cdf(double u) const {
    require(u > 0.0 && u <= 1.0, "quantile argument must lie in (0, 1]");
    switch (kind_) {
        case DensityKind::Rising:
            return max_ * std::sqrt(u);
        case DensityKind::Uniform:
            return max_ * u;
        case DensityKind::Falling:
            return max_ * (1.0 - std::sqrt(1.0 - u));
        case DensityKind::Tabulated: {
            auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
            std::size_t j = static_cast<std::size_t>(it - cdf_.begin());
            if (j == 0) return knots_.front();
            std::size_t i = j - 1;
            double dx = knots_[i + 1] - knots_[i];
            double slope = (pdf_[i + 1] - pdf_[i]) / dx;
            double rem = u - cdf_[i];
            double xi;
            if (std::abs(slope) * dx < 1e-14 * std::max(pdf_[i], 1e-300)) {
                xi = pdf_[i] > 0.0 ? rem / pdf_[i] : 0.0;
            } else {
                double disc = pdf_[i] * pdf_[i] + 2.0 * slope * rem;
                xi = disc > 0.0 ? (std::sqrt(disc) - pdf_[i]) / slope : 0.0;
            }
            return knots_[i] + std::clamp(xi, 0.0, dx);
        }
    }
    return 0.0;
}

double Density::sample(Rng& rng) const { return inverse_cdf(uniform_open0(rng)); }

namespace quadrature_detail {

namespace {

template <std::size_t N>
struct GaussRule {
    std::array<double, N> node, weight;  // on [-1, 1]
};

template <std::size_t N>
GaussRule<N> make_rule() {
    GaussRule<N> r{};
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(N) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= N; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = N * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.node[i] = -x;
        r.weight[i] = w;
        r.node[N - 1 - i] = x;
        r.weight[N - 1 - i] = w;
    }
    return r;
}

template <std::size_t N>
double apply(const GaussRule<N>& r, const void* ctx, double (*call)(const void*, double),
             double a, double b) {
    double mid = (a + b) / 2.0, half = (b - a) / 2.0;
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += r.weight[i] * call(ctx, mid + half * r.node[i]);
    return s * half;
}

double integrate_rec(const void* ctx, double (*call)(const void*, double), double a, double b,
                     double tol, int depth) {
    static const GaussRule<16> g16 = make_rule<16>();
    static const GaussRule<32> g32 = make_rule<32>();
    double coarse = apply(g16, ctx, call, a, b);
    double fine = apply(g32, ctx, call, a, b);
    if (std::abs(fine - coarse) <= std::max(tol, tol * std::abs(fine))) return fine;
    if (depth <= 0) {
        throw NumericError("quadrature failed to converge on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]: estimates " + std::to_string(coarse) +
                           " vs " + std::to_string(fine));
    }
    double mid = (a + b) / 2.0;
    return integrate_rec(ctx, call, a, mid, tol / 2.0, depth - 1) +
           integrate_rec(ctx, call, mid, b, tol / 2.0, depth - 1);
}

}  // namespace

double integrate_impl(const void* ctx, double (*call)(const void*, double), double a, double b,
                      double tol, int max_depth) {
    if (!(b > a)) return 0.0;
    return integrate_rec(ctx, call, a, b, tol, max_depth);
}

}  // namespace quadrature_detail

double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace aigcfl
