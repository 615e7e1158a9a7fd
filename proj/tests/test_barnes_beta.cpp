#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmc/barnes_beta.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <random>

using namespace gmc;

namespace {

// classical ratios the (2,1) and (2,2) transforms reduce to when b1 = tau, b2 = tau
cplx gamma_law(cplx s, double b0) { return log_gamma(s + b0) - log_gamma(cplx(b0)); }

cplx beta_law(cplx s, double b0, double b1)
{
    return log_gamma(s + b0) + log_gamma(cplx(b0 + b1)) - log_gamma(cplx(b0)) - log_gamma(s + b0 + b1);
}

// least-squares slope of y against x
double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Moments {
    double mean = 0.0, stderr_ = 0.0;
};

Moments mean_of(const std::vector<double>& v)
{
    double s = 0, ss = 0;
    for (double x : v) {
        s += x;
        ss += x * x;
    }
    const double n = static_cast<double>(v.size());
    const double m = s / n;
    return {m, std::sqrt((ss / n - m * m) / (n - 1.0))};
}

}  // namespace

TEST_CASE("normalization at s = 0")
{
    DoubleGammaContext ctx(2.0);
    CHECK(log_mellin_beta21(0.0, {0.7, 1.3, 2.0}, ctx) == cplx(0.0));
    CHECK(log_mellin_beta22(0.0, {0.8, -0.3, -0.4, 2.0}, ctx) == cplx(0.0));
    CHECK(log_mellin_frechet(0.0, {1.5, 0.7}) == cplx(0.0));
}

TEST_CASE("beta21 with b1 = tau is a Gamma(b0) law")
{
    for (double tau : {1.2, 2.0, 5.0}) {
        DoubleGammaContext ctx(tau);
        CHECK(std::abs(log_mellin_beta21(2.0, {1.0, tau, tau}, ctx).real() - std::log(2.0)) < 1e-12);
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double tau = 1.0 + u(rng), b0 = u(rng);
        DoubleGammaContext ctx(tau);
        const cplx s(u(rng) - b0 * 0.9, 3.0 * u(rng) - 6.0);
        worst = std::max(worst, std::abs(log_mellin_beta21(s, {b0, tau, tau}, ctx) - gamma_law(s, b0)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("beta22 with b2 = tau is a Beta(b0, b1) law")
{
    DoubleGammaContext c2(2.0);
    CHECK(std::abs(log_mellin_beta22(1.0, {0.8, 0.6, 2.0, 2.0}, c2).real() - std::log(4.0 / 7.0)) < 1e-12);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double tau = 1.0 + u(rng), b0 = u(rng), b1 = u(rng);
        DoubleGammaContext ctx(tau);
        const cplx s(u(rng) - b0 * 0.9, 3.0 * u(rng) - 6.0);
        worst = std::max(worst, std::abs(log_mellin_beta22(s, {b0, b1, tau, tau}, ctx) - beta_law(s, b0, b1)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("large-s behaviour")
{
    DoubleGammaContext ctx(2.0);
    // beta21: log M ~ (b1/tau) s log s; second difference times s recovers the coefficient
    const Beta21Params p21{0.9, 1.4, 2.0};
    std::vector<double> xs, ys;
    for (double s = 50.0; s <= 500.0; s *= 1.1) {
        const double h = 1.0;
        const double d2 = (log_mellin_beta21(s + h, p21, ctx).real() - 2.0 * log_mellin_beta21(s, p21, ctx).real()
                           + log_mellin_beta21(s - h, p21, ctx).real()) / (h * h);
        xs.push_back(s);
        ys.push_back(s * d2);
    }
    CHECK(std::abs(ys.back() / (p21.b1 / p21.tau) - 1.0) < 0.02);
    // beta22: power-law decay s^{-b1 b2 / tau}
    const Beta22Params p22{1.0, 0.5, 1.5, 2.0};
    xs.clear();
    ys.clear();
    for (double s = 100.0; s <= 1000.0; s *= 1.05) {
        xs.push_back(std::log(s));
        ys.push_back(log_mellin_beta22(s, p22, ctx).real());
    }
    const double want = -p22.b1 * p22.b2 / p22.tau;
    CHECK(std::abs(slope(xs, ys) / want - 1.0) < 0.02);
}

TEST_CASE("domain and parameter errors")
{
    DoubleGammaContext ctx(2.0);
    CHECK_THROWS_AS(log_mellin_beta21(-0.7, {0.7, 1.0, 2.0}, ctx), DomainError);
    CHECK_THROWS_AS(log_mellin_beta22(cplx(-0.5, 1.0), {0.8, -0.3, -0.4, 2.0}, ctx), DomainError);
    CHECK_THROWS_AS(log_mellin_frechet(-2.0, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(validate(Beta21Params{0.5, -1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Beta22Params{0.8, 0.3, -0.4, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(FrechetParams{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("Frechet transform and density")
{
    for (double s : {-0.4, 0.3, 2.0}) CHECK(std::abs(log_mellin_frechet(s, {1.0, 2.0}).real() - std::lgamma(1.0 + s / 2.0)) < 1e-14);
    CHECK(std::abs(log_mellin_frechet(1.7, {2.5, 1.7}).real() - std::log(2.5)) < 1e-14);
    for (double y : {0.1, 1.0, 3.0}) CHECK(std::abs(frechet_density(y, {1.0, 1.0}) - std::exp(-y)) < 1e-15);

    const FrechetParams p{2.5, 1.7};
    boost::math::quadrature::exp_sinh<double> q;
    const double mass = q.integrate([&](double y) { return frechet_density(y, p); }, 0.0,
                                    std::numeric_limits<double>::infinity());
    CHECK(std::abs(mass - 1.0) < 1e-10);
    const double mean = q.integrate([&](double y) { return y * frechet_density(y, p); }, 0.0,
                                    std::numeric_limits<double>::infinity());
    CHECK(std::abs(mean - std::exp(log_mellin_frechet(1.0, p).real())) < 1e-8);
    CHECK_THROWS_AS(frechet_density(0.0, p), DomainError);
}

TEST_CASE("Frechet sampler")
{
    const FrechetParams p{1.0, 2.0};
    const auto a = sample_frechet(p, 1000000, 42);
    const auto b = sample_frechet(p, 1000000, 42);
    CHECK(a == b);
    std::vector<double> sq(a.size()), pw(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        sq[i] = a[i] * a[i];
        pw[i] = std::pow(a[i], 0.7);
    }
    const Moments m2 = mean_of(sq);
    CHECK(std::abs(m2.mean - 1.0) < 3.0 * m2.stderr_);
    const Moments m7 = mean_of(pw);
    CHECK(std::abs(m7.mean - std::exp(log_mellin_frechet(0.7, p).real())) < 3.0 * m7.stderr_);

    const FrechetParams r{2.3, 0.8};
    const auto c = sample_frechet(r, 400000, 5);
    for (double s : {-1.0, -0.3, 0.4, 1.0, 1.5}) {
        std::vector<double> v(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) v[i] = std::pow(c[i], s);
        const Moments m = mean_of(v);
        CHECK(std::abs(m.mean - std::exp(log_mellin_frechet(s, r).real())) < 3.0 * m.stderr_);
    }
}

TEST_CASE("deformed beta21")
{
    DoubleGammaContext ctx(2.0);
    const Beta21Params p{0.9, 1.4, 2.0};
    for (cplx s : {cplx(0.4), cplx(-0.5, 2.0), cplx(3.0, -1.0)})
        CHECK(std::abs(log_mellin_deformed21(s, p, {0.0, -0.4}, ctx) - log_mellin_beta21(s, p, ctx)) < 1e-14);
    const DeformationScalar d{-0.35, -0.6};
    CHECK(std::abs(log_mellin_deformed21(d.s0, p, d, ctx) - log_mellin_beta21(d.s0, p, ctx)) < 1e-10);
    const double s = 0.4;
    const cplx parts = log_mellin_beta21((1.0 + d.rho) * s, deformed21_leading(p, d), ctx)
                     + log_mellin_beta21(-d.rho * s, p, ctx);
    CHECK(std::abs(log_mellin_deformed21(s, p, d, ctx) - parts) < 1e-10);
    const Beta21Params lead = deformed21_leading(p, d);
    CHECK(std::abs(lead.b0 - (p.b0 - d.rho * d.s0)) < 1e-15);
}

TEST_CASE("deformed beta22")
{
    DoubleGammaContext ctx(2.0);
    const Beta22Params p{1.2, -0.3, -0.5, 2.0};
    for (cplx s : {cplx(0.4), cplx(-0.2, 2.0)})
        CHECK(std::abs(log_mellin_deformed22(s, p, {0.0, 0.3}, ctx) - log_mellin_beta22(s, p, ctx)) < 1e-14);
    for (double rho : {-0.3, -0.9}) {
        const DeformationScalar d{rho, 0.25};
        CHECK(std::abs(log_mellin_deformed22(d.s0, p, d, ctx) - log_mellin_beta22(d.s0, p, ctx)) < 1e-10);
        const double s = 0.4;
        const Beta22Params tr = deformed22_trailing(p);
        CHECK(tr.b0 == p.b0 + p.b1 + p.b2);
        CHECK(tr.b1 == -p.b1);
        CHECK(tr.b2 == -p.b2);
        const cplx parts = log_mellin_beta22((1.0 + rho) * s, deformed22_leading(p, d), ctx)
                         + log_mellin_beta22(-rho * s, tr, ctx);
        CHECK(std::abs(log_mellin_deformed22(s, p, d, ctx) - parts) < 1e-10);
    }
}

TEST_CASE("deformation anchor on random parameters")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double w21 = 0.0, w22 = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double tau = 1.05 + 3.0 * u(rng);
        DoubleGammaContext ctx(tau);
        const Beta21Params p21{0.2 + 2.0 * u(rng), 0.2 + 2.0 * u(rng), tau};
        const DeformationScalar d21{-u(rng), -0.9 * p21.b0 + 3.0 * u(rng)};
        w21 = std::max(w21, std::abs(log_mellin_deformed21(d21.s0, p21, d21, ctx)
                                     - log_mellin_beta21(d21.s0, p21, ctx)));
        // b1, b2 of the same sign with all partial sums of b0 positive
        const double b1 = -0.4 * u(rng), b2 = -0.4 * u(rng);
        const Beta22Params p22{1.0 + u(rng), b1, b2, tau};
        const double lo = -(p22.b0 + b1 + b2);
        const DeformationScalar d22{-u(rng), lo + 0.05 + 2.0 * u(rng)};
        w22 = std::max(w22, std::abs(log_mellin_deformed22(d22.s0, p22, d22, ctx)
                                     - log_mellin_beta22(d22.s0, p22, ctx)));
    }
    CHECK(w21 < 1e-10);
    CHECK(w22 < 1e-10);
}
