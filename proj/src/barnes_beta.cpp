#include "gmc/barnes_beta.hpp"

#include <cmath>
#include <random>
#include <string>

namespace gmc {

namespace {

void check_tau(double tau, const DoubleGammaContext& ctx)
{
    if (std::abs(tau - ctx.tau()) > 1e-12 * tau)
        throw std::invalid_argument("double gamma context built for a different tau");
}

void require_positive(double v, const char* what)
{
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

// log [Gamma_2(s + a) Gamma_2(b) / (Gamma_2(a) Gamma_2(s + b))]
cplx lg2_pair(cplx s, double a, double b, const DoubleGammaContext& ctx)
{
    return ctx.log_gamma2(b) - ctx.log_gamma2(a) - ctx.log_gamma2_step(s + a, b - a);
}

void check_rho(const DeformationScalar& d)
{
    if (!(d.rho >= -1.0 && d.rho <= 0.0))
        throw std::invalid_argument("deformation: rho must lie in [-1, 0]");
}

}  // namespace

void validate(const Beta21Params& p)
{
    if (!(p.tau > 0.0)) throw std::invalid_argument("beta21: tau must be positive");
    if (!(p.b0 > 0.0 && p.b1 > 0.0)) throw std::invalid_argument("beta21: need b0 > 0 and b1 > 0");
}

void validate(const Beta22Params& p)
{
    if (!(p.tau > 0.0)) throw std::invalid_argument("beta22: tau must be positive");
    if (!(p.b0 > 0.0 && p.b0 + p.b1 > 0.0 && p.b0 + p.b2 > 0.0 && p.b0 + p.b1 + p.b2 > 0.0))
        throw std::invalid_argument("beta22: need b0, b0+b1, b0+b2, b0+b1+b2 > 0");
    if (!(p.b1 * p.b2 > 0.0)) throw std::invalid_argument("beta22: need b1*b2 > 0");
}

void validate(const FrechetParams& p)
{
    if (!(p.b > 0.0 && p.c > 0.0)) throw std::invalid_argument("frechet: need b > 0 and c > 0");
}

cplx log_mellin_beta21(cplx s, const Beta21Params& p, const DoubleGammaContext& ctx)
{
    validate(p);
    check_tau(p.tau, ctx);
    require_positive(s.real() + p.b0, "beta21: Re(s) + b0");
    return lg2_pair(s, p.b0, p.b0 + p.b1, ctx);
}

cplx log_mellin_beta22(cplx s, const Beta22Params& p, const DoubleGammaContext& ctx)
{
    validate(p);
    check_tau(p.tau, ctx);
    const double x = s.real();
    require_positive(x + p.b0, "beta22: Re(s) + b0");
    require_positive(x + p.b0 + p.b1, "beta22: Re(s) + b0 + b1");
    require_positive(x + p.b0 + p.b2, "beta22: Re(s) + b0 + b2");
    require_positive(x + p.b0 + p.b1 + p.b2, "beta22: Re(s) + b0 + b1 + b2");
    return lg2_pair(s, p.b0, p.b0 + p.b1, ctx) - lg2_pair(s, p.b0 + p.b2, p.b0 + p.b1 + p.b2, ctx);
}

cplx log_mellin_frechet(cplx s, const FrechetParams& p)
{
    validate(p);
    require_positive(p.b + s.real() / p.c, "frechet: b + Re(s)/c");
    return log_gamma(p.b + s / p.c) - log_gamma(p.b);
}

double frechet_density(double y, const FrechetParams& p)
{
    validate(p);
    if (!(y > 0.0)) throw DomainError("frechet_density: y must be positive");
    return std::exp(std::log(p.c) - log_gamma(p.b) + (p.c * p.b - 1.0) * std::log(y)
                    - std::pow(y, p.c));
}

std::vector<double> sample_frechet(const FrechetParams& p, std::size_t n, std::uint64_t seed)
{
    validate(p);
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gam(p.b, 1.0);
    std::vector<double> out(n);
    const double inv = 1.0 / p.c;
    for (auto& y : out) y = std::pow(gam(rng), inv);
    return out;
}

Beta21Params deformed21_leading(const Beta21Params& p, const DeformationScalar& d)
{
    return {p.b0 - d.rho * d.s0, p.b1, p.tau};
}

Beta22Params deformed22_leading(const Beta22Params& p, const DeformationScalar& d)
{
    return {p.b0 - d.rho * d.s0, p.b1, p.b2, p.tau};
}

Beta22Params deformed22_trailing(const Beta22Params& p)
{
    return {p.b0 + p.b1 + p.b2, -p.b1, -p.b2, p.tau};
}

cplx log_mellin_deformed21(cplx s, const Beta21Params& p, const DeformationScalar& d,
                           const DoubleGammaContext& ctx)
{
    validate(p);
    check_tau(p.tau, ctx);
    check_rho(d);
    require_positive(s.real() + p.b0, "deformed21: Re(s) + b0");
    require_positive(d.s0 + p.b0, "deformed21: s0 + b0");
    const double r = d.rho;
    const double b0 = p.b0 - r * d.s0;
    const double b01 = p.b0 + p.b1 - r * d.s0;
    const cplx u = s * (1.0 + r);
    const cplx v = -r * s;
    return lg2_pair(u, b0, b01, ctx) + lg2_pair(v, p.b0, p.b0 + p.b1, ctx);
}

cplx log_mellin_deformed22(cplx s, const Beta22Params& p, const DeformationScalar& d,
                           const DoubleGammaContext& ctx)
{
    validate(p);
    check_tau(p.tau, ctx);
    check_rho(d);
    for (double e : {p.b0, p.b0 + p.b1, p.b0 + p.b2, p.b0 + p.b1 + p.b2}) {
        require_positive(s.real() + e, "deformed22: Re(s) + b");
        require_positive(d.s0 + e, "deformed22: s0 + b");
    }
    const double r = d.rho;
    const double sh = -r * d.s0;
    const cplx u = s * (1.0 + r);
    const cplx v = -r * s;
    const double e0 = p.b0, e1 = p.b0 + p.b1, e2 = p.b0 + p.b2, e3 = p.b0 + p.b1 + p.b2;
    return lg2_pair(u, e0 + sh, e1 + sh, ctx) - lg2_pair(u, e2 + sh, e3 + sh, ctx)
         + lg2_pair(v, e0, e1, ctx) - lg2_pair(v, e2, e3, ctx);
}

}  // namespace gmc
