#include "gmc/dozz_core.hpp"

#include <cmath>
#include <numbers>

namespace gmc {

void DomainReport::add(std::string name, int index, double margin)
{
    Constraint c{std::move(name), index, margin};
    if (!(margin > 0.0)) {
        valid = false;
        violations.push_back(c);
    }
    checks.push_back(std::move(c));
}

const Constraint* DomainReport::find(const std::string& name, int index) const
{
    for (const auto& c : checks)
        if (c.name == name && c.index == index) return &c;
    return nullptr;
}

GammaParams derive_params(double gamma)
{
    if (!(gamma > 0.0 && gamma < 2.0))
        throw DomainError("gamma must lie in the open interval (0, 2)");
    return {gamma, 4.0 / (gamma * gamma), 2.0 / gamma + 0.5 * gamma};
}

InsertionTriple insertion_summary(const GammaParams& gp, const std::array<double, 3>& alphas)
{
    InsertionTriple t;
    t.alpha = alphas;
    t.alpha_bar = alphas[0] + alphas[1] + alphas[2];
    t.s0 = (t.alpha_bar - 2.0 * gp.q) / gp.gamma;
    for (int k = 0; k < 3; ++k) t.x[k] = (t.alpha_bar - 2.0 * alphas[k]) / gp.gamma;
    return t;
}

DomainReport validate_domain(const InsertionTriple& t, const GammaParams& gp, double s)
{
    DomainReport r;
    r.add("mc", 0, gp.tau + s);
    for (int k = 0; k < 3; ++k) r.add("mc2", k + 1, 2.0 / gp.gamma * (gp.q - t.alpha[k]) + s);
    for (int k = 0; k < 3; ++k) r.add("bin1", k + 1, gp.q - t.alpha[k]);
    return r;
}

DomainReport alpha_positivity(const InsertionTriple& t)
{
    DomainReport r;
    for (int k = 0; k < 3; ++k) r.add("in2", k + 1, t.alpha[k]);
    return r;
}

DomainReport check_lemma_inequalities(const InsertionTriple& t, const GammaParams& gp, double s)
{
    if (!validate_domain(t, gp, s).valid || !validate_domain(t, gp, t.s0).valid)
        throw std::invalid_argument("check_lemma_inequalities: s and s0 must lie in the domain");

    const double g = gp.gamma, tau = gp.tau, q = gp.q, ab = t.alpha_bar;
    DomainReport r;
    for (int k = 0; k < 3; ++k) {
        const double a = t.alpha[k];
        const int i = k + 1;
        r.add("bin3", i, 1.0 + tau - 2.0 * a / g);
        r.add("bin2", i, ab - 2.0 * a);
        r.add("in1", i, 2.0 * q + a - ab);
        r.add("in2", i, a);
        r.add("in3", i, q + a - 0.5 * ab);
        r.add("eqcondit3", i, 1.0 + tau + 2.0 / g * (a - 0.5 * ab));
    }
    r.add("alphagamma2", 1, ab / g - 1.0);
    r.add("alphagamma2", 2, 1.5 * (1.0 + tau) - ab / g);
    for (int k = 0; k < 3; ++k) {
        const double a = t.alpha[k];
        r.add("sin", k + 1, s + 1.0 + tau - 2.0 * a / g);
        r.add("sadd", k + 1, s + 1.0 + tau + 2.0 / g * (a - 0.5 * ab));
    }
    r.add("sadd2", 0, s + 1.0 + tau - 2.0 * ab / (3.0 * g));
    r.add("sadd3", 0, s + 2.0 * (1.0 + tau) - ab / g);
    r.add("alphagamma", 0, 0.5 * (1.0 + tau) - t.s0);
    for (int k = 0; k < 3; ++k) r.add("gamma", k + 1, t.alpha[k] / g - t.s0);
    return r;
}

DomainReport xi_constraints(const InsertionTriple& t, const GammaParams& gp)
{
    const double tau = gp.tau, s0 = t.s0;
    DomainReport r;
    r.add("s0bounds", 1, s0 + tau);
    r.add("s0bounds", 2, 0.5 * (1.0 + tau) - s0);
    r.add("s0bounds", 3, tau - 0.5 * (1.0 + tau));
    for (int k = 0; k < 3; ++k) {
        const double x = t.x[k];
        r.add("xi_lower", k + 1, x - s0);
        r.add("xi_upper", k + 1, s0 + 1.0 + tau - x);
        r.add("xi_positive", k + 1, x);
        r.add("xi_reflected", k + 1, 1.0 + tau - s0 - x);
    }
    const double sum = t.x[0] + t.x[1] + t.x[2];
    const double target = s0 + 1.0 + tau;
    const double tol = 1e-12 * std::max(1.0, std::abs(target));
    r.add("xsum", 0, tol - std::abs(sum - target));
    return r;
}

double log_mass_scale(const GammaParams& gp)
{
    const double it = 1.0 / gp.tau;
    return std::log(std::numbers::pi) + it * std::log(gp.tau) + log_l(it);
}

namespace {

void require_dozz_domain(const InsertionTriple& t, const GammaParams& gp)
{
    auto xr = xi_constraints(t, gp);
    if (!xr.valid)
        throw DomainError("DOZZ constant: constraint " + xr.violations.front().name + " violated");
    if (!alpha_positivity(t).valid) throw DomainError("DOZZ constant: insertions must be positive");
}

// adds log|Upsilon(x)| to acc with the given power, tracking the sign
void accumulate_upsilon(double x, int power, const char* label, const GammaParams& gp,
                        const DoubleGammaContext& ctx, SignedLog& acc)
{
    int sg = 1;
    double v;
    try {
        v = log_abs_upsilon(x, gp, ctx, &sg);
    } catch (const DomainError&) {
        throw DomainError(std::string("DOZZ constant: Upsilon factor ") + label + " sits on a zero");
    }
    if (!std::isfinite(v))
        throw DomainError(std::string("DOZZ constant: Upsilon factor ") + label + " is not finite");
    acc.log_abs += power * v;
    acc.sign *= sg;
}

}  // namespace

SignedLog log_dozz_constant(const InsertionTriple& t, const GammaParams& gp,
                            const DoubleGammaContext& ctx)
{
    require_dozz_domain(t, gp);
    const double g = gp.gamma, s0 = t.s0;
    SignedLog c;
    const double base = std::log(std::numbers::pi) + log_l(g * g / 4.0)
                      + (2.0 - g * g / 2.0) * std::log(g / 2.0);
    c.log_abs = std::log(g / 2.0) - s0 * base + std::log(upsilon_prime_zero(gp, ctx));
    for (int k = 0; k < 3; ++k) accumulate_upsilon(t.alpha[k], 1, "alpha_i", gp, ctx, c);
    accumulate_upsilon(0.5 * t.alpha_bar - gp.q, -1, "alpha_bar/2 - Q", gp, ctx, c);
    for (int k = 0; k < 3; ++k)
        accumulate_upsilon(0.5 * t.alpha_bar - t.alpha[k], -1, "alpha_bar/2 - alpha_i", gp, ctx, c);
    return c;
}

SignedLog log_dozz_constant_xi(const InsertionTriple& t, const GammaParams& gp,
                               const DoubleGammaContext& ctx)
{
    require_dozz_domain(t, gp);
    const double tau = gp.tau, s0 = t.s0;
    const double e = 1.0 + tau;
    auto lg2 = [&](double w) { return ctx.log_gamma2(w); };
    double v = log_gamma(1.0 + s0 / tau) + lg2(s0 + e) - lg2(e) + lg2(e - s0) - lg2(e);
    for (double x : t.x) v += lg2(x) - lg2(x - s0) + lg2(e - x) - lg2(s0 + e - x);
    SignedLog c;
    c.log_abs = log_abs_gamma(s0, &c.sign) - s0 * log_mass_scale(gp) + v;
    return c;
}

Configuration sample_valid_configuration(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ug(0.2, 1.9);
    for (;;) {
        GammaParams gp = derive_params(ug(rng));
        std::uniform_real_distribution<double> ua(0.0, gp.q);
        InsertionTriple t = insertion_summary(gp, {ua(rng), ua(rng), ua(rng)});
        if (validate_domain(t, gp, t.s0).valid && alpha_positivity(t).valid) return {gp, t};
    }
}

}  // namespace gmc
