#include "gmc/acceptance.hpp"

#include "gmc/metrics.hpp"
#include "gmc/numerics.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>

namespace gmc {

namespace {

std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// collects pass/fail and a short textual summary
struct Verdict {
    bool ok = true;
    std::string text;

    void note(bool pass, const std::string& s)
    {
        ok = ok && pass;
        if (!text.empty()) text += "; ";
        text += s;
        if (!pass) text += " FAIL";
    }
};

std::array<double, 3> scaled_alphas(const GammaParams& gp)
{
    return {0.4 * gp.q, 0.5 * gp.q, 0.6 * gp.q};
}

GammaParams params_for_tau(double tau)
{
    return derive_params(2.0 / std::sqrt(tau));
}

Verdict dozz_identity(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 101);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto cfg = sample_valid_configuration(rng);
        DoubleGammaContext ctx(cfg.gp.tau);
        worst = std::max(worst, dozz_check(cfg.triple, cfg.gp, ctx).residual);
    }
    Verdict v;
    v.note(worst < 1e-8, fmt("100 configurations, max residual %.3g", worst));
    return v;
}

Verdict deformation_anchor(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto cfg = sample_valid_configuration(rng);
        DoubleGammaContext ctx(cfg.gp.tau);
        // -u lies in (-1, 0]
        DeformationTriple d{-u(rng), -u(rng), -u(rng)};
        const auto& t = cfg.triple;
        const double a = log_mellin_deformed(t.s0, t, cfg.gp, d, ctx).real();
        const double b = log_mellin_minimal(t.s0, t, cfg.gp, ctx).real();
        worst = std::max(worst, std::abs(a - b));
    }
    Verdict v;
    v.note(worst < 1e-9, fmt("100 deformations, max |diff| at s0 %.3g", worst));
    return v;
}

Verdict functional_equations()
{
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    for (double tau : {1.1, 2.0, 4.0}) {
        DoubleGammaContext ctx(tau);
        for (int i = 0; i < 50; ++i) {
            const double s = 0.05 * std::pow(1000.0, i / 49.0);
            const double w = s + tau;
            const double l1 = ctx.log_gamma2(w) - ctx.log_gamma2(w + 1.0);
            const double r1 = (w / tau - 0.5) * std::log(tau) - half_log_2pi + std::lgamma(w / tau);
            const double l2 = ctx.log_gamma2(s) - ctx.log_gamma2(s + tau);
            const double r2 = std::lgamma(s) - half_log_2pi;
            const double l3 = ctx.log_gamma2(s) - ctx.log_gamma2(s + tau + 1.0);
            const double r3 = (s / tau + 0.5) * std::log(tau) - std::log(2.0 * std::numbers::pi)
                            + std::lgamma(s) + std::lgamma((s + tau) / tau);
            e1 = std::max(e1, std::abs(std::expm1(l1 - r1)));
            e2 = std::max(e2, std::abs(std::expm1(l2 - r2)));
            e3 = std::max(e3, std::abs(std::expm1(l3 - r3)));
        }
    }
    Verdict v;
    v.note(e1 < 1e-10, fmt("unit shift %.3g", e1));
    v.note(e2 < 1e-10, fmt("tau shift %.3g", e2));
    v.note(e3 < 1e-10, fmt("composite %.3g", e3));
    return v;
}

Verdict reduction_oracles()
{
    const std::array<cplx, 5> svals{cplx(-0.3), cplx(0.5), cplx(2.0), cplx(0.4, 1.7), cplx(1.5, -6.0)};
    double e21 = 0.0, e22 = 0.0, efam = 0.0, edef = 0.0;
    for (double tau : {1.5, 2.0, 4.0}) {
        DoubleGammaContext ctx(tau);
        for (double b0 : {0.7, 1.0, 2.3}) {
            for (cplx s : svals) {
                const cplx g21 = log_gamma(s + b0) - log_gamma(cplx(b0));
                e21 = std::max(e21, std::abs(log_mellin_beta21(s, {b0, tau, tau}, ctx) - g21));
                for (double b1 : {0.6, 1.9}) {
                    const cplx g22 = log_gamma(s + b0) + log_gamma(cplx(b0 + b1)) - log_gamma(cplx(b0))
                                   - log_gamma(s + b0 + b1);
                    e22 = std::max(e22, std::abs(log_mellin_beta22(s, {b0, b1, tau, tau}, ctx) - g22));
                }
            }
        }
        const GammaParams gp = params_for_tau(tau);
        const InsertionTriple t0 = insertion_summary(gp, {0.0, 0.0, 0.0});
        for (cplx s : svals) {
            efam = std::max(efam, std::abs(log_mellin_M(s, t0, gp, ctx) - total_mass_mellin(s, gp)));
            for (double r21 : {0.0, -0.35, -0.8}) {
                const DeformationTriple d{-0.5, r21, -0.2};
                edef = std::max(edef, std::abs(log_mellin_deformed(s, t0, gp, d, ctx)
                                               - total_mass_mellin(s, gp, {true, r21})));
            }
        }
    }
    const GammaParams g2 = params_for_tau(2.0);
    DoubleGammaContext c2(2.0);
    const double m1 = std::exp(log_mellin_M(1.0, insertion_summary(g2, {0.0, 0.0, 0.0}), g2, c2).real());
    const double e1 = std::abs(m1 - 4.0 / std::numbers::pi);
    Verdict v;
    v.note(e21 < 1e-10, fmt("beta21 vs Gamma %.3g", e21));
    v.note(e22 < 1e-10, fmt("beta22 vs Beta %.3g", e22));
    v.note(efam < 1e-10, fmt("alpha=0 minimal %.3g", efam));
    v.note(edef < 1e-10, fmt("alpha=0 deformed %.3g", edef));
    v.note(e1 < 1e-10, fmt("E[M] at tau=2 minus 4/pi %.3g", e1));
    return v;
}

Verdict probability_law(std::uint64_t seed)
{
    const GammaParams gp = params_for_tau(2.0);
    DoubleGammaContext ctx(gp.tau);
    const InsertionTriple t = insertion_summary(gp, scaled_alphas(gp));
    std::vector<LogMellinEvaluator> evs{minimal_evaluator(t, gp, ctx)};
    std::mt19937_64 rng(seed + 505);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 3; ++i) evs.push_back(deformed_evaluator(t, gp, {-u(rng), -u(rng), -u(rng)}, ctx));
    evs.push_back(s0zero_evaluator(project_to_s0zero(t, gp), gp, 3, ctx));
    const std::array<const char*, 5> names{"minimal", "deformed", "deformed", "deformed", "s0=0"};
    Verdict v;
    for (std::size_t i = 0; i < evs.size(); ++i) {
        try {
            const DensityGrid g = invert_mellin(evs[i]);
            const double dm = std::abs(g.total_mass - 1.0);
            v.note(dm < 1e-4 && g.clipped_mass <= 1e-6,
                   fmt("%s mass-1 %.2g clipped %.2g", names[i], dm, g.clipped_mass));
        } catch (const std::exception& e) {
            v.note(false, fmt("%s: %s", names[i], e.what()));
        }
    }
    return v;
}

Verdict monte_carlo(std::uint64_t seed)
{
    Verdict v;
    const std::size_t n = 1000000;
    const GammaParams g2 = params_for_tau(2.0);
    DoubleGammaContext c2(2.0);
    const std::vector<double> s1{-0.5, 0.5, 1.0};
    auto est = monte_carlo_mellin(total_mass_factorization(g2), s1, n, seed + 606, c2);
    for (const auto& e : est) {
        const double want = std::exp(total_mass_mellin(e.s, g2).real());
        const double z = (e.estimate - want) / e.stderr_;
        v.note(std::abs(z) < 3.0, fmt("total mass s=%g z=%.2f", e.s, z));
    }
    const GammaParams g1 = derive_params(1.0);
    DoubleGammaContext c1(g1.tau);
    const InsertionTriple t = insertion_summary(g1, {1.0, 1.0, 1.5});
    const std::vector<double> s2{-0.5, 0.5};
    est = monte_carlo_mellin(minimal_factorization(t, g1), s2, n, seed + 607, c1);
    for (const auto& e : est) {
        const double want = std::exp(log_mellin_minimal(e.s, t, g1, c1).real());
        const double z = (e.estimate - want) / e.stderr_;
        v.note(std::abs(z) < 3.0, fmt("minimal s=%g z=%.2f", e.s, z));
    }
    return v;
}

Verdict asymptotics(std::uint64_t seed)
{
    Verdict v;
    std::mt19937_64 rng(seed + 707);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double tau : {1.5, 2.0, 4.0}) {
        const GammaParams gp = params_for_tau(tau);
        DoubleGammaContext ctx(tau);
        const InsertionTriple t = insertion_summary(gp, scaled_alphas(gp));
        const DeformationTriple d{-u(rng), -u(rng), -u(rng)};
        const double want = 1.0 + 2.0 / tau;
        const double a = fit_asymptotic_coefficient(minimal_evaluator(t, gp, ctx), 100, 1000).a;
        const double b = fit_asymptotic_coefficient(deformed_evaluator(t, gp, d, ctx), 100, 1000).a;
        const double c = fit_asymptotic_coefficient(
            s0zero_evaluator(project_to_s0zero(t, gp), gp, 3, ctx), 100, 1000).a;
        v.note(std::abs(a / want - 1.0) < 0.02, fmt("tau=%g minimal %.4f/%.4f", tau, a, want));
        v.note(std::abs(b / want - 1.0) < 0.02, fmt("deformed %.4f", b));
        v.note(std::abs(c * tau - 1.0) < 0.02, fmt("s0=0 %.4f/%.4f", c, 1.0 / tau));
    }
    return v;
}

Verdict small_deviation(std::uint64_t seed)
{
    Verdict v;
    const GammaParams gp = params_for_tau(2.0);
    DoubleGammaContext ctx(gp.tau);
    const InsertionTriple t = insertion_summary(gp, scaled_alphas(gp));
    const std::size_t n = 10000000;
    const double tau = gp.tau;
    auto a = small_deviation_probe(minimal_factorization(t, gp), {}, n, seed + 808, ctx);
    const double want_a = tau / (2.0 + tau);
    v.note(std::abs(a.exponent / want_a - 1.0) < 0.15,
           fmt("minimal p=%.4f (target %.4f)", a.exponent, want_a));
    auto b = small_deviation_probe(s0zero_factorization(project_to_s0zero(t, gp), gp, 3), {}, n,
                                   seed + 809, ctx);
    v.note(std::abs(b.exponent / tau - 1.0) < 0.15, fmt("s0=0 p=%.4f (target %.4f)", b.exponent, tau));
    return v;
}

Verdict lemma_inequalities(std::uint64_t seed)
{
    std::mt19937_64 rng(seed + 909);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    std::size_t checks = 0;
    for (int i = 0; i < 1000; ++i) {
        auto cfg = sample_valid_configuration(rng);
        const double lo = family_strip_left(cfg.triple, cfg.gp);
        const double s = lo + (1.0 - u(rng)) * (6.0 - lo);
        auto r = check_lemma_inequalities(cfg.triple, cfg.gp, s);
        violations += static_cast<int>(r.violations.size());
        checks += r.checks.size();
    }
    Verdict v;
    v.note(violations == 0, fmt("%zu checks over 1000 configurations, %d violations", checks, violations));
    return v;
}

Verdict metrics()
{
    Verdict v;
    const ConformalMetric gplus = g_plus_metric(), round = round_metric();
    const double cp = chi_g(gplus), cr = chi_g(round);
    v.note(cp == 0.0, fmt("chi(g+)=%.3g", cp));
    v.note(std::abs(cr + 0.5) < 1e-6, fmt("chi(round)+0.5=%.3g", cr + 0.5));
    double worst = 0.0;
    for (const auto& base : {gplus, round})
        for (double lam : {0.5, 3.0, 10.0})
            worst = std::max(worst, std::abs(chi_g(scaled_metric(base, lam)) - chi_g(base)
                                             - 0.5 * std::log(lam)));
    v.note(worst < 1e-6, fmt("scaling %.3g", worst));
    const double mr = metric_mass(round), mp = metric_mass(gplus);
    v.note(std::abs(mr - std::numbers::pi) < 1e-8 && std::abs(mp - 2.0 * std::numbers::pi) < 1e-8,
           fmt("mass errors %.3g %.3g", mr - std::numbers::pi, mp - 2.0 * std::numbers::pi));
    const auto pts = metric_test_points(256, 2024);
    double sym = 0.0;
    for (const auto& base : {gplus, round}) {
        const auto r = check_symmetry(symmetrize(base), pts);
        sym = std::max({sym, r.reflection, r.inversion});
    }
    v.note(sym < 1e-12, fmt("T[g] residual %.3g", sym));
    const auto mm = first_moment_mismatch(params_for_tau(2.0), gplus);
    v.note(std::abs(mm.ratio - 1.0 / 3.0) < 1e-10, fmt("mismatch ratio %.12f", mm.ratio));
    return v;
}

Verdict upsilon_prime()
{
    Verdict v;
    for (double gamma : {0.8, 1.0, 1.5}) {
        const GammaParams gp = derive_params(gamma);
        DoubleGammaContext ctx(gp.tau);
        // central difference through the continuation of Upsilon to x < 0
        const double h = 1e-5;
        int sp = 1, sm = 1;
        const double up = log_abs_upsilon(h, gp, ctx, &sp), um = log_abs_upsilon(-h, gp, ctx, &sm);
        const double fd = (sp * std::exp(up) - sm * std::exp(um)) / (2.0 * h);
        const double exact = upsilon_prime_zero(gp, ctx);
        const double rel = std::abs(fd / exact - 1.0);
        v.note(rel < 1e-6, fmt("gamma=%g rel %.3g", gamma, rel));
    }
    return v;
}

}  // namespace

const char* criterion_name(int id)
{
    static const char* names[] = {
        "dozz-identity",      "deformation-anchor", "functional-equations", "reduction-oracles",
        "probability-law",    "monte-carlo",        "asymptotics",          "small-deviation",
        "lemma-inequalities", "metrics",            "upsilon-prime",
    };
    if (id < 1 || id > kCriterionCount) return "unknown";
    return names[id - 1];
}

CriterionResult run_criterion(int id, std::uint64_t seed)
{
    CriterionResult out;
    out.id = id;
    out.name = criterion_name(id);
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        switch (id) {
        case 1: v = dozz_identity(seed); break;
        case 2: v = deformation_anchor(seed); break;
        case 3: v = functional_equations(); break;
        case 4: v = reduction_oracles(); break;
        case 5: v = probability_law(seed); break;
        case 6: v = monte_carlo(seed); break;
        case 7: v = asymptotics(seed); break;
        case 8: v = small_deviation(seed); break;
        case 9: v = lemma_inequalities(seed); break;
        case 10: v = metrics(); break;
        case 11: v = upsilon_prime(); break;
        default: throw std::invalid_argument("no such criterion");
        }
    } catch (const std::exception& e) {
        v.note(false, e.what());
    }
    out.passed = v.ok;
    out.detail = v.text;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace gmc
