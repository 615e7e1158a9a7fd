#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmc/dozz_core.hpp"
#include "gmc/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace gmc;

TEST_CASE("derive_params")
{
    const GammaParams a = derive_params(1.0);
    CHECK(a.tau == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(a.q == doctest::Approx(2.5).epsilon(1e-15));
    const GammaParams b = derive_params(std::sqrt(2.0));
    CHECK(std::abs(b.tau - 2.0) < 1e-14);
    CHECK(std::abs(b.q - 3.0 / std::sqrt(2.0)) < 1e-14);
    const GammaParams c = derive_params(1.9999);
    CHECK(c.tau > 1.0);
    CHECK(std::abs(c.tau - 1.0) < 1e-3);
    CHECK(std::abs(c.q - 2.0) < 1e-3);
    for (double g : {0.3, 1.1, 1.7}) {
        const GammaParams p = derive_params(g);
        CHECK(std::abs(0.5 * g * (1.0 + p.tau) - p.q) < 1e-15 * p.q * 4);
    }
    CHECK_THROWS_AS(derive_params(2.0), DomainError);
    CHECK_THROWS_AS(derive_params(0.0), DomainError);
    CHECK_THROWS_AS(derive_params(2.5), DomainError);
}

TEST_CASE("insertion_summary")
{
    const GammaParams gp = derive_params(1.0);
    const InsertionTriple t = insertion_summary(gp, {1.0, 1.0, 1.5});
    CHECK(t.alpha_bar == 3.5);
    CHECK(std::abs(t.s0 + 1.5) < 1e-15);
    CHECK(std::abs(t.x[0] - 1.5) < 1e-15);
    CHECK(std::abs(t.x[1] - 1.5) < 1e-15);
    CHECK(std::abs(t.x[2] - 0.5) < 1e-15);
    const double third = 2.0 * gp.q / 3.0;
    CHECK(std::abs(insertion_summary(gp, {third, third, third}).s0) < 1e-15);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const GammaParams p = derive_params(0.1 + 1.8 * (u(rng) + 3.0) / 6.0);
        const auto s = insertion_summary(p, {u(rng), u(rng), u(rng)});
        CHECK(std::abs(s.x[0] + s.x[1] + s.x[2] - (s.s0 + 1.0 + p.tau)) < 1e-13 * std::max(1.0, p.tau));
    }
}

TEST_CASE("validate_domain")
{
    const GammaParams gp = derive_params(1.0);
    const InsertionTriple t = insertion_summary(gp, {1.0, 1.0, 1.5});
    const DomainReport r = validate_domain(t, gp, t.s0);
    CHECK(r.valid);
    CHECK(r.violations.empty());
    CHECK(std::abs(r.find("mc")->margin - 2.5) < 1e-14);
    CHECK(std::abs(r.find("mc2", 1)->margin - 1.5) < 1e-14);
    CHECK(std::abs(r.find("mc2", 2)->margin - 1.5) < 1e-14);
    CHECK(std::abs(r.find("mc2", 3)->margin - 0.5) < 1e-14);
    CHECK(r.find("bin1", 3)->margin > 0.0);

    const DomainReport b = validate_domain(insertion_summary(gp, {gp.q, 1.0, 1.0}), gp, 0.0);
    CHECK_FALSE(b.valid);
    const Constraint* v = nullptr;
    for (const auto& c : b.violations)
        if (c.name == "bin1") v = &c;
    REQUIRE(v != nullptr);
    CHECK(v->index == 1);
    CHECK(v->margin == 0.0);

    const DomainReport m = validate_domain(t, gp, -gp.tau);
    CHECK_FALSE(m.valid);
    CHECK(m.violations.front().name == "mc");
    CHECK(m.violations.front().margin == 0.0);
}

TEST_CASE("margins move continuously")
{
    const GammaParams gp = derive_params(1.3);
    const InsertionTriple t = insertion_summary(gp, {0.7, 1.1, 1.4});
    const InsertionTriple u = insertion_summary(gp, {0.7 + 1e-6, 1.1, 1.4});
    const DomainReport a = validate_domain(t, gp, 0.2), b = validate_domain(u, gp, 0.2 + 1e-6);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i)
        CHECK(std::abs(a.checks[i].margin - b.checks[i].margin) < 1e-5);
}

TEST_CASE("lemma inequalities")
{
    const GammaParams gp = derive_params(1.0);
    const InsertionTriple t = insertion_summary(gp, {1.0, 1.0, 1.5});
    const DomainReport r = check_lemma_inequalities(t, gp, 0.0);
    CHECK(std::abs(r.find("sadd3")->margin - 6.5) < 1e-14);
    CHECK(std::abs(r.find("alphagamma")->margin - 4.0) < 1e-14);
    CHECK_THROWS_AS(check_lemma_inequalities(t, gp, -10.0), std::invalid_argument);

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto cfg = sample_valid_configuration(rng);
        const double lo = family_strip_left(cfg.triple, cfg.gp);
        const double s = lo + (1.0 - u(rng)) * (8.0 - lo);
        violations += static_cast<int>(check_lemma_inequalities(cfg.triple, cfg.gp, s).violations.size());
    }
    CHECK(violations == 0);
}

TEST_CASE("valid configuration sampler")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto cfg = sample_valid_configuration(rng);
        CHECK(cfg.gp.gamma > 0.2);
        CHECK(cfg.gp.gamma < 1.9);
        CHECK(validate_domain(cfg.triple, cfg.gp, cfg.triple.s0).valid);
        for (double a : cfg.triple.alpha) {
            CHECK(a > 0.0);
            CHECK(a < cfg.gp.q);
        }
    }
}

TEST_CASE("x-coordinate constraints agree with the alpha constraints")
{
    const GammaParams gp = derive_params(1.0);
    CHECK(xi_constraints(insertion_summary(gp, {1.0, 1.0, 1.5}), gp).valid);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int disagreements = 0, accepted = 0;
    for (int i = 0; i < 1000; ++i) {
        const GammaParams p = derive_params(0.2 + 1.7 * u(rng));
        const InsertionTriple t =
            insertion_summary(p, {p.q * (1.4 * u(rng) - 0.2), p.q * (1.4 * u(rng) - 0.2), p.q * (1.4 * u(rng) - 0.2)});
        const bool a = xi_constraints(t, p).valid;
        const bool b = validate_domain(t, p, t.s0).valid && alpha_positivity(t).valid;
        disagreements += a != b;
        accepted += a;
    }
    CHECK(disagreements == 0);
    CHECK(accepted > 50);

    // s0 = (1 + tau)/2 sits on the boundary
    const double ab = gp.gamma * 0.5 * (1.0 + gp.tau) + 2.0 * gp.q;
    const InsertionTriple edge = insertion_summary(gp, {ab / 3.0, ab / 3.0, ab / 3.0});
    const DomainReport e = xi_constraints(edge, gp);
    CHECK_FALSE(e.valid);
    const Constraint* c = e.find("s0bounds", 2);
    REQUIRE(c != nullptr);
    CHECK(std::abs(c->margin) < 1e-14);
}

TEST_CASE("DOZZ constant")
{
    const GammaParams gp = derive_params(1.0);
    DoubleGammaContext ctx(gp.tau);
    std::array<double, 3> a{0.9, 1.2, 1.6};
    const SignedLog base = log_dozz_constant(insertion_summary(gp, a), gp, ctx);
    std::sort(a.begin(), a.end());
    double worst = 0.0;
    do {
        const SignedLog v = log_dozz_constant(insertion_summary(gp, a), gp, ctx);
        CHECK(v.sign == base.sign);
        worst = std::max(worst, std::abs(v.log_abs - base.log_abs));
    } while (std::next_permutation(a.begin(), a.end()));
    CHECK(worst < 1e-11);

    std::mt19937_64 rng(8);
    double xi_gap = 0.0, mellin_gap = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto cfg = sample_valid_configuration(rng);
        DoubleGammaContext c(cfg.gp.tau);
        const SignedLog d = log_dozz_constant(cfg.triple, cfg.gp, c);
        const SignedLog x = log_dozz_constant_xi(cfg.triple, cfg.gp, c);
        CHECK(d.sign == x.sign);
        xi_gap = std::max(xi_gap, std::abs(d.log_abs - x.log_abs));
        int sg = 1;
        const double lhs = log_abs_gamma(cfg.triple.s0, &sg) + log_mellin_M(cfg.triple.s0, cfg.triple, cfg.gp, c).real();
        CHECK(sg == d.sign);
        mellin_gap = std::max(mellin_gap, std::abs(lhs - d.log_abs));
    }
    CHECK(xi_gap < 1e-8);
    CHECK(mellin_gap < 1e-8);
}

TEST_CASE("mass scale")
{
    for (double tau : {1.5, 2.0, 4.0}) {
        const GammaParams gp = derive_params(2.0 / std::sqrt(tau));
        const double want = std::log(std::numbers::pi) + std::log(tau) / tau + std::lgamma(1.0 / tau)
                           - std::lgamma(1.0 - 1.0 / tau);
        CHECK(std::abs(log_mass_scale(gp) - want) < 1e-14);
    }
}
