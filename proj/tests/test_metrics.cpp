#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmc/dozz_core.hpp"
#include "gmc/metrics.hpp"

#include <cmath>
#include <numbers>

using namespace gmc;
using std::numbers::pi;

TEST_CASE("builtin metrics pointwise")
{
    const ConformalMetric gp = g_plus_metric(), r = round_metric();
    CHECK(gp(cplx(0.0, 0.0)) == 1.0);
    CHECK(gp(cplx(0.3, -0.5)) == 1.0);
    CHECK(std::abs(gp(cplx(2.0, 0.0)) - 1.0 / 16.0) < 1e-16);
    CHECK(std::abs(gp(cplx(0.0, -2.0)) - 1.0 / 16.0) < 1e-16);
    CHECK(r(cplx(0.0, 0.0)) == 1.0);
    CHECK(std::abs(r(cplx(1.0, 0.0)) - 0.25) < 1e-16);
    CHECK(std::abs(r(std::polar(1.0, 2.1)) - 0.25) < 1e-15);
    CHECK(scaled_metric(r, 2.0)(cplx(0.0, 0.0)) == 2.0);
    CHECK(builtin_metric("scaled(round, 2)")(cplx(0.0, 0.0)) == 2.0);
    CHECK(std::abs(builtin_metric("symmetrized(g_plus)")(cplx(0.5, 0.0))
                   - symmetrize(gp)(cplx(0.5, 0.0))) < 1e-15);
    CHECK_THROWS(builtin_metric("flat"));
    CHECK_THROWS(builtin_metric("scaled(round)"));
}

TEST_CASE("inversion property")
{
    const auto pts = metric_test_points(200, 3);
    CHECK(check_inversion_property(g_plus_metric(), pts) < 1e-14);
    CHECK(check_inversion_property(round_metric(), pts) < 1e-14);
    CHECK(check_inversion_property(scaled_metric(round_metric(), 3.0), pts) < 1e-14);
    CHECK(check_inversion_property(symmetrize(round_metric()), pts) < 1e-13);

    // a metric without the property is rejected
    ConformalMetric flat;
    flat.evaluator = [](cplx x) { return 1.0 / (1.0 + std::norm(x)); };
    flat.label = "lopsided";
    CHECK(check_inversion_property(flat, pts) > 1e-3);
    CHECK_THROWS(symmetrize(flat));
}

TEST_CASE("symmetrization")
{
    const auto pts = metric_test_points(256, 9);
    for (const auto& base : {g_plus_metric(), round_metric(), scaled_metric(round_metric(), 0.5)}) {
        const SymmetryResiduals r = check_symmetry(symmetrize(base), pts);
        CHECK(r.reflection < 1e-12);
        CHECK(r.inversion < 1e-12);
    }
    // continuous across x = 1
    const ConformalMetric t = symmetrize(g_plus_metric());
    CHECK(std::abs(t(cplx(1.0 - 1e-6, 0.0)) - t(cplx(1.0 + 1e-6, 0.0))) < 1e-4);
    // g_plus(1/2) + g_plus(-1)/(1/2)^4 + g_plus(1/2) = 1 + 16 + 1
    CHECK(std::abs(t(cplx(0.5, 0.0)) - 18.0) < 1e-13);
}

TEST_CASE("chi functional")
{
    CHECK(chi_g(g_plus_metric()) == 0.0);
    CHECK(std::abs(chi_g(round_metric()) + 0.5) < 1e-8);
    for (double lam : {0.5, 2.0, 10.0}) {
        CHECK(std::abs(chi_g(scaled_metric(g_plus_metric(), lam)) - 0.5 * std::log(lam)) < 1e-8);
        CHECK(std::abs(chi_g(scaled_metric(round_metric(), lam)) + 0.5 - 0.5 * std::log(lam)) < 1e-8);
    }
}

TEST_CASE("chi without closed-form gradient")
{
    ConformalMetric r = round_metric();
    r.grad_log = nullptr;
    r.knows_phi = false;
    CHECK(std::abs(chi_g(r) + 0.5) < 1e-5);
}

TEST_CASE("metric mass")
{
    CHECK(std::abs(metric_mass(g_plus_metric()) - 2.0 * pi) < 1e-8);
    CHECK(std::abs(metric_mass(round_metric()) - pi) < 1e-8);
    for (double lam : {0.5, 3.0}) {
        const double m = metric_mass(scaled_metric(round_metric(), lam));
        CHECK(std::abs(m - lam * pi) < 1e-8 * lam);
        CHECK(std::abs(m / metric_mass(round_metric()) - lam) < 1e-12);
    }
}

TEST_CASE("first moment mismatch")
{
    const GammaParams gp = derive_params(std::sqrt(2.0));
    const MomentMismatch a = first_moment_mismatch(gp, g_plus_metric());
    CHECK(a.chi == 0.0);
    CHECK(std::abs(a.conjecture_value - 2.0 * pi / 3.0) < 1e-10);
    CHECK(std::abs(a.exact_value - 2.0 * pi) < 1e-8);
    CHECK(std::abs(a.ratio - 1.0 / 3.0) < 1e-10);

    // chi = -1/2 and mass pi give e^{-1/tau} pi against e^{-(1+tau)/tau} pi / (1 + 1/tau)
    for (double tau : {1.5, 2.0, 4.0}) {
        const MomentMismatch m = first_moment_mismatch(derive_params(2.0 / std::sqrt(tau)), round_metric());
        CHECK(std::abs(m.exact_value - std::exp(-1.0 / tau) * pi) < 1e-7);
        CHECK(std::abs(m.ratio - std::exp(-1.0) / (1.0 + 1.0 / tau)) < 1e-7);
    }
}
