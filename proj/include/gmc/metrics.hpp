#pragma once

#include "gmc/special_functions.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gmc {

// conformal metric g(x)|dx|^2 on the sphere
struct ConformalMetric {
    std::function<double(cplx)> evaluator;
    std::string label;
    // phi = log(g / g_plus) in closed form, radial metrics only
    bool knows_phi = false;
    bool radial = false;
    std::function<double(double)> phi;    // phi(r)
    std::function<double(double)> dphi;   // phi'(r)
    // gradient of log g as d/dx + i d/dy, when known in closed form
    std::function<cplx(cplx)> grad_log;
    // curves where g may have a kink, for splitting the polar quadrature:
    // radii in (0,1) along the ray at angle theta, and critical angles
    std::function<std::vector<double>(double)> radial_breaks;
    std::vector<double> angular_breaks;

    double operator()(cplx x) const { return evaluator(x); }
};

// g_plus, round, scaled(<metric>, lambda), symmetrized(<metric>); nesting allowed
ConformalMetric builtin_metric(const std::string& name);
ConformalMetric g_plus_metric();
ConformalMetric round_metric();
ConformalMetric scaled_metric(const ConformalMetric& base, double lambda);
// T[g](x) = g(x) + g(x/(x-1))/|x-1|^4 + g(1-x); requires the inversion property
ConformalMetric symmetrize(const ConformalMetric& g);

// max |g(1/x) |x|^{-4} / g(x) - 1| over the points
double check_inversion_property(const ConformalMetric& g, const std::vector<cplx>& points);
// residuals of T(1-x) = T(x) and T(1/x) = |x|^4 T(x)
struct SymmetryResiduals {
    double reflection = 0.0;
    double inversion = 0.0;
};
SymmetryResiduals check_symmetry(const ConformalMetric& t, const std::vector<cplx>& points);

// deterministic sample of points in a log-radial annulus, avoiding 0 and 1
std::vector<cplx> metric_test_points(std::size_t n, std::uint64_t seed);

struct QuadSpec {
    double tolerance = 1e-10;
    int max_depth = 15;
};

// (1/32 pi) [int |grad phi|^2 + 8 int_0^{2 pi} phi(e^{i theta}) d theta]
double chi_g(const ConformalMetric& g, const QuadSpec& q = {});
// int_C g(x) dx
double metric_mass(const ConformalMetric& g, const QuadSpec& q = {});

struct MomentMismatch {
    double conjecture_value = 0.0;
    double exact_value = 0.0;
    double ratio = 0.0;
    double chi = 0.0;
};
// alpha = 0 first moment of the family against e^{gamma^2 chi/2} int g
MomentMismatch first_moment_mismatch(const GammaParams& gp, const ConformalMetric& g,
                                     const QuadSpec& q = {});

}  // namespace gmc
