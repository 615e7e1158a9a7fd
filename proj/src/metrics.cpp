#include "gmc/metrics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace gmc {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(cplx x) { return std::norm(x); }

double g_plus_value(cplx x)
{
    const double r2 = norm2(x);
    return r2 <= 1.0 ? 1.0 : 1.0 / (r2 * r2);
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// contents of "name(...)" when s has that form
bool unwrap(const std::string& s, const std::string& name, std::string* inner)
{
    if (s.size() < name.size() + 2 || s.compare(0, name.size() + 1, name + "(") != 0 || s.back() != ')')
        return false;
    *inner = s.substr(name.size() + 1, s.size() - name.size() - 2);
    return true;
}

template <class F>
double integrate(F f, double a, double b, const QuadSpec& q)
{
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, static_cast<unsigned>(q.max_depth), q.tolerance, &err);
    if (!std::isfinite(v) || err > 1e3 * q.tolerance * std::max(std::abs(v), b - a)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "metrics: quadrature did not converge (%.3g +- %.3g on [%.6g, %.6g])",
                      v, err, a, b);
        throw ConvergenceError(msg);
    }
    return v;
}

// central differences at h and h/2 with one Richardson step
std::pair<double, double> gradient(const std::function<double(cplx)>& f, cplx z)
{
    auto central = [&](double h) {
        return std::pair{(f(z + h) - f(z - h)) / (2.0 * h),
                         (f(z + cplx(0.0, h)) - f(z - cplx(0.0, h))) / (2.0 * h)};
    };
    const double h = 1e-5;
    const auto [ax, ay] = central(h);
    const auto [bx, by] = central(0.5 * h);
    return {(4.0 * bx - ax) / 3.0, (4.0 * by - ay) / 3.0};
}

// integral of F over the unit disc in polar coordinates, split at the
// metric's kink curves
template <class F>
double disc_integral(F f, const ConformalMetric& g, const QuadSpec& q)
{
    auto ray = [&](double theta) {
        std::vector<double> cuts{0.0, 1.0};
        if (g.radial_breaks)
            for (double b : g.radial_breaks(theta))
                if (b > 1e-12 && b < 1.0 - 1e-12) cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            acc += integrate([&](double r) { return r * f(std::polar(r, theta)); }, cuts[i], cuts[i + 1], q);
        return acc;
    };
    std::vector<double> cuts{0.0, 2.0 * kPi};
    for (double a : g.angular_breaks)
        if (a > 0.0 && a < 2.0 * kPi) cuts.push_back(a);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += integrate(ray, cuts[i], cuts[i + 1], q);
    return acc;
}

QuadSpec loosened(const QuadSpec& q)
{
    return {std::max(q.tolerance, 1e-8), std::min(q.max_depth, 10)};
}

}  // namespace

ConformalMetric g_plus_metric()
{
    ConformalMetric m;
    m.evaluator = g_plus_value;
    m.label = "g_plus";
    m.knows_phi = true;
    m.radial = true;
    m.phi = [](double) { return 0.0; };
    m.dphi = [](double) { return 0.0; };
    m.grad_log = [](cplx x) { return norm2(x) <= 1.0 ? cplx(0.0) : -4.0 * x / norm2(x); };
    return m;
}

ConformalMetric round_metric()
{
    ConformalMetric m;
    m.evaluator = [](cplx x) {
        const double d = 1.0 + norm2(x);
        return 1.0 / (d * d);
    };
    m.label = "round";
    m.knows_phi = true;
    m.radial = true;
    m.phi = [](double r) {
        return r <= 1.0 ? -2.0 * std::log1p(r * r) : -2.0 * std::log1p(1.0 / (r * r));
    };
    m.dphi = [](double r) {
        return r <= 1.0 ? -4.0 * r / (1.0 + r * r) : 4.0 / (r * (1.0 + r * r));
    };
    m.grad_log = [](cplx x) { return -4.0 * x / (1.0 + norm2(x)); };
    return m;
}

ConformalMetric scaled_metric(const ConformalMetric& base, double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("scaled metric: lambda must be positive");
    ConformalMetric m = base;
    auto g = base.evaluator;
    m.evaluator = [g, lambda](cplx x) { return lambda * g(x); };
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", lambda);
    m.label = "scaled(" + base.label + "," + buf + ")";
    if (base.knows_phi) {
        auto phi = base.phi;
        const double shift = std::log(lambda);
        m.phi = [phi, shift](double r) { return phi(r) + shift; };
    }
    return m;
}

ConformalMetric symmetrize(const ConformalMetric& g)
{
    const double res = check_inversion_property(g, metric_test_points(64, 12345));
    if (!(res < 1e-10))
        throw std::invalid_argument("symmetrize: " + g.label + " fails the inversion property");
    ConformalMetric m;
    auto f = g.evaluator;
    m.evaluator = [f](cplx x) {
        const double d1 = std::abs(x - 1.0), d0 = std::abs(x);
        // g(x/(x-1))/|x-1|^4, rewritten through the inversion property near x = 1
        const double middle = d1 >= d0 ? f(x / (x - 1.0)) / std::pow(d1, 4)
                                       : f(1.0 - 1.0 / x) / std::pow(d0, 4);
        return f(x) + middle + f(1.0 - x);
    };
    if (g.grad_log) {
        // for holomorphic w, grad(f o w) = conj(w') (grad f)(w)
        auto gl = g.grad_log;
        m.grad_log = [f, gl](cplx x) {
            const double d1 = std::abs(x - 1.0), d0 = std::abs(x);
            cplx value = f(x) + f(1.0 - x);
            cplx grad = f(x) * gl(x) - f(1.0 - x) * gl(1.0 - x);
            if (d1 >= d0) {
                const cplx w = x / (x - 1.0), dw = -1.0 / ((x - 1.0) * (x - 1.0));
                const double fw = f(w), k = std::pow(d1, -4);
                value += fw * k;
                grad += k * fw * std::conj(dw) * gl(w) - 4.0 * k * fw * (x - 1.0) / (d1 * d1);
            } else {
                const cplx v = 1.0 - 1.0 / x, dv = 1.0 / (x * x);
                const double fv = f(v), k = std::pow(d0, -4);
                value += fv * k;
                grad += k * fv * std::conj(dv) * gl(v) - 4.0 * k * fv * x / (d0 * d0);
            }
            return grad / value;
        };
    }
    m.label = "symmetrized(" + g.label + ")";
    // images of |x| = 1 under x -> 1-x and x -> x/(x-1): |x-1| = 1 and Re x = 1/2;
    // the set is closed under x -> 1/x, so it serves both polar regions
    m.radial_breaks = [](double theta) {
        const double c = std::cos(theta);
        std::vector<double> b;
        if (c > 0.0) {
            b.push_back(2.0 * c);
            b.push_back(0.5 / c);
        }
        return b;
    };
    m.angular_breaks = {kPi / 3.0, kPi / 2.0, 3.0 * kPi / 2.0, 5.0 * kPi / 3.0};
    return m;
}

ConformalMetric builtin_metric(const std::string& name)
{
    const std::string s = trim(name);
    if (s == "g_plus") return g_plus_metric();
    if (s == "round") return round_metric();
    std::string inner;
    if (unwrap(s, "symmetrized", &inner)) return symmetrize(builtin_metric(inner));
    if (unwrap(s, "scaled", &inner)) {
        const auto comma = inner.rfind(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("scaled metric needs scaled(<metric>, lambda)");
        const std::string lam = trim(inner.substr(comma + 1));
        std::size_t used = 0;
        double lambda = 0.0;
        try {
            lambda = std::stod(lam, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != lam.size() || lam.empty())
            throw std::invalid_argument("scaled metric: bad lambda '" + lam + "'");
        return scaled_metric(builtin_metric(inner.substr(0, comma)), lambda);
    }
    throw std::invalid_argument("unknown metric '" + s + "'");
}

double check_inversion_property(const ConformalMetric& g, const std::vector<cplx>& points)
{
    double worst = 0.0;
    for (cplx x : points) {
        if (x == cplx(0.0)) throw std::invalid_argument("inversion check: point at 0");
        const double lhs = g(1.0 / x) / (norm2(x) * norm2(x));
        worst = std::max(worst, std::abs(lhs / g(x) - 1.0));
    }
    return worst;
}

SymmetryResiduals check_symmetry(const ConformalMetric& t, const std::vector<cplx>& points)
{
    SymmetryResiduals r;
    for (cplx x : points) {
        const double tx = t(x);
        r.reflection = std::max(r.reflection, std::abs(t(1.0 - x) / tx - 1.0));
        r.inversion = std::max(r.inversion, std::abs(t(1.0 / x) / (norm2(x) * norm2(x) * tx) - 1.0));
    }
    return r;
}

std::vector<cplx> metric_test_points(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lr(-3.0, 3.0), th(0.0, 2.0 * kPi);
    std::vector<cplx> out;
    while (out.size() < n) {
        const cplx x = std::polar(std::exp(lr(rng)), th(rng));
        if (std::abs(x - 1.0) > 1e-3) out.push_back(x);
    }
    return out;
}

double chi_g(const ConformalMetric& g, const QuadSpec& q)
{
    double dirichlet, boundary;
    if (g.knows_phi && g.radial) {
        // outer region through rho = 1/r: psi(rho) = phi(1/rho), psi' = -phi'(1/rho)/rho^2
        auto dphi = g.dphi;
        const double inner = integrate([&](double r) {
            const double d = dphi(r);
            return r * d * d;
        }, 0.0, 1.0, q);
        const double outer = integrate([&](double rho) {
            const double d = dphi(1.0 / rho) / (rho * rho);
            return rho * d * d;
        }, 0.0, 1.0, q);
        dirichlet = 2.0 * kPi * (inner + outer);
        boundary = 8.0 * 2.0 * kPi * g.phi(1.0);
    } else {
        // on the disc g_plus = 1 and phi = log g; outside, psi(y) = phi(1/y) =
        // log g(1/y) - 4 log|y|. Both extend smoothly across the unit circle.
        auto f = g.evaluator;
        std::function<double(cplx)> phi = [f](cplx x) { return std::log(f(x) / g_plus_value(x)); };
        QuadSpec ql = loosened(q);
        std::function<double(cplx)> inner_energy, outer_energy;
        if (g.grad_log) {
            auto gl = g.grad_log;
            inner_energy = [gl](cplx x) { return std::norm(gl(x)); };
            outer_energy = [gl](cplx y) {
                const cplx x = 1.0 / y;
                return std::norm(gl(x) + 4.0 * x / norm2(x)) / (norm2(y) * norm2(y));
            };
        } else {
            std::function<double(cplx)> phi_in = [f](cplx x) { return std::log(f(x)); };
            std::function<double(cplx)> psi = [f](cplx y) {
                return std::log(f(1.0 / y)) - 2.0 * std::log(norm2(y));
            };
            // difference stencils straddle kinks; accuracy is roughly h^2
            ql.tolerance = std::max(ql.tolerance, 1e-6);
            inner_energy = [phi_in](cplx z) {
                const auto [gx, gy] = gradient(phi_in, z);
                return gx * gx + gy * gy;
            };
            outer_energy = [psi](cplx z) {
                const auto [gx, gy] = gradient(psi, z);
                return gx * gx + gy * gy;
            };
        }
        dirichlet = disc_integral(inner_energy, g, ql) + disc_integral(outer_energy, g, ql);
        boundary = 0.0;
        std::vector<double> cuts{0.0, 2.0 * kPi};
        for (double a : g.angular_breaks) cuts.push_back(a);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            boundary += 8.0 * integrate([&](double theta) { return phi(std::polar(1.0, theta)); },
                                        cuts[i], cuts[i + 1], ql);
    }
    return (dirichlet + boundary) / (32.0 * kPi);
}

double metric_mass(const ConformalMetric& g, const QuadSpec& q)
{
    auto f = g.evaluator;
    if (g.radial) {
        const double inner = integrate([&](double r) { return r * f(r); }, 0.0, 1.0, q);
        const double outer = integrate([&](double rho) {
            return f(1.0 / rho) / (rho * rho * rho);
        }, 0.0, 1.0, q);
        return 2.0 * kPi * (inner + outer);
    }
    const QuadSpec ql = loosened(q);
    return disc_integral(f, g, ql)
         + disc_integral([&](cplx y) { return f(1.0 / y) / (norm2(y) * norm2(y)); }, g, ql);
}

MomentMismatch first_moment_mismatch(const GammaParams& gp, const ConformalMetric& g,
                                     const QuadSpec& q)
{
    MomentMismatch m;
    const double tau = gp.tau;
    m.chi = chi_g(g, q);
    m.conjecture_value = std::exp(2.0 * (1.0 + tau) * m.chi / tau) * kPi / (1.0 + 1.0 / tau);
    m.exact_value = std::exp(gp.gamma * gp.gamma * m.chi / 2.0) * metric_mass(g, q);
    m.ratio = m.conjecture_value / m.exact_value;
    return m;
}

}  // namespace gmc
