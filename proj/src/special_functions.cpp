#include "gmc/special_functions.hpp"

#include <boost/math/special_functions/bernoulli.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace gmc {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr int kMaxTerms = 90;

double lgamma_signed(double x, int* sign)
{
    int s = 1;
    double v = ::lgamma_r(x, &s);
    if (sign) *sign = s;
    return v;
}

// Bernoulli numbers with B_1 = -1/2, as long double
std::vector<long double> bernoulli_table(int n)
{
    std::vector<long double> b(n + 1, 0.0L);
    b[0] = 1.0L;
    if (n >= 1) b[1] = -0.5L;
    for (int k = 1; 2 * k <= n; ++k)
        b[2 * k] = boost::math::bernoulli_b2n<long double>(k);
    return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Euler gamma
// ---------------------------------------------------------------------------

double log_gamma(double x)
{
    if (!(x > 0.0))
        throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
    return lgamma_signed(x, nullptr);
}

cplx log_gamma(cplx z)
{
    if (!(z.real() > 0.0))
        throw DomainError("log_gamma: real part must be positive");
    if (z.imag() == 0.0) return {lgamma_signed(z.real(), nullptr), 0.0};

    // shift up, then Stirling; the sum of principal logs keeps the branch
    // continuous from the positive real axis
    cplx acc = 0.0;
    while (std::abs(z) < 16.0) {
        acc -= std::log(z);
        z += 1.0;
    }
    static const double coef[] = {
        1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
        -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0, 43867.0 / 244188.0,
        -174611.0 / 125400.0, 77683.0 / 5796.0};
    cplx zi = 1.0 / z;
    cplx zi2 = zi * zi;
    cplx series = 0.0;
    cplx p = zi;
    for (double c : coef) {
        series += c * p;
        p *= zi2;
    }
    return acc + (z - 0.5) * std::log(z) - z + kHalfLog2Pi + series;
}

double log_abs_gamma(double x, int* sign)
{
    if (x <= 0.0 && x == std::floor(x))
        throw DomainError("log_abs_gamma: pole at " + std::to_string(x));
    return lgamma_signed(x, sign);
}

double log_l(double z)
{
    if (!(z > 0.0 && z < 1.0)) throw DomainError("log_l: need 0 < z < 1");
    return log_gamma(z) - log_gamma(1.0 - z);
}

// ---------------------------------------------------------------------------
// Barnes double gamma, periods (1, tau)
//
// log Gamma_2(w) = d/ds zeta_2(s, w)|_{s=0}.  Expanding
//   1/((1-e^{-t})(1-e^{-tau t})) = sum_k a_k t^{k-2}
// in the Mellin representation of zeta_2 gives, for large |w|,
//   a0 w^2 (3/4 - log(w)/2) + a1 (w log w - w) - a2 log w + sum_{k>=3} a_k (k-3)! w^{2-k}.
// ---------------------------------------------------------------------------

DoubleGammaContext::DoubleGammaContext(double tau, double tolerance)
    : tau_(tau), tolerance_(tolerance)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw DomainError("DoubleGammaContext: tau must be positive");
    if (!(tolerance >= 1e-14 && tolerance <= 1e-6))
        throw std::invalid_argument("DoubleGammaContext: tolerance must lie in [1e-14, 1e-6]");

    const int n = kMaxTerms + 3;
    auto bern = bernoulli_table(n);
    std::vector<long double> b(n + 1);
    long double fact = 1.0L;
    for (int j = 0; j <= n; ++j) {
        if (j > 0) fact *= j;
        b[j] = ((j % 2) ? -bern[j] : bern[j]) / fact;
    }
    const long double t = tau;
    std::vector<long double> a(n + 1, 0.0L);
    for (int k = 0; k <= n; ++k) {
        long double s = 0.0L;
        long double tp = 1.0L;
        for (int l = 0; l <= k; ++l) {
            s += b[k - l] * b[l] * tp;
            tp *= t;
        }
        a[k] = s / t;
    }
    a0_ = static_cast<double>(a[0]);
    a1_ = static_cast<double>(a[1]);
    a2_ = static_cast<double>(a[2]);
    long double f = 1.0L;
    for (int k = 3; k <= n; ++k) {
        if (k > 3) f *= (k - 3);
        tail_.push_back(static_cast<double>(a[k] * f));
    }

    const double big = std::max(1.0, tau);
    radius_ = big * (-std::log(tolerance) / (2.0 * std::numbers::pi) + 3.0);
    step_ = tau >= 1.0 ? tau : 1.0;
}

int DoubleGammaContext::shift_count(cplx w) const
{
    int n = 0;
    while (std::abs(w) < radius_) {
        w += step_;
        ++n;
    }
    return n;
}

template <class T>
T DoubleGammaContext::asymptotic_tail(T w) const
{
    T z = T(1.0) / w;
    T sum = 0.0;
    T p = z;  // w^{2-k} at k = 3
    const double target = 1e-3 * tolerance_;
    for (std::size_t i = 0; i < tail_.size(); ++i) {
        T term = tail_[i] * p;
        sum += term;
        if (std::abs(term) < target && i > 2) return sum;
        p *= z;
    }
    throw ConvergenceError("log_double_gamma: asymptotic series did not reach tolerance");
}

template <class T>
T DoubleGammaContext::asymptotic(T w) const
{
    T lw = std::log(w);
    return a0_ * w * w * (0.75 - 0.5 * lw) + a1_ * (w * lw - w) - a2_ * lw + asymptotic_tail(w);
}

template <class T>
T DoubleGammaContext::shifted(T w) const
{
    T acc = 0.0;
    if (tau_ >= 1.0) {
        // Gamma_2(w)/Gamma_2(w+tau) = Gamma(w)/sqrt(2 pi)
        while (std::abs(w) < radius_) {
            acc += log_gamma(w) - kHalfLog2Pi;
            w += tau_;
        }
    } else {
        // Gamma_2(w)/Gamma_2(w+1) = tau^{w/tau-1/2} Gamma(w/tau)/sqrt(2 pi)
        const double lt = std::log(tau_);
        while (std::abs(w) < radius_) {
            acc += (w / tau_ - 0.5) * lt + log_gamma(w / tau_) - kHalfLog2Pi;
            w += 1.0;
        }
    }
    return acc + asymptotic(w);
}

double DoubleGammaContext::log_gamma2(double w) const
{
    if (!(w > 0.0))
        throw DomainError("log_double_gamma: argument must be positive, got " + std::to_string(w));
    return shifted(w);
}

cplx DoubleGammaContext::log_gamma2(cplx w) const
{
    if (!(w.real() > 0.0))
        throw DomainError("log_double_gamma: real part must be positive");
    if (w.imag() == 0.0) return {shifted(w.real()), 0.0};
    return shifted(w);
}

cplx DoubleGammaContext::log_gamma2_step(cplx w, double delta) const
{
    if (!(w.real() > 0.0) || !(w.real() + delta > 0.0))
        throw DomainError("log_double_gamma: real part must be positive");
    const cplx v = w + delta;
    if (std::abs(w) < radius_ || std::abs(v) < radius_ || std::abs(delta) > 0.25 * std::abs(w))
        return log_gamma2(v) - log_gamma2(w);

    // log1p(delta / w), Kahan's form keeps it accurate for small ratios
    const cplx z = delta / w;
    const cplx one_plus = 1.0 + z;
    const cplx ell = one_plus == cplx(1.0) ? z : std::log(one_plus) * z / (one_plus - 1.0);
    const cplx lw = std::log(w);
    const cplx head = a0_ * ((2.0 * w + delta) * delta * (0.75 - 0.5 * lw) - 0.5 * v * v * ell)
                    + a1_ * (delta * lw + v * ell - delta) - a2_ * ell;
    return head + asymptotic_tail(v) - asymptotic_tail(w);
}

double log_double_gamma(double w, const DoubleGammaContext& ctx) { return ctx.log_gamma2(w); }

cplx log_double_gamma(cplx w, const DoubleGammaContext& ctx) { return ctx.log_gamma2(w); }

double log_abs_double_gamma(double w, const DoubleGammaContext& ctx, int* sign)
{
    int sg = 1;
    double acc = 0.0;
    while (w <= 0.0) {
        int s = 1;
        acc += log_abs_gamma(w, &s) - kHalfLog2Pi;
        sg *= s;
        w += ctx.tau();
    }
    if (sign) *sign = sg;
    return acc + ctx.log_gamma2(w);
}

// ---------------------------------------------------------------------------
// Physicist's double gamma and Upsilon
// ---------------------------------------------------------------------------

namespace {

void check_context(const GammaParams& gp, const DoubleGammaContext& ctx)
{
    if (std::abs(gp.tau - ctx.tau()) > 1e-12 * gp.tau)
        throw std::invalid_argument("double gamma context built for a different tau");
}

}  // namespace

double log_abs_physicist_double_gamma(double x, const GammaParams& gp,
                                      const DoubleGammaContext& ctx, int* sign)
{
    check_context(gp, ctx);
    const double g = gp.gamma;
    const double d = x - 0.5 * gp.q;
    return 0.5 * d * d * std::log(2.0 / g) + log_abs_double_gamma(2.0 * x / g, ctx, sign)
         - ctx.log_gamma2(gp.q / g);
}

double log_physicist_double_gamma(double x, const GammaParams& gp, const DoubleGammaContext& ctx)
{
    if (!(x > 0.0))
        throw DomainError("log_physicist_double_gamma: argument must be positive");
    return log_abs_physicist_double_gamma(x, gp, ctx, nullptr);
}

double log_abs_upsilon(double x, const GammaParams& gp, const DoubleGammaContext& ctx, int* sign)
{
    int s1 = 1, s2 = 1;
    double v = -log_abs_physicist_double_gamma(x, gp, ctx, &s1)
             - log_abs_physicist_double_gamma(gp.q - x, gp, ctx, &s2);
    if (sign) *sign = s1 * s2;
    return v;
}

double upsilon(double x, const GammaParams& gp, const DoubleGammaContext& ctx)
{
    if (x == 0.0 || x == gp.q) return 0.0;
    if (!(x > 0.0 && x < gp.q))
        throw DomainError("upsilon: argument outside [0, Q]");
    return std::exp(-log_physicist_double_gamma(x, gp, ctx)
                    - log_physicist_double_gamma(gp.q - x, gp, ctx));
}

double upsilon_prime_zero(const GammaParams& gp, const DoubleGammaContext& ctx)
{
    return 2.0 * std::numbers::pi * std::exp(-2.0 * log_physicist_double_gamma(gp.q, gp, ctx));
}

}  // namespace gmc
