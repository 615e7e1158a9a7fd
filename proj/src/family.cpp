#include "gmc/family.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace gmc {

namespace {

// log Gamma_2(s + a) - log Gamma_2(a)
cplx R(cplx s, double a, const DoubleGammaContext& ctx)
{
    if (s == cplx(0.0, 0.0)) return 0.0;
    return ctx.log_gamma2(s + a) - ctx.log_gamma2(a);
}

// s must satisfy mc/mc2 and the insertions bin1; s0 itself may sit outside
// (alpha = 0 gives s0 = -(1+tau)), the double gamma arguments are still checked
void require_family_domain(cplx s, const InsertionTriple& t, const GammaParams& gp)
{
    auto r = validate_domain(t, gp, s.real());
    if (!r.valid) {
        const auto& v = r.violations.front();
        throw DomainError("family: constraint " + v.name
                          + (v.index ? "[" + std::to_string(v.index) + "]" : std::string())
                          + " violated");
    }
}

struct Shorthand {
    double e;                 // 1 + tau
    double ag;                // alpha_bar / gamma
    std::array<double, 3> a;  // 2 alpha_k / gamma
    std::array<double, 3> B;  // (2/gamma)(alpha_k - alpha_bar/2)
};

Shorthand shorthand(const InsertionTriple& t, const GammaParams& gp)
{
    Shorthand h;
    h.e = 1.0 + gp.tau;
    h.ag = t.alpha_bar / gp.gamma;
    for (int k = 0; k < 3; ++k) {
        h.a[k] = 2.0 * t.alpha[k] / gp.gamma;
        h.B[k] = 2.0 / gp.gamma * (t.alpha[k] - 0.5 * t.alpha_bar);
    }
    return h;
}

Factor frechet(double b, double c, double power = 1.0)
{
    return {FactorKind::frechet, FrechetParams{b, c}, power};
}

Factor beta21(double b0, double b1, double tau, double power = 1.0)
{
    return {FactorKind::beta21, Beta21Params{b0, b1, tau}, power};
}

Factor beta22(double b0, double b1, double b2, double tau, double power = 1.0)
{
    return {FactorKind::beta22, Beta22Params{b0, b1, b2, tau}, power};
}

}  // namespace

const char* to_string(FactorKind k)
{
    switch (k) {
    case FactorKind::frechet: return "frechet";
    case FactorKind::beta21: return "beta21";
    case FactorKind::beta22: return "beta22";
    }
    return "?";
}

cplx log_mellin_factor(cplx s, const Factor& f, const DoubleGammaContext& ctx)
{
    if (f.power == 0.0) return 0.0;
    const cplx u = f.power * s;
    switch (f.kind) {
    case FactorKind::frechet: return log_mellin_frechet(u, std::get<FrechetParams>(f.params));
    case FactorKind::beta21: return log_mellin_beta21(u, std::get<Beta21Params>(f.params), ctx);
    case FactorKind::beta22: return log_mellin_beta22(u, std::get<Beta22Params>(f.params), ctx);
    }
    return 0.0;
}

cplx log_mellin_factorization(cplx s, const FactorizationSpec& spec, const DoubleGammaContext& ctx)
{
    cplx v = s * spec.log_scale;
    for (const auto& f : spec.factors) v += log_mellin_factor(s, f, ctx);
    return v;
}

double factor_strip_left(const Factor& f)
{
    double lo = 0.0;
    switch (f.kind) {
    case FactorKind::frechet: {
        const auto& p = std::get<FrechetParams>(f.params);
        lo = -p.b * p.c;
        break;
    }
    case FactorKind::beta21: lo = -std::get<Beta21Params>(f.params).b0; break;
    case FactorKind::beta22: {
        const auto& p = std::get<Beta22Params>(f.params);
        lo = -std::min({p.b0, p.b0 + p.b1, p.b0 + p.b2, p.b0 + p.b1 + p.b2});
        break;
    }
    }
    if (f.power > 0.0) return lo / f.power;
    return -std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// minimal solution
// ---------------------------------------------------------------------------

cplx log_mellin_minimal(cplx s, const InsertionTriple& t, const GammaParams& gp,
                        const DoubleGammaContext& ctx)
{
    require_family_domain(s, t, gp);
    const Shorthand h = shorthand(t, gp);
    cplx v = log_gamma(1.0 + s / gp.tau) + R(s, h.e, ctx) - R(s, 2.0 * h.e - h.ag, ctx);
    for (int k = 0; k < 3; ++k) v += R(s, h.e - h.a[k], ctx) - R(s, h.e + h.B[k], ctx);
    return v;
}

cplx log_mellin_M(cplx s, const InsertionTriple& t, const GammaParams& gp,
                  const DoubleGammaContext& ctx)
{
    return log_mellin_minimal(s, t, gp, ctx) - s * log_mass_scale(gp);
}

FactorizationSpec minimal_factorization(const InsertionTriple& t, const GammaParams& gp)
{
    const Shorthand h = shorthand(t, gp);
    const double tau = gp.tau;
    FactorizationSpec spec{tau, 0.0, {}};
    spec.factors = {
        frechet(1.0, tau),
        beta22(h.e, h.B[0], h.B[2], tau),
        beta21(h.e - h.a[0], h.e + h.B[0], tau),
        beta21(h.e - h.a[2], -h.B[0], tau),
    };
    return spec;
}

FactorizationSpec minimal_factorization_xi(const InsertionTriple& t, const GammaParams& gp)
{
    const double tau = gp.tau, e = 1.0 + tau, s0 = t.s0;
    const auto& x = t.x;
    FactorizationSpec spec{tau, 0.0, {}};
    spec.factors = {
        frechet(1.0, tau),
        beta22(e, -x[0], -x[2], tau),
        beta21(x[0] - s0, e - x[0], tau),
        beta21(x[2] - s0, x[0], tau),
    };
    return spec;
}

// ---------------------------------------------------------------------------
// three-parameter deformation
// ---------------------------------------------------------------------------

void validate(const DeformationTriple& d)
{
    for (double r : {d.rho1, d.rho21, d.rho22})
        if (!(r > -1.0 && r <= 0.0))
            throw std::invalid_argument("deformation parameters must lie in (-1, 0]");
}

cplx log_mellin_deformed(cplx s, const InsertionTriple& t, const GammaParams& gp,
                         const DeformationTriple& d, const DoubleGammaContext& ctx)
{
    validate(d);
    require_family_domain(s, t, gp);
    const Shorthand h = shorthand(t, gp);
    const double e = h.e, s0 = t.s0;
    cplx v = log_gamma(1.0 + s / gp.tau);
    {
        const double r = d.rho1, c0 = -r * s0;
        const cplx u = s * (1.0 + r), w = -r * s;
        v += R(u, e + c0, ctx) - R(u, e + h.B[0] + c0, ctx) - R(u, e + h.B[2] + c0, ctx)
           + R(u, e - h.a[1] + c0, ctx);
        v += R(w, e - h.a[1], ctx) - R(w, e + h.B[0], ctx) - R(w, e + h.B[2], ctx) + R(w, e, ctx);
    }
    {
        const double r = d.rho21, c0 = -r * s0;
        const cplx u = s * (1.0 + r), w = -r * s;
        v += R(u, e - h.a[0] + c0, ctx) - R(u, 2.0 * e - h.ag + c0, ctx);
        v += R(w, e - h.a[0], ctx) - R(w, 2.0 * e - h.ag, ctx);
    }
    {
        const double r = d.rho22, c0 = -r * s0;
        const cplx u = s * (1.0 + r), w = -r * s;
        v += -R(u, e + h.B[1] + c0, ctx) + R(u, e - h.a[2] + c0, ctx);
        v += R(w, e - h.a[2], ctx) - R(w, e + h.B[1], ctx);
    }
    return v;
}

FactorizationSpec deformed_factorization(const InsertionTriple& t, const GammaParams& gp,
                                         const DeformationTriple& d)
{
    validate(d);
    const Shorthand h = shorthand(t, gp);
    const double tau = gp.tau, e = h.e, s0 = t.s0;
    FactorizationSpec spec{tau, 0.0, {}};
    spec.factors = {
        frechet(1.0, tau),
        beta22(e - d.rho1 * s0, h.B[0], h.B[2], tau, 1.0 + d.rho1),
        beta22(e - h.a[1], -h.B[0], -h.B[2], tau, -d.rho1),
        beta21(e - h.a[0] - d.rho21 * s0, e + h.B[0], tau, 1.0 + d.rho21),
        beta21(e - h.a[0], e + h.B[0], tau, -d.rho21),
        beta21(e - h.a[2] - d.rho22 * s0, -h.B[0], tau, 1.0 + d.rho22),
        beta21(e - h.a[2], -h.B[0], tau, -d.rho22),
    };
    return spec;
}

// ---------------------------------------------------------------------------
// s0 = 0 modification
// ---------------------------------------------------------------------------

namespace {

void require_s0zero(const InsertionTriple& t, int pivot_index)
{
    if (pivot_index < 1 || pivot_index > 3)
        throw std::invalid_argument("pivot_index must be 1, 2 or 3");
    if (!(std::abs(t.s0) < 1e-12))
        throw std::invalid_argument("s0zero family requires |s0| < 1e-12");
}

}  // namespace

cplx log_mellin_s0zero(cplx s, const InsertionTriple& t, const GammaParams& gp, int pivot_index,
                       const DoubleGammaContext& ctx)
{
    require_s0zero(t, pivot_index);
    const double e = 1.0 + gp.tau;
    const double ak = 2.0 * t.alpha[pivot_index - 1] / gp.gamma;
    return log_mellin_minimal(s, t, gp, ctx) + R(s, 2.0 * e - ak, ctx) - R(s, e - ak, ctx);
}

FactorizationSpec s0zero_factorization(const InsertionTriple& t, const GammaParams& gp,
                                       int pivot_index)
{
    require_s0zero(t, pivot_index);
    const Shorthand h = shorthand(t, gp);
    const int k = pivot_index - 1;
    const int j = (k == 0) ? 1 : 0;
    const double tau = gp.tau, e = h.e;
    FactorizationSpec spec{tau, 0.0, {}};
    spec.factors = {
        frechet(1.0, tau),
        beta22(e, h.B[j], h.B[k], tau),
        beta22(e - h.a[j], e + h.B[j], -h.B[k], tau),
    };
    return spec;
}

InsertionTriple project_to_s0zero(const InsertionTriple& t, const GammaParams& gp)
{
    if (!(t.alpha_bar > 0.0)) throw std::invalid_argument("project_to_s0zero: need alpha_bar > 0");
    const double f = 2.0 * gp.q / t.alpha_bar;
    InsertionTriple p = insertion_summary(gp, {t.alpha[0] * f, t.alpha[1] * f, t.alpha[2] * f});
    p.alpha_bar = 2.0 * gp.q;
    p.s0 = 0.0;
    for (int k = 0; k < 3; ++k) p.x[k] = (p.alpha_bar - 2.0 * p.alpha[k]) / gp.gamma;
    return p;
}

// ---------------------------------------------------------------------------
// total mass (alpha = 0)
// ---------------------------------------------------------------------------

cplx total_mass_mellin(cplx s, const GammaParams& gp, TotalMassVariant v)
{
    const double tau = gp.tau, e = 1.0 + tau;
    if (!(s.real() > -tau)) throw DomainError("total_mass_mellin: need Re(s) > -tau");
    if (!v.deformed) {
        const double lscale = std::log(std::numbers::pi) + log_l(1.0 / tau);
        return -s * lscale + log_gamma(1.0 + s / tau) + log_gamma(s + e) - log_gamma(e)
             + log_gamma(1.0 + (s + e) / tau) - log_gamma(1.0 + e / tau);
    }
    const double r = v.rho21;
    if (!(r > -1.0 && r <= 0.0)) throw std::invalid_argument("rho21 must lie in (-1, 0]");
    const double p = 1.0 + r;
    return s * std::log(tau) / tau + log_gamma(1.0 + s / tau)
         + log_gamma(p * (s + e)) - log_gamma(p * e)
         + log_gamma(1.0 + p * (s + e) / tau) - log_gamma(1.0 + p * e / tau)
         + log_gamma(-r * s + e) - log_gamma(e)
         + log_gamma(1.0 + (-r * s + e) / tau) - log_gamma(1.0 + e / tau);
}

FactorizationSpec total_mass_factorization(const GammaParams& gp, TotalMassVariant v)
{
    const double tau = gp.tau, e = 1.0 + tau;
    FactorizationSpec spec{tau, 0.0, {}};
    if (!v.deformed) {
        spec.log_scale = -(std::log(std::numbers::pi) + log_l(1.0 / tau));
        spec.factors = {frechet(1.0, tau), frechet(e, 1.0), frechet(1.0 + e / tau, tau)};
        return spec;
    }
    const double r = v.rho21, p = 1.0 + r;
    spec.log_scale = std::log(tau) / tau;
    spec.factors = {
        frechet(1.0, tau),
        frechet(p * e, 1.0, p),
        frechet(1.0 + p * e / tau, tau, p),
        frechet(e, 1.0, -r),
        frechet(1.0 + e / tau, tau, -r),
    };
    return spec;
}

// ---------------------------------------------------------------------------
// DOZZ identity
// ---------------------------------------------------------------------------

DozzCheck dozz_check(const InsertionTriple& t, const GammaParams& gp, const DoubleGammaContext& ctx,
                     const DeformationTriple* d)
{
    DozzCheck out;
    const double s0 = t.s0;
    const cplx m = d ? log_mellin_deformed(s0, t, gp, *d, ctx) - s0 * log_mass_scale(gp)
                     : log_mellin_M(s0, t, gp, ctx);
    out.lhs.log_abs = log_abs_gamma(s0, &out.lhs.sign) + m.real();
    out.rhs = log_dozz_constant(t, gp, ctx);
    out.residual = out.lhs.sign == out.rhs.sign ? std::abs(out.lhs.log_abs - out.rhs.log_abs)
                                                : std::numeric_limits<double>::infinity();
    return out;
}

// ---------------------------------------------------------------------------
// evaluators
// ---------------------------------------------------------------------------

double family_strip_left(const InsertionTriple& t, const GammaParams& gp)
{
    double lo = -gp.tau;
    for (double a : t.alpha) lo = std::max(lo, -2.0 / gp.gamma * (gp.q - a));
    return lo;
}

LogMellinEvaluator minimal_evaluator(const InsertionTriple& t, const GammaParams& gp,
                                     const DoubleGammaContext& ctx, bool include_mass_scale)
{
    LogMellinEvaluator ev;
    ev.strip_left = family_strip_left(t, gp);
    ev.label = include_mass_scale ? "M" : "minimal";
    if (include_mass_scale)
        ev.fn = [t, gp, ctx](cplx s) { return log_mellin_M(s, t, gp, ctx); };
    else
        ev.fn = [t, gp, ctx](cplx s) { return log_mellin_minimal(s, t, gp, ctx); };
    return ev;
}

LogMellinEvaluator deformed_evaluator(const InsertionTriple& t, const GammaParams& gp,
                                      const DeformationTriple& d, const DoubleGammaContext& ctx)
{
    validate(d);
    LogMellinEvaluator ev;
    ev.strip_left = family_strip_left(t, gp);
    ev.label = "deformed";
    ev.fn = [t, gp, d, ctx](cplx s) { return log_mellin_deformed(s, t, gp, d, ctx); };
    return ev;
}

LogMellinEvaluator s0zero_evaluator(const InsertionTriple& t, const GammaParams& gp, int pivot_index,
                                    const DoubleGammaContext& ctx)
{
    require_s0zero(t, pivot_index);
    LogMellinEvaluator ev;
    ev.strip_left = family_strip_left(t, gp);
    ev.label = "s0zero";
    ev.fn = [t, gp, pivot_index, ctx](cplx s) {
        return log_mellin_s0zero(s, t, gp, pivot_index, ctx);
    };
    return ev;
}

LogMellinEvaluator factorization_evaluator(const FactorizationSpec& spec,
                                           const DoubleGammaContext& ctx)
{
    LogMellinEvaluator ev;
    for (const auto& f : spec.factors) {
        ev.strip_left = std::max(ev.strip_left, factor_strip_left(f));
        if (f.power < 0.0) {
            double lo = 0.0;
            if (f.kind == FactorKind::frechet) {
                const auto& p = std::get<FrechetParams>(f.params);
                lo = -p.b * p.c;
            } else {
                lo = factor_strip_left({f.kind, f.params, 1.0});
            }
            ev.strip_right = std::min(ev.strip_right, lo / f.power);
        }
    }
    ev.label = "product";
    ev.fn = [spec, ctx](cplx s) { return log_mellin_factorization(s, spec, ctx); };
    return ev;
}

LogMellinEvaluator factor_evaluator(const Factor& f, const DoubleGammaContext& ctx)
{
    FactorizationSpec spec{ctx.tau(), 0.0, {f}};
    auto ev = factorization_evaluator(spec, ctx);
    ev.label = to_string(f.kind);
    return ev;
}

// ---------------------------------------------------------------------------
// asymptotic coefficient
// ---------------------------------------------------------------------------

namespace {

Eigen::Vector3d fit3(const std::vector<double>& s, const std::vector<double>& y,
                     std::size_t from, std::size_t to)
{
    const auto n = static_cast<Eigen::Index>(to - from);
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = s[from + i];
        A(i, 0) = x * std::log(x);
        A(i, 1) = x;
        A(i, 2) = 1.0;
        b(i) = y[from + i];
    }
    return A.colPivHouseholderQr().solve(b);
}

}  // namespace

AsymptoticFit fit_asymptotic_coefficient(const LogMellinEvaluator& ev, double s_lo, double s_hi,
                                         int n_points)
{
    if (!(s_lo > 0.0 && s_hi > s_lo) || n_points < 12)
        throw std::invalid_argument("fit_asymptotic_coefficient: bad range or too few points");
    std::vector<double> s(n_points), y(n_points);
    for (int i = 0; i < n_points; ++i) {
        s[i] = s_lo * std::pow(s_hi / s_lo, double(i) / (n_points - 1));
        y[i] = ev(s[i]);
    }
    const auto n = static_cast<std::size_t>(n_points);
    Eigen::Vector3d c = fit3(s, y, 0, n);
    AsymptoticFit out{c(0), c(1), c(2), 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (c(0) * s[i] * std::log(s[i]) + c(1) * s[i] + c(2));
        out.max_residual = std::max(out.max_residual, std::abs(r));
    }
    out.a_lower_half = fit3(s, y, 0, n / 2)(0);
    out.a_upper_half = fit3(s, y, n / 2, n)(0);
    if (std::abs(out.a_lower_half - out.a_upper_half) > 0.05 * std::abs(out.a))
        throw ConvergenceError("fit_asymptotic_coefficient: coefficient drifts across the range, "
                               "move the range further out");
    return out;
}

}  // namespace gmc
