#pragma once

#include "gmc/barnes_beta.hpp"
#include "gmc/dozz_core.hpp"

#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace gmc {

// s -> log E[X^s], analytic for strip_left < Re(s) < strip_right
struct LogMellinEvaluator {
    std::function<cplx(cplx)> fn;
    double strip_left = -std::numeric_limits<double>::infinity();
    double strip_right = std::numeric_limits<double>::infinity();
    std::string label;

    cplx operator()(cplx s) const { return fn(s); }
    double operator()(double s) const { return fn(cplx(s, 0.0)).real(); }
};

struct DeformationTriple {
    double rho1 = 0.0;
    double rho21 = 0.0;
    double rho22 = 0.0;
};

enum class FactorKind { frechet, beta21, beta22 };

struct Factor {
    FactorKind kind = FactorKind::frechet;
    std::variant<FrechetParams, Beta21Params, Beta22Params> params;
    double power = 1.0;   // the factor enters the product as X^power
};

// X = exp(log_scale) * prod_i X_i^{power_i}, independent factors
struct FactorizationSpec {
    double tau = 0.0;
    double log_scale = 0.0;
    std::vector<Factor> factors;
};

const char* to_string(FactorKind k);

// log E[X_i^{power s}] for one factor
cplx log_mellin_factor(cplx s, const Factor& f, const DoubleGammaContext& ctx);
// sum over factors plus s * log_scale
cplx log_mellin_factorization(cplx s, const FactorizationSpec& spec, const DoubleGammaContext& ctx);
// Re(s) bound below which some factor's Mellin transform ceases to exist
double factor_strip_left(const Factor& f);

cplx log_mellin_minimal(cplx s, const InsertionTriple& t, const GammaParams& gp,
                        const DoubleGammaContext& ctx);
cplx log_mellin_M(cplx s, const InsertionTriple& t, const GammaParams& gp,
                  const DoubleGammaContext& ctx);
FactorizationSpec minimal_factorization(const InsertionTriple& t, const GammaParams& gp);
// the same factorization in x-coordinates
FactorizationSpec minimal_factorization_xi(const InsertionTriple& t, const GammaParams& gp);

void validate(const DeformationTriple& d);
cplx log_mellin_deformed(cplx s, const InsertionTriple& t, const GammaParams& gp,
                         const DeformationTriple& d, const DoubleGammaContext& ctx);
FactorizationSpec deformed_factorization(const InsertionTriple& t, const GammaParams& gp,
                                         const DeformationTriple& d);

cplx log_mellin_s0zero(cplx s, const InsertionTriple& t, const GammaParams& gp, int pivot_index,
                       const DoubleGammaContext& ctx);
FactorizationSpec s0zero_factorization(const InsertionTriple& t, const GammaParams& gp,
                                       int pivot_index);
// rescales the insertions so that alpha_bar = 2Q exactly (s0 = 0)
InsertionTriple project_to_s0zero(const InsertionTriple& t, const GammaParams& gp);

// alpha = 0 closed forms: the minimal variant is E[M^s] including the mass
// scale, the deformed variant is the deformed family itself
struct TotalMassVariant {
    bool deformed = false;
    double rho21 = 0.0;
};
cplx total_mass_mellin(cplx s, const GammaParams& gp, TotalMassVariant v = {});
FactorizationSpec total_mass_factorization(const GammaParams& gp, TotalMassVariant v = {});

// DOZZ identity at s0: log Gamma(s0) + log E[M^{s0}] against log C
struct DozzCheck {
    SignedLog lhs;
    SignedLog rhs;
    double residual = 0.0;   // |log|lhs| - log|rhs||, infinity on a sign mismatch
};
DozzCheck dozz_check(const InsertionTriple& t, const GammaParams& gp, const DoubleGammaContext& ctx,
                     const DeformationTriple* d = nullptr);

// strip left edge of the families: max(-tau, -(2/gamma)(Q - alpha_k))
double family_strip_left(const InsertionTriple& t, const GammaParams& gp);

LogMellinEvaluator minimal_evaluator(const InsertionTriple& t, const GammaParams& gp,
                                     const DoubleGammaContext& ctx, bool include_mass_scale = false);
LogMellinEvaluator deformed_evaluator(const InsertionTriple& t, const GammaParams& gp,
                                      const DeformationTriple& d, const DoubleGammaContext& ctx);
LogMellinEvaluator s0zero_evaluator(const InsertionTriple& t, const GammaParams& gp, int pivot_index,
                                    const DoubleGammaContext& ctx);
LogMellinEvaluator factorization_evaluator(const FactorizationSpec& spec,
                                           const DoubleGammaContext& ctx);
LogMellinEvaluator factor_evaluator(const Factor& f, const DoubleGammaContext& ctx);

// least-squares fit of log M(s) = a s log s + b s + c on log-spaced s
struct AsymptoticFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double max_residual = 0.0;
    double a_lower_half = 0.0;
    double a_upper_half = 0.0;
};
AsymptoticFit fit_asymptotic_coefficient(const LogMellinEvaluator& ev, double s_lo, double s_hi,
                                         int n_points = 48);

}  // namespace gmc
