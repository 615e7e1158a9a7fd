#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace gmc {

using cplx = std::complex<double>;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// gamma in (0,2), tau = 4/gamma^2, q = 2/gamma + gamma/2
struct GammaParams {
    double gamma = 0.0;
    double tau = 0.0;
    double q = 0.0;
};

// Precomputed asymptotic data for log Gamma_2(w|tau) with periods (1, tau).
// Immutable after construction, so one instance can be shared across threads.
class DoubleGammaContext {
public:
    explicit DoubleGammaContext(double tau, double tolerance = 1e-14);

    double tau() const { return tau_; }
    double tolerance() const { return tolerance_; }
    // |w| threshold beyond which the asymptotic series is used directly
    double radius() const { return radius_; }
    // number of functional-equation shifts applied before the series is used
    int shift_count(cplx w) const;

    double log_gamma2(double w) const;
    cplx log_gamma2(cplx w) const;
    // log Gamma_2(w + delta) - log Gamma_2(w), without the cancellation of the
    // O(|w|^2 log|w|) leading terms at large |w|
    cplx log_gamma2_step(cplx w, double delta) const;

private:
    template <class T> T asymptotic(T w) const;
    template <class T> T asymptotic_tail(T w) const;
    template <class T> T shifted(T w) const;

    double tau_;
    double tolerance_;
    double radius_;
    double step_;
    double a0_, a1_, a2_;
    std::vector<double> tail_;   // a_k (k-3)! for k >= 3
};

double log_gamma(double x);
cplx log_gamma(cplx z);
// log|Gamma(x)| for real x off the poles; *sign receives the sign of Gamma(x)
double log_abs_gamma(double x, int* sign);
// log l(z), l(z) = Gamma(z)/Gamma(1-z), for 0 < z < 1
double log_l(double z);

double log_double_gamma(double w, const DoubleGammaContext& ctx);
cplx log_double_gamma(cplx w, const DoubleGammaContext& ctx);
// real-line continuation through Gamma_2(w) = Gamma_2(w+tau) Gamma(w)/sqrt(2 pi)
double log_abs_double_gamma(double w, const DoubleGammaContext& ctx, int* sign);

double log_physicist_double_gamma(double x, const GammaParams& gp, const DoubleGammaContext& ctx);
double log_abs_physicist_double_gamma(double x, const GammaParams& gp,
                                      const DoubleGammaContext& ctx, int* sign);

// defined on [0, Q]; exact zero at both endpoints
double upsilon(double x, const GammaParams& gp, const DoubleGammaContext& ctx);
// log|Upsilon(x)| for any real x that is not a zero of Upsilon
double log_abs_upsilon(double x, const GammaParams& gp, const DoubleGammaContext& ctx, int* sign);
double upsilon_prime_zero(const GammaParams& gp, const DoubleGammaContext& ctx);

}  // namespace gmc
