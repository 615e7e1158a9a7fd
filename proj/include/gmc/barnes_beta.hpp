#pragma once

#include "gmc/special_functions.hpp"

#include <cstdint>
#include <vector>

namespace gmc {

struct Beta21Params {
    double b0 = 0.0;
    double b1 = 0.0;
    double tau = 0.0;
};

struct Beta22Params {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double tau = 0.0;
};

// generalized Frechet Y(b, c): E[Y^s] = Gamma(b + s/c)/Gamma(b)
struct FrechetParams {
    double b = 0.0;
    double c = 0.0;
};

// rho in [-1, 0]; s0 is the point whose Mellin value is kept
struct DeformationScalar {
    double rho = 0.0;
    double s0 = 0.0;
};

// throw std::invalid_argument when the existence conditions fail
void validate(const Beta21Params& p);
void validate(const Beta22Params& p);
void validate(const FrechetParams& p);

cplx log_mellin_beta21(cplx s, const Beta21Params& p, const DoubleGammaContext& ctx);
cplx log_mellin_beta22(cplx s, const Beta22Params& p, const DoubleGammaContext& ctx);
cplx log_mellin_frechet(cplx s, const FrechetParams& p);

double frechet_density(double y, const FrechetParams& p);
std::vector<double> sample_frechet(const FrechetParams& p, std::size_t n, std::uint64_t seed);

// Mellin transforms of beta21^{1+rho}(b0 - rho s0, b1) beta21^{-rho}(b0, b1)
// and beta22^{1+rho}(b0 - rho s0, b1, b2) beta22^{-rho}(b0+b1+b2, -b1, -b2)
cplx log_mellin_deformed21(cplx s, const Beta21Params& p, const DeformationScalar& d,
                           const DoubleGammaContext& ctx);
cplx log_mellin_deformed22(cplx s, const Beta22Params& p, const DeformationScalar& d,
                           const DoubleGammaContext& ctx);

// the two factors of each deformation, as plain parameter records
Beta21Params deformed21_leading(const Beta21Params& p, const DeformationScalar& d);
Beta22Params deformed22_leading(const Beta22Params& p, const DeformationScalar& d);
Beta22Params deformed22_trailing(const Beta22Params& p);

}  // namespace gmc
