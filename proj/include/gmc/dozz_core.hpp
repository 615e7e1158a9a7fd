#pragma once

#include "gmc/special_functions.hpp"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace gmc {

struct InsertionTriple {
    std::array<double, 3> alpha{};
    double alpha_bar = 0.0;
    double s0 = 0.0;
    std::array<double, 3> x{};
};

// index is 1..3 for per-insertion constraints, 0 otherwise; margin is the
// signed distance to the boundary (positive inside)
struct Constraint {
    std::string name;
    int index = 0;
    double margin = 0.0;
};

struct DomainReport {
    bool valid = true;
    std::vector<Constraint> violations;
    std::vector<Constraint> checks;

    void add(std::string name, int index, double margin);
    const Constraint* find(const std::string& name, int index = 0) const;
};

// a log-magnitude together with the sign of the underlying real number
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;
};

GammaParams derive_params(double gamma);
InsertionTriple insertion_summary(const GammaParams& gp, const std::array<double, 3>& alphas);

DomainReport validate_domain(const InsertionTriple& t, const GammaParams& gp, double s);
DomainReport alpha_positivity(const InsertionTriple& t);
DomainReport check_lemma_inequalities(const InsertionTriple& t, const GammaParams& gp, double s);
DomainReport xi_constraints(const InsertionTriple& t, const GammaParams& gp);

SignedLog log_dozz_constant(const InsertionTriple& t, const GammaParams& gp,
                            const DoubleGammaContext& ctx);
// same constant assembled from the double gamma factors written in x-coordinates
SignedLog log_dozz_constant_xi(const InsertionTriple& t, const GammaParams& gp,
                               const DoubleGammaContext& ctx);

// log(pi tau^{1/tau} Gamma(1/tau)/Gamma(1-1/tau))
double log_mass_scale(const GammaParams& gp);

// gamma ~ U(0.2, 1.9), alpha_k ~ U(0, Q), rejected until s0 is in the domain
// and every alpha_k is positive
struct Configuration {
    GammaParams gp;
    InsertionTriple triple;
};
Configuration sample_valid_configuration(std::mt19937_64& rng);

}  // namespace gmc
