#pragma once

#include "gmc/family.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gmc {

class PositivityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    int n_points = 4001;
    // tail probability bound used to size the log-abscissa range
    double tail = 1e-13;
    // Gaussian smoothing width in log-space; negative selects it automatically
    // (zero unless the transform decays too slowly along the contour)
    double smoothing = -1.0;
    // lower bound on the automatic smoothing width
    double smoothing_floor = 0.0;
    // evaluate at these abscissae instead of the automatic log-spaced grid
    std::vector<double> abscissa;
};

struct DensityGrid {
    std::vector<double> abscissa;   // increasing, log-spaced when automatic
    std::vector<double> values;     // density of X
    std::vector<double> weights;    // quadrature weights in x
    double total_mass = 0.0;
    double clipped_mass = 0.0;
    double most_negative = 0.0;     // minimum of the log-space density before clipping
    double contour_abscissa = 0.0;
    double smoothing = 0.0;
    double t_max = 0.0;
    int n_contour = 0;
};

struct MomentEstimate {
    double s = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// default abscissa: midpoint of the strip intersected with (strip_left/2, 1)
double default_contour_abscissa(const LogMellinEvaluator& ev);

DensityGrid invert_mellin(const LogMellinEvaluator& ev, double contour_abscissa,
                          const GridSpec& spec = {});
DensityGrid invert_mellin(const LogMellinEvaluator& ev, const GridSpec& spec = {});

// quadrature of x^s against the grid; *tail receives the share carried by the
// two outermost cells
double grid_moment(const DensityGrid& g, double s, double* tail = nullptr);

std::vector<double> sample_from_density(const DensityGrid& g, std::size_t n, std::uint64_t seed);

// draws of log X for X = exp(log_scale) prod X_i^{power_i}; beta factors are
// sampled from inverted densities. A nonzero tilt draws from the law
// proportional to x^{tilt} dP instead: Frechet factors exactly, beta factors
// by inverting the shifted transform E[X^{power tilt + z}]
class ProductSampler {
public:
    ProductSampler(const FactorizationSpec& spec, const DoubleGammaContext& ctx,
                   const GridSpec& grid = {}, double tilt = 0.0);
    std::vector<double> sample_log(std::size_t n, std::uint64_t seed) const;
    // also returns log dP/dQ per draw so weighted averages estimate the untilted law
    std::vector<double> sample_log(std::size_t n, std::uint64_t seed,
                                   std::vector<double>& log_weights) const;
    const std::vector<std::optional<DensityGrid>>& grids() const { return grids_; }
    double tilt() const { return tilt_; }

private:
    FactorizationSpec spec_;
    double tilt_ = 0.0;
    std::vector<std::optional<DensityGrid>> grids_;
    std::vector<double> factor_tilt_;     // tilt applied to each factor variable
    std::vector<double> log_norm_;        // log E[X_i^{factor_tilt}]
};

std::vector<MomentEstimate> monte_carlo_mellin(const FactorizationSpec& spec,
                                               const std::vector<double>& s_points, std::size_t n,
                                               std::uint64_t seed, const DoubleGammaContext& ctx);
std::vector<MomentEstimate> empirical_mellin(const std::vector<double>& log_samples,
                                             const std::vector<double>& s_points);

struct SmallDeviationFit {
    double exponent = 0.0;
    double stderr_ = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<double> epsilons;       // the points that entered the fit
    std::vector<double> log_probabilities;
};

// fit of log(-log P(X^{-1} <= eps)) = -p log eps + const over eps with at least
// 30 hits; empty epsilons selects thresholds from the sample
SmallDeviationFit small_deviation_fit(const std::vector<double>& log_samples,
                                      std::vector<double> epsilons);

// same fit with tail probabilities from tilted sampling: each threshold gets
// its own batch of n / #thresholds draws tilted by the s solving
// d/ds log E[X^s] = -log eps; empty epsilons uses tilts log-spaced over
// [kProbeTiltLow, kProbeTiltHigh]
inline constexpr double kProbeTiltLow = 50.0;
inline constexpr double kProbeTiltHigh = 2000.0;
SmallDeviationFit small_deviation_probe(const FactorizationSpec& spec,
                                        const std::vector<double>& epsilons, std::size_t n,
                                        std::uint64_t seed, const DoubleGammaContext& ctx);

// worker count for the parallel kernels; GMC_THREADS caps it
unsigned worker_count();

}  // namespace gmc
