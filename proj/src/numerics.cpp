#include "gmc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>

namespace gmc {

unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GMC_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

namespace {

// runs body(i) for i in [0, n); each index is handled exactly once, so the
// result does not depend on the number of workers
template <class F>
void parallel_for(std::size_t n, F&& body)
{
    const unsigned w = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t block = (n + w - 1) / w;
    for (unsigned k = 0; k < w; ++k) {
        const std::size_t lo = k * block, hi = std::min(n, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

double safe_eval(const LogMellinEvaluator& ev, double s, bool* ok)
{
    try {
        const double v = ev(s);
        *ok = std::isfinite(v);
        return v;
    } catch (const DomainError&) {
        *ok = false;
        return 0.0;
    }
}

// Chernoff bounds on U = log X from the Mellin transform on the real axis
std::pair<double, double> log_support(const LogMellinEvaluator& ev, double tail)
{
    const double lt = -std::log(tail);
    double hi = std::numeric_limits<double>::infinity();
    const double right_cap = std::min(ev.strip_right, 5000.0);
    for (double s = 0.02; s < right_cap; s *= 1.25) {
        bool ok;
        const double v = safe_eval(ev, s, &ok);
        if (ok) hi = std::min(hi, (v + lt) / s);
    }
    double lo = -std::numeric_limits<double>::infinity();
    const double m = std::isfinite(ev.strip_left) ? -ev.strip_left : 200.0;
    for (int k = 1; k <= 400; ++k) {
        const double s = m * (1.0 - std::pow(0.97, k));
        bool ok;
        const double v = safe_eval(ev, -s, &ok);
        if (ok) lo = std::max(lo, -(v + lt) / s);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
        throw ConvergenceError("invert_mellin: could not bound the support of log X");
    return {lo, hi};
}

}  // namespace

double default_contour_abscissa(const LogMellinEvaluator& ev)
{
    const double lo = std::isfinite(ev.strip_left) ? 0.5 * ev.strip_left : -1.0;
    const double hi = std::min(ev.strip_right, 1.0);
    return 0.5 * (lo + hi);
}

DensityGrid invert_mellin(const LogMellinEvaluator& ev, const GridSpec& spec)
{
    return invert_mellin(ev, default_contour_abscissa(ev), spec);
}

namespace {

struct Contour {
    double c = 0.0;
    double l0 = 0.0;              // log M(c)
    std::vector<cplx> m;          // M(c + i t_j) / M(c), windowed
    double abs_sum = 0.0;
};

// samples t_j = j h until the windowed transform has decayed below 1e-17 or
// t reaches t_cap (0 = no cap); returns whether it decayed
bool scan_contour(const LogMellinEvaluator& ev, double h, double t_cap, Contour& k)
{
    constexpr std::size_t batch = 256, tail_run = 32, max_points = 1u << 20;
    k.l0 = ev(k.c);
    k.m.assign(1, cplx(1.0, 0.0));
    while (true) {
        const std::size_t j0 = k.m.size();
        std::vector<cplx> chunk(batch);
        parallel_for(batch, [&](std::size_t i) {
            chunk[i] = std::exp(ev(cplx(k.c, (j0 + i) * h)) - k.l0);
        });
        k.m.insert(k.m.end(), chunk.begin(), chunk.end());
        bool decayed = true;
        for (std::size_t j = k.m.size() - tail_run; j < k.m.size(); ++j)
            if (std::abs(k.m[j]) >= 1e-17) decayed = false;
        if (decayed) return true;
        if (t_cap > 0.0 && (k.m.size() - 1) * h >= t_cap) return false;
        if (k.m.size() >= max_points) return false;
    }
}

}  // namespace

DensityGrid invert_mellin(const LogMellinEvaluator& ev, double c, const GridSpec& spec)
{
    if (!(c > ev.strip_left && c < ev.strip_right))
        throw DomainError("invert_mellin: contour abscissa outside the strip");
    const bool automatic = spec.abscissa.empty();
    if (automatic && spec.n_points < 3)
        throw std::invalid_argument("invert_mellin: need at least 3 grid points");
    std::vector<double> u;
    if (!automatic) {
        for (double x : spec.abscissa) {
            if (!(x > 0.0)) throw DomainError("invert_mellin: abscissa must be positive");
            u.push_back(std::log(x));
        }
        if (!std::is_sorted(u.begin(), u.end()) || u.size() < 2)
            throw std::invalid_argument("invert_mellin: abscissa must be increasing");
    }
    const auto [lo0, hi0] = log_support(ev, spec.tail);

    // a second contour near the left edge of the strip keeps the e^{-cu}
    // amplification of rounding errors small deep in the left tail
    std::vector<Contour> contours(1);
    contours[0].c = c;
    if (std::isfinite(ev.strip_left) && 0.75 * ev.strip_left < c - 1e-3) {
        contours.emplace_back();
        contours[1].c = 0.75 * ev.strip_left;
    }

    double sigma = spec.smoothing > 0.0 ? spec.smoothing : 0.0;
    double h = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        // smoothing spreads mass by a few sigma past the support bounds
        const double lo = lo0 - 8.0 * sigma, hi = hi0 + 8.0 * sigma;
        if (automatic) {
            u.resize(spec.n_points);
            for (int i = 0; i < spec.n_points; ++i) u[i] = lo + (hi - lo) * i / (spec.n_points - 1);
        }
        const double range = std::max(hi, u.back()) - std::min(lo, u.front());
        const double du = (u.back() - u.front()) / static_cast<double>(u.size() - 1);
        h = 2.0 * std::numbers::pi / (2.0 * range + 10.0);
        const double sigma_auto = std::max(1.5 * du, spec.smoothing_floor);
        double t_cap = 0.0;
        if (sigma > 0.0) t_cap = 8.6 / sigma;
        else if (spec.smoothing < 0.0) t_cap = 8.6 / sigma_auto;
        bool decayed = true;
        for (auto& k : contours) decayed = scan_contour(ev, h, t_cap, k) && decayed;
        if (decayed || sigma > 0.0) break;
        if (spec.smoothing == 0.0)
            throw ConvergenceError("invert_mellin: transform does not decay along the contour");
        sigma = sigma_auto;
    }
    for (auto& k : contours) {
        k.l0 += 0.5 * sigma * sigma * k.c * k.c;
        for (std::size_t j = 0; j < k.m.size(); ++j) {
            const double t = j * h;
            // window exp(sigma^2 s^2 / 2) at s = c + it, i.e. the law of X e^G with
            // G ~ N(0, sigma^2); every contour then inverts the same function
            k.m[j] *= std::exp(0.5 * sigma * sigma * cplx(-t * t, 2.0 * k.c * t));
            if (j > 0) k.abs_sum += 2.0 * std::abs(k.m[j]);
        }
    }

    // trapezoid along each line, p(u) = e^{-cu} / (2 pi) int M(c+it) e^{-itu} dt;
    // per point the contour with the smaller rounding amplification wins
    const std::size_t nu = u.size();
    std::vector<double> p(nu);
    parallel_for(nu, [&](std::size_t i) {
        const double ui = u[i];
        double best_err = std::numeric_limits<double>::infinity();
        for (const auto& k : contours) {
            const double amp = std::exp(k.l0 - k.c * ui) * h / (2.0 * std::numbers::pi);
            const double err = amp * (1.0 + k.abs_sum);
            if (!(err < best_err)) continue;
            const cplx step = std::polar(1.0, -h * ui);
            cplx z = 1.0;
            double acc = 0.0;
            for (std::size_t j = 1; j < k.m.size(); ++j) {
                if ((j & 255u) == 0) z = std::polar(1.0, -h * ui * static_cast<double>(j));
                else z *= step;
                acc += k.m[j].real() * z.real() - k.m[j].imag() * z.imag();
            }
            p[i] = amp * (1.0 + 2.0 * acc);
            best_err = err;
        }
    });

    std::vector<double> wu(nu, 0.0);
    for (std::size_t i = 0; i + 1 < nu; ++i) {
        const double d = 0.5 * (u[i + 1] - u[i]);
        wu[i] += d;
        wu[i + 1] += d;
    }

    DensityGrid g;
    g.contour_abscissa = c;
    g.smoothing = sigma;
    g.t_max = static_cast<double>(contours[0].m.size() - 1) * h;
    g.n_contour = 0;
    for (const auto& k : contours) g.n_contour += static_cast<int>(k.m.size());
    g.most_negative = *std::min_element(p.begin(), p.end());
    for (std::size_t i = 0; i < nu; ++i) {
        if (p[i] < 0.0) {
            if (p[i] < -1e-8) {
                char msg[160];
                std::snprintf(msg, sizeof msg, "invert_mellin: negative density lobe %.3g at log x = %.6g",
                              p[i], u[i]);
                throw PositivityError(msg);
            }
            g.clipped_mass += -p[i] * wu[i];
            p[i] = 0.0;
        }
    }
    if (g.clipped_mass > 1e-6)
        throw PositivityError("invert_mellin: clipped mass " + std::to_string(g.clipped_mass));
    g.abscissa.resize(nu);
    g.values.resize(nu);
    g.weights.resize(nu);
    for (std::size_t i = 0; i < nu; ++i) {
        const double x = std::exp(u[i]);
        g.abscissa[i] = x;
        g.values[i] = p[i] / x;
        g.weights[i] = wu[i] * x;
        g.total_mass += wu[i] * p[i];
    }
    return g;
}

double grid_moment(const DensityGrid& g, double s, double* tail)
{
    const std::size_t n = g.abscissa.size();
    if (n < 2) throw std::invalid_argument("grid_moment: empty grid");
    double total = 0.0;
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        terms[i] = g.weights[i] * g.values[i] * std::pow(g.abscissa[i], s);
        total += terms[i];
    }
    if (tail) *tail = (std::abs(terms.front()) + std::abs(terms.back())) / std::abs(total);
    return total;
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

namespace {

// inverse CDF of the piecewise linear density in log x
class GridInverter {
public:
    explicit GridInverter(const DensityGrid& g)
    {
        const std::size_t n = g.abscissa.size();
        u_.resize(n);
        p_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            u_[i] = std::log(g.abscissa[i]);
            p_[i] = g.values[i] * g.abscissa[i];
        }
        cum_.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            cum_[i + 1] = cum_[i] + 0.5 * (u_[i + 1] - u_[i]) * (p_[i] + p_[i + 1]);
        if (!(cum_.back() > 0.0)) throw std::invalid_argument("sample_from_density: zero mass grid");
    }

    double log_draw(double v) const
    {
        const double target = v * cum_.back();
        auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
        std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum_.begin() - 1, 0));
        j = std::min(j, cum_.size() - 2);
        const double r = target - cum_[j];
        const double d = u_[j + 1] - u_[j];
        const double a = 0.5 * (p_[j + 1] - p_[j]) / d;
        const double b = p_[j];
        double t;
        if (std::abs(a) * d < 1e-14 * (b + 1e-300)) t = b > 0.0 ? r / b : 0.5 * d;
        else t = 2.0 * r / (b + std::sqrt(std::max(b * b + 4.0 * a * r, 0.0)));
        return u_[j] + std::clamp(t, 0.0, d);
    }

private:
    std::vector<double> u_, p_, cum_;
};

constexpr std::size_t kChunk = 1u << 16;

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

std::vector<double> sample_from_density(const DensityGrid& g, std::size_t n, std::uint64_t seed)
{
    GridInverter inv(g);
    std::vector<double> out(n);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        auto rng = chunk_rng(seed, 0, c);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const std::size_t hi = std::min(n, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < hi; ++i) out[i] = std::exp(inv.log_draw(unif(rng)));
    });
    return out;
}

ProductSampler::ProductSampler(const FactorizationSpec& spec, const DoubleGammaContext& ctx,
                               const GridSpec& grid, double tilt)
    : spec_(spec), tilt_(tilt)
{
    const std::size_t m = spec.factors.size();
    grids_.resize(m);
    factor_tilt_.assign(m, 0.0);
    log_norm_.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const auto& f = spec.factors[k];
        if (f.power == 0.0) continue;
        if (f.kind == FactorKind::frechet) {
            // Y = Z^{1/c}, Z ~ Gamma(b): the tilt moves Z to Gamma(b + power tilt / c);
            // left untilted when that leaves b <= 0
            const auto& p = std::get<FrechetParams>(f.params);
            if (tilt != 0.0 && p.b + f.power * tilt / p.c > 0.0) {
                factor_tilt_[k] = f.power * tilt;
                log_norm_[k] = log_mellin_frechet(factor_tilt_[k], p).real();
            }
            continue;
        }
        auto ev = factor_evaluator(Factor{f.kind, f.params, 1.0}, ctx);
        const double c0 = f.power * tilt;
        if (c0 != 0.0) {
            if (!(c0 > ev.strip_left && c0 < ev.strip_right))
                throw DomainError("ProductSampler: tilt outside the strip of a factor");
            const double l0 = ev(c0);
            LogMellinEvaluator shifted{[ev, c0, l0](cplx z) { return ev(z + c0) - l0; },
                                       ev.strip_left - c0, ev.strip_right - c0, ev.label};
            factor_tilt_[k] = c0;
            log_norm_[k] = l0;
            // the saddle point of the tilted law is the origin of the shifted
            // transform; smoothing well below 1/c0 only perturbs the weights slightly
            GridSpec g = grid;
            g.n_points = std::min(grid.n_points, 2001);
            g.smoothing_floor = std::max(grid.smoothing_floor, 0.25 / std::abs(c0));
            grids_[k] = invert_mellin(shifted, 0.0, g);
            continue;
        }
        grids_[k] = invert_mellin(ev, grid);
    }
}

std::vector<double> ProductSampler::sample_log(std::size_t n, std::uint64_t seed) const
{
    std::vector<double> unused;
    return sample_log(n, seed, unused);
}

std::vector<double> ProductSampler::sample_log(std::size_t n, std::uint64_t seed,
                                               std::vector<double>& log_weights) const
{
    std::vector<std::optional<GridInverter>> inv(spec_.factors.size());
    for (std::size_t k = 0; k < inv.size(); ++k)
        if (grids_[k]) inv[k].emplace(*grids_[k]);
    log_weights.assign(n, 0.0);

    std::vector<double> out(n, spec_.log_scale);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (std::size_t k = 0; k < spec_.factors.size(); ++k) {
            const auto& f = spec_.factors[k];
            if (f.power == 0.0) continue;
            auto rng = chunk_rng(seed, k + 1, c);
            const double ft = factor_tilt_[k], ln = log_norm_[k];
            double lx = 0.0;
            if (f.kind == FactorKind::frechet) {
                const auto& p = std::get<FrechetParams>(f.params);
                std::gamma_distribution<double> gam(p.b + ft / p.c, 1.0);
                for (std::size_t i = lo; i < hi; ++i) {
                    lx = std::log(gam(rng)) / p.c;
                    out[i] += f.power * lx;
                    if (ft != 0.0) log_weights[i] += ln - ft * lx;
                }
            } else {
                std::uniform_real_distribution<double> unif(0.0, 1.0);
                for (std::size_t i = lo; i < hi; ++i) {
                    lx = inv[k]->log_draw(unif(rng));
                    out[i] += f.power * lx;
                    if (ft != 0.0) log_weights[i] += ln - ft * lx;
                }
            }
        }
    });
    return out;
}

std::vector<MomentEstimate> empirical_mellin(const std::vector<double>& log_samples,
                                             const std::vector<double>& s_points)
{
    std::vector<MomentEstimate> out;
    const std::size_t n = log_samples.size();
    for (double s : s_points) {
        MomentEstimate e{s, 0.0, 0.0, n};
        if (n == 0) {
            out.push_back(e);
            continue;
        }
        double mean = 0.0;
        for (double l : log_samples) mean += std::exp(s * l);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double l : log_samples) {
            const double d = std::exp(s * l) - mean;
            var += d * d;
        }
        e.estimate = mean;
        e.stderr_ = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
        out.push_back(e);
    }
    return out;
}

std::vector<MomentEstimate> monte_carlo_mellin(const FactorizationSpec& spec,
                                               const std::vector<double>& s_points, std::size_t n,
                                               std::uint64_t seed, const DoubleGammaContext& ctx)
{
    ProductSampler sampler(spec, ctx);
    return empirical_mellin(sampler.sample_log(n, seed), s_points);
}

// ---------------------------------------------------------------------------
// small deviations
// ---------------------------------------------------------------------------

namespace {

void regress(SmallDeviationFit& fit, const std::vector<double>& xs, const std::vector<double>& ys)
{
    const std::size_t m = xs.size();
    if (m < 3) throw std::runtime_error("small_deviation_fit: insufficient tail data");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.exponent = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - my - fit.exponent * (xs[i] - mx);
        rss += r * r;
    }
    fit.stderr_ = m > 2 ? std::sqrt(rss / (m - 2) / sxx) : 0.0;
    fit.ci_low = fit.exponent - 2.0 * fit.stderr_;
    fit.ci_high = fit.exponent + 2.0 * fit.stderr_;
}

}  // namespace

SmallDeviationFit small_deviation_fit(const std::vector<double>& log_samples,
                                      std::vector<double> epsilons)
{
    const std::size_t n = log_samples.size();
    if (n == 0) throw std::runtime_error("small_deviation_fit: insufficient tail data");
    std::vector<double> sorted(log_samples);
    std::sort(sorted.begin(), sorted.end());
    if (epsilons.empty()) {
        // thresholds at tail probabilities from 1e-1 down to 30/n
        const double q_lo = 30.0 / static_cast<double>(n), q_hi = 0.1;
        const int k = 16;
        for (int i = 0; i < k && q_lo < q_hi; ++i) {
            const double q = q_hi * std::pow(q_lo / q_hi, double(i) / (k - 1));
            const auto idx = static_cast<std::size_t>(std::floor((1.0 - q) * static_cast<double>(n)));
            epsilons.push_back(std::exp(-sorted[std::min(idx, n - 1)]));
        }
    }
    SmallDeviationFit fit;
    std::vector<double> xs, ys;
    for (double eps : epsilons) {
        if (!(eps > 0.0)) continue;
        const double thr = -std::log(eps);
        const auto hits = static_cast<std::size_t>(sorted.end()
                                                   - std::lower_bound(sorted.begin(), sorted.end(), thr));
        if (hits < 30 || hits >= n) continue;
        const double prob = static_cast<double>(hits) / static_cast<double>(n);
        xs.push_back(thr);
        ys.push_back(std::log(-std::log(prob)));
        fit.epsilons.push_back(eps);
        fit.log_probabilities.push_back(std::log(prob));
    }
    regress(fit, xs, ys);
    return fit;
}

SmallDeviationFit small_deviation_probe(const FactorizationSpec& spec,
                                        const std::vector<double>& epsilons, std::size_t n,
                                        std::uint64_t seed, const DoubleGammaContext& ctx)
{
    const auto ev = factorization_evaluator(spec, ctx);
    const double s_cap = std::min(0.999 * ev.strip_right, 1e5);
    auto slope = [&](double s) {
        const double d = 1e-5 * std::max(1.0, s);
        return (ev(s + d) - ev(s - d)) / (2.0 * d);
    };

    // (threshold, tilt) pairs
    std::vector<std::pair<double, double>> levels;
    if (epsilons.empty()) {
        const int k = 12;
        for (int i = 0; i < k; ++i) {
            const double s = std::min(kProbeTiltLow * std::pow(kProbeTiltHigh / kProbeTiltLow, double(i) / (k - 1)),
                                      s_cap);
            levels.emplace_back(slope(s), s);
        }
    } else {
        for (double eps : epsilons) {
            if (!(eps > 0.0)) continue;
            const double y = -std::log(eps);
            double lo = std::min(1e-3, 0.5 * s_cap), hi = lo;
            if (slope(lo) >= y) {
                levels.emplace_back(y, 0.0);
                continue;
            }
            while (hi < s_cap && slope(hi) < y) hi = std::min(2.0 * hi, s_cap);
            for (int it = 0; it < 100 && hi - lo > 1e-10 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (slope(mid) < y ? lo : hi) = mid;
            }
            levels.emplace_back(y, hi);
        }
    }
    const std::size_t per_level = n / std::max<std::size_t>(levels.size(), 1);
    SmallDeviationFit fit;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto [y, s] = levels[k];
        const ProductSampler tilted(spec, ctx, {}, s);
        std::vector<double> lw;
        const auto draws = tilted.sample_log(per_level, seed + 0x9e3779b97f4a7c15ull * (k + 1), lw);
        // log of the mean weight over hits
        std::size_t hits = 0;
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < draws.size(); ++i)
            if (draws[i] >= y) {
                ++hits;
                top = std::max(top, lw[i]);
            }
        if (hits < 30 || hits >= per_level) continue;
        double acc = 0.0;
        for (std::size_t i = 0; i < draws.size(); ++i)
            if (draws[i] >= y) acc += std::exp(lw[i] - top);
        const double log_p = top + std::log(acc) - std::log(static_cast<double>(per_level));
        if (!(log_p < 0.0)) continue;
        xs.push_back(y);
        ys.push_back(std::log(-log_p));
        fit.epsilons.push_back(std::exp(-y));
        fit.log_probabilities.push_back(log_p);
    }
    regress(fit, xs, ys);
    return fit;
}

}  // namespace gmc
