#include "gmc/acceptance.hpp"
#include "gmc/metrics.hpp"
#include "gmc/numerics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace gmc;

namespace {

constexpr int kSchemaVersion = 1;

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::optional<double> gamma, tau;
    std::vector<double> alphas, rho;
    std::string family = "minimal";
    int pivot = 3;
    bool mass_scale = false;
    std::vector<std::string> s;
    // density
    int points = 4001;
    double tail = 1e-13;
    double smoothing = -1.0;
    std::optional<double> contour;
    // sample
    std::size_t n = 1000000;
    // asymptote
    double s_lo = 100.0, s_hi = 1000.0;
    std::size_t probe_n = 0;
    // dozz-check
    int random = 0;
    // metric
    std::string name;
    double tolerance = 1e-10;
    // suite
    std::vector<int> only;
};

std::string g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// the parsed configuration, restricted to what the command reads
json echo(const RunConfig& c)
{
    json j;
    const auto& k = c.command;
    const bool fam = k == "mellin" || k == "density" || k == "sample" || k == "asymptote";
    if (c.gamma) j["gamma"] = *c.gamma;
    if (c.tau) j["tau"] = *c.tau;
    if (!c.alphas.empty()) j["alphas"] = c.alphas;
    if (!c.rho.empty()) j["rho"] = c.rho;
    if (fam) {
        j["family"] = c.family;
        j["pivot"] = c.pivot;
        if (c.mass_scale) j["mass-scale"] = true;
    }
    if (k == "mellin" || k == "sample") j["s"] = c.s;
    if (k == "density") {
        j["points"] = c.points;
        j["tail"] = c.tail;
        j["smoothing"] = c.smoothing;
        if (c.contour) j["contour"] = *c.contour;
    }
    if (k == "sample") j["n"] = c.n;
    if (k == "asymptote") {
        j["s-lo"] = c.s_lo;
        j["s-hi"] = c.s_hi;
        j["probe-n"] = c.probe_n;
    }
    if (k == "dozz-check") j["random"] = c.random;
    if (k == "metric") {
        j["name"] = c.name;
        j["tolerance"] = c.tolerance;
    }
    if (k == "suite" && !c.only.empty()) j["only"] = c.only;
    if (k == "dozz-check" || k == "sample" || k == "asymptote" || k == "suite") j["seed"] = c.seed;
    j["format"] = c.format;
    return j;
}

// turns an echoed config back into command-line arguments
std::vector<std::string> config_args(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!j.contains("command") || !j.contains("config"))
        throw UsageError("config: expected a report with command and config");
    std::vector<std::string> args{j["command"].get<std::string>()};
    auto scalar = [](const json& v) {
        if (v.is_number_float()) return g17(v.get<double>());
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    };
    for (const auto& [key, v] : j["config"].items()) {
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back("--" + key);
            continue;
        }
        if (v.is_array()) {
            if (v.empty()) continue;
            for (const auto& x : v) {
                args.push_back("--" + key);
                args.push_back(scalar(x));
            }
            continue;
        }
        args.push_back("--" + key);
        args.push_back(scalar(v));
    }
    return args;
}

GammaParams params_of(const RunConfig& c)
{
    if (c.gamma && c.tau) throw UsageError("give --gamma or --tau, not both");
    if (c.gamma) return derive_params(*c.gamma);
    if (c.tau) {
        if (!(*c.tau > 1.0)) throw DomainError("tau must exceed 1");
        return derive_params(2.0 / std::sqrt(*c.tau));
    }
    throw UsageError("one of --gamma or --tau is required");
}

std::array<double, 3> three(const std::vector<double>& v, const char* what)
{
    if (v.size() != 3) throw UsageError(std::string(what) + " needs three values");
    return {v[0], v[1], v[2]};
}

std::array<double, 3> alphas_of(const RunConfig& c, const GammaParams& gp)
{
    if (c.alphas.empty()) return {0.4 * gp.q, 0.5 * gp.q, 0.6 * gp.q};
    return three(c.alphas, "--alphas");
}

DeformationTriple rho_of(const RunConfig& c)
{
    if (c.rho.empty()) return {};
    const auto r = three(c.rho, "--rho");
    DeformationTriple d{r[0], r[1], r[2]};
    validate(d);
    return d;
}

cplx parse_s(const std::string& text)
{
    const auto colon = text.find(':');
    try {
        std::size_t used = 0;
        const double re = std::stod(text.substr(0, colon), &used);
        if (used != (colon == std::string::npos ? text.size() : colon)) throw std::invalid_argument(text);
        if (colon == std::string::npos) return re;
        const std::string tail = text.substr(colon + 1);
        const double im = std::stod(tail, &used);
        if (used != tail.size()) throw std::invalid_argument(text);
        return {re, im};
    } catch (const std::exception&) {
        throw UsageError("bad --s value '" + text + "', expected re or re:im");
    }
}

json report_json(const DomainReport& r)
{
    auto list = [](const std::vector<Constraint>& cs) {
        json a = json::array();
        for (const auto& c : cs) a.push_back({{"name", c.name}, {"index", c.index}, {"margin", c.margin}});
        return a;
    };
    return {{"valid", r.valid}, {"violations", list(r.violations)}, {"checks", list(r.checks)}};
}

json triple_json(const InsertionTriple& t)
{
    return {{"alphas", t.alpha}, {"alpha_bar", t.alpha_bar}, {"s0", t.s0}, {"x", t.x}};
}

// the family selected by --family, in evaluator and product form
struct Family {
    GammaParams gp;
    std::unique_ptr<DoubleGammaContext> ctx;
    InsertionTriple triple;
    LogMellinEvaluator ev;
    FactorizationSpec spec;
    double expected_coefficient = 0.0;
};

Family family_of(const RunConfig& c)
{
    Family f;
    f.gp = params_of(c);
    f.ctx = std::make_unique<DoubleGammaContext>(f.gp.tau);
    const auto& ctx = *f.ctx;
    const double tau = f.gp.tau;
    f.triple = insertion_summary(f.gp, alphas_of(c, f.gp));
    f.expected_coefficient = 1.0 + 2.0 / tau;
    if (c.family == "minimal") {
        f.ev = minimal_evaluator(f.triple, f.gp, ctx, c.mass_scale);
        f.spec = minimal_factorization(f.triple, f.gp);
        if (c.mass_scale) f.spec.log_scale -= log_mass_scale(f.gp);
    } else if (c.family == "deformed") {
        const auto d = rho_of(c);
        f.ev = deformed_evaluator(f.triple, f.gp, d, ctx);
        f.spec = deformed_factorization(f.triple, f.gp, d);
    } else if (c.family == "s0zero") {
        f.triple = project_to_s0zero(f.triple, f.gp);
        f.ev = s0zero_evaluator(f.triple, f.gp, c.pivot, ctx);
        f.spec = s0zero_factorization(f.triple, f.gp, c.pivot);
        f.expected_coefficient = 1.0 / tau;
    } else if (c.family == "total-mass") {
        TotalMassVariant v;
        if (!c.rho.empty()) v = {true, rho_of(c).rho21};
        const GammaParams gp = f.gp;
        f.triple = insertion_summary(gp, {0.0, 0.0, 0.0});
        f.ev.fn = [gp, v](cplx s) { return total_mass_mellin(s, gp, v); };
        f.ev.strip_left = -tau;
        f.ev.label = "total-mass";
        f.spec = total_mass_factorization(gp, v);
    } else {
        throw UsageError("unknown family '" + c.family + "'");
    }
    return f;
}

json envelope(const RunConfig& c)
{
    return {{"schema_version", kSchemaVersion}, {"command", c.command}, {"config", echo(c)}};
}

void require_json(const RunConfig& c)
{
    if (c.format != "json") throw UsageError(c.command + " only writes json");
}

void print(const json& j)
{
    std::cout << j.dump(2) << '\n';
}

int cmd_params(const RunConfig& c)
{
    require_json(c);
    const GammaParams gp = params_of(c);
    const InsertionTriple t = insertion_summary(gp, three(c.alphas, "--alphas"));
    const DomainReport dom = validate_domain(t, gp, t.s0);
    const DomainReport xi = xi_constraints(t, gp);
    json j = envelope(c);
    j["gamma"] = gp.gamma;
    j["tau"] = gp.tau;
    j["Q"] = gp.q;
    j["insertions"] = triple_json(t);
    j["valid"] = dom.valid && xi.valid;
    j["domain"] = report_json(dom);
    j["xi_constraints"] = report_json(xi);
    print(j);
    return kOk;
}

int cmd_dozz_check(const RunConfig& c)
{
    require_json(c);
    json runs = json::array();
    bool ok = true;
    auto one = [&](const GammaParams& gp, const InsertionTriple& t, const DeformationTriple* d) {
        DoubleGammaContext ctx(gp.tau);
        const DozzCheck r = dozz_check(t, gp, ctx, d);
        const bool pass = r.residual < 1e-8;
        ok = ok && pass;
        json e{{"gamma", gp.gamma}, {"alphas", t.alpha}, {"s0", t.s0},
               {"lhs", {{"log_abs", r.lhs.log_abs}, {"sign", r.lhs.sign}}},
               {"rhs", {{"log_abs", r.rhs.log_abs}, {"sign", r.rhs.sign}}},
               {"residual", r.residual}, {"pass", pass}};
        if (d) e["rho"] = {d->rho1, d->rho21, d->rho22};
        runs.push_back(e);
    };
    if (c.random > 0) {
        std::mt19937_64 rng(c.seed);
        for (int i = 0; i < c.random; ++i) {
            const auto cfg = sample_valid_configuration(rng);
            one(cfg.gp, cfg.triple, nullptr);
        }
    } else {
        const GammaParams gp = params_of(c);
        const InsertionTriple t = insertion_summary(gp, three(c.alphas, "--alphas"));
        if (c.rho.empty()) {
            one(gp, t, nullptr);
        } else {
            const DeformationTriple d = rho_of(c);
            one(gp, t, &d);
        }
    }
    json j = envelope(c);
    j["threshold"] = 1e-8;
    j["runs"] = runs;
    j["pass"] = ok;
    print(j);
    return ok ? kOk : kCheckFailed;
}

int cmd_mellin(const RunConfig& c)
{
    if (c.s.empty()) throw UsageError("--s is required");
    const Family f = family_of(c);
    std::vector<std::pair<cplx, cplx>> rows;
    for (const auto& text : c.s) {
        const cplx s = parse_s(text);
        rows.emplace_back(s, f.ev(s));
    }
    if (c.format == "csv") {
        std::printf("s_re,s_im,log_re,log_im\n");
        for (const auto& [s, v] : rows)
            std::printf("%s,%s,%s,%s\n", g17(s.real()).c_str(), g17(s.imag()).c_str(),
                        g17(v.real()).c_str(), g17(v.imag()).c_str());
        return kOk;
    }
    json j = envelope(c);
    j["strip_left"] = f.ev.strip_left;
    json vals = json::array();
    for (const auto& [s, v] : rows) {
        json e{{"s", {s.real(), s.imag()}}, {"log_mellin", {v.real(), v.imag()}}};
        if (s.imag() == 0.0) e["value"] = std::exp(v.real());
        vals.push_back(e);
    }
    j["values"] = vals;
    print(j);
    return kOk;
}

int cmd_density(const RunConfig& c)
{
    const Family f = family_of(c);
    GridSpec spec;
    spec.n_points = c.points;
    spec.tail = c.tail;
    spec.smoothing = c.smoothing;
    const DensityGrid g = c.contour ? invert_mellin(f.ev, *c.contour, spec) : invert_mellin(f.ev, spec);
    if (c.format == "csv") {
        std::printf("abscissa,value,weight\n");
        for (std::size_t i = 0; i < g.abscissa.size(); ++i)
            std::printf("%s,%s,%s\n", g17(g.abscissa[i]).c_str(), g17(g.values[i]).c_str(),
                        g17(g.weights[i]).c_str());
        return kOk;
    }
    json j = envelope(c);
    j["total_mass"] = g.total_mass;
    j["clipped_mass"] = g.clipped_mass;
    j["most_negative"] = g.most_negative;
    j["contour_abscissa"] = g.contour_abscissa;
    j["smoothing"] = g.smoothing;
    j["t_max"] = g.t_max;
    j["n_contour"] = g.n_contour;
    j["abscissa"] = g.abscissa;
    j["values"] = g.values;
    j["weights"] = g.weights;
    print(j);
    return kOk;
}

int cmd_sample(const RunConfig& c)
{
    if (c.s.empty()) throw UsageError("--s is required");
    const Family f = family_of(c);
    std::vector<double> s;
    for (const auto& text : c.s) {
        const cplx z = parse_s(text);
        if (z.imag() != 0.0) throw UsageError("sample takes real --s values");
        s.push_back(z.real());
    }
    const auto est = monte_carlo_mellin(f.spec, s, c.n, c.seed, *f.ctx);
    if (c.format == "csv") {
        std::printf("s,estimate,stderr,n\n");
        for (const auto& e : est)
            std::printf("%s,%s,%s,%zu\n", g17(e.s).c_str(), g17(e.estimate).c_str(),
                        g17(e.stderr_).c_str(), e.n);
        return kOk;
    }
    json j = envelope(c);
    json rows = json::array();
    for (const auto& e : est) {
        const double exact = std::exp(log_mellin_factorization(e.s, f.spec, *f.ctx).real());
        rows.push_back({{"s", e.s}, {"estimate", e.estimate}, {"stderr", e.stderr_}, {"n", e.n},
                        {"analytic", exact}, {"z", e.stderr_ > 0 ? (e.estimate - exact) / e.stderr_ : 0.0}});
    }
    j["moments"] = rows;
    print(j);
    return kOk;
}

int cmd_asymptote(const RunConfig& c)
{
    require_json(c);
    const Family f = family_of(c);
    const AsymptoticFit fit = fit_asymptotic_coefficient(f.ev, c.s_lo, c.s_hi);
    json j = envelope(c);
    j["coefficient"] = fit.a;
    j["expected"] = f.expected_coefficient;
    j["linear"] = fit.b;
    j["constant"] = fit.c;
    j["max_residual"] = fit.max_residual;
    j["coefficient_halves"] = {fit.a_lower_half, fit.a_upper_half};
    if (c.probe_n > 0) {
        const SmallDeviationFit sd = small_deviation_probe(f.spec, {}, c.probe_n, c.seed, *f.ctx);
        j["small_deviation"] = {{"exponent", sd.exponent}, {"stderr", sd.stderr_},
                                {"ci", {sd.ci_low, sd.ci_high}}, {"epsilons", sd.epsilons},
                                {"log_probabilities", sd.log_probabilities}};
    }
    print(j);
    return kOk;
}

int cmd_metric(const RunConfig& c)
{
    require_json(c);
    if (c.name.empty()) throw UsageError("--name is required");
    const ConformalMetric g = builtin_metric(c.name);
    const QuadSpec q{c.tolerance, 15};
    const auto pts = metric_test_points(256, 12345);
    json j = envelope(c);
    j["metric"] = g.label;
    j["chi"] = chi_g(g, q);
    j["mass"] = metric_mass(g, q);
    const double inv = check_inversion_property(g, pts);
    j["inversion_residual"] = inv;
    if (inv < 1e-10) {
        const auto r = check_symmetry(symmetrize(g), pts);
        j["symmetrization_residuals"] = {{"reflection", r.reflection}, {"inversion", r.inversion}};
    } else {
        j["symmetrization_residuals"] = nullptr;
    }
    if (c.gamma || c.tau) {
        const auto m = first_moment_mismatch(params_of(c), g, q);
        j["first_moment_mismatch"] = {{"conjecture_value", m.conjecture_value},
                                      {"exact_value", m.exact_value}, {"ratio", m.ratio}};
    }
    print(j);
    return kOk;
}

int cmd_suite(const RunConfig& c)
{
    std::vector<int> ids = c.only;
    if (ids.empty())
        for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
    for (int id : ids)
        if (id < 1 || id > kCriterionCount) throw UsageError("no criterion " + std::to_string(id));
    std::vector<CriterionResult> results;
    bool ok = true;
    for (int id : ids) {
        results.push_back(run_criterion(id, c.seed));
        ok = ok && results.back().passed;
        std::fprintf(stderr, "%s %d %s\n", results.back().passed ? "PASS" : "FAIL", id,
                     results.back().name.c_str());
    }
    if (c.format == "csv") {
        std::printf("id,name,passed,seconds\n");
        for (const auto& r : results)
            std::printf("%d,%s,%d,%s\n", r.id, r.name.c_str(), r.passed ? 1 : 0, g17(r.seconds).c_str());
        return ok ? kOk : kCheckFailed;
    }
    json j = envelope(c);
    json arr = json::array();
    for (const auto& r : results)
        arr.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                       {"seconds", r.seconds}});
    j["criteria"] = arr;
    j["pass"] = ok;
    print(j);
    return ok ? kOk : kCheckFailed;
}

void add_format(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_params(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--gamma", c.gamma, "coupling in (0,2)");
    sub->add_option("--tau", c.tau, "4/gamma^2, alternative to --gamma");
    sub->add_option("--alphas", c.alphas, "three insertion weights")->delimiter(',');
}

void add_family(CLI::App* sub, RunConfig& c)
{
    add_params(sub, c);
    sub->add_option("--family", c.family, "minimal, deformed, s0zero or total-mass")
        ->check(CLI::IsMember({"minimal", "deformed", "s0zero", "total-mass"}));
    sub->add_option("--rho", c.rho, "deformation rho1,rho21,rho22")->delimiter(',');
    sub->add_option("--pivot", c.pivot, "pivot insertion for s0zero")->check(CLI::Range(1, 3));
    sub->add_flag("--mass-scale", c.mass_scale, "minimal family including the mass scale");
}

}  // namespace

int main(int argc, char** argv)
{
    RunConfig c;
    CLI::App app{"Mellin-transform toolkit for the DOZZ probability families"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "replay the config echoed in a json report");

    auto* params = app.add_subcommand("params", "derived parameters and domain reports");
    add_params(params, c);
    add_format(params, c);

    auto* dozz = app.add_subcommand("dozz-check", "DOZZ identity at s0");
    add_params(dozz, c);
    dozz->add_option("--rho", c.rho, "deformation rho1,rho21,rho22")->delimiter(',');
    dozz->add_option("--random", c.random, "check this many random configurations");
    dozz->add_option("--seed", c.seed);
    add_format(dozz, c);

    auto* mellin = app.add_subcommand("mellin", "log Mellin transform at the given s");
    add_family(mellin, c);
    mellin->add_option("--s", c.s, "re or re:im, repeatable")->delimiter(',');
    add_format(mellin, c);

    auto* density = app.add_subcommand("density", "density grid by Mellin inversion");
    add_family(density, c);
    density->add_option("--points", c.points)->check(CLI::Range(16, 1 << 20));
    density->add_option("--tail", c.tail);
    density->add_option("--smoothing", c.smoothing, "log-space window width, negative for automatic");
    density->add_option("--contour", c.contour, "contour abscissa");
    add_format(density, c);

    auto* sample = app.add_subcommand("sample", "Monte Carlo Mellin moments of the product form");
    add_family(sample, c);
    sample->add_option("--s", c.s, "real moment orders")->delimiter(',');
    sample->add_option("--n", c.n)->check(CLI::PositiveNumber);
    sample->add_option("--seed", c.seed);
    add_format(sample, c);

    auto* asym = app.add_subcommand("asymptote", "s log s coefficient and small-deviation exponent");
    add_family(asym, c);
    asym->add_option("--s-lo", c.s_lo);
    asym->add_option("--s-hi", c.s_hi);
    asym->add_option("--probe-n", c.probe_n, "draws for the small-deviation probe, 0 skips it");
    asym->add_option("--seed", c.seed);
    add_format(asym, c);

    auto* metric = app.add_subcommand("metric", "chi, mass and symmetry report for a built-in metric");
    metric->add_option("--name", c.name, "g_plus, round, scaled(m,l), symmetrized(m)");
    metric->add_option("--gamma", c.gamma, "also report the first-moment mismatch");
    metric->add_option("--tau", c.tau);
    metric->add_option("--tolerance", c.tolerance);
    add_format(metric, c);

    auto* suite = app.add_subcommand("suite", "run the acceptance criteria");
    suite->add_option("--only", c.only, "criterion ids")->delimiter(',');
    suite->add_option("--seed", c.seed);
    add_format(suite, c);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                std::vector<std::string> rest(args.begin(), args.begin() + i);
                rest.insert(rest.end(), args.begin() + i + 2, args.end());
                args = config_args(args[i + 1]);
                args.insert(args.end(), rest.begin(), rest.end());
                break;
            }
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }

    try {
        c.command = app.get_subcommands().front()->get_name();
        if (c.command == "params") return cmd_params(c);
        if (c.command == "dozz-check") return cmd_dozz_check(c);
        if (c.command == "mellin") return cmd_mellin(c);
        if (c.command == "density") return cmd_density(c);
        if (c.command == "sample") return cmd_sample(c);
        if (c.command == "asymptote") return cmd_asymptote(c);
        if (c.command == "metric") return cmd_metric(c);
        return cmd_suite(c);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failed: %s\n", e.what());
        return kCheckFailed;
    }
}
