#include "skdv/experiment.hpp"

#include "skdv/convolution.hpp"
#include "skdv/cutoff.hpp"
#include "skdv/estimates.hpp"
#include "skdv/io.hpp"
#include "skdv/noise.hpp"
#include "skdv/parallel.hpp"
#include "skdv/rng.hpp"
#include "skdv/solver.hpp"
#include "skdv/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace skdv {

using json = nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}

namespace {

const std::vector<std::pair<ExperimentKind, const char*>> kKindNames = {
    {ExperimentKind::Simulate, "simulate"},
    {ExperimentKind::SampleNoise, "sample-noise"},
    {ExperimentKind::StochasticConvolution, "stochastic-convolution"},
    {ExperimentKind::Norm, "norm"},
    {ExperimentKind::VerifyEstimates, "verify-estimates"},
    {ExperimentKind::ConvergenceStudy, "convergence-study"},
};

const std::vector<std::string> kEstimates = {"resonance", "strichartz", "bilinear", "near-curve",
                                             "linear",    "r-alpha",    "trilinear", "embeddings"};

// Key naming the variant of a kind, empty when the kind has one parameter block.
std::string variant_key(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Simulate: return "scenario";
        case ExperimentKind::StochasticConvolution:
        case ExperimentKind::Norm:
        case ExperimentKind::ConvergenceStudy: return "study";
        default: return "";
    }
}

json solver_block(int n_max, double dt, double tolerance, int max_sweeps) {
    return {{"n_max", n_max},     {"dt", dt},           {"delta", 0.05},          {"p", 2.5},
            {"tolerance", tolerance}, {"max_sweeps", max_sweeps}, {"phi", "phi-of-beta0"}};
}

json deterministic_block() {
    return {{"n_max", 128}, {"T", 0.1}, {"steps", 128}, {"reference_refinement", 16}, {"tolerance", 1e-12},
            {"max_sweeps", 80}};
}

std::string join_path(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

bool is_integer(const json& v) { return v.is_number_integer() || v.is_number_unsigned(); }

// Fills defaults and rejects unknown keys or mistyped values. A null default admits null or a number.
json resolve(const json& defaults, const json& given, const std::string& path) {
    if (!given.is_object()) throw ConfigError(path, "expected an object");
    json out = defaults;
    for (auto it = given.begin(); it != given.end(); ++it) {
        const std::string here = join_path(path, it.key());
        if (!defaults.contains(it.key())) throw ConfigError(here, "unknown key");
        const json& d = defaults[it.key()];
        const json& v = it.value();
        auto check_scalar = [](const json& dflt, const json& val, const std::string& where) {
            if (is_integer(dflt)) {
                if (!is_integer(val)) throw ConfigError(where, "expected an integer");
            } else if (dflt.is_number()) {
                if (!val.is_number()) throw ConfigError(where, "expected a number");
            } else if (dflt.is_boolean()) {
                if (!val.is_boolean()) throw ConfigError(where, "expected true or false");
            } else if (dflt.is_string()) {
                if (!val.is_string()) throw ConfigError(where, "expected a string");
            } else if (dflt.is_null()) {
                if (!val.is_null() && !val.is_number()) throw ConfigError(where, "expected a number or null");
            }
        };
        if (d.is_object()) {
            out[it.key()] = resolve(d, v, here);
        } else if (d.is_array()) {
            if (!v.is_array()) throw ConfigError(here, "expected an array");
            const json element = d.empty() ? json(0.0) : d.front();
            json items = json::array();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string at = here + "[" + std::to_string(i) + "]";
                if (element.is_object()) {
                    items.push_back(resolve(element, v[i], at));
                } else {
                    check_scalar(element, v[i], at);
                    items.push_back(v[i]);
                }
            }
            out[it.key()] = std::move(items);
        } else {
            check_scalar(d, v, here);
            out[it.key()] = v;
        }
    }
    return out;
}

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

// Positive integers and numbers, recursively; keys listed here must be > 0 wherever they appear.
const std::vector<std::string> kPositive = {
    "n_max", "dt", "T", "steps", "reference_refinement", "tolerance", "max_sweeps", "ensemble", "seeds", "fields",
    "pairs", "random_fields", "free_waves", "samples", "fine_steps", "noisy_seeds", "bound", "n_hi", "c",
    "near_curve_c", "m"};

void check_ranges(const json& j, const std::string& path) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string here = join_path(path, it.key());
            if (it.value().is_number() &&
                std::find(kPositive.begin(), kPositive.end(), it.key()) != kPositive.end())
                require(it.value().get<double>() > 0, here, "must be positive");
            check_ranges(it.value(), here);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) check_ranges(j[i], path + "[" + std::to_string(i) + "]");
    }
}

void check_phi(const json& params, const std::string& path) {
    if (!params.contains("phi")) return;
    try {
        phi_choice_from_string(params["phi"].get<std::string>());
    } catch (const std::invalid_argument&) {
        throw ConfigError(join_path(path, "phi"), "expected none, identity-offmean or phi-of-beta0");
    }
}

void check_regime(const json& params, const std::string& path) {
    if (!params.contains("delta") || !params.contains("p")) return;
    const double delta = params["delta"].get<double>(), p = params["p"].get<double>();
    require(delta_in_regime(delta, p), join_path(path, "delta"),
            "outside (p - 2)/(4p) <= delta < (p - 2)/(2p); set regime_check to false to run anyway");
}

void check_cell(ExperimentKind kind, const json& params, const std::string& path, bool regime_check) {
    check_ranges(params, path);
    check_phi(params, path);
    const std::string variant = variant_key(kind).empty() ? "" : params[variant_key(kind)].get<std::string>();
    switch (kind) {
        case ExperimentKind::Simulate:
            if (variant == "white-noise" && regime_check) check_regime(params, path);
            break;
        case ExperimentKind::ConvergenceStudy:
            if (regime_check) check_regime(params, path);
            if (variant == "truncation") {
                const auto& levels = params["levels"];
                require(levels.size() >= 2, join_path(path, "levels"), "need at least two levels");
                for (std::size_t i = 0; i < levels.size(); ++i) {
                    const std::string at = join_path(path, "levels") + "[" + std::to_string(i) + "]";
                    require(levels[i].get<int>() > 0 && levels[i].get<int>() <= params["n_max"].get<int>(), at,
                            "levels must lie in [1, n_max]");
                    if (i > 0) require(levels[i].get<int>() > levels[i - 1].get<int>(), at, "levels must increase");
                }
            }
            if (variant == "holder") {
                require(params["epsilons"].size() >= 2, join_path(path, "epsilons"), "need at least two sizes");
                for (std::size_t i = 0; i < params["epsilons"].size(); ++i)
                    require(params["epsilons"][i].get<double>() > 0,
                            join_path(path, "epsilons") + "[" + std::to_string(i) + "]", "must be positive");
            }
            break;
        case ExperimentKind::StochasticConvolution:
            if (variant == "sample") {
                const std::string method = params["method"].get<std::string>();
                require(method == "ito" || method == "factorized", join_path(path, "method"),
                        "expected ito or factorized");
            }
            if (variant == "xsbpq" && regime_check) {
                const double s = params["s"].get<double>(), b = params["b"].get<double>(), p = params["p"].get<double>();
                require(stochastic_regime(s, b, p), join_path(path, "s"),
                        "(s, b, p) outside the stochastic regime; set regime_check to false to run anyway");
            }
            break;
        case ExperimentKind::Norm:
            if (variant == "white-noise")
                for (std::size_t i = 0; i < params["norms"].size(); ++i) {
                    const std::string at = join_path(path, "norms") + "[" + std::to_string(i) + "]";
                    const std::string k = params["norms"][i]["kind"].get<std::string>();
                    require(k == "besov" || k == "fourier-lebesgue", join_path(at, "kind"),
                            "expected besov or fourier-lebesgue");
                    require(params["norms"][i]["p"].get<double>() >= 1, join_path(at, "p"), "must be >= 1");
                    const json& q = params["norms"][i]["q"];
                    require(q.is_null() || q.get<double>() >= 1, join_path(at, "q"), "must be >= 1 or null");
                }
            break;
        case ExperimentKind::VerifyEstimates:
            for (std::size_t i = 0; i < params["estimates"].size(); ++i) {
                const std::string at = join_path(path, "estimates") + "[" + std::to_string(i) + "]";
                require(params["estimates"][i].is_string(), at, "expected a string");
                const auto name = params["estimates"][i].get<std::string>();
                require(std::find(kEstimates.begin(), kEstimates.end(), name) != kEstimates.end(), at,
                        "unknown estimate");
            }
            break;
        case ExperimentKind::SampleNoise: break;
    }
}

// ---- cell outputs ---------------------------------------------------------------------------

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Plot {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
};

struct CellOutput {
    json scalars = json::object();
    std::vector<Table> tables;
    std::vector<Plot> plots;
    std::vector<std::pair<std::string, std::string>> raw;  // extra files: name, content
};

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

// JSON has no infinities; non-finite scalars are written as strings.
json scalar(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

json ratio_json(const RatioReport& r) {
    json j = {{"estimate", r.estimate},     {"distribution", r.distribution}, {"ensemble_size", r.ensemble_size},
              {"seed", r.seed},             {"n_max", r.n_max},               {"max_ratio", scalar(r.max_ratio)},
              {"skipped", r.skipped},       {"conventions", r.conventions}};
    json q = json::array();
    for (double v : r.quantiles) q.push_back(scalar(v));
    j["quantiles"] = q;
    json params = json::object(), extras = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = scalar(v);
    for (const auto& [k, v] : r.extras) extras[k] = scalar(v);
    j["parameters"] = params;
    j["extras"] = extras;
    return j;
}

Table ratio_table(const std::string& name, const RatioReport& r) {
    Table t{name, {"sample", "ratio"}, {}};
    for (std::size_t i = 0; i < r.ratios.size(); ++i) t.rows.push_back({double(i), r.ratios[i]});
    return t;
}

NoisyScenario noisy_scenario(const json& p, bool regime_check) {
    return {p["n_max"].get<int>(),    p["dt"].get<double>(),         p["delta"].get<double>(),
            p["p"].get<double>(),     p["tolerance"].get<double>(),  p["max_sweeps"].get<int>(),
            phi_choice_from_string(p["phi"].get<std::string>()), regime_check};
}

DeterministicScenario deterministic_scenario(const json& p) {
    return {p["n_max"].get<int>(), p["T"].get<double>(), p["steps"].get<int>(), p["reference_refinement"].get<int>(),
            p["tolerance"].get<double>(), p["max_sweeps"].get<int>()};
}

Table residual_table(const Trajectory& run) {
    Table t{"residuals", {"sweep", "residual"}, {}};
    for (std::size_t i = 0; i < run.residuals.size(); ++i) t.rows.push_back({double(i + 1), run.residuals[i]});
    return t;
}

void trajectory_scalars(json& s, const Trajectory& run) {
    s["status"] = to_string(run.status);
    s["window"] = run.window;
    s["sweeps"] = run.residuals.size();
    s["halved"] = run.halved_count;
    s["final_residual"] = run.residuals.empty() ? 0.0 : run.residuals.back();
}

CellOutput run_simulate(const json& p, std::uint64_t seed, bool regime_check) {
    CellOutput out;
    if (p["scenario"] == "cos") {
        const auto r = deterministic_benchmark(deterministic_scenario(p));
        trajectory_scalars(out.scalars, r.run);
        out.scalars["mass"] = r.mass;
        out.scalars["max_mass_drift"] = r.max_mass_drift;
        out.scalars["sup_h1_error"] = r.sup_h1_error;
        Table t{"conservation", {"t", "mass_drift", "h1_error"}, {}};
        for (std::size_t k = 0; k < r.times.size(); ++k) t.rows.push_back({r.times[k], r.mass_drift[k], r.h1_error[k]});
        out.tables.push_back(std::move(t));
        out.tables.push_back(residual_table(r.run));
        out.plots.push_back({"mass_drift", "t", "relative mass drift", r.times, r.mass_drift});
        out.plots.push_back({"h1_error", "t", "H^1 distance to reference", r.times, r.h1_error});
        return out;
    }
    const auto scenario = noisy_scenario(p, regime_check);
    const auto problem = make_noisy_problem(scenario, seed);
    const auto run = picard_solve(problem.u0, problem.phi, problem.family, problem.config);
    trajectory_scalars(out.scalars, run);
    out.scalars["adaptive_T"] = problem.window.T;
    out.scalars["radius"] = problem.window.radius;
    const double alpha = 0.5 - scenario.delta;
    Table t{"trajectory", {"t", "l2_mass", "besov"}, {}};
    Plot plot{"besov_norm", "t", "||u(t)||_{hb^{-alpha}_{p,inf}}", {}, {}};
    for (int k = 0; k < run.u.samples(); ++k) {
        const auto slice = run.u.slice(k);
        const double b = besov_norm(slice, NormSpec::besov(-alpha, scenario.p));
        t.rows.push_back({run.u.time(k), l2_mass(slice), b});
        plot.x.push_back(run.u.time(k));
        plot.y.push_back(b);
    }
    Table probes{"window_probes", {"T", "factor"}, {}};
    for (const auto& w : problem.window.probes) probes.rows.push_back({w.T, w.factor});
    out.tables.push_back(std::move(t));
    out.tables.push_back(std::move(probes));
    out.tables.push_back(residual_table(run));
    out.plots.push_back(std::move(plot));
    return out;
}

CellOutput run_sample_noise(const json& p, std::uint64_t seed) {
    CellOutput out;
    const int N = p["n_max"].get<int>();
    const TimeGrid grid(p["dt"].get<double>(), p["steps"].get<int>());
    const auto family = sample_brownian_family(N, grid, seed);
    const auto phi = make_covariance(phi_choice_from_string(p["phi"].get<std::string>()), family);
    // |beta_n(T)|^2 / (2 T) has mean one for n >= 1.
    double acc = 0, deviation = 0;
    for (int n = 1; n <= N; ++n) acc += std::norm(family.path(n, grid.steps)) / (2 * grid.horizon());
    for (int n = 1; n <= N; ++n)
        for (int k = 0; k <= grid.steps; ++k)
            if (phi(n, k) != Complex(0)) deviation = std::max(deviation, std::abs(std::abs(phi(n, k)) - 1));
    out.scalars["horizon"] = grid.horizon();
    out.scalars["mean_scaled_endpoint_square"] = N > 0 ? acc / N : 0.0;
    out.scalars["max_unimodularity_defect"] = deviation;
    out.scalars["covariance"] = phi.describe();
    const auto drift = zero_mode_drift(family);
    const auto beta0 = family.zero_mode_path();
    Table t{"zero_mode", {"t", "beta0", "drift"}, {}};
    std::vector<double> ts;
    for (int k = 0; k <= grid.steps; ++k) {
        t.rows.push_back({grid.time(k), beta0(k), drift(k)});
        ts.push_back(grid.time(k));
    }
    out.tables.push_back(std::move(t));
    out.plots.push_back({"beta0", "t", "beta_0(t)", ts, std::vector<double>(beta0.data(), beta0.data() + beta0.size())});
    out.plots.push_back({"drift", "t", "c(t)", ts, std::vector<double>(drift.data(), drift.data() + drift.size())});
    std::ostringstream paths;
    write_paths_csv(paths, family);
    out.raw.push_back({"paths.csv", paths.str()});
    return out;
}

CellOutput run_convolution(const json& p, std::uint64_t seed) {
    CellOutput out;
    const std::string study = p["study"];
    if (study == "sample") {
        const TimeGrid grid(p["dt"].get<double>(), p["steps"].get<int>());
        const auto family = sample_brownian_family(p["n_max"].get<int>(), grid, seed);
        const auto phi = make_covariance(phi_choice_from_string(p["phi"].get<std::string>()), family);
        const auto res = p["method"] == "ito"
                             ? ito_convolution(phi, family)
                             : factorized_convolution(phi, family, p["alpha"].get<double>(), p["m"].get<int>());
        const auto norms = slice_besov_norms(res.field, p["s"].get<double>(), p["p"].get<double>());
        std::vector<double> ts;
        for (int k = 0; k < res.field.samples(); ++k) ts.push_back(res.field.time(k));
        out.scalars["sup_besov"] = *std::max_element(norms.begin(), norms.end());
        out.scalars["final_besov"] = norms.back();
        out.plots.push_back({"besov_norm", "t", "||Phi(t)||_{hb^s_{p,inf}}", ts, norms});
        std::ostringstream field;
        write_csv(field, res.field);
        out.raw.push_back({"field.csv", field.str()});
    } else if (study == "isometry") {
        IsometryStudy s;
        s.phi = phi_choice_from_string(p["phi"].get<std::string>());
        s.modes = p["modes"].get<std::vector<int>>();
        s.times = p["times"].get<std::vector<double>>();
        s.dt = p["dt"].get<double>();
        s.ensemble = p["ensemble"].get<int>();
        s.seed = seed;
        const auto cells = ito_isometry(s);
        Table t{"isometry", {"n", "t", "mean", "standard_error", "z"}, {}};
        double worst = 0;
        for (const auto& c : cells) {
            t.rows.push_back({double(c.n), c.t, c.second_moment.mean, c.second_moment.standard_error, c.z});
            worst = std::max(worst, std::abs(c.z));
        }
        out.scalars["max_abs_z"] = worst;
        out.tables.push_back(std::move(t));
    } else if (study == "agreement") {
        AgreementStudy s;
        s.alpha = p["alpha"].get<double>();
        s.m = p["m"].get<int>();
        s.n_max = p["n_max"].get<int>();
        s.fine_steps = p["fine_steps"].get<int>();
        s.factors = p["factors"].get<std::vector<int>>();
        s.seeds = p["seeds"].get<int>();
        s.seed = seed;
        const auto r = convolution_agreement(s);
        out.scalars["order"] = r.order;
        out.scalars["monotone"] = r.monotone;
        Table t{"agreement", {"dt", "rms"}, {}};
        for (std::size_t g = 0; g < r.dts.size(); ++g) t.rows.push_back({r.dts[g], r.rms[g]});
        out.tables.push_back(std::move(t));
        out.plots.push_back({"rms_vs_dt", "dt", "RMS(factorized - ito)", r.dts, r.rms});
    } else if (study == "xsbpq") {
        XsbpqStudy s;
        s.phi = phi_choice_from_string(p["phi"].get<std::string>());
        s.s = p["s"].get<double>();
        s.b = p["b"].get<double>();
        s.p = p["p"].get<double>();
        s.q = p["q"].get<double>();
        s.T = p["T"].get<double>();
        s.n_max = p["n_max"].get<int>();
        s.dt = p["dt"].get<double>();
        s.ensemble = p["ensemble"].get<int>();
        s.seed = seed;
        const auto r = mc_expected_xsbpq(s);
        out.scalars["mean"] = r.mean;
        out.scalars["standard_error"] = r.standard_error;
        out.scalars["off_regime"] = r.off_regime;
        Table t{"samples", {"sample", "norm"}, {}};
        for (std::size_t i = 0; i < r.samples.size(); ++i) t.rows.push_back({double(i), r.samples[i]});
        out.tables.push_back(std::move(t));
    } else {
        ContinuityStudy s;
        s.phi = phi_choice_from_string(p["phi"].get<std::string>());
        s.s = p["s"].get<double>();
        s.p = p["p"].get<double>();
        s.m = p["m"].get<int>();
        s.n_max = p["n_max"].get<int>();
        s.T = p["T"].get<double>();
        s.dts = p["dts"].get<std::vector<double>>();
        s.ensemble = p["ensemble"].get<int>();
        s.seed = seed;
        const auto r = continuity_study(s);
        out.scalars["sup_moment"] = r.sup_moment.mean;
        out.scalars["sup_moment_standard_error"] = r.sup_moment.standard_error;
        out.scalars["gamma"] = r.gamma;
        out.scalars["off_regime"] = r.off_regime;
        Table t{"modulus", {"dt", "mean", "standard_error"}, {}};
        std::vector<double> means;
        for (std::size_t g = 0; g < r.dts.size(); ++g) {
            t.rows.push_back({r.dts[g], r.modulus[g].mean, r.modulus[g].standard_error});
            means.push_back(r.modulus[g].mean);
        }
        out.tables.push_back(std::move(t));
        out.plots.push_back({"modulus", "dt", "E max_k ||Phi(t_k+1) - Phi(t_k)||", r.dts, means});
    }
    return out;
}

CellOutput run_norm(const json& p, std::uint64_t seed) {
    CellOutput out;
    if (p["study"] == "regularity") {
        RegularityStudy s;
        s.s = p["s"].get<double>();
        s.p = p["p"].get<double>();
        s.sizes = p["sizes"].get<std::vector<int>>();
        s.seeds = p["seeds"].get<int>();
        s.seed = seed;
        const auto r = white_noise_regularity(s);
        out.scalars["slope"] = r.slope;
        out.scalars["predicted_slope"] = r.predicted;
        Table t{"medians", {"n_max", "median"}, {}};
        std::vector<double> xs;
        for (std::size_t g = 0; g < r.sizes.size(); ++g) {
            t.rows.push_back({double(r.sizes[g]), r.medians[g]});
            xs.push_back(r.sizes[g]);
        }
        out.tables.push_back(std::move(t));
        out.plots.push_back({"median_norm", "n_max", "median ||w||_{hb^s_{p,inf}}", xs, r.medians});
        return out;
    }
    const auto w = sample_spatial_white_noise(p["n_max"].get<int>(), seed);
    Table t{"norms", {"index", "s", "p", "q", "value"}, {}};
    json values = json::array();
    for (std::size_t i = 0; i < p["norms"].size(); ++i) {
        const auto& n = p["norms"][i];
        const double s = n["s"].get<double>(), pp = n["p"].get<double>();
        const double q = n["q"].is_null() ? kInfinity : n["q"].get<double>();
        const auto spec = n["kind"] == "besov" ? NormSpec::besov(s, pp, q) : NormSpec::fourier_lebesgue(s, pp);
        const double v = norm(w, spec);
        t.rows.push_back({double(i), s, pp, q, v});
        values.push_back(v);
    }
    out.scalars["values"] = values;
    out.tables.push_back(std::move(t));
    return out;
}

CellOutput run_estimates(const json& p, std::uint64_t seed) {
    CellOutput out;
    const auto selected = p["estimates"].get<std::vector<std::string>>();
    for (std::size_t i = 0; i < selected.size(); ++i) {
        const std::string& name = selected[i];
        const json& q = p[name];
        const std::uint64_t sub = derive_seed(seed, i);
        if (name == "resonance") {
            const auto r = resonance_identity_sweep(q["bound"].get<int>());
            out.scalars[name] = {{"passed", r.passed},
                                 {"pairs_checked", r.pairs_checked},
                                 {"triples_checked", r.triples_checked},
                                 {"maxmax_checked", r.maxmax_checked},
                                 {"witnesses", r.witnesses}};
        } else if (name == "strichartz") {
            StrichartzStudy s;
            s.n_max = q["n_max"].get<int>();
            s.random_fields = q["random_fields"].get<int>();
            s.free_waves = q["free_waves"].get<int>();
            s.seed = sub;
            const auto r = strichartz_ratio(s);
            out.scalars[name] = ratio_json(r);
            out.tables.push_back(ratio_table(name, r));
        } else if (name == "bilinear") {
            BilinearStudy s;
            s.s = q["s"].get<double>();
            s.delta = q["delta"].get<double>();
            s.n_max = q["n_max"].get<int>();
            s.pairs = q["pairs"].get<int>();
            s.seed = sub;
            const auto r = bilinear_ratio(s);
            out.scalars[name] = ratio_json(r);
            out.tables.push_back(ratio_table(name, r));
        } else if (name == "near-curve") {
            const auto r = near_curve_sweep(q["n_hi"].get<int>(), q["c"].get<double>(), kNearCurveWindow,
                                            q["exponent"].get<double>());
            out.scalars[name] = {{"max", r.running_max.back()},
                                 {"value_slope", r.value_slope},
                                 {"running_max_slope", r.running_max_slope}};
            Table t{name, {"n", "value", "running_max"}, {}};
            std::vector<double> ns;
            for (std::size_t k = 0; k < r.ns.size(); ++k) {
                t.rows.push_back({double(r.ns[k]), r.values[k], r.running_max[k]});
                ns.push_back(r.ns[k]);
            }
            out.tables.push_back(std::move(t));
            out.plots.push_back({name, "n", "integral over Omega(n)", ns, r.values});
        } else if (name == "linear") {
            LinearStudy s;
            s.s = q["s"].get<double>();
            s.b = q["b"].get<double>();
            s.b_high = q["b_high"].get<double>();
            s.epsilon = q["epsilon"].get<double>();
            s.p = q["p"].get<double>();
            s.n_max = q["n_max"].get<int>();
            s.dt = q["dt"].get<double>();
            s.ensemble = q["ensemble"].get<int>();
            s.Ts = q["Ts"].get<std::vector<double>>();
            s.seed = sub;
            const auto r = linear_lemma_ratios(s);
            out.scalars[name] = {{"homogeneous", ratio_json(r.homogeneous)},
                                 {"inhomogeneous", ratio_json(r.inhomogeneous)},
                                 {"time_decay", ratio_json(r.time_decay)}};
            out.tables.push_back(ratio_table("linear_homogeneous", r.homogeneous));
            out.tables.push_back(ratio_table("linear_inhomogeneous", r.inhomogeneous));
            out.tables.push_back(ratio_table("linear_time_decay", r.time_decay));
        } else if (name == "r-alpha") {
            RAlphaStudy s;
            s.alpha = q["alpha"].get<double>();
            s.p = q["p"].get<double>();
            s.n_max = q["n_max"].get<int>();
            s.ensemble = q["ensemble"].get<int>();
            if (!q["gamma"].is_null()) s.gamma = q["gamma"].get<double>();
            s.seed = sub;
            const auto r = r_alpha_bound(s);
            out.scalars[name] = ratio_json(r);
            out.tables.push_back(ratio_table("r_alpha", r));
        } else if (name == "trilinear") {
            TrilinearStudy s;
            s.phi = phi_choice_from_string(q["phi"].get<std::string>());
            s.delta = q["delta"].get<double>();
            s.p = q["p"].get<double>();
            s.T = q["T"].get<double>();
            s.n_max = q["n_max"].get<int>();
            s.seeds = q["seeds"].get<int>();
            s.samples = q["samples"].get<int>();
            s.near_curve_c = q["near_curve_c"].get<double>();
            s.seed = sub;
            const auto r = stochastic_trilinear_check(s);
            out.scalars[name] = ratio_json(r.ratios);
            out.scalars[name]["off_regime"] = r.off_regime;
            Table t{name, {"seed", "f1", "f2", "numerator", "u_norm", "ratio"}, {}};
            for (std::size_t k = 0; k < r.samples.size(); ++k) {
                const auto& x = r.samples[k];
                t.rows.push_back({double(k), x.f1, x.f2, x.numerator, x.u_norm, x.ratio});
            }
            out.tables.push_back(std::move(t));
        } else if (name == "embeddings") {
            const auto r = embedding_suite(q["fields"].get<int>(), q["n_max"].get<int>(), q["delta"].get<double>(),
                                           q["p"].get<double>(), sub);
            out.scalars[name] = {{"fields", r.fields},
                                 {"constant", r.constant},
                                 {"embed1_holds", r.embed1_holds},
                                 {"embed2_holds", r.embed2_holds},
                                 {"embed3_holds", r.embed3_holds},
                                 {"embed1_worst", r.embed1_worst},
                                 {"embed2_worst", r.embed2_worst},
                                 {"embed3_worst", r.embed3_worst}};
        }
    }
    return out;
}

CellOutput run_convergence(const json& p, std::uint64_t seed, bool regime_check) {
    CellOutput out;
    const std::string study = p["study"];
    const auto scenario = noisy_scenario(p, regime_check);
    if (study == "truncation") {
        TruncationStudy s;
        s.scenario = scenario;
        s.levels = p["levels"].get<std::vector<int>>();
        s.seeds = p["seeds"].get<int>();
        s.seed = seed;
        const auto r = truncation_convergence(s);
        out.scalars["decreasing"] = r.decreasing;
        out.scalars["data_tail_decreasing"] = r.data_tail_decreasing;
        out.scalars["fraction"] = r.fraction;
        std::vector<std::string> cols = {"run", "seed", "converged", "window", "decreasing"};
        for (std::size_t j = 0; j + 1 < r.levels.size(); ++j) {
            const std::string pair = std::to_string(r.levels[j]) + "_" + std::to_string(r.levels[j + 1]);
            cols.push_back("d_" + pair);
            cols.push_back("tail_" + pair);
        }
        Table t{"differences", cols, {}};
        for (std::size_t i = 0; i < r.runs.size(); ++i) {
            const auto& run = r.runs[i];
            std::vector<double> row = {double(i), double(run.seed), run.status == SolveStatus::Converged ? 1.0 : 0.0,
                                       run.window, run.decreasing ? 1.0 : 0.0};
            for (std::size_t j = 0; j < run.distances.size(); ++j) {
                row.push_back(run.distances[j]);
                row.push_back(run.data_tail[j]);
            }
            t.rows.push_back(std::move(row));
        }
        out.tables.push_back(std::move(t));
    } else if (study == "holder") {
        HolderStudy s;
        s.scenario = scenario;
        s.epsilons = p["epsilons"].get<std::vector<double>>();
        s.seeds = p["seeds"].get<int>();
        s.seed = seed;
        s.perturbation_seed = derive_seed(seed, 1u << 20);
        const auto r = holder_stability(s);
        out.scalars["beta"] = r.beta;
        out.scalars["all_converged"] = r.all_converged;
        std::vector<std::string> cols = {"run", "seed", "converged", "window", "beta"};
        for (double e : r.epsilons) cols.push_back("d_eps_" + format_number(e));
        Table t{"distances", cols, {}};
        for (std::size_t i = 0; i < r.runs.size(); ++i) {
            const auto& run = r.runs[i];
            std::vector<double> row = {double(i), double(run.seed), run.converged ? 1.0 : 0.0, run.window, run.beta};
            row.insert(row.end(), run.distances.begin(), run.distances.end());
            t.rows.push_back(std::move(row));
        }
        out.tables.push_back(std::move(t));
    } else {
        FixedPointStudy s;
        s.deterministic = deterministic_scenario(p["deterministic"]);
        s.noisy = scenario;
        s.noisy_seeds = p["noisy_seeds"].get<int>();
        s.seed = seed;
        const auto cases = fixed_point_matrix(s);
        double worst = 0;
        int converged = 0;
        Table t{"cases", {"case", "converged", "window", "sweeps", "tolerance", "defect"}, {}};
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& c = cases[i];
            const bool ok = c.status == SolveStatus::Converged;
            converged += ok;
            if (ok) worst = std::max(worst, c.defect / c.tolerance);
            t.rows.push_back({double(i), ok ? 1.0 : 0.0, c.window, double(c.sweeps), c.tolerance, c.defect});
        }
        out.scalars["converged"] = converged;
        out.scalars["cases"] = cases.size();
        out.scalars["max_defect_over_tolerance"] = worst;
        out.tables.push_back(std::move(t));
    }
    return out;
}

CellOutput run_cell(const ExperimentCell& cell, std::uint64_t seed, bool regime_check) {
    switch (cell.kind) {
        case ExperimentKind::Simulate: return run_simulate(cell.params, seed, regime_check);
        case ExperimentKind::SampleNoise: return run_sample_noise(cell.params, seed);
        case ExperimentKind::StochasticConvolution: return run_convolution(cell.params, seed);
        case ExperimentKind::Norm: return run_norm(cell.params, seed);
        case ExperimentKind::VerifyEstimates: return run_estimates(cell.params, seed);
        case ExperimentKind::ConvergenceStudy: return run_convergence(cell.params, seed, regime_check);
    }
    throw std::logic_error("unknown experiment kind");
}

void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << content;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Leaves of a JSON value keyed by their path.
void flatten(const json& j, const std::string& path, std::map<std::string, json>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), join_path(path, it.key()), out);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    } else {
        out[path] = j;
    }
}

}  // namespace

// ---- public API -----------------------------------------------------------------------------

const char* to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kKindNames)
        if (name == n) return k;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
    static const std::vector<ExperimentKind> kinds = [] {
        std::vector<ExperimentKind> v;
        for (const auto& [k, n] : kKindNames) v.push_back(k);
        return v;
    }();
    return kinds;
}

std::vector<std::string> variants(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Simulate: return {"cos", "white-noise"};
        case ExperimentKind::StochasticConvolution: return {"sample", "isometry", "agreement", "xsbpq", "continuity"};
        case ExperimentKind::Norm: return {"white-noise", "regularity"};
        case ExperimentKind::ConvergenceStudy: return {"truncation", "holder", "fixed-point"};
        default: return {};
    }
}

json default_params(ExperimentKind kind, const std::string& variant_name) {
    const auto names = variants(kind);
    const std::string variant = variant_name.empty() && !names.empty() ? names.front() : variant_name;
    if (!names.empty() && std::find(names.begin(), names.end(), variant) == names.end())
        throw std::invalid_argument(std::string("unknown variant for ") + to_string(kind) + ": " + variant);
    if (names.empty() && !variant.empty())
        throw std::invalid_argument(std::string(to_string(kind)) + " has no variants");
    json j;
    switch (kind) {
        case ExperimentKind::Simulate:
            j = variant == "cos" ? deterministic_block() : solver_block(64, 1.0 / 512, 1e-10, 60);
            break;
        case ExperimentKind::SampleNoise:
            j = {{"n_max", 16}, {"dt", 1.0 / 256}, {"steps", 256}, {"phi", "phi-of-beta0"}};
            break;
        case ExperimentKind::StochasticConvolution:
            if (variant == "sample")
                j = {{"n_max", 32}, {"dt", 1.0 / 256}, {"steps", 256}, {"phi", "phi-of-beta0"}, {"method", "ito"},
                     {"alpha", 0.3}, {"m", 2},         {"s", -0.45},    {"p", 2.5}};
            else if (variant == "isometry")
                j = {{"phi", "phi-of-beta0"}, {"modes", {1, 5, 17}}, {"times", {0.25, 1.0}}, {"dt", 1.0 / 64},
                     {"ensemble", 10000}};
            else if (variant == "agreement")
                j = {{"alpha", 0.3}, {"m", 2}, {"n_max", 8}, {"fine_steps", 1024}, {"factors", {8, 4, 2, 1}},
                     {"seeds", 3}};
            else if (variant == "xsbpq")
                j = {{"phi", "phi-of-beta0"}, {"s", -0.45}, {"b", 0.45},         {"p", 2.5},        {"q", 2.0},
                     {"T", 1.0},              {"n_max", 256}, {"dt", 1.0 / 128}, {"ensemble", 200}};
            else
                j = {{"phi", "phi-of-beta0"}, {"s", -0.45}, {"p", 2.5}, {"m", 2}, {"n_max", 256}, {"T", 1.0},
                     {"dts", {1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048}}, {"ensemble", 100}};
            break;
        case ExperimentKind::Norm:
            if (variant == "regularity")
                j = {{"s", -0.4}, {"p", 2.0}, {"sizes", {64, 128, 256, 512, 1024}}, {"seeds", 50}};
            else
                j = {{"n_max", 256},
                     {"norms", json::array({{{"kind", "besov"}, {"s", -0.45}, {"p", 2.5}, {"q", nullptr}}})}};
            break;
        case ExperimentKind::VerifyEstimates:
            j = {{"estimates", kEstimates},
                 {"resonance", {{"bound", 256}}},
                 {"strichartz", {{"n_max", 64}, {"random_fields", 400}, {"free_waves", 100}}},
                 {"bilinear", {{"s", -0.5}, {"delta", 0.05}, {"n_max", 64}, {"pairs", 500}}},
                 {"near-curve", {{"n_hi", 256}, {"c", 1.0}, {"exponent", 0.75}}},
                 {"linear",
                  {{"s", -0.45},
                   {"b", 0.25},
                   {"b_high", 0.45},
                   {"epsilon", 0.01},
                   {"p", 2.5},
                   {"n_max", 32},
                   {"dt", 1.0 / 64},
                   {"ensemble", 50},
                   {"Ts", {1.0, 0.5, 0.25, 0.125}}}},
                 {"r-alpha", {{"alpha", 0.45}, {"p", 2.5}, {"n_max", 64}, {"ensemble", 200}, {"gamma", nullptr}}},
                 {"trilinear",
                  {{"phi", "phi-of-beta0"},
                   {"delta", 0.05},
                   {"p", 2.5},
                   {"T", 1.0},
                   {"n_max", 64},
                   {"seeds", 10},
                   {"samples", 64},
                   {"near_curve_c", 1.0}}},
                 {"embeddings", {{"fields", 100}, {"n_max", 64}, {"delta", 0.05}, {"p", 2.5}}}};
            break;
        case ExperimentKind::ConvergenceStudy:
            if (variant == "truncation") {
                j = solver_block(256, 1.0 / 512, 1e-10, 60);
                j["levels"] = {32, 64, 128, 256};
                j["seeds"] = 20;
            } else if (variant == "holder") {
                j = solver_block(128, 1.0 / 512, 1e-12, 80);
                j["epsilons"] = {1e-2, 1e-3};
                j["seeds"] = 5;
            } else {
                j = solver_block(64, 1.0 / 512, 1e-10, 60);
                j["noisy_seeds"] = 5;
                j["deterministic"] = deterministic_block();
            }
            break;
    }
    if (!names.empty()) j[variant_key(kind)] = variant;
    return j;
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("", "expected an object at the top level");
    static const std::vector<std::string> top = {"name", "seed", "output_root", "regime_check", "experiments"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(top.begin(), top.end(), it.key()) == top.end()) throw ConfigError(it.key(), "unknown key");
    ExperimentConfig c;
    if (j.contains("name")) {
        require(j["name"].is_string(), "name", "expected a string");
        c.name = j["name"].get<std::string>();
    }
    if (j.contains("seed")) {
        require(j["seed"].is_number_unsigned() || (j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0),
                "seed", "expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_root")) {
        require(j["output_root"].is_string() && !j["output_root"].get<std::string>().empty(), "output_root",
                "expected a non-empty string");
        c.output_root = j["output_root"].get<std::string>();
    }
    if (j.contains("regime_check")) {
        require(j["regime_check"].is_boolean(), "regime_check", "expected true or false");
        c.regime_check = j["regime_check"].get<bool>();
    }
    if (j.contains("experiments")) {
        require(j["experiments"].is_array(), "experiments", "expected an array");
        const auto& list = j["experiments"];
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string path = "experiments[" + std::to_string(i) + "]";
            const auto& e = list[i];
            require(e.is_object(), path, "expected an object");
            require(e.contains("kind") && e["kind"].is_string(), join_path(path, "kind"), "missing experiment kind");
            ExperimentCell cell;
            try {
                cell.kind = experiment_kind_from_string(e["kind"].get<std::string>());
            } catch (const std::invalid_argument&) {
                throw ConfigError(join_path(path, "kind"), "unknown experiment kind '" + e["kind"].get<std::string>() + "'");
            }
            const std::string vkey = variant_key(cell.kind);
            std::string variant;
            if (!vkey.empty() && e.contains(vkey)) {
                require(e[vkey].is_string(), join_path(path, vkey), "expected a string");
                variant = e[vkey].get<std::string>();
                const auto names = variants(cell.kind);
                if (std::find(names.begin(), names.end(), variant) == names.end()) {
                    std::string options;
                    for (const auto& n : names) options += (options.empty() ? "" : ", ") + n;
                    throw ConfigError(join_path(path, vkey), "expected one of " + options);
                }
            }
            json given = e;
            given.erase("kind");
            cell.params = resolve(default_params(cell.kind, variant), given, path);
            check_cell(cell.kind, cell.params, path, c.regime_check);
            c.experiments.push_back(std::move(cell));
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("", "cannot open " + file.string());
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

json conventions_json() {
    return {{"cutoff", kCutoffDescription},
            {"dyadic_partition", "B_0 = {|n| <= 1}, B_j = {2^(j-1) < |n| <= 2^j}"},
            {"japanese_bracket", "<x> = 1 + |x|"},
            {"tau_view", "window lattice, tau - n^3 = 2 pi (c - K/2) / L"},
            {"rng", kRngName}};
}

json to_json(const ExperimentConfig& config) {
    json cells = json::array();
    for (const auto& cell : config.experiments) {
        json e = cell.params;
        e["kind"] = to_string(cell.kind);
        cells.push_back(std::move(e));
    }
    return {{"name", config.name},
            {"seed", config.seed},
            {"output_root", config.output_root},
            {"regime_check", config.regime_check},
            {"experiments", cells},
            {"conventions", conventions_json()}};
}

std::string config_hash(const ExperimentConfig& config) {
    json j = to_json(config);
    j.erase("output_root");
    const std::string text = j.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunResult run(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    RunResult result;
    const std::string hash = config_hash(config);
    result.directory = fs::path(config.output_root) / hash;
    fs::create_directories(result.directory);
    const std::string started = timestamp();

    const int count = static_cast<int>(config.experiments.size());
    std::vector<CellOutput> outputs(count);
    std::vector<std::string> failures(count);
    std::vector<double> seconds(count, 0);
    parallel_for(count, [&](int i) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            outputs[i] = run_cell(config.experiments[i], derive_seed(config.seed, static_cast<std::uint64_t>(i)),
                                  config.regime_check);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
        seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    const json echo = to_json(config);
    write_file(result.directory / "config.json", echo.dump(2) + "\n");
    json cells = json::array();
    json files = json::array();
    json cell_times = json::array();
    for (int i = 0; i < count; ++i) {
        const char* kind = to_string(config.experiments[i].kind);
        const std::string dir_name = "cell-" + std::to_string(i) + "-" + kind;
        json entry = {{"id", i}, {"kind", kind}, {"seed", derive_seed(config.seed, static_cast<std::uint64_t>(i))}};
        if (!failures[i].empty()) {
            entry["status"] = "failed";
            entry["reason"] = failures[i];
            result.exit_code = 1;
        } else {
            entry["status"] = "ok";
            entry["scalars"] = outputs[i].scalars;
            const fs::path dir = result.directory / dir_name;
            fs::create_directories(dir);
            json written = json::array();
            for (const auto& t : outputs[i].tables) {
                const std::string rel = dir_name + "/" + t.name + ".csv";
                write_file(result.directory / rel, csv(t));
                written.push_back(rel);
                files.push_back({{"path", rel}, {"type", "table"}, {"cell", i}, {"columns", t.columns}});
            }
            for (const auto& p : outputs[i].plots) {
                const std::string rel = dir_name + "/" + p.name + ".plot.csv";
                Table t{p.name, {"x", "y"}, {}};
                for (std::size_t k = 0; k < p.x.size(); ++k) t.rows.push_back({p.x[k], p.y[k]});
                write_file(result.directory / rel, csv(t));
                written.push_back(rel);
                files.push_back({{"path", rel}, {"type", "plot"}, {"cell", i}, {"x", p.x_label}, {"y", p.y_label}});
            }
            for (const auto& [name, content] : outputs[i].raw) {
                const std::string rel = dir_name + "/" + name;
                write_file(result.directory / rel, content);
                written.push_back(rel);
                files.push_back({{"path", rel}, {"type", "data"}, {"cell", i}});
            }
            entry["files"] = written;
        }
        cells.push_back(std::move(entry));
        cell_times.push_back({{"id", i}, {"kind", kind}, {"seconds", seconds[i]}, {"status", failures[i].empty() ? "ok" : "failed"}});
    }
    result.summary = {{"name", config.name}, {"hash", hash}, {"config", echo}, {"cells", cells},
                      {"status", result.exit_code == 0 ? "ok" : "failed"}};
    write_file(result.directory / "summary.json", result.summary.dump(2) + "\n");
    result.manifest = {{"hash", hash},          {"config", "config.json"}, {"summary", "summary.json"},
                       {"started", started},    {"finished", timestamp()}, {"files", files},
                       {"cells", cell_times}};
    write_file(result.directory / "manifest.json", result.manifest.dump(2) + "\n");
    return result;
}

Comparison compare_reports(const json& a, const json& b, double tolerance) {
    if (!a.contains("cells") || !b.contains("cells") || !a["cells"].is_array() || !b["cells"].is_array())
        throw std::invalid_argument("compare_reports: both inputs must be run summaries");
    const auto& ca = a["cells"];
    const auto& cb = b["cells"];
    if (ca.size() != cb.size()) throw std::invalid_argument("compare_reports: different numbers of experiment cells");
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (ca[i].value("kind", "") != cb[i].value("kind", ""))
            throw std::invalid_argument("compare_reports: cell " + std::to_string(i) + " kinds differ (" +
                                        ca[i].value("kind", "") + " vs " + cb[i].value("kind", "") + ")");
    Comparison out;
    out.tolerance = tolerance;
    std::map<std::string, json> fa, fb;
    if (a.contains("config")) flatten(a["config"], "", fa);
    if (b.contains("config")) flatten(b["config"], "", fb);
    for (const auto& [k, v] : fa)
        if (k != "output_root" && (!fb.count(k) || fb[k] != v)) out.config_differences.push_back(k);
    for (const auto& [k, v] : fb)
        if (k != "output_root" && !fa.count(k)) out.config_differences.push_back(k);

    for (std::size_t i = 0; i < ca.size(); ++i) {
        std::map<std::string, json> sa, sb;
        const std::string prefix = "cells[" + std::to_string(i) + "]";
        if (ca[i].contains("scalars")) flatten(ca[i]["scalars"], prefix, sa);
        if (cb[i].contains("scalars")) flatten(cb[i]["scalars"], prefix, sb);
        for (const auto& [k, v] : sa) {
            if (!v.is_number() || !sb.count(k) || !sb[k].is_number()) continue;
            ScalarDiff d{k, v.get<double>(), sb[k].get<double>(), 0, false};
            const double diff = std::abs(d.b - d.a);
            d.relative = diff == 0 ? 0 : (d.a == 0 ? kInfinity : diff / std::abs(d.a));
            d.flagged = d.relative > tolerance;
            out.flagged += d.flagged;
            out.scalars.push_back(d);
        }
    }
    return out;
}

json to_json(const Comparison& c) {
    json scalars = json::array();
    for (const auto& d : c.scalars)
        scalars.push_back({{"path", d.path}, {"a", d.a}, {"b", d.b}, {"relative", scalar(d.relative)}, {"flagged", d.flagged}});
    return {{"tolerance", c.tolerance}, {"flagged", c.flagged}, {"config_differences", c.config_differences},
            {"scalars", scalars}};
}

}  // namespace skdv
