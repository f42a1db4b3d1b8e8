#include "skdv/studies.hpp"

#include "skdv/parallel.hpp"
#include "skdv/rng.hpp"
#include "skdv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skdv {

namespace {

SpectralField cosine(int n_max) {
    VectorXc half = VectorXc::Zero(n_max + 1);
    if (n_max >= 1) half(1) = 0.5;
    return SpectralField(TorusGrid(n_max), std::move(half));
}

SpaceTimeField leading(const SpaceTimeField& u, int samples) {
    return SpaceTimeField(u.grid(), u.t0(), u.dt(), u.values().leftCols(samples));
}

}  // namespace

double sup_sobolev_distance(const SpaceTimeField& a, const SpaceTimeField& b, double s) {
    a.require_compatible(b);
    double worst = 0;
    for (int k = 0; k < a.samples(); ++k) worst = std::max(worst, sobolev_norm(a.slice(k) - b.slice(k), s));
    return worst;
}

double sup_besov_distance(const SpaceTimeField& a, const SpaceTimeField& b, double s, double p) {
    a.require_compatible(b);
    const auto spec = NormSpec::besov(s, p);
    double worst = 0;
    for (int k = 0; k < a.samples(); ++k) worst = std::max(worst, besov_norm(a.slice(k) - b.slice(k), spec));
    return worst;
}

std::vector<IsometryCell> ito_isometry(const IsometryStudy& study) {
    if (study.modes.empty() || study.times.empty() || study.ensemble < 2)
        throw std::invalid_argument("ito_isometry: need modes, times and at least two samples");
    int n_max = 0;
    for (int n : study.modes) n_max = std::max(n_max, std::abs(n));
    double horizon = 0;
    std::vector<int> index;
    for (double t : study.times) {
        const double x = t / study.dt;
        if (!(t > 0) || std::abs(x - std::round(x)) > 1e-9)
            throw std::invalid_argument("ito_isometry: times must be positive multiples of dt");
        index.push_back(static_cast<int>(std::lround(x)));
        horizon = std::max(horizon, t);
    }
    const TimeGrid grid = TimeGrid::covering(horizon, study.dt);
    const std::size_t cells = study.modes.size() * study.times.size();
    std::vector<std::vector<double>> values(cells, std::vector<double>(study.ensemble));
    parallel_for(study.ensemble, [&](int i) {
        const auto family = sample_brownian_family(n_max, grid, derive_seed(study.seed, static_cast<std::uint64_t>(i)));
        const auto field = ito_convolution(make_covariance(study.phi, family), family).field;
        std::size_t c = 0;
        for (int n : study.modes)
            for (int k : index) values[c++][i] = std::norm(field(n, k));
    });
    std::vector<IsometryCell> out;
    std::size_t c = 0;
    for (int n : study.modes)
        for (double t : study.times) {
            IsometryCell cell{n, t, mean_estimate(values[c++]), 0};
            cell.z = cell.second_moment.standard_error > 0
                         ? (cell.second_moment.mean - t) / cell.second_moment.standard_error
                         : (cell.second_moment.mean == t ? 0 : kInfinity);
            out.push_back(cell);
        }
    return out;
}

AgreementReport convolution_agreement(const AgreementStudy& study) {
    if (study.factors.size() < 2 || study.seeds < 1)
        throw std::invalid_argument("convolution_agreement: need two grids and one seed");
    AgreementReport out;
    out.per_seed.assign(study.seeds, std::vector<double>(study.factors.size()));
    parallel_for(study.seeds, [&](int i) {
        const auto fine = sample_brownian_family(study.n_max, TimeGrid(1.0 / study.fine_steps, study.fine_steps),
                                                 derive_seed(study.seed, static_cast<std::uint64_t>(i)));
        for (std::size_t g = 0; g < study.factors.size(); ++g) {
            const auto family = fine.coarsened(study.factors[g]);
            const auto phi = build_phi_of_beta0(family);
            out.per_seed[i][g] = rms_difference(factorized_convolution(phi, family, study.alpha, study.m).field,
                                                ito_convolution(phi, family).field);
        }
    });
    for (std::size_t g = 0; g < study.factors.size(); ++g) {
        out.dts.push_back(double(study.factors[g]) / study.fine_steps);
        double acc = 0;
        for (const auto& row : out.per_seed) acc += row[g];
        out.rms.push_back(acc / study.seeds);
    }
    out.order = fit_loglog(out.dts, out.rms).slope;
    out.monotone = true;
    for (std::size_t g = 1; g < out.rms.size(); ++g)
        if (out.dts[g] < out.dts[g - 1] ? !(out.rms[g] < out.rms[g - 1]) : !(out.rms[g] > out.rms[g - 1])) out.monotone = false;
    return out;
}

RegularityReport white_noise_regularity(const RegularityStudy& study) {
    if (study.sizes.size() < 2 || study.seeds < 1) throw std::invalid_argument("white_noise_regularity: need two sizes");
    RegularityReport out;
    out.sizes = study.sizes;
    out.medians.resize(study.sizes.size());
    const auto spec = NormSpec::besov(study.s, study.p);
    parallel_for(static_cast<int>(study.sizes.size()), [&](int g) {
        std::vector<double> norms(study.seeds);
        for (int i = 0; i < study.seeds; ++i)
            norms[i] = besov_norm(
                sample_spatial_white_noise(study.sizes[g], derive_seed(study.seed, static_cast<std::uint64_t>(i))), spec);
        out.medians[g] = median(norms);
    });
    out.slope = fit_loglog(std::vector<double>(study.sizes.begin(), study.sizes.end()), out.medians).slope;
    out.predicted = std::max(0.0, (study.s * study.p + 1) / study.p);
    return out;
}

DeterministicReport deterministic_benchmark(const DeterministicScenario& scenario) {
    if (scenario.n_max < 1 || scenario.steps < 1 || scenario.reference_refinement < 1)
        throw std::invalid_argument("deterministic_benchmark: n_max, steps and refinement must be positive");
    SolveConfig cfg;
    cfg.grid = TorusGrid(scenario.n_max);
    cfg.T = scenario.T;
    cfg.dt = scenario.T / scenario.steps;
    cfg.tolerance = scenario.tolerance;
    cfg.max_sweeps = scenario.max_sweeps;
    DeterministicReport out{picard_solve(cosine(scenario.n_max), cfg), 0, 0, 0, {}, {}, {}};
    const auto& u = out.run.u;
    out.mass = l2_mass(u.slice(0));
    for (int k = 0; k < u.samples(); ++k) {
        out.times.push_back(u.time(k));
        out.mass_drift.push_back(std::abs(l2_mass(u.slice(k)) / out.mass - 1));
        out.max_mass_drift = std::max(out.max_mass_drift, out.mass_drift.back());
    }

    const int r = scenario.reference_refinement;
    const int samples = u.samples();
    const auto ref = reference_kdv(cosine(2 * scenario.n_max), cfg.dt / r, (samples - 1) * r, r);
    SpaceTimeField low(cfg.grid, 0.0, cfg.dt, samples);
    for (int k = 0; k < samples; ++k)
        low.set_slice(k, SpectralField(cfg.grid, ref.slice(k).half().head(scenario.n_max + 1)));
    for (int k = 0; k < samples; ++k) {
        out.h1_error.push_back(sobolev_norm(u.slice(k) - low.slice(k), 1));
        out.sup_h1_error = std::max(out.sup_h1_error, out.h1_error.back());
    }
    return out;
}

NoisyProblem make_noisy_problem(const NoisyScenario& scenario, std::uint64_t seed) {
    const int horizon = static_cast<int>(std::lround(2 / scenario.dt));
    auto family = sample_brownian_family(scenario.n_max, TimeGrid(scenario.dt, horizon), seed);
    auto phi = make_covariance(scenario.phi, family);
    SolveConfig cfg;
    cfg.grid = TorusGrid(scenario.n_max);
    cfg.dt = scenario.dt;
    cfg.tolerance = scenario.tolerance;
    cfg.max_sweeps = scenario.max_sweeps;
    cfg.metric = default_picard_metric(scenario.delta, scenario.p);
    cfg.regime_check = scenario.regime_check;
    auto u0 = project_mean_zero(sample_spatial_white_noise(scenario.n_max, seed));
    auto window = adaptive_window(u0, phi, family, cfg);
    cfg.T = window.T;
    return {std::move(u0), std::move(family), std::move(phi), std::move(cfg), std::move(window)};
}

std::vector<FixedPointCase> fixed_point_matrix(const FixedPointStudy& study) {
    std::vector<FixedPointCase> out(1 + study.noisy_seeds);
    parallel_for(1 + study.noisy_seeds, [&](int i) {
        FixedPointCase& c = out[i];
        if (i == 0) {
            const auto& d = study.deterministic;
            SolveConfig cfg;
            cfg.grid = TorusGrid(d.n_max);
            cfg.T = d.T;
            cfg.dt = d.T / d.steps;
            cfg.tolerance = d.tolerance;
            cfg.max_sweeps = d.max_sweeps;
            const auto u0 = cosine(d.n_max);
            const auto run = picard_solve(u0, cfg);
            const SpaceTimeField zero(cfg.grid, 0.0, cfg.dt, run.u.samples());
            c = {"deterministic cos x", run.status, run.window, static_cast<int>(run.residuals.size()), cfg.tolerance,
                 picard_distance(duhamel_apply(run.u, u0, zero), run.u, cfg, run.window)};
            return;
        }
        const std::uint64_t seed = derive_seed(study.seed, static_cast<std::uint64_t>(i));
        const auto problem = make_noisy_problem(study.noisy, seed);
        const auto run = picard_solve(problem.u0, problem.phi, problem.family, problem.config);
        c = {"noisy seed " + std::to_string(i), run.status, run.window, static_cast<int>(run.residuals.size()),
             problem.config.tolerance,
             picard_distance(duhamel_apply(run.u, problem.u0, problem.phi, problem.family), run.u, problem.config,
                             run.window)};
    });
    return out;
}

TruncationReport truncation_convergence(const TruncationStudy& study) {
    if (study.levels.size() < 2) throw std::invalid_argument("truncation_convergence: need at least two levels");
    if (!std::is_sorted(study.levels.begin(), study.levels.end()) || study.levels.back() > study.scenario.n_max)
        throw std::invalid_argument("truncation_convergence: levels must increase up to n_max");
    TruncationReport out;
    out.levels = study.levels;
    out.runs.resize(study.seeds);
    const double alpha = 0.5 - study.scenario.delta;
    parallel_for(study.seeds, [&](int i) {
        const std::uint64_t seed = derive_seed(study.seed, static_cast<std::uint64_t>(i));
        auto problem = make_noisy_problem(study.scenario, seed);
        problem.config.levels = study.levels;
        const auto seq = solve_truncated_sequence(problem.u0, problem.phi, problem.family, problem.config);
        TruncationRun& run = out.runs[i];
        run.seed = seed;
        run.status = seq.status;
        run.window = seq.window;
        for (const auto& d : seq.consecutive) run.distances.push_back(d.distance);
        for (std::size_t j = 0; j + 1 < study.levels.size(); ++j)
            run.data_tail.push_back(besov_norm(truncate_modes(problem.u0, study.levels[j + 1]) -
                                                   truncate_modes(problem.u0, study.levels[j]),
                                               NormSpec::besov(-alpha, study.scenario.p)));
        auto strictly_decreasing = [](const std::vector<double>& xs) {
            for (std::size_t j = 0; j + 1 < xs.size(); ++j)
                if (!(xs[j] > xs[j + 1])) return false;
            return true;
        };
        run.decreasing = seq.status == SolveStatus::Converged && strictly_decreasing(run.distances);
    });
    for (const auto& run : out.runs) {
        out.decreasing += run.decreasing;
        bool tail = true;
        for (std::size_t j = 0; j + 1 < run.data_tail.size(); ++j) tail = tail && run.data_tail[j] > run.data_tail[j + 1];
        out.data_tail_decreasing += tail;
    }
    out.fraction = study.seeds > 0 ? double(out.decreasing) / study.seeds : 0;
    return out;
}

HolderReport holder_stability(const HolderStudy& study) {
    if (study.epsilons.size() < 2) throw std::invalid_argument("holder_stability: need at least two perturbation sizes");
    for (double e : study.epsilons)
        if (!(e > 0)) throw std::invalid_argument("holder_stability: perturbation sizes must be positive");
    HolderReport out;
    out.epsilons = study.epsilons;
    out.runs.resize(study.seeds);
    const double alpha = 0.5 - study.scenario.delta;
    const auto w = project_mean_zero(sample_spatial_white_noise(study.scenario.n_max, study.perturbation_seed));
    parallel_for(study.seeds, [&](int i) {
        const std::uint64_t seed = derive_seed(study.seed, static_cast<std::uint64_t>(i));
        const auto problem = make_noisy_problem(study.scenario, seed);
        const auto base = picard_solve(problem.u0, problem.phi, problem.family, problem.config);
        HolderRun& run = out.runs[i];
        run.seed = seed;
        run.window = base.window;
        run.converged = base.converged;
        // Perturbed solves reuse the unperturbed window.
        SolveConfig cfg = problem.config;
        cfg.T = base.window;
        cfg.allow_halving = false;
        for (double eps : study.epsilons) {
            const auto perturbed = picard_solve(problem.u0 + eps * w, problem.phi, problem.family, cfg);
            run.converged = run.converged && perturbed.converged;
            const int samples = std::min(base.u.samples(), perturbed.u.samples());
            run.distances.push_back(sup_besov_distance(leading(base.u, samples), leading(perturbed.u, samples), -alpha,
                                                       study.scenario.p));
        }
        if (run.converged) run.beta = fit_loglog(study.epsilons, run.distances).slope;
    });
    std::vector<double> xs, ys;
    for (const auto& run : out.runs) {
        out.all_converged = out.all_converged && run.converged;
        if (!run.converged) continue;
        xs.insert(xs.end(), study.epsilons.begin(), study.epsilons.end());
        ys.insert(ys.end(), run.distances.begin(), run.distances.end());
    }
    if (!xs.empty()) out.beta = fit_loglog(xs, ys).slope;
    return out;
}

}  // namespace skdv
