#pragma once

#include "skdv/convolution.hpp"
#include "skdv/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace skdv {

// sup over samples of ||a(t_k) - b(t_k)||_{H^s}.
double sup_sobolev_distance(const SpaceTimeField& a, const SpaceTimeField& b, double s);
// sup over samples of ||a(t_k) - b(t_k)||_{hb^s_{p,inf}}.
double sup_besov_distance(const SpaceTimeField& a, const SpaceTimeField& b, double s, double p);

// ---- stochastic convolution checks ----------------------------------------------------------

// E|Phi^(n, t)|^2 = t for unimodular phi, over independent path families.
struct IsometryStudy {
    PhiChoice phi = PhiChoice::PhiOfBeta0;
    std::vector<int> modes = {1, 5, 17};
    std::vector<double> times = {0.25, 1};
    double dt = 1.0 / 64;
    int ensemble = 10000;
    std::uint64_t seed = 1;
};

struct IsometryCell {
    int n = 0;
    double t = 0;
    MeanEstimate second_moment;
    double z = 0;  // (mean - t) / standard error
};

std::vector<IsometryCell> ito_isometry(const IsometryStudy& study);

// RMS difference of the factorized and direct convolutions on one path family observed at dt_fine * factor.
struct AgreementStudy {
    double alpha = 0.3;
    int m = 2;
    int n_max = 8;
    int fine_steps = 1024;  // on [0, 1]
    std::vector<int> factors = {8, 4, 2, 1};
    int seeds = 3;
    std::uint64_t seed = 1;
};

struct AgreementReport {
    std::vector<double> dts;
    std::vector<double> rms;  // mean over seeds, per grid
    std::vector<std::vector<double>> per_seed;
    double order = 0;           // fitted slope of the mean RMS against dt
    bool monotone = false;      // mean RMS strictly decreasing under refinement
};

AgreementReport convolution_agreement(const AgreementStudy& study);

// Median hb^s_{p,inf} norm of white noise against n_max.
struct RegularityStudy {
    double s = -0.4;
    double p = 2;
    std::vector<int> sizes = {64, 128, 256, 512, 1024};
    int seeds = 50;
    std::uint64_t seed = 1;
};

struct RegularityReport {
    std::vector<int> sizes;
    std::vector<double> medians;
    double slope = 0;
    double predicted = 0;  // max(0, (s p + 1) / p)
};

RegularityReport white_noise_regularity(const RegularityStudy& study);

// ---- deterministic benchmark ----------------------------------------------------------------

// u0 = cos x on [0, T] against the RK4 reference on twice the modes with a finer step.
struct DeterministicScenario {
    int n_max = 128;
    double T = 0.1;
    int steps = 128;
    int reference_refinement = 16;  // reference step is T / (steps * refinement)
    double tolerance = 1e-12;
    int max_sweeps = 80;
};

struct DeterministicReport {
    Trajectory run;
    double mass = 0;            // int u0^2 dx
    double max_mass_drift = 0;  // max_k |mass(t_k) / mass(0) - 1|
    double sup_h1_error = 0;    // against the reference truncated to n_max
    std::vector<double> times;
    std::vector<double> mass_drift;  // per sample
    std::vector<double> h1_error;    // per sample
};

DeterministicReport deterministic_benchmark(const DeterministicScenario& scenario);

// ---- Picard fixed points --------------------------------------------------------------------

// White-noise data (projected to mean zero) and the phi-of-beta0 covariance; the window comes from
// adaptive_window and the solve may halve it further.
struct NoisyScenario {
    int n_max = 64;
    double dt = 1.0 / 512;
    double delta = 0.05;
    double p = 2.5;
    double tolerance = 1e-10;
    int max_sweeps = 60;
    PhiChoice phi = PhiChoice::PhiOfBeta0;
    bool regime_check = true;
};

struct NoisyProblem {
    SpectralField u0;
    BrownianFamily family;
    CovarianceOp phi;
    SolveConfig config;  // T set from the adaptive window
    AdaptiveWindow window;
};

// Data from the white-noise substream of the seed, paths on [0, 2].
NoisyProblem make_noisy_problem(const NoisyScenario& scenario, std::uint64_t seed);

struct FixedPointCase {
    std::string label;
    SolveStatus status = SolveStatus::NotConverged;
    double window = 0;
    int sweeps = 0;
    double tolerance = 0;
    double defect = 0;  // ||Gamma u - u|| in the solve's restricted metric
};

struct FixedPointStudy {
    DeterministicScenario deterministic;
    NoisyScenario noisy;
    int noisy_seeds = 5;
    std::uint64_t seed = 1;
};

// One deterministic case, then one per noisy seed.
std::vector<FixedPointCase> fixed_point_matrix(const FixedPointStudy& study);

// ---- truncation convergence -----------------------------------------------------------------

struct TruncationStudy {
    NoisyScenario scenario{256, 1.0 / 512, 0.05, 2.5, 1e-10, 60, PhiChoice::PhiOfBeta0};
    std::vector<int> levels = {32, 64, 128, 256};
    int seeds = 20;
    std::uint64_t seed = 1;
};

struct TruncationRun {
    std::uint64_t seed = 0;
    SolveStatus status = SolveStatus::Converged;
    double window = 0;
    std::vector<double> distances;  // d(N_i, N_{i+1})
    bool decreasing = false;
    std::vector<double> data_tail;  // ||P_{N_{i+1}} u0 - P_{N_i} u0||_{hb^{-alpha}_{p,inf}}
};

struct TruncationReport {
    std::vector<int> levels;
    std::vector<TruncationRun> runs;
    int decreasing = 0;
    int data_tail_decreasing = 0;
    double fraction = 0;
};

TruncationReport truncation_convergence(const TruncationStudy& study);

// ---- Hoelder stability ----------------------------------------------------------------------

// Solutions from u0 and u0 + eps w with the same noise paths and window; w is one fixed white-noise
// sample. The distance is sup_t ||u(t) - u_eps(t)||_{hb^{-alpha}_{p,inf}}.
struct HolderStudy {
    NoisyScenario scenario{128, 1.0 / 512, 0.05, 2.5, 1e-12, 80, PhiChoice::PhiOfBeta0};
    std::vector<double> epsilons = {1e-2, 1e-3};
    int seeds = 5;
    std::uint64_t seed = 1;
    std::uint64_t perturbation_seed = 999;
};

struct HolderRun {
    std::uint64_t seed = 0;
    double window = 0;
    bool converged = true;
    std::vector<double> distances;  // one per epsilon
    double beta = 0;                // per-seed log-log slope
};

struct HolderReport {
    std::vector<double> epsilons;
    std::vector<HolderRun> runs;
    double beta = 0;  // pooled log-log slope over every converged seed
    bool all_converged = true;
};

HolderReport holder_stability(const HolderStudy& study);

}  // namespace skdv
