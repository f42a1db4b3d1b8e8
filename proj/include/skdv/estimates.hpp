#pragma once

#include "skdv/interaction.hpp"
#include "skdv/noise.hpp"
#include "skdv/norms.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skdv {

// ---- resonance identities -------------------------------------------------------------------

struct ResonanceReport {
    int bound = 0;
    bool passed = true;
    std::int64_t pairs_checked = 0;    // n^3 - n1^3 - n2^3 = 3 n n1 n2
    std::int64_t triples_checked = 0;  // n^3 - n2^3 - n3^3 - n4^3 = 3 (n2 + n3)(n3 + n4)(n4 + n2)
    std::int64_t maxmax_checked = 0;   // max sigma_j >= |3 n n1 n2| / 3 with tau = tau1 + tau2
    std::vector<std::string> witnesses;  // failing tuples, at most a few
};

// Exhaustive over |n_i| <= bound in 64-bit integers; bound <= 2048 keeps every cube exact.
ResonanceReport resonance_identity_sweep(int bound);

// ---- ratio reports --------------------------------------------------------------------------

struct RatioReport {
    std::string estimate;
    std::string distribution;
    int ensemble_size = 0;
    std::uint64_t seed = 0;
    int n_max = 0;
    double max_ratio = 0;
    int skipped = 0;  // samples with a vanishing denominator
    std::vector<double> ratios;
    std::array<double, 5> quantiles{};  // min, quartiles, max of the evaluated ratios
    std::map<std::string, double> parameters;
    std::map<std::string, double> extras;
    std::string conventions;
};

// Fills max_ratio and quantiles from ratios.
void finalize(RatioReport& report);

// Random space-time field with Gaussian tau-view entries of standard deviation <n>^sigma <tau - n^3>^beta,
// on the window [t0, t0 + 2 pi k) with the given number of samples. Real fields get Hermitian rows.
struct FieldProfile {
    int n_max = 64;
    int samples = 16;
    int k = 1;
    double t0 = 0;
    double sigma = 0;
    double beta = 0;
    bool mean_zero = true;
    bool real = true;
};

SpaceTimeField random_profile_field(const FieldProfile& profile, std::uint64_t seed);

// amplitude * eta(t) e^{i(n x + n^3 t)} on [t0, t0 + 2 pi) with the given number of samples.
SpaceTimeField modulated_free_wave(int n_max, int n, Complex amplitude, int samples = 64, double t0 = -2);

// ||u||_{L^4_{x,t}} / ||u||_{X^{0,1/3}}; empty when the denominator vanishes.
std::optional<double> strichartz_quotient(const SpaceTimeField& u);

struct StrichartzStudy {
    int n_max = 64;
    int random_fields = 400;
    int free_waves = 100;
    FieldProfile profile{64, 16, 1, 0, -0.5, -5.0 / 6};
    std::uint64_t seed = 1;
};

RatioReport strichartz_ratio(const StrichartzStudy& study);

// ||d/dx(u v)||_{X^{s,-1/2}} / (||u||_{X^{s,1/2}} ||v||_{X^{s,1/2}}), mean-zero factors.
std::optional<double> bilinear_quotient(const SpaceTimeField& u, const SpaceTimeField& v, double s);
// The sigma_0-dominant part: ||d/dx(u v) on A_0||_{X^{-1/2+delta,-1/2-delta}} / (||u|| ||v||)_{X^{-1/2-delta,1/2-delta}}.
std::optional<double> a0_bilinear_quotient(const SpaceTimeField& u, const SpaceTimeField& v, double delta);

struct BilinearStudy {
    double s = -0.5;
    double delta = 0.05;
    int n_max = 64;
    int pairs = 500;
    FieldProfile profile{64, 16, 1, 0, 0.0, -1.0};
    std::uint64_t seed = 1;
};

// max_ratio is the full estimate; extras["a0_max_ratio"] the sigma_0-dominant variant.
RatioReport bilinear_ratio(const BilinearStudy& study);

// ---- near-curve set -------------------------------------------------------------------------

struct Interval {
    double lo = 0;
    double hi = 0;
};

inline constexpr Interval kNearCurveWindow{-1e10, 1e10};

// Omega(n) with radius c <n n1 n2>^{1/100} around -3 n n1 n2, all n1 in Z with n2 = n - n1,
// clipped to the window and merged.
struct NearCurveSet {
    int n = 0;
    double c = 1;
    Interval window = kNearCurveWindow;
    std::vector<Interval> intervals;
};

NearCurveSet near_curve_set(int n, double c = 1, Interval window = kNearCurveWindow);

// int <eta>^{-exponent} over the set, by the exact antiderivative on each merged interval.
double near_curve_integral(const NearCurveSet& set, double exponent = 0.75);
double near_curve_integral(int n, double c = 1, Interval window = kNearCurveWindow, double exponent = 0.75);

struct NearCurveSweep {
    std::vector<int> ns;
    std::vector<double> values;
    std::vector<double> running_max;
    double value_slope = 0;        // fitted d log(value) / d log n
    double running_max_slope = 0;  // fitted d log(max_{m <= n} value) / d log n
};

NearCurveSweep near_curve_sweep(int n_hi, double c = 1, Interval window = kNearCurveWindow, double exponent = 0.75);

// ---- linear lemmas --------------------------------------------------------------------------

struct LinearStudy {
    double s = -0.45;
    double b = 0.25;        // temporal exponent for the restricted norms (b < 1/2)
    double b_high = 0.45;   // time-decay lemma: ||u||_{X^{s,b,T}} <~ T^{b_high - b - eps} ||u||_{X^{s,b_high}}
    double epsilon = 0.01;
    double p = 2.5;
    int n_max = 32;
    double dt = 1.0 / 64;
    int ensemble = 50;
    std::vector<double> Ts = {1, 0.5, 0.25, 0.125};
    std::uint64_t seed = 1;
};

struct LinearReport {
    RatioReport homogeneous;
    RatioReport inhomogeneous;
    RatioReport time_decay;
};

// Homogeneous: ||S(t)u0||_{X^{s,b,T}_{p,2}} / (T^{1/2-b} ||u0||_{hb^s_{p,inf}}).
std::optional<double> homogeneous_quotient(const SpectralField& u0, const LinearStudy& study, double T);
// Inhomogeneous: ||int_0^t S(t-t')F||_{X^{s,b,T}_{p,2}} / (||F||_{X^{s,b-1}_{p,2}} + ||F||_{X^{s,-1}_{p,1}}).
std::optional<double> inhomogeneous_quotient(const SpaceTimeField& F, const LinearStudy& study, double T);
// Time decay: ||chi_T u||_{X^{s,b}} / (T^{b_high-b-eps} ||u||_{X^{s,b_high}}).
std::optional<double> time_decay_quotient(const SpaceTimeField& u, const LinearStudy& study, double T);

// Each report's extras hold "max_T=<T>" per window.
LinearReport linear_lemma_ratios(const LinearStudy& study);

// ---- R_alpha --------------------------------------------------------------------------------

// sup over ||d||_{L^2} = 1 of the trilinear form with kernel <n>^{-1-alpha} sigma_0^{-alpha} over
// n2 = -n, n3 = n4 = n, which is the L^2 norm of the kernel applied to the triple tau-convolution.
// With gamma set, only tau-tuples with sigma_0, sigma_2, sigma_3, sigma_4 < |n|^gamma count.
double r_alpha_numerator(const SpaceTimeField& u, double alpha, std::optional<double> gamma = std::nullopt);

struct RAlphaStudy {
    double alpha = 0.45;
    double p = 2.5;
    int n_max = 64;
    int ensemble = 200;
    FieldProfile profile{64, 16, 1, 0, 0.05, -0.95};
    std::optional<double> gamma;
    std::uint64_t seed = 1;
};

// Ratio against ||u||^3_{X^{-alpha,alpha}_{p,2}}.
RatioReport r_alpha_bound(const RAlphaStudy& study);

// ---- stochastic trilinear -------------------------------------------------------------------

struct TrilinearStudy {
    PhiChoice phi = PhiChoice::PhiOfBeta0;
    double delta = 0.05;
    double p = 2.5;
    double T = 1;
    int n_max = 64;
    int seeds = 10;
    int samples = 64;  // time samples on the window [-pi/2, 3pi/2)
    double near_curve_c = 1;
    double constant = 1;  // leading constant in F_1, F_2
    FieldProfile profile{64, 64, 1, 0, 0.05, -0.95};
    std::uint64_t seed = 1;
};

struct TrilinearSample {
    double f1 = 0;          // ||F_1^N||_{L^2_{x,t}}
    double f2 = 0;          // ||F_2^N||_{L^2_{x,t}}
    double numerator = 0;   // ||d/dx(eta Phi u) on A_1||_{X^{-alpha,-alpha}}
    double u_norm = 0;      // ||u||_{X^{-alpha,alpha}_{p,2}}
    double ratio = 0;       // numerator / ((f1 + f2) u_norm)
};

struct TrilinearReport {
    RatioReport ratios;
    std::vector<TrilinearSample> samples;
    bool off_regime = false;
};

// ||F_1^N||^2 and ||F_2^N||^2 are sum_n <n>^{-1-2 delta} |int_0^T |phi_n| dbeta_n|^2 times
// int (sigma^{-3/2+delta} + sigma^{-1/2-delta})^2 and int over Omega(n) of sigma^{-1+2 delta}.
double f1_weight(double delta);
double f2_weight(int n, double delta, double c);

TrilinearReport stochastic_trilinear_check(const TrilinearStudy& study);

// ---- embeddings -----------------------------------------------------------------------------

struct EmbeddingReport {
    int fields = 0;
    double delta = 0;
    double p = 0;
    double constant = 0;  // Hoelder constant for EMBED2 / EMBED3
    int embed1_holds = 0;
    int embed2_holds = 0;
    int embed3_holds = 0;
    double embed1_worst = 0;  // max of lhs / rhs
    double embed2_worst = 0;
    double embed3_worst = 0;
};

// EMBED1: ||u||_{X^{s,b}_{p,2}} <= ||u||_{X^{s,b}}; EMBED2: ||f||_{H^{-1/2-delta}} <= C ||f||_{hb^{-1/2+delta}_{p,inf}};
// EMBED3: ||u||_{X^{-1/2-delta,b}} <= C ||u||_{X^{-1/2+delta,b}_{p,2}}.
EmbeddingReport embedding_suite(int fields, int n_max, double delta, double p, std::uint64_t seed);

}  // namespace skdv
