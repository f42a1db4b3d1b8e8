#pragma once

#include "skdv/noise.hpp"
#include "skdv/norms.hpp"
#include "skdv/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace skdv {

enum class ConvolutionMethod { Ito, Factorized };

// Phi(t) = int_0^t S(t - t') phi(t') dW(t') on t_k = k dt, k = 0..steps.
struct ConvolutionResult {
    SpaceTimeField field;
    ConvolutionMethod method = ConvolutionMethod::Ito;
    double alpha = 0;  // factorization exponent, 0 for the direct sum
    int m = 0;
    std::uint64_t seed = 0;
    std::string phi_kind;
    TimeGrid grid;
};

// Left-point sum Phi^(n, t_k) = 2^{-1/2} sum_{j<k} e^{i n^3 (t_k - t_j)} phi_n(t_j) dbeta_n(t_j).
ConvolutionResult ito_convolution(const CovarianceOp& phi, const BrownianFamily& family);

// Factorization through Y(s) = int_0^s S(s - r)(s - r)^{-alpha} phi dW(r) and
// Phi(t) = sin(pi alpha)/pi int_0^t S(t - s)(t - s)^{alpha - 1} Y(s) ds. Requires 1/(2m) < alpha < 1/2.
ConvolutionResult factorized_convolution(const CovarianceOp& phi, const BrownianFamily& family, double alpha, int m);

// Root-mean-square over all (n, t_k) of the entrywise difference.
double rms_difference(const SpaceTimeField& a, const SpaceTimeField& b);

// Parameter window of the stochastic estimates: (p - 2)/(4p) <= delta < (p - 2)/(2p).
// The lower end is admitted (see README).
bool delta_in_regime(double delta, double p);

// s = -1/2 + delta and b = 1/2 - delta with delta_in_regime(delta, p).
bool stochastic_regime(double s, double b, double p);

struct XsbpqStudy {
    PhiChoice phi = PhiChoice::PhiOfBeta0;
    double s = -0.45;
    double b = 0.45;
    double p = 2.5;
    double q = 2;
    double T = 1;
    int n_max = 256;
    double dt = 1.0 / 128;
    int ensemble = 200;
    std::uint64_t seed = 1;
};

struct MonteCarloEstimate {
    double mean = 0;
    double standard_error = 0;
    std::vector<double> samples;
    bool off_regime = false;
};

// Monte Carlo mean of the restricted X^{s,b,T}_{p,q} norm of eta * Phi.
MonteCarloEstimate mc_expected_xsbpq(const XsbpqStudy& study);

struct ContinuityStudy {
    PhiChoice phi = PhiChoice::PhiOfBeta0;
    double s = -0.45;
    double p = 2.5;
    int m = 2;
    int n_max = 256;
    double T = 1;
    std::vector<double> dts = {1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048};
    int ensemble = 100;
    std::uint64_t seed = 1;
};

struct ContinuityReport {
    // E sup_k ||Phi(t_k)||^{2m} on the finest grid.
    MeanEstimate sup_moment;
    std::vector<double> sup_samples;
    std::vector<double> dts;
    // E max_k ||Phi(t_{k+1}) - Phi(t_k)|| per grid, paths shared across grids.
    std::vector<MeanEstimate> modulus;
    // Fitted exponent of modulus ~ dt^gamma; 0 when all moduli vanish.
    double gamma = 0;
    bool off_regime = false;
};

ContinuityReport continuity_study(const ContinuityStudy& study);

// ||f||_{hb^s_{p,inf}} of each time slice of a convolution field.
std::vector<double> slice_besov_norms(const SpaceTimeField& u, double s, double p);

}  // namespace skdv
