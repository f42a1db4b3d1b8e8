#pragma once

#include "skdv/convolution.hpp"
#include "skdv/noise.hpp"
#include "skdv/norms.hpp"

#include <array>
#include <string>
#include <vector>

namespace skdv {

// X^{-alpha, alpha}_{p,2} with alpha = 1/2 - delta.
NormSpec default_picard_metric(double delta = 0.05, double p = 2.5);

struct SolveConfig {
    TorusGrid grid{64};
    double dt = 1.0 / 1024;
    double T = 1;  // initial window [0, T]; must be a multiple of dt
    int max_sweeps = 60;
    double tolerance = 1e-10;
    NormSpec metric = default_picard_metric();  // restricted to the window at use
    bool regime_check = true;
    bool allow_halving = true;
    std::vector<int> levels;

    void validate() const;
    // Steps in the initial window.
    int steps() const;
};

enum class SolveStatus { Converged, NotConverged, WindowUnderflow };

const char* to_string(SolveStatus status);

struct Trajectory {
    SpaceTimeField u;
    std::vector<double> residuals;
    double window = 0;
    bool converged = false;
    int halved_count = 0;
    SolveStatus status = SolveStatus::NotConverged;
    std::string reason;
};

// Quadrature for the Duhamel nonlinearity in the interaction picture. Trapezoid treats the whole
// integrand as piecewise linear; Oscillatory interpolates each pair product v(n1) v(n2) linearly
// and integrates the resonant factor e^{-3 i n n1 n2 t} exactly, which keeps the dispersive
// cancellation when 3 |n n1 n2| dt is large. Both agree to second order for smooth fields.
enum class DuhamelRule { Trapezoid, Oscillatory };

// N(u, v)(t) = int_0^t S(t - t') d/dx (u v)(t') dt' on u's grid. Time 0 must be a grid point;
// earlier samples integrate backwards. u and v are real fields (Hermitian rows).
SpaceTimeField duhamel_nonlinearity(const SpaceTimeField& u, const SpaceTimeField& v,
                                    DuhamelRule rule = DuhamelRule::Oscillatory);

// Same quadrature applied to precomputed forcing samples G(n, t_k) (any complex rows).
SpaceTimeField duhamel_integral(const SpaceTimeField& forcing);

// Gamma u = S(t) u0 - N(u, u)/2 + forcing, with u, forcing on t_k = k dt.
SpaceTimeField duhamel_apply(const SpaceTimeField& u, const SpectralField& u0, const SpaceTimeField& forcing);

// As above with forcing Phi from ito_convolution(phi, family) on the first u.samples() grid points.
SpaceTimeField duhamel_apply(const SpaceTimeField& u, const SpectralField& u0, const CovarianceOp& phi,
                             const BrownianFamily& family);

// Picard iteration v <- Gamma v from v = 0 on the fixed window covered by forcing (t0 = 0).
Trajectory picard_iterate(const SpectralField& u0, const SpaceTimeField& forcing, const SolveConfig& config);

// eta * Phi on [0, window], Phi from the family; window must be a multiple of the family's dt.
SpaceTimeField noise_forcing(const CovarianceOp& phi, const BrownianFamily& family, double window);

// Fixed point of Gamma with forcing eta * Phi. Halves the window when the iteration fails to
// converge (if allowed) until it is shorter than 8 dt, which is reported as WindowUnderflow.
Trajectory picard_solve(const SpectralField& u0, const CovarianceOp& phi, const BrownianFamily& family,
                        const SolveConfig& config);

// Deterministic solve (phi = 0).
Trajectory picard_solve(const SpectralField& u0, const SolveConfig& config);

// Distance in the configured metric restricted to [0, window].
double picard_distance(const SpaceTimeField& a, const SpaceTimeField& b, const SolveConfig& config, double window);

struct LevelDifference {
    int lower = 0;
    int upper = 0;
    double distance = 0;
};

struct TruncatedSequence {
    std::vector<int> levels;
    std::vector<Trajectory> runs;
    double window = 0;  // common window on which differences are measured
    std::vector<LevelDifference> consecutive;
    Eigen::MatrixXd table;  // pairwise distances, symmetric
    SolveStatus status = SolveStatus::Converged;  // first non-converged run, if any
    std::string reason;
};

// Solves with u0^N = P_{<=N} u0 and phi^N for each configured level, same noise paths.
TruncatedSequence solve_truncated_sequence(const SpectralField& u0, const CovarianceOp& phi,
                                           const BrownianFamily& family, const SolveConfig& config);

struct WindowProbe {
    double T = 0;
    double factor = 0;
};

struct AdaptiveWindow {
    double T = 0;
    double radius = 0;
    std::vector<WindowProbe> probes;
    SolveStatus status = SolveStatus::Converged;
    std::string reason;
};

// Halves T from 1 until R ||N(w, w)||_T / ||w||_T^2 <= 1/2 with w = S(t) u0 + eta Phi and
// R = 2 (||u0||_{hb^{-alpha}_{p,inf}} + ||eta Phi||_{X^{-alpha,alpha}_{p,2}}) + 1.
AdaptiveWindow adaptive_window(const SpectralField& u0, const CovarianceOp& phi, const BrownianFamily& family,
                               const SolveConfig& config);

// Splits N(u, u) by which of sigma_0 = <tau - n^3>, sigma_1, sigma_2 is largest (ties to the smaller index).
// u must be mean-zero and time 0 must be a grid point.
std::array<SpaceTimeField, 3> second_iteration_decomposition(const SpaceTimeField& u);

// Integrating-factor RK4 for deterministic KdV u_t + u_xxx + u u_x = 0; samples every output_stride steps.
SpaceTimeField reference_kdv(const SpectralField& u0, double dt, int steps, int output_stride);

// ||f||_{H^s} = (sum <n>^{2s} |f(n)|^2)^{1/2} with <n> = 1 + |n|.
double sobolev_norm(const SpectralField& f, double s);

// Plain L^2(0, 2pi) squared norm 2 pi sum |f(n)|^2.
double l2_mass(const SpectralField& f);

}  // namespace skdv
