#pragma once

#include "skdv/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace skdv {

// Uniform time grid t_k = k dt, k = 0..steps.
struct TimeGrid {
    double dt = 0;
    int steps = 0;

    TimeGrid() = default;
    TimeGrid(double dt, int steps);
    static TimeGrid covering(double horizon, double dt);  // steps = ceil(horizon / dt)

    double time(int k) const noexcept { return k * dt; }
    double horizon() const noexcept { return steps * dt; }
    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

// Complex Brownian motions beta_n, n = 0..n_max, sampled on a TimeGrid.
// beta_0 is real with Var(beta_0(t)) = t; for n >= 1 the real and imaginary parts each have variance t.
class BrownianFamily {
public:
    BrownianFamily(int n_max, TimeGrid grid, std::uint64_t seed, MatrixXc increments);

    int n_max() const noexcept { return n_max_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    std::uint64_t seed() const noexcept { return seed_; }

    // beta_n(t_{k+1}) - beta_n(t_k) for 0 <= k < steps; negative n by conjugation.
    Complex increment(int n, int k) const;
    Complex path(int n, int k) const;
    const MatrixXc& increments() const noexcept { return increments_; }
    Eigen::VectorXd zero_mode_path() const;

    // Same paths observed every factor steps.
    BrownianFamily coarsened(int factor) const;
    // All increments multiplied by c.
    BrownianFamily scaled(double c) const;
    // Modes above n_max dropped; the retained paths are unchanged.
    BrownianFamily restricted(int n_max) const;

private:
    int n_max_;
    TimeGrid grid_;
    std::uint64_t seed_;
    MatrixXc increments_;  // row n, column k
    MatrixXc paths_;       // row n, column k = 0..steps
};

// Per-mode substreams: mode n at step k always draws the same numbers for a given seed.
BrownianFamily sample_brownian_family(int n_max, TimeGrid grid, std::uint64_t seed);

enum class CovarianceKind { IdentityOffMean, PhiOfBeta0, Truncated };

const char* to_string(CovarianceKind kind);

// Diagonal multipliers phi_n(t_k) acting on the Wiener process; phi_0 = 0 always.
class CovarianceOp {
public:
    static CovarianceOp identity_offmean(int n_max, TimeGrid grid);

    CovarianceKind kind() const noexcept { return kind_; }
    // Kind of the innermost non-truncated operator.
    CovarianceKind base_kind() const noexcept { return base_kind_; }
    std::optional<int> cutoff() const noexcept { return cutoff_; }
    int n_max() const noexcept { return static_cast<int>(table_.rows()) - 1; }
    const TimeGrid& grid() const noexcept { return grid_; }

    Complex operator()(int n, int k) const;
    const MatrixXc& table() const noexcept { return table_; }
    std::string describe() const;

private:
    CovarianceOp(CovarianceKind kind, CovarianceKind base, std::optional<int> cutoff, TimeGrid grid, MatrixXc table)
        : kind_(kind), base_kind_(base), cutoff_(cutoff), grid_(grid), table_(std::move(table)) {}

    friend CovarianceOp build_phi_of_beta0(const BrownianFamily& family);
    friend CovarianceOp truncate(const CovarianceOp& inner, int N);

    CovarianceKind kind_;
    CovarianceKind base_kind_;
    std::optional<int> cutoff_;
    TimeGrid grid_;
    MatrixXc table_;  // row n = 0..n_max, column k = 0..steps
};

// c(t) = int_0^t beta_0 / sqrt(2 pi) by the trapezoid rule on the family's grid.
Eigen::VectorXd zero_mode_drift(const BrownianFamily& family);

// phi_n(t_k) = exp(i n c(t_k)) for n != 0.
CovarianceOp build_phi_of_beta0(const BrownianFamily& family);

// phi^N: agrees with inner for 0 < |n| <= N, zero beyond.
CovarianceOp truncate(const CovarianceOp& inner, int N);

// Noise choice used by configurable experiments; None is the identity truncated at N = 0.
enum class PhiChoice { None, IdentityOffMean, PhiOfBeta0 };

PhiChoice phi_choice_from_string(const std::string& name);
const char* to_string(PhiChoice choice);
CovarianceOp make_covariance(PhiChoice choice, const BrownianFamily& family);

// w(0) standard normal; w(n), n >= 1, complex Gaussian with E|w(n)|^2 = 1.
SpectralField sample_spatial_white_noise(int n_max, std::uint64_t seed);

// Shifts removed by the reduction: the Galilean speed alpha_0, the zero-mode path and its integral c.
struct GaugeRecord {
    double alpha0 = 0;
    TimeGrid grid;
    Eigen::VectorXd beta0;  // beta_0(t_k)
    Eigen::VectorXd drift;  // c(t_k)

    static GaugeRecord identity(TimeGrid grid);
};

struct GaugeReduction {
    SpectralField v0;
    CovarianceOp phi;
    GaugeRecord record;
};

// alpha_0 = u0^(0); v0 = u0 - alpha_0; phi = exp(i n c(t)).
GaugeReduction gauge_reduce(const SpectralField& u0, const BrownianFamily& family);

// u^(n, t) = exp(-i n (alpha_0 t + c(t))) v^(n, t) for n != 0, u^(0, t) = alpha_0 + beta_0(t)/sqrt(2 pi) + v^(0, t).
// v must live on times t_k = k dt of the record's grid (t0 = 0, at most steps + 1 samples).
SpaceTimeField gauge_restore(const SpaceTimeField& v, const GaugeRecord& record);

// Inverse of gauge_restore.
SpaceTimeField gauge_reduce_trajectory(const SpaceTimeField& u, const GaugeRecord& record);

// Paths as rows "t,n,re,im" for n = 0..n_max.
void write_paths_csv(std::ostream& os, const BrownianFamily& family);

// Little-endian columnar layout: magic "SKDVBM01", int32 n_max, int32 steps, float64 dt, uint64 seed,
// then for n = 0..n_max the steps + 1 values beta_n(t_k) as (float64 re, float64 im).
void write_paths_binary(std::ostream& os, const BrownianFamily& family);
BrownianFamily read_paths_binary(std::istream& is);

}  // namespace skdv
