#include "skdv/noise.hpp"

#include "skdv/rng.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace skdv {

TimeGrid::TimeGrid(double dt_, int steps_) : dt(dt_), steps(steps_) {
    if (!(dt > 0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (steps < 1) throw std::invalid_argument("TimeGrid: at least one step required");
}

TimeGrid TimeGrid::covering(double horizon, double dt) {
    return TimeGrid(dt, static_cast<int>(std::ceil(horizon / dt - 1e-9)));
}

BrownianFamily::BrownianFamily(int n_max, TimeGrid grid, std::uint64_t seed, MatrixXc increments)
    : n_max_(n_max), grid_(grid), seed_(seed), increments_(std::move(increments)) {
    if (n_max < 0) throw std::invalid_argument("BrownianFamily: negative n_max");
    if (increments_.rows() != n_max + 1 || increments_.cols() != grid.steps)
        throw std::invalid_argument("BrownianFamily: increment table shape mismatch");
    increments_.row(0) = increments_.row(0).real().cast<Complex>();
    paths_ = MatrixXc::Zero(n_max + 1, grid.steps + 1);
    for (int k = 0; k < grid.steps; ++k) paths_.col(k + 1) = paths_.col(k) + increments_.col(k);
}

Complex BrownianFamily::increment(int n, int k) const {
    const Complex z = increments_(std::abs(n), k);
    return n >= 0 ? z : std::conj(z);
}

Complex BrownianFamily::path(int n, int k) const {
    const Complex z = paths_(std::abs(n), k);
    return n >= 0 ? z : std::conj(z);
}

Eigen::VectorXd BrownianFamily::zero_mode_path() const { return paths_.row(0).real().transpose(); }

BrownianFamily BrownianFamily::coarsened(int factor) const {
    if (factor < 1 || grid_.steps % factor != 0)
        throw std::invalid_argument("BrownianFamily::coarsened: factor must divide the step count");
    const int steps = grid_.steps / factor;
    MatrixXc inc(n_max_ + 1, steps);
    for (int k = 0; k < steps; ++k) inc.col(k) = paths_.col((k + 1) * factor) - paths_.col(k * factor);
    return BrownianFamily(n_max_, TimeGrid(grid_.dt * factor, steps), seed_, std::move(inc));
}

BrownianFamily BrownianFamily::scaled(double c) const { return BrownianFamily(n_max_, grid_, seed_, c * increments_); }

BrownianFamily BrownianFamily::restricted(int n_max) const {
    if (n_max < 0 || n_max > n_max_) throw std::invalid_argument("BrownianFamily::restricted: mode bound outside family");
    return BrownianFamily(n_max, grid_, seed_, increments_.topRows(n_max + 1));
}

BrownianFamily sample_brownian_family(int n_max, TimeGrid grid, std::uint64_t seed) {
    MatrixXc inc(n_max + 1, grid.steps);
    const double scale = std::sqrt(grid.dt);
    for (int n = 0; n <= n_max; ++n)
        for (int k = 0; k < grid.steps; ++k) {
            const auto g = gaussian_pair(seed, Stream::BrownianIncrement, static_cast<std::uint32_t>(n), k);
            inc(n, k) = n == 0 ? Complex(scale * g[0], 0) : scale * Complex(g[0], g[1]);
        }
    return BrownianFamily(n_max, grid, seed, std::move(inc));
}

const char* to_string(CovarianceKind kind) {
    switch (kind) {
        case CovarianceKind::IdentityOffMean: return "identity-offmean";
        case CovarianceKind::PhiOfBeta0: return "phi-of-beta0";
        case CovarianceKind::Truncated: return "truncated";
    }
    return "unknown";
}

CovarianceOp CovarianceOp::identity_offmean(int n_max, TimeGrid grid) {
    MatrixXc table = MatrixXc::Ones(n_max + 1, grid.steps + 1);
    table.row(0).setZero();
    return CovarianceOp(CovarianceKind::IdentityOffMean, CovarianceKind::IdentityOffMean, std::nullopt, grid,
                        std::move(table));
}

Complex CovarianceOp::operator()(int n, int k) const {
    if (std::abs(n) > n_max()) return 0;
    const Complex z = table_(std::abs(n), k);
    return n >= 0 ? z : std::conj(z);
}

std::string CovarianceOp::describe() const {
    if (kind_ == CovarianceKind::Truncated)
        return std::string("truncated(") + std::to_string(*cutoff_) + ", " + to_string(base_kind_) + ")";
    return to_string(kind_);
}

Eigen::VectorXd zero_mode_drift(const BrownianFamily& family) {
    const Eigen::VectorXd beta0 = family.zero_mode_path();
    const double h = family.grid().dt / std::sqrt(2 * kPi);
    Eigen::VectorXd c(beta0.size());
    c(0) = 0;
    for (int k = 1; k < beta0.size(); ++k) c(k) = c(k - 1) + 0.5 * h * (beta0(k - 1) + beta0(k));
    return c;
}

CovarianceOp build_phi_of_beta0(const BrownianFamily& family) {
    const Eigen::VectorXd c = zero_mode_drift(family);
    MatrixXc table(family.n_max() + 1, family.grid().steps + 1);
    table.row(0).setZero();
    for (int n = 1; n <= family.n_max(); ++n)
        for (int k = 0; k < c.size(); ++k) table(n, k) = std::polar(1.0, n * c(k));
    return CovarianceOp(CovarianceKind::PhiOfBeta0, CovarianceKind::PhiOfBeta0, std::nullopt, family.grid(),
                        std::move(table));
}

CovarianceOp truncate(const CovarianceOp& inner, int N) {
    if (N < 0) throw std::invalid_argument("truncate: negative cutoff");
    MatrixXc table = inner.table_;
    for (int n = N + 1; n <= inner.n_max(); ++n) table.row(n).setZero();
    const int cutoff = inner.cutoff_ ? std::min(*inner.cutoff_, N) : N;
    return CovarianceOp(CovarianceKind::Truncated, inner.base_kind_, cutoff, inner.grid_, std::move(table));
}

PhiChoice phi_choice_from_string(const std::string& name) {
    if (name == "none") return PhiChoice::None;
    if (name == "identity-offmean") return PhiChoice::IdentityOffMean;
    if (name == "phi-of-beta0") return PhiChoice::PhiOfBeta0;
    throw std::invalid_argument("unknown covariance '" + name + "' (expected none, identity-offmean, phi-of-beta0)");
}

const char* to_string(PhiChoice choice) {
    switch (choice) {
        case PhiChoice::None: return "none";
        case PhiChoice::IdentityOffMean: return "identity-offmean";
        case PhiChoice::PhiOfBeta0: return "phi-of-beta0";
    }
    return "unknown";
}

CovarianceOp make_covariance(PhiChoice choice, const BrownianFamily& family) {
    switch (choice) {
        case PhiChoice::None: return truncate(CovarianceOp::identity_offmean(family.n_max(), family.grid()), 0);
        case PhiChoice::IdentityOffMean: return CovarianceOp::identity_offmean(family.n_max(), family.grid());
        case PhiChoice::PhiOfBeta0: return build_phi_of_beta0(family);
    }
    throw std::invalid_argument("make_covariance: unknown choice");
}

SpectralField sample_spatial_white_noise(int n_max, std::uint64_t seed) {
    const TorusGrid grid(n_max);
    VectorXc half(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const auto g = gaussian_pair(seed, Stream::WhiteNoise, static_cast<std::uint32_t>(n), 0);
        half(n) = n == 0 ? Complex(g[0], 0) : Complex(g[0], g[1]) / std::sqrt(2.0);
    }
    return SpectralField(grid, std::move(half));
}

GaugeRecord GaugeRecord::identity(TimeGrid grid) {
    GaugeRecord r;
    r.grid = grid;
    r.beta0 = Eigen::VectorXd::Zero(grid.steps + 1);
    r.drift = Eigen::VectorXd::Zero(grid.steps + 1);
    return r;
}

GaugeReduction gauge_reduce(const SpectralField& u0, const BrownianFamily& family) {
    GaugeRecord record;
    record.alpha0 = u0.half()(0).real();
    record.grid = family.grid();
    record.beta0 = family.zero_mode_path();
    record.drift = zero_mode_drift(family);
    return {project_mean_zero(u0), build_phi_of_beta0(family), std::move(record)};
}

namespace {

void check_record_grid(const SpaceTimeField& u, const GaugeRecord& record) {
    if (std::abs(u.t0()) > 1e-12 || std::abs(u.dt() - record.grid.dt) > 1e-12 * record.grid.dt ||
        u.samples() > record.grid.steps + 1)
        throw std::invalid_argument("gauge: trajectory time grid does not match the record");
}

}  // namespace

SpaceTimeField gauge_restore(const SpaceTimeField& v, const GaugeRecord& record) {
    check_record_grid(v, record);
    SpaceTimeField u = v;
    const double root = std::sqrt(2 * kPi);
    for (int k = 0; k < v.samples(); ++k) {
        const double shift = record.alpha0 * v.time(k) + record.drift(k);
        for (int n = -v.n_max(); n <= v.n_max(); ++n) {
            if (n == 0) continue;
            u(n, k) = std::polar(1.0, -n * shift) * v(n, k);
        }
        u(0, k) = v(0, k) + record.alpha0 + record.beta0(k) / root;
    }
    return u;
}

SpaceTimeField gauge_reduce_trajectory(const SpaceTimeField& u, const GaugeRecord& record) {
    check_record_grid(u, record);
    SpaceTimeField v = u;
    const double root = std::sqrt(2 * kPi);
    for (int k = 0; k < u.samples(); ++k) {
        const double shift = record.alpha0 * u.time(k) + record.drift(k);
        for (int n = -u.n_max(); n <= u.n_max(); ++n) {
            if (n == 0) continue;
            v(n, k) = std::polar(1.0, n * shift) * u(n, k);
        }
        v(0, k) = u(0, k) - record.alpha0 - record.beta0(k) / root;
    }
    return v;
}

void write_paths_csv(std::ostream& os, const BrownianFamily& family) {
    os.precision(17);
    os << "t,n,re,im\n";
    for (int k = 0; k <= family.grid().steps; ++k)
        for (int n = 0; n <= family.n_max(); ++n) {
            const Complex z = family.path(n, k);
            os << family.grid().time(k) << ',' << n << ',' << z.real() << ',' << z.imag() << '\n';
        }
}

namespace {

template <typename T>
void put(std::ostream& os, T value) {
    static_assert(std::endian::native == std::endian::little, "binary path format assumes little-endian");
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T value;
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) throw std::runtime_error("binary paths: truncated input");
    return value;
}

constexpr char kMagic[8] = {'S', 'K', 'D', 'V', 'B', 'M', '0', '1'};

}  // namespace

void write_paths_binary(std::ostream& os, const BrownianFamily& family) {
    os.write(kMagic, sizeof(kMagic));
    put<std::int32_t>(os, family.n_max());
    put<std::int32_t>(os, family.grid().steps);
    put<double>(os, family.grid().dt);
    put<std::uint64_t>(os, family.seed());
    for (int n = 0; n <= family.n_max(); ++n)
        for (int k = 0; k <= family.grid().steps; ++k) {
            const Complex z = family.path(n, k);
            put<double>(os, z.real());
            put<double>(os, z.imag());
        }
}

BrownianFamily read_paths_binary(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("binary paths: bad magic");
    const int n_max = get<std::int32_t>(is);
    const int steps = get<std::int32_t>(is);
    const double dt = get<double>(is);
    const auto seed = get<std::uint64_t>(is);
    MatrixXc paths(n_max + 1, steps + 1);
    for (int n = 0; n <= n_max; ++n)
        for (int k = 0; k <= steps; ++k) {
            const double re = get<double>(is);
            const double im = get<double>(is);
            paths(n, k) = Complex(re, im);
        }
    MatrixXc inc(n_max + 1, steps);
    for (int k = 0; k < steps; ++k) inc.col(k) = paths.col(k + 1) - paths.col(k);
    return BrownianFamily(n_max, TimeGrid(dt, steps), seed, std::move(inc));
}

}  // namespace skdv
