#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace skdv {

using Complex = std::complex<double>;
using VectorXc = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.14159265358979323846;

// Retained Fourier modes |n| <= n_max on the 2*pi-periodic torus.
class TorusGrid {
public:
    explicit TorusGrid(int n_max) : n_max_(n_max) {
        if (n_max < 1) throw std::invalid_argument("TorusGrid: n_max must be >= 1");
    }

    int n_max() const noexcept { return n_max_; }
    int modes() const noexcept { return 2 * n_max_ + 1; }

    // Physical sample count for dealiased quadratic products: a power of two >= 3 n_max + 2.
    int physical_size() const noexcept {
        int m = 4;
        while (m < 3 * n_max_ + 2) m *= 2;
        return m;
    }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

private:
    int n_max_;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

template <typename Scalar>
inline Scalar japanese(Scalar x) { return Scalar(1) + std::abs(x); }

// Real periodic field stored as its half spectrum n = 0..n_max; negative modes are conjugates.
template <typename Scalar>
class BasicSpectralField {
public:
    using ComplexS = std::complex<Scalar>;
    using Coefficients = Eigen::Matrix<ComplexS, Eigen::Dynamic, 1>;

    explicit BasicSpectralField(TorusGrid grid, bool mean_zero = false)
        : grid_(grid), coeffs_(Coefficients::Zero(grid.n_max() + 1)), mean_zero_(mean_zero) {}

    BasicSpectralField(TorusGrid grid, Coefficients half, bool mean_zero = false)
        : grid_(grid), coeffs_(std::move(half)), mean_zero_(mean_zero) {
        if (coeffs_.size() != grid_.n_max() + 1)
            throw std::invalid_argument("SpectralField: expected n_max + 1 coefficients");
        coeffs_(0) = mean_zero_ ? ComplexS(0) : ComplexS(coeffs_(0).real(), 0);
    }

    const TorusGrid& grid() const noexcept { return grid_; }
    int n_max() const noexcept { return grid_.n_max(); }
    bool mean_zero() const noexcept { return mean_zero_; }
    const Coefficients& half() const noexcept { return coeffs_; }

    ComplexS operator[](int n) const {
        if (std::abs(n) > n_max()) return ComplexS(0);
        return n >= 0 ? coeffs_(n) : std::conj(coeffs_(-n));
    }

    // Sets mode n and, implicitly, mode -n. The zero mode keeps only its real part.
    void set(int n, ComplexS value) {
        if (std::abs(n) > n_max()) throw std::out_of_range("SpectralField::set: mode outside grid");
        if (n == 0) {
            if (mean_zero_ && value != ComplexS(0))
                throw std::invalid_argument("SpectralField::set: nonzero mean on a mean-zero field");
            coeffs_(0) = ComplexS(value.real(), 0);
        } else if (n > 0) {
            coeffs_(n) = value;
        } else {
            coeffs_(-n) = std::conj(value);
        }
    }

    // Coefficients for n = -n_max..n_max (index n + n_max).
    Coefficients full() const {
        const int N = n_max();
        Coefficients out(2 * N + 1);
        for (int n = -N; n <= N; ++n) out(n + N) = (*this)[n];
        return out;
    }

    BasicSpectralField& operator+=(const BasicSpectralField& o) {
        require_same_grid(grid_, o.grid_, "SpectralField +=");
        coeffs_ += o.coeffs_;
        mean_zero_ = mean_zero_ && o.mean_zero_;
        return *this;
    }
    BasicSpectralField& operator-=(const BasicSpectralField& o) {
        require_same_grid(grid_, o.grid_, "SpectralField -=");
        coeffs_ -= o.coeffs_;
        mean_zero_ = mean_zero_ && o.mean_zero_;
        return *this;
    }
    BasicSpectralField& operator*=(Scalar c) {
        coeffs_ *= c;
        return *this;
    }

    friend BasicSpectralField operator+(BasicSpectralField a, const BasicSpectralField& b) { return a += b; }
    friend BasicSpectralField operator-(BasicSpectralField a, const BasicSpectralField& b) { return a -= b; }
    friend BasicSpectralField operator*(Scalar c, BasicSpectralField a) { return a *= c; }
    friend BasicSpectralField operator*(BasicSpectralField a, Scalar c) { return a *= c; }

    friend bool operator==(const BasicSpectralField& a, const BasicSpectralField& b) {
        return a.grid_ == b.grid_ && a.mean_zero_ == b.mean_zero_ && a.coeffs_ == b.coeffs_;
    }

private:
    TorusGrid grid_;
    Coefficients coeffs_;
    bool mean_zero_;
};

using SpectralField = BasicSpectralField<double>;

// Phase n^3 t reduced modulo 2 pi in extended precision.
template <typename Scalar>
Scalar dispersion_phase(int n, Scalar t) {
    using Wide = long double;
    constexpr Wide two_pi = 6.283185307179586476925286766559005768L;
    const Wide n3 = Wide(n) * Wide(n) * Wide(n);
    return Scalar(std::fmod(n3 * Wide(t), two_pi));
}

template <typename Scalar>
BasicSpectralField<Scalar> apply_airy_semigroup(const BasicSpectralField<Scalar>& u, Scalar t) {
    auto half = u.half();
    for (int n = 1; n <= u.n_max(); ++n) half(n) *= std::polar(Scalar(1), dispersion_phase(n, t));
    return BasicSpectralField<Scalar>(u.grid(), std::move(half), u.mean_zero());
}

template <typename Scalar>
BasicSpectralField<Scalar> project_mean_zero(const BasicSpectralField<Scalar>& u) {
    auto half = u.half();
    half(0) = 0;
    return BasicSpectralField<Scalar>(u.grid(), std::move(half), true);
}

// Keeps modes |n| <= N, zeroes the rest.
template <typename Scalar>
BasicSpectralField<Scalar> truncate_modes(const BasicSpectralField<Scalar>& u, int N) {
    auto half = u.half();
    for (int n = std::max(N + 1, 0); n <= u.n_max(); ++n) half(n) = 0;
    return BasicSpectralField<Scalar>(u.grid(), std::move(half), u.mean_zero() || N < 0);
}

// Physical samples u(2*pi*j/M), j < M, for M >= 2 n_max + 1.
template <typename Scalar>
std::vector<Scalar> to_physical(const BasicSpectralField<Scalar>& u, int M) {
    if (M < 2 * u.n_max() + 1) throw std::invalid_argument("to_physical: too few samples");
    thread_local Eigen::FFT<Scalar> fft;
    fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
    fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    std::vector<std::complex<Scalar>> spec(M / 2 + 1, std::complex<Scalar>(0));
    for (int n = 0; n <= u.n_max(); ++n) spec[n] = u.half()(n);
    std::vector<Scalar> out;
    fft.inv(out, spec, M);
    return out;
}

template <typename Scalar>
BasicSpectralField<Scalar> from_physical(const std::vector<Scalar>& values, TorusGrid grid) {
    const int M = static_cast<int>(values.size());
    if (M < 2 * grid.n_max() + 1) throw std::invalid_argument("from_physical: too few samples");
    thread_local Eigen::FFT<Scalar> fft;
    fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
    fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    std::vector<std::complex<Scalar>> spec;
    fft.fwd(spec, values);
    typename BasicSpectralField<Scalar>::Coefficients half(grid.n_max() + 1);
    for (int n = 0; n <= grid.n_max(); ++n) half(n) = spec[n] / Scalar(M);
    return BasicSpectralField<Scalar>(grid, std::move(half));
}

// d/dx (u1 u2), dealiased by zero padding; the output is mean-zero and truncated to the grid.
template <typename Scalar>
BasicSpectralField<Scalar> nonlinearity(const BasicSpectralField<Scalar>& u1, const BasicSpectralField<Scalar>& u2) {
    require_same_grid(u1.grid(), u2.grid(), "nonlinearity");
    const TorusGrid& grid = u1.grid();
    const int M = grid.physical_size();
    auto a = to_physical(u1, M);
    if (&u1 == &u2) {
        for (int j = 0; j < M; ++j) a[j] *= a[j];
    } else {
        const auto b = to_physical(u2, M);
        for (int j = 0; j < M; ++j) a[j] *= b[j];
    }
    auto product = from_physical(a, grid);
    typename BasicSpectralField<Scalar>::Coefficients half(grid.n_max() + 1);
    half(0) = 0;
    for (int n = 1; n <= grid.n_max(); ++n) half(n) = std::complex<Scalar>(0, Scalar(n)) * product.half()(n);
    return BasicSpectralField<Scalar>(grid, std::move(half), true);
}

// Complex space-time samples u^(n, t_k) for |n| <= n_max (row n + n_max) and t_k = t0 + k dt.
// The window [t0, t0 + samples*dt) is treated as one period for the time-frequency view.
template <typename Scalar>
class BasicSpaceTimeField {
public:
    using ComplexS = std::complex<Scalar>;
    using Values = Eigen::Matrix<ComplexS, Eigen::Dynamic, Eigen::Dynamic>;

    BasicSpaceTimeField(TorusGrid grid, Scalar t0, Scalar dt, int samples)
        : BasicSpaceTimeField(grid, t0, dt, Values::Zero(grid.modes(), samples)) {}

    BasicSpaceTimeField(TorusGrid grid, Scalar t0, Scalar dt, Values values)
        : grid_(grid), t0_(t0), dt_(dt), values_(std::move(values)) {
        if (!(dt > 0)) throw std::invalid_argument("SpaceTimeField: dt must be positive");
        if (values_.rows() != grid_.modes() || values_.cols() < 1)
            throw std::invalid_argument("SpaceTimeField: value shape does not match grid");
    }

    const TorusGrid& grid() const noexcept { return grid_; }
    int n_max() const noexcept { return grid_.n_max(); }
    Scalar t0() const noexcept { return t0_; }
    Scalar dt() const noexcept { return dt_; }
    int samples() const noexcept { return static_cast<int>(values_.cols()); }
    Scalar time(int k) const noexcept { return t0_ + Scalar(k) * dt_; }
    Scalar window_length() const noexcept { return Scalar(samples()) * dt_; }
    Scalar tau_spacing() const noexcept { return Scalar(2 * kPi) / window_length(); }

    // Modulation tau - n^3 carried by column m of tau_view().
    Scalar modulation(int column) const noexcept { return tau_spacing() * Scalar(column - samples() / 2); }

    ComplexS operator()(int n, int k) const { return values_(n + n_max(), k); }
    ComplexS& operator()(int n, int k) { return values_(n + n_max(), k); }
    const Values& values() const noexcept { return values_; }
    Values& values() noexcept { return values_; }

    // Index k with time(k) == t up to rounding, if t is on the grid.
    std::optional<int> time_index(Scalar t) const {
        const Scalar x = (t - t0_) / dt_;
        const Scalar k = std::round(x);
        if (std::abs(x - k) > Scalar(1e-9) || k < 0 || k >= samples()) return std::nullopt;
        return static_cast<int>(k);
    }

    BasicSpectralField<Scalar> slice(int k) const {
        typename BasicSpectralField<Scalar>::Coefficients half(n_max() + 1);
        for (int n = 0; n <= n_max(); ++n) half(n) = (*this)(n, k);
        return BasicSpectralField<Scalar>(grid_, std::move(half));
    }

    void set_slice(int k, const BasicSpectralField<Scalar>& u) {
        require_same_grid(grid_, u.grid(), "SpaceTimeField::set_slice");
        for (int n = -n_max(); n <= n_max(); ++n) (*this)(n, k) = u[n];
    }

    // Discrete time-frequency transform: entry (n, m) approximates the integral of
    // u^(n,t) e^{-i tau t} dt at tau = n^3 + modulation(m).
    Values tau_view() const {
        const int K = samples();
        Values out(values_.rows(), K);
        thread_local Eigen::FFT<Scalar> fft;
        std::vector<ComplexS> in(K), spec(K);
        for (int n = -n_max(); n <= n_max(); ++n) {
            for (int k = 0; k < K; ++k) in[k] = values_(n + n_max(), k) * std::polar(Scalar(1), -dispersion_phase(n, time(k)));
            fft.fwd(spec, in);
            for (int c = 0; c < K; ++c) {
                const int m = c - K / 2;
                const int idx = ((m % K) + K) % K;
                out(n + n_max(), c) = dt_ * spec[idx] * std::polar(Scalar(1), -modulation(c) * t0_);
            }
        }
        return out;
    }

    static BasicSpaceTimeField from_tau_view(TorusGrid grid, Scalar t0, Scalar dt, const Values& tau) {
        const int K = static_cast<int>(tau.cols());
        BasicSpaceTimeField out(grid, t0, dt, K);
        thread_local Eigen::FFT<Scalar> fft;
        std::vector<ComplexS> in(K), phys(K);
        const int N = grid.n_max();
        for (int n = -N; n <= N; ++n) {
            for (int c = 0; c < K; ++c) {
                const int m = c - K / 2;
                const int idx = ((m % K) + K) % K;
                in[idx] = tau(n + N, c) * std::polar(Scalar(1), out.modulation(c) * t0);
            }
            fft.inv(phys, in);  // scaled by 1/K
            for (int k = 0; k < K; ++k)
                out.values_(n + N, k) = phys[k] / dt * std::polar(Scalar(1), dispersion_phase(n, out.time(k)));
        }
        return out;
    }

    BasicSpaceTimeField& operator+=(const BasicSpaceTimeField& o) {
        require_compatible(o);
        values_ += o.values_;
        return *this;
    }
    BasicSpaceTimeField& operator-=(const BasicSpaceTimeField& o) {
        require_compatible(o);
        values_ -= o.values_;
        return *this;
    }
    BasicSpaceTimeField& operator*=(ComplexS c) {
        values_ *= c;
        return *this;
    }
    friend BasicSpaceTimeField operator+(BasicSpaceTimeField a, const BasicSpaceTimeField& b) { return a += b; }
    friend BasicSpaceTimeField operator-(BasicSpaceTimeField a, const BasicSpaceTimeField& b) { return a -= b; }
    friend BasicSpaceTimeField operator*(ComplexS c, BasicSpaceTimeField a) { return a *= c; }

    void require_compatible(const BasicSpaceTimeField& o) const {
        require_same_grid(grid_, o.grid_, "SpaceTimeField");
        if (o.samples() != samples() || o.dt_ != dt_ || o.t0_ != t0_)
            throw std::invalid_argument("SpaceTimeField: time grids differ");
    }

private:
    TorusGrid grid_;
    Scalar t0_;
    Scalar dt_;
    Values values_;
};

using SpaceTimeField = BasicSpaceTimeField<double>;

// Copies u into a larger window [t0, t0 + samples*dt) sharing its time step; zero elsewhere.
template <typename Scalar>
BasicSpaceTimeField<Scalar> embed_in_window(const BasicSpaceTimeField<Scalar>& u, Scalar t0, int samples) {
    const Scalar shift = (u.t0() - t0) / u.dt();
    const Scalar offset = std::round(shift);
    if (std::abs(shift - offset) > Scalar(1e-9))
        throw std::invalid_argument("embed_in_window: window not aligned with the time grid");
    const int off = static_cast<int>(offset);
    if (off < 0 || off + u.samples() > samples)
        throw std::invalid_argument("embed_in_window: window does not contain the field");
    BasicSpaceTimeField<Scalar> out(u.grid(), t0, u.dt(), samples);
    out.values().middleCols(off, u.samples()) = u.values();
    return out;
}

// Pointwise-in-time multiplication by a scalar function of t.
template <typename Scalar, typename F>
BasicSpaceTimeField<Scalar> multiply_in_time(BasicSpaceTimeField<Scalar> u, F&& f) {
    for (int k = 0; k < u.samples(); ++k) u.values().col(k) *= f(u.time(k));
    return u;
}

// Free evolution S(t) u0 sampled on the given time grid.
template <typename Scalar>
BasicSpaceTimeField<Scalar> free_evolution(const BasicSpectralField<Scalar>& u0, Scalar t0, Scalar dt, int samples) {
    BasicSpaceTimeField<Scalar> out(u0.grid(), t0, dt, samples);
    for (int k = 0; k < samples; ++k) out.set_slice(k, apply_airy_semigroup(u0, out.time(k)));
    return out;
}

}  // namespace skdv
