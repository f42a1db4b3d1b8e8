#include "skdv/solver.hpp"

#include "skdv/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skdv {

namespace {


int zero_index(const SpaceTimeField& u, const char* where) {
    const auto k0 = u.time_index(0.0);
    if (!k0) throw std::invalid_argument(std::string(where) + ": time 0 must be a grid point");
    return *k0;
}

int steps_in(double window, double dt, const char* where) {
    const double x = window / dt;
    const int K = static_cast<int>(std::lround(x));
    if (K < 1 || std::abs(x - K) > 1e-6) throw std::invalid_argument(std::string(where) + ": window is not a multiple of dt");
    return K;
}

SpaceTimeField leading_samples(const SpaceTimeField& u, int samples) {
    if (samples > u.samples()) throw std::invalid_argument("trajectory shorter than requested window");
    return SpaceTimeField(u.grid(), u.t0(), u.dt(), u.values().leftCols(samples));
}

}  // namespace

NormSpec default_picard_metric(double delta, double p) {
    const double alpha = 0.5 - delta;
    return NormSpec::xsbpq(-alpha, alpha, p, 2);
}

void SolveConfig::validate() const {
    if (!(dt > 0)) throw std::invalid_argument("SolveConfig: dt must be positive");
    if (!(T > 0)) throw std::invalid_argument("SolveConfig: T must be positive");
    steps_in(T, dt, "SolveConfig");
    if (max_sweeps < 2) throw std::invalid_argument("SolveConfig: iteration cap must be >= 2");
    if (!(tolerance > 0)) throw std::invalid_argument("SolveConfig: tolerance must be positive");
    metric.validate();
    if (!metric.temporal()) throw std::invalid_argument("SolveConfig: metric must be a space-time norm");
    if (regime_check) {
        const double alpha = *metric.b;
        const double delta = 0.5 - alpha;
        if (metric.kind != NormKind::Xsbpq || metric.q != 2 || std::abs(metric.s + alpha) > 1e-12 ||
            !delta_in_regime(delta, metric.p))
            throw std::invalid_argument(
                "SolveConfig: metric outside X^{-alpha,alpha}_{p,2} with (p-2)/(4p) <= 1/2 - alpha < (p-2)/(2p)");
    }
    for (int N : levels)
        if (N < 0 || N > grid.n_max()) throw std::invalid_argument("SolveConfig: truncation level outside the grid");
}

int SolveConfig::steps() const { return steps_in(T, dt, "SolveConfig"); }

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::NotConverged: return "not_converged";
        case SolveStatus::WindowUnderflow: return "window_underflow";
    }
    return "unknown";
}

SpaceTimeField duhamel_integral(const SpaceTimeField& forcing) {
    const int k0 = zero_index(forcing, "duhamel_integral");
    const int K = forcing.samples();
    const int N = forcing.n_max();
    const double h = 0.5 * forcing.dt();
    SpaceTimeField out(forcing.grid(), forcing.t0(), forcing.dt(), K);
    std::vector<Complex> twisted(K);
    for (int n = -N; n <= N; ++n) {
        for (int k = 0; k < K; ++k) twisted[k] = std::polar(1.0, -dispersion_phase(n, forcing.time(k))) * forcing(n, k);
        Complex acc = 0;
        out(n, k0) = 0;
        for (int k = k0 + 1; k < K; ++k) {
            acc += h * (twisted[k - 1] + twisted[k]);
            out(n, k) = std::polar(1.0, dispersion_phase(n, forcing.time(k))) * acc;
        }
        acc = 0;
        for (int k = k0 - 1; k >= 0; --k) {
            acc -= h * (twisted[k] + twisted[k + 1]);
            out(n, k) = std::polar(1.0, dispersion_phase(n, forcing.time(k))) * acc;
        }
    }
    return out;
}

SpaceTimeField duhamel_nonlinearity(const SpaceTimeField& u, const SpaceTimeField& v, DuhamelRule rule) {
    u.require_compatible(v);
    const int K = u.samples();
    if (rule == DuhamelRule::Trapezoid) {
        SpaceTimeField forcing(u.grid(), u.t0(), u.dt(), K);
        for (int k = 0; k < K; ++k) {
            const auto a = u.slice(k);
            if (&u == &v) {
                forcing.set_slice(k, nonlinearity(a, a));
            } else {
                forcing.set_slice(k, nonlinearity(a, v.slice(k)));
            }
        }
        return duhamel_integral(forcing);
    }

    const int k0 = zero_index(u, "duhamel_nonlinearity");
    const int N = u.n_max();
    const double dt = u.dt();
    // On one step the pair term is e^{i w t} (P_j (1 - s) + P_{j+1} s) with w = -3 n n1 n2; its exact
    // integral is dt e^{i w t_j} (A(w dt) P_j + conj(A(w dt)) e^{i w dt} P_{j+1}) with
    // A(x) = int_0^1 (1 - s) e^{i x s} ds. In the physical picture e^{i w t} P = e^{-i n^3 t} u(n1) v(n2).
    auto weight = [](double x) {
        if (std::abs(x) < 0.1) {
            Complex sum = 0, term = 0.5;  // sum_m (i x)^m / (m + 2)!
            for (int m = 0; m < 8; ++m) {
                sum += term;
                term *= Complex(0, x) / double(m + 3);
            }
            return sum;
        }
        return Complex(0, 1 / x) - (std::polar(1.0, x) - 1.0) / (x * x);
    };
    SpaceTimeField out(u.grid(), u.t0(), u.dt(), K);
    // Real fields: rows n < 0 are conjugates, and n = 0 carries the factor n.
    for (int n = 1; n <= N; ++n) {
        const int lo = n - N;
        const int width = 2 * N - n + 1;  // n1 in [n - N, N]
        std::vector<Complex> A(width);
        for (int i = 0; i < width; ++i) {
            const int n1 = lo + i;
            A[i] = weight(-3.0 * n * n1 * (n - n1) * dt);
        }
        std::vector<Complex> Q(K), R(K);  // sums against A and conj(A), times e^{-i n^3 t_k}
        for (int k = 0; k < K; ++k) {
            Complex q = 0, r = 0;
            for (int i = 0; i < width; ++i) {
                const int n1 = lo + i;
                const Complex p = u(n1, k) * v(n - n1, k);
                q += A[i] * p;
                r += std::conj(A[i]) * p;
            }
            const Complex phase = std::polar(1.0, -dispersion_phase(n, u.time(k)));
            Q[k] = phase * q;
            R[k] = phase * r;
        }
        const Complex scale = Complex(0, n) * dt;
        Complex acc = 0;
        out(n, k0) = 0;
        for (int k = k0 + 1; k < K; ++k) {
            acc += scale * (Q[k - 1] + R[k]);
            out(n, k) = std::polar(1.0, dispersion_phase(n, u.time(k))) * acc;
        }
        acc = 0;
        for (int k = k0 - 1; k >= 0; --k) {
            acc -= scale * (Q[k] + R[k + 1]);
            out(n, k) = std::polar(1.0, dispersion_phase(n, u.time(k))) * acc;
        }
        for (int k = 0; k < K; ++k) out(-n, k) = std::conj(out(n, k));
    }
    return out;
}

SpaceTimeField duhamel_apply(const SpaceTimeField& u, const SpectralField& u0, const SpaceTimeField& forcing) {
    u.require_compatible(forcing);
    require_same_grid(u.grid(), u0.grid(), "duhamel_apply");
    if (std::abs(u.t0()) > 0) throw std::invalid_argument("duhamel_apply: trajectories start at t = 0");
    SpaceTimeField out = free_evolution(u0, 0.0, u.dt(), u.samples());
    SpaceTimeField n = duhamel_nonlinearity(u, u);
    out.values() += forcing.values() - 0.5 * n.values();
    return out;
}

SpaceTimeField duhamel_apply(const SpaceTimeField& u, const SpectralField& u0, const CovarianceOp& phi,
                             const BrownianFamily& family) {
    if (std::abs(family.grid().dt - u.dt()) > 1e-15 * u.dt() || u.samples() > family.grid().steps + 1)
        throw std::invalid_argument("duhamel_apply: noise grid does not cover the trajectory");
    if (family.n_max() != u.n_max()) throw std::invalid_argument("duhamel_apply: grid mismatch");
    const auto phi_field = ito_convolution(phi, family).field;
    return duhamel_apply(u, u0, leading_samples(phi_field, u.samples()));
}

double picard_distance(const SpaceTimeField& a, const SpaceTimeField& b, const SolveConfig& config, double window) {
    return restricted_norm(a - b, config.metric.restricted(window)).value;
}

Trajectory picard_iterate(const SpectralField& u0, const SpaceTimeField& forcing, const SolveConfig& config) {
    require_same_grid(u0.grid(), forcing.grid(), "picard_iterate");
    if (std::abs(forcing.t0()) > 0) throw std::invalid_argument("picard_iterate: forcing must start at t = 0");
    const double window = (forcing.samples() - 1) * forcing.dt();
    SpaceTimeField constant = free_evolution(u0, 0.0, forcing.dt(), forcing.samples());
    constant += forcing;

    Trajectory out{SpaceTimeField(forcing.grid(), 0.0, forcing.dt(), forcing.samples()), {}, window, false, 0,
                   SolveStatus::NotConverged, ""};
    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
        SpaceTimeField next = constant;
        next.values() -= 0.5 * duhamel_nonlinearity(out.u, out.u).values();
        const double r = picard_distance(next, out.u, config, window);
        out.residuals.push_back(r);
        out.u = std::move(next);
        if (r <= config.tolerance) {
            out.converged = true;
            out.status = SolveStatus::Converged;
            return out;
        }
        if (!std::isfinite(r) || r > 1e8 * std::max(out.residuals.front(), 1e-300)) {
            out.reason = "iteration diverged";
            return out;
        }
    }
    out.reason = "no contraction within the sweep cap";
    return out;
}

SpaceTimeField noise_forcing(const CovarianceOp& phi, const BrownianFamily& family, double window) {
    const int K = steps_in(window, family.grid().dt, "noise_forcing");
    if (K > family.grid().steps) throw std::invalid_argument("noise_forcing: Brownian paths too short for the window");
    auto field = leading_samples(ito_convolution(phi, family).field, K + 1);
    return multiply_in_time(std::move(field), [](double t) { return time_cutoff(t); });
}

Trajectory picard_solve(const SpectralField& u0, const CovarianceOp& phi, const BrownianFamily& family,
                        const SolveConfig& config) {
    config.validate();
    require_same_grid(u0.grid(), config.grid, "picard_solve");
    if (family.n_max() != config.grid.n_max()) throw std::invalid_argument("picard_solve: noise modes differ from the grid");
    if (std::abs(family.grid().dt - config.dt) > 1e-15 * config.dt)
        throw std::invalid_argument("picard_solve: noise time step differs from the solver time step");
    const auto phi_field = ito_convolution(phi, family).field;
    const auto eta_phi = multiply_in_time(phi_field, [](double t) { return time_cutoff(t); });

    double T = config.T;
    int halved = 0;
    while (true) {
        const int K = steps_in(T, config.dt, "picard_solve");
        if (K > family.grid().steps) throw std::invalid_argument("picard_solve: Brownian paths too short for the window");
        Trajectory traj = picard_iterate(u0, leading_samples(eta_phi, K + 1), config);
        traj.halved_count = halved;
        if (traj.converged || !config.allow_halving) return traj;
        T /= 2;
        ++halved;
        if (T < 8 * config.dt || std::abs(T / config.dt - std::round(T / config.dt)) > 1e-6) {
            traj.status = SolveStatus::WindowUnderflow;
            traj.reason = "no contracting window above 8 dt (" + traj.reason + ")";
            return traj;
        }
    }
}

Trajectory picard_solve(const SpectralField& u0, const SolveConfig& config) {
    config.validate();
    require_same_grid(u0.grid(), config.grid, "picard_solve");
    const int K = config.steps();
    const auto family = BrownianFamily(config.grid.n_max(), TimeGrid(config.dt, K), 0,
                                       MatrixXc::Zero(config.grid.n_max() + 1, K));
    return picard_solve(u0, truncate(CovarianceOp::identity_offmean(config.grid.n_max(), family.grid()), 0), family,
                        config);
}

TruncatedSequence solve_truncated_sequence(const SpectralField& u0, const CovarianceOp& phi,
                                           const BrownianFamily& family, const SolveConfig& config) {
    config.validate();
    TruncatedSequence out;
    out.levels = config.levels;
    std::sort(out.levels.begin(), out.levels.end());
    if (out.levels.empty()) throw std::invalid_argument("solve_truncated_sequence: no truncation levels");
    for (int N : out.levels) {
        out.runs.push_back(picard_solve(truncate_modes(u0, N), truncate(phi, N), family, config));
        const auto& run = out.runs.back();
        if (run.status != SolveStatus::Converged && out.status == SolveStatus::Converged) {
            out.status = run.status;
            out.reason = "level " + std::to_string(N) + ": " + run.reason;
        }
    }
    out.window = out.runs.front().window;
    for (const auto& run : out.runs) out.window = std::min(out.window, run.window);
    const int samples = steps_in(out.window, config.dt, "solve_truncated_sequence") + 1;
    const int L = static_cast<int>(out.levels.size());
    out.table = Eigen::MatrixXd::Zero(L, L);
    for (int a = 0; a < L; ++a)
        for (int b = a + 1; b < L; ++b) {
            const double d = picard_distance(leading_samples(out.runs[a].u, samples),
                                             leading_samples(out.runs[b].u, samples), config, out.window);
            out.table(a, b) = out.table(b, a) = d;
        }
    for (int a = 0; a + 1 < L; ++a) out.consecutive.push_back({out.levels[a], out.levels[a + 1], out.table(a, a + 1)});
    return out;
}

AdaptiveWindow adaptive_window(const SpectralField& u0, const CovarianceOp& phi, const BrownianFamily& family,
                               const SolveConfig& config) {
    config.validate();
    require_same_grid(u0.grid(), config.grid, "adaptive_window");
    const double dt = family.grid().dt;
    if (family.grid().horizon() < 1 - 1e-12) throw std::invalid_argument("adaptive_window: Brownian paths must cover [0, 1]");
    const double alpha = *config.metric.b;
    const double p = config.metric.p;
    const NormSpec metric = NormSpec::xsbpq(-alpha, alpha, p, 2);

    const auto phi_field = ito_convolution(phi, family).field;
    const auto eta_phi = multiply_in_time(phi_field, [](double t) { return time_cutoff(t); });
    const int support = std::min(family.grid().steps, steps_in(std::floor(2 / dt) * dt, dt, "adaptive_window"));
    const double noise_norm = restricted_norm(leading_samples(eta_phi, support + 1), metric.restricted(support * dt)).value;

    AdaptiveWindow out;
    out.radius = 2 * (besov_norm(u0, NormSpec::besov(-alpha, p)) + noise_norm) + 1;
    double T = 1;
    while (true) {
        const int K = steps_in(T, dt, "adaptive_window");
        SpaceTimeField w = free_evolution(u0, 0.0, dt, K + 1);
        w += leading_samples(eta_phi, K + 1);
        const auto spec = metric.restricted(T);
        const double wn = restricted_norm(w, spec).value;
        double factor = 0;
        if (wn > 0) factor = out.radius * restricted_norm(duhamel_nonlinearity(w, w), spec).value / (wn * wn);
        out.probes.push_back({T, factor});
        if (factor <= 0.5) {
            out.T = T;
            return out;
        }
        T /= 2;
        if (T < 8 * dt) {
            out.T = 2 * T;
            out.status = SolveStatus::WindowUnderflow;
            out.reason = "contraction factor above 1/2 down to 8 dt";
            return out;
        }
    }
}

std::array<SpaceTimeField, 3> second_iteration_decomposition(const SpaceTimeField& u) {
    const int N = u.n_max();
    const int K = u.samples();
    const int k0 = zero_index(u, "second_iteration_decomposition");
    for (int k = 0; k < K; ++k)
        if (u(0, k) != Complex(0)) throw std::invalid_argument("second_iteration_decomposition: field must be mean-zero");
    const auto tau = u.tau_view();
    const double L = u.window_length();
    std::vector<double> mod(K);
    for (int c = 0; c < K; ++c) mod[c] = u.modulation(c);

    std::array<SpaceTimeField, 3> forcing = {SpaceTimeField(u.grid(), u.t0(), u.dt(), K),
                                            SpaceTimeField(u.grid(), u.t0(), u.dt(), K),
                                            SpaceTimeField(u.grid(), u.t0(), u.dt(), K)};
    Eigen::FFT<double> fft;
    std::array<std::vector<Complex>, 3> bucket;
    for (auto& b : bucket) b.assign(K, 0);
    std::vector<Complex> series(K);
    for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        for (int n1 = std::max(-N, n - N); n1 <= std::min(N, n + N); ++n1) {
            const int n2 = n - n1;
            if (n1 == 0 || n2 == 0) continue;
            for (auto& b : bucket) std::fill(b.begin(), b.end(), Complex(0));
            const double resonance = 3.0 * n * n1 * n2;
            bool any = false;
            for (int c1 = 0; c1 < K; ++c1) {
                const Complex a = tau(n1 + N, c1);
                if (a == Complex(0)) continue;
                const double s1 = japanese(mod[c1]);
                for (int c2 = 0; c2 < K; ++c2) {
                    const Complex b = tau(n2 + N, c2);
                    if (b == Complex(0)) continue;
                    const double s2 = japanese(mod[c2]);
                    const double s0 = japanese(mod[c1] + mod[c2] - resonance);
                    const int j = (s0 >= s1 && s0 >= s2) ? 0 : (s1 >= s2 ? 1 : 2);
                    const int M = (c1 - K / 2) + (c2 - K / 2);
                    bucket[j][(M % K + K) % K] += a * b;
                    any = true;
                }
            }
            if (!any) continue;
            for (int j = 0; j < 3; ++j) {
                fft.inv(series, bucket[j]);  // (1/K) sum_r bucket[r] e^{2 pi i r k / K}
                for (int k = 0; k < K; ++k) {
                    const int shifted = ((k - k0) % K + K) % K;
                    const Complex value = series[shifted] * double(K) / (L * L);
                    forcing[j](n, k) += Complex(0, n) * std::polar(1.0, dispersion_phase(n1, u.time(k)) + dispersion_phase(n2, u.time(k))) * value;
                }
            }
        }
    }
    return {duhamel_integral(forcing[0]), duhamel_integral(forcing[1]), duhamel_integral(forcing[2])};
}

SpaceTimeField reference_kdv(const SpectralField& u0, double dt, int steps, int output_stride) {
    if (output_stride < 1 || steps % output_stride != 0)
        throw std::invalid_argument("reference_kdv: stride must divide the step count");
    const TorusGrid grid = u0.grid();
    const int N = grid.n_max();
    SpaceTimeField out(grid, 0.0, dt * output_stride, steps / output_stride + 1);
    // v = e^{-i n^3 t} u^ obeys v' = -(1/2) e^{-i n^3 t} [d/dx u^2]^.
    auto rhs = [&](const VectorXc& v, double t) {
        VectorXc u(N + 1);
        for (int n = 0; n <= N; ++n) u(n) = std::polar(1.0, dispersion_phase(n, t)) * v(n);
        const SpectralField field(grid, u);
        const auto nl = nonlinearity(field, field);
        VectorXc d(N + 1);
        for (int n = 0; n <= N; ++n) d(n) = -0.5 * std::polar(1.0, -dispersion_phase(n, t)) * nl.half()(n);
        return d;
    };
    VectorXc v = u0.half();
    out.set_slice(0, u0);
    for (int step = 0; step < steps; ++step) {
        const double t = step * dt;
        const VectorXc k1 = rhs(v, t);
        const VectorXc k2 = rhs(v + 0.5 * dt * k1, t + 0.5 * dt);
        const VectorXc k3 = rhs(v + 0.5 * dt * k2, t + 0.5 * dt);
        const VectorXc k4 = rhs(v + dt * k3, t + dt);
        v += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        if ((step + 1) % output_stride == 0) {
            const double t1 = (step + 1) * dt;
            VectorXc u(N + 1);
            for (int n = 0; n <= N; ++n) u(n) = std::polar(1.0, dispersion_phase(n, t1)) * v(n);
            out.set_slice((step + 1) / output_stride, SpectralField(grid, u));
        }
    }
    return out;
}

double sobolev_norm(const SpectralField& f, double s) { return sobolev_fl_norm(f, NormSpec::sobolev(s)); }

double l2_mass(const SpectralField& f) {
    double acc = std::norm(f.half()(0));
    for (int n = 1; n <= f.n_max(); ++n) acc += 2 * std::norm(f.half()(n));
    return 2 * kPi * acc;
}

}  // namespace skdv
