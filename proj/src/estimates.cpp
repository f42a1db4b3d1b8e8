#include "skdv/estimates.hpp"

#include "skdv/convolution.hpp"
#include "skdv/cutoff.hpp"
#include "skdv/parallel.hpp"
#include "skdv/rng.hpp"
#include "skdv/solver.hpp"
#include "skdv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace skdv {

namespace {

constexpr const char* kConventions =
    "<x> = 1 + |x|; dyadic blocks B_0 = {|n| <= 1}, B_j = {2^(j-1) < |n| <= 2^j}; "
    "tau-view on the window lattice, tau - n^3 = 2 pi (c - K/2) / L; sums over n unnormalised; "
    "rng philox4x32-10";

std::string conventions() {
    return std::string(kConventions) + "; " + kCutoffDescription;
}

RatioReport make_report(std::string estimate, std::string distribution, int size, std::uint64_t seed, int n_max) {
    RatioReport r;
    r.estimate = std::move(estimate);
    r.distribution = std::move(distribution);
    r.ensemble_size = size;
    r.seed = seed;
    r.n_max = n_max;
    r.conventions = conventions();
    return r;
}

// Collects per-sample optional ratios in index order.
void collect(RatioReport& report, const std::vector<std::optional<double>>& values) {
    for (const auto& v : values) {
        if (v) report.ratios.push_back(*v);
        else ++report.skipped;
    }
    finalize(report);
}

std::optional<double> guarded(double num, double den) {
    if (!(den > 0)) return std::nullopt;
    return num / den;
}

std::string tuple_string(std::initializer_list<std::int64_t> xs) {
    std::ostringstream os;
    os << '(';
    bool first = true;
    for (auto x : xs) {
        if (!first) os << ", ";
        os << x;
        first = false;
    }
    os << ')';
    return os.str();
}

std::int64_t cube(std::int64_t x) { return x * x * x; }

std::string key(const char* name, double x) {
    std::ostringstream os;
    os << name << '=' << x;
    return os.str();
}

}  // namespace

// ---- resonance identities -------------------------------------------------------------------

ResonanceReport resonance_identity_sweep(int bound) {
    if (bound < 0 || bound > 2048) throw std::invalid_argument("resonance_identity_sweep: bound must be in [0, 2048]");
    ResonanceReport report;
    report.bound = bound;
    auto fail = [&](std::string what) {
        report.passed = false;
        if (report.witnesses.size() < 16) report.witnesses.push_back(std::move(what));
    };
    CounterRng rng(std::uint64_t(bound) + 1, Stream::Auxiliary);
    for (std::int64_t n1 = -bound; n1 <= bound; ++n1)
        for (std::int64_t n2 = -bound; n2 <= bound; ++n2) {
            const std::int64_t n = n1 + n2;
            const std::int64_t lhs = cube(n) - cube(n1) - cube(n2);
            const std::int64_t rhs = 3 * n * n1 * n2;
            ++report.pairs_checked;
            if (lhs != rhs) fail("pair " + tuple_string({n1, n2}));
            // With m_j = tau_j - n_j^3 and tau = tau1 + tau2, m1 + m2 - m0 = 3 n n1 n2.
            const std::int64_t scale = 2 * std::abs(rhs) + 2;
            const auto draw = [&] { return std::int64_t(std::floor((2 * rng.uniform() - 1) * double(scale))); };
            const std::int64_t tau1 = cube(n1) + draw();
            const std::int64_t tau2 = cube(n2) + draw();
            const std::int64_t m0 = tau1 + tau2 - cube(n);
            const std::int64_t m1 = tau1 - cube(n1);
            const std::int64_t m2 = tau2 - cube(n2);
            const std::int64_t biggest = 1 + std::max({std::abs(m0), std::abs(m1), std::abs(m2)});
            ++report.maxmax_checked;
            if (3 * biggest < std::abs(rhs)) fail("maxmax " + tuple_string({n1, n2, tau1, tau2}));
        }
    for (std::int64_t n2 = -bound; n2 <= bound; ++n2)
        for (std::int64_t n3 = -bound; n3 <= bound; ++n3) {
            const std::int64_t c2 = cube(n2), c3 = cube(n3), s23 = n2 + n3;
            for (std::int64_t n4 = -bound; n4 <= bound; ++n4) {
                const std::int64_t n = s23 + n4;
                const std::int64_t lhs = cube(n) - c2 - c3 - cube(n4);
                const std::int64_t rhs = 3 * s23 * (n3 + n4) * (n4 + n2);
                if (lhs != rhs) fail("triple " + tuple_string({n2, n3, n4}));
            }
            report.triples_checked += 2 * bound + 1;
        }
    return report;
}

// ---- ratio reports --------------------------------------------------------------------------

void finalize(RatioReport& report) {
    if (report.ratios.empty()) {
        report.max_ratio = 0;
        report.quantiles = {};
        return;
    }
    report.max_ratio = *std::max_element(report.ratios.begin(), report.ratios.end());
    report.quantiles = five_number_summary(report.ratios);
}

SpaceTimeField random_profile_field(const FieldProfile& profile, std::uint64_t seed) {
    if (profile.n_max < 1 || profile.samples < 2 || profile.k < 1)
        throw std::invalid_argument("random_profile_field: n_max, samples and k must be positive");
    const int N = profile.n_max;
    const int K = profile.samples;
    const double L = 2 * kPi * profile.k;
    const double dt = L / K;
    MatrixXc tau = MatrixXc::Zero(2 * N + 1, K);
    const int lowest = profile.real ? 0 : -N;
    for (int n = lowest; n <= N; ++n) {
        if (n == 0 && profile.mean_zero) continue;
        CounterRng rng(seed, Stream::RandomField, static_cast<std::uint32_t>(n + N));
        const double spatial = std::pow(japanese(double(n)), profile.sigma);
        for (int c = 0; c < K; ++c) {
            const double sd = spatial * std::pow(japanese(double(c - K / 2) / profile.k), profile.beta);
            const double re = rng.normal();
            const double im = rng.normal();
            tau(n + N, c) = sd * Complex(re, im) / std::sqrt(2.0);
        }
    }
    auto u = SpaceTimeField::from_tau_view(TorusGrid(N), profile.t0, dt, tau);
    if (profile.real) {
        for (int k = 0; k < K; ++k) {
            u(0, k) = Complex(u(0, k).real(), 0);
            for (int n = 1; n <= N; ++n) u(-n, k) = std::conj(u(n, k));
        }
    }
    return u;
}

SpaceTimeField modulated_free_wave(int n_max, int n, Complex amplitude, int samples, double t0) {
    if (std::abs(n) > n_max) throw std::invalid_argument("modulated_free_wave: mode outside grid");
    SpaceTimeField u(TorusGrid(n_max), t0, 2 * kPi / samples, samples);
    for (int k = 0; k < samples; ++k) {
        const double t = u.time(k);
        u(n, k) = amplitude * time_cutoff(t) * std::polar(1.0, dispersion_phase(n, t));
    }
    return u;
}

std::optional<double> strichartz_quotient(const SpaceTimeField& u) {
    const double den = xsb_norm(u, NormSpec::xsb(0, 1.0 / 3));
    if (!(den > 0)) return std::nullopt;
    return l4_norm(u) / den;
}

RatioReport strichartz_ratio(const StrichartzStudy& study) {
    FieldProfile profile = study.profile;
    profile.n_max = study.n_max;
    const int total = study.random_fields + study.free_waves;
    auto report = make_report("strichartz", "gaussian tau-profile + modulated free waves", total, study.seed, study.n_max);
    report.parameters = {{"s", 0},
                         {"b", 1.0 / 3},
                         {"profile_sigma", profile.sigma},
                         {"profile_beta", profile.beta},
                         {"samples", profile.samples},
                         {"k", profile.k},
                         {"free_waves", study.free_waves}};
    std::vector<std::optional<double>> values(total);
    parallel_for(total, [&](int i) {
        const std::uint64_t seed = derive_seed(study.seed, std::uint64_t(i));
        if (i < study.random_fields) {
            values[i] = strichartz_quotient(random_profile_field(profile, seed));
        } else {
            CounterRng rng(seed, Stream::Auxiliary);
            const int n = 1 + std::min(study.n_max - 1, int(rng.uniform() * study.n_max));
            const int sign = rng.uniform() < 0.5 ? -1 : 1;
            const Complex amp(rng.normal(), rng.normal());
            values[i] = strichartz_quotient(modulated_free_wave(study.n_max, sign * n, amp));
        }
    });
    collect(report, values);
    double free_max = 0;
    for (int i = study.random_fields; i < total; ++i)
        if (values[i]) free_max = std::max(free_max, *values[i]);
    report.extras["free_wave_max_ratio"] = free_max;
    return report;
}

std::optional<double> bilinear_quotient(const SpaceTimeField& u, const SpaceTimeField& v, double s) {
    const auto spec = NormSpec::xsb(s, 0.5);
    const double den = xsb_norm(u, spec) * xsb_norm(v, spec);
    if (!(den > 0)) return std::nullopt;
    ProductOptions opt;
    opt.derivative = true;
    opt.s = s;
    opt.b = -0.5;
    opt.skip_zero_modes = true;
    return product_norm(u, v, opt) / den;
}

std::optional<double> a0_bilinear_quotient(const SpaceTimeField& u, const SpaceTimeField& v, double delta) {
    const auto spec = NormSpec::xsb(-0.5 - delta, 0.5 - delta);
    const double den = xsb_norm(u, spec) * xsb_norm(v, spec);
    if (!(den > 0)) return std::nullopt;
    ProductOptions opt;
    opt.derivative = true;
    opt.s = -0.5 + delta;
    opt.b = -0.5 - delta;
    opt.region = Region::A0;
    opt.skip_zero_modes = true;
    return product_norm(u, v, opt) / den;
}

RatioReport bilinear_ratio(const BilinearStudy& study) {
    FieldProfile profile = study.profile;
    profile.n_max = study.n_max;
    profile.mean_zero = true;
    auto report = make_report("bilinear", "gaussian tau-profile pairs, mean zero", study.pairs, study.seed, study.n_max);
    report.parameters = {{"s", study.s},
                         {"b", 0.5},
                         {"delta", study.delta},
                         {"profile_sigma", profile.sigma},
                         {"profile_beta", profile.beta},
                         {"samples", profile.samples},
                         {"k", profile.k}};
    std::vector<std::optional<double>> full(study.pairs), a0(study.pairs);
    parallel_for(study.pairs, [&](int i) {
        const std::uint64_t seed = derive_seed(study.seed, std::uint64_t(i));
        const auto u = random_profile_field(profile, derive_seed(seed, 0));
        const auto v = random_profile_field(profile, derive_seed(seed, 1));
        full[i] = bilinear_quotient(u, v, study.s);
        a0[i] = a0_bilinear_quotient(u, v, study.delta);
    });
    collect(report, full);
    double a0_max = 0;
    for (const auto& x : a0)
        if (x) a0_max = std::max(a0_max, *x);
    report.extras["a0_max_ratio"] = a0_max;
    return report;
}

// ---- near-curve set -------------------------------------------------------------------------

namespace {

void add_clipped(std::vector<Interval>& out, double lo, double hi, Interval window) {
    lo = std::max(lo, window.lo);
    hi = std::min(hi, window.hi);
    if (lo < hi) out.push_back({lo, hi});
}

std::vector<Interval> merge(std::vector<Interval> xs) {
    std::sort(xs.begin(), xs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& x : xs) {
        if (!out.empty() && x.lo <= out.back().hi) out.back().hi = std::max(out.back().hi, x.hi);
        else out.push_back(x);
    }
    return out;
}

// Antiderivative of <eta>^{-e} vanishing at 0.
double japanese_power_primitive(double eta, double e) {
    const double a = std::abs(eta);
    const double v = e == 1 ? std::log1p(a) : (std::pow(1 + a, 1 - e) - 1) / (1 - e);
    return eta < 0 ? -v : v;
}

}  // namespace

NearCurveSet near_curve_set(int n, double c, Interval window) {
    if (!(c > 0)) throw std::invalid_argument("near_curve_set: c must be positive");
    NearCurveSet set;
    set.n = n;
    set.c = c;
    set.window = window;
    if (!(window.lo < window.hi)) return set;
    const std::int64_t m = std::abs(std::int64_t(n));
    // Centers for -n are the negated centers for n; work with m = |n| in the mirrored window.
    const Interval w = n < 0 ? Interval{-window.hi, -window.lo} : window;
    std::vector<Interval> raw;
    auto add = [&](std::int64_t n1) {
        const std::int64_t n2 = m - n1;
        const double prod = double(m) * double(n1) * double(n2);
        const double center = -3 * prod;
        const double radius = c * std::pow(1 + std::abs(prod), 0.01);
        add_clipped(raw, center - radius, center + radius, w);
        return center - radius > w.hi;
    };
    if (m == 0) {
        add(0);
    } else {
        // Centers 3 m ((n1 - m/2)^2 - m^2/4) grow with |n1 - m/2|; walk outwards until past the window.
        for (std::int64_t n1 = m / 2;; ++n1)
            if (add(n1)) break;
        for (std::int64_t n1 = m / 2 - 1;; --n1)
            if (add(n1)) break;
    }
    auto merged = merge(std::move(raw));
    if (n < 0) {
        for (auto& x : merged) x = {-x.hi, -x.lo};
        std::reverse(merged.begin(), merged.end());
    }
    set.intervals = std::move(merged);
    return set;
}

double near_curve_integral(const NearCurveSet& set, double exponent) {
    double total = 0;
    for (const auto& x : set.intervals)
        total += japanese_power_primitive(x.hi, exponent) - japanese_power_primitive(x.lo, exponent);
    return total;
}

double near_curve_integral(int n, double c, Interval window, double exponent) {
    return near_curve_integral(near_curve_set(n, c, window), exponent);
}

NearCurveSweep near_curve_sweep(int n_hi, double c, Interval window, double exponent) {
    if (n_hi < 2) throw std::invalid_argument("near_curve_sweep: need n_hi >= 2");
    NearCurveSweep sweep;
    sweep.values.resize(n_hi);
    parallel_for(n_hi, [&](int i) { sweep.values[i] = near_curve_integral(i + 1, c, window, exponent); });
    std::vector<double> xs;
    double best = 0;
    for (int n = 1; n <= n_hi; ++n) {
        sweep.ns.push_back(n);
        best = std::max(best, sweep.values[n - 1]);
        sweep.running_max.push_back(best);
        xs.push_back(n);
    }
    sweep.value_slope = fit_loglog(xs, sweep.values).slope;
    sweep.running_max_slope = fit_loglog(xs, sweep.running_max).slope;
    return sweep;
}

// ---- linear lemmas --------------------------------------------------------------------------

std::optional<double> homogeneous_quotient(const SpectralField& u0, const LinearStudy& study, double T) {
    const double den = std::pow(T, 0.5 - study.b) * besov_norm(u0, NormSpec::besov(study.s, study.p));
    if (!(den > 0)) return std::nullopt;
    const int samples = static_cast<int>(std::lround(T / study.dt)) + 1;
    const auto u = free_evolution(u0, 0.0, study.dt, samples);
    return norm(u, NormSpec::xsbpq(study.s, study.b, study.p, 2).restricted(T)) / den;
}

std::optional<double> inhomogeneous_quotient(const SpaceTimeField& F, const LinearStudy& study, double T) {
    const double den = xsbpq_norm(F, NormSpec::xsbpq(study.s, study.b - 1, study.p, 2)) +
                       xsbpq_norm(F, NormSpec::xsbpq(study.s, -1, study.p, 1));
    if (!(den > 0)) return std::nullopt;
    const auto w = duhamel_integral(F);
    return norm(w, NormSpec::xsbpq(study.s, study.b, study.p, 2).restricted(T)) / den;
}

std::optional<double> time_decay_quotient(const SpaceTimeField& u, const LinearStudy& study, double T) {
    const double den = std::pow(T, study.b_high - study.b - study.epsilon) * xsb_norm(u, NormSpec::xsb(study.s, study.b_high));
    if (!(den > 0)) return std::nullopt;
    return norm(u, NormSpec::xsb(study.s, study.b).restricted(T)) / den;
}

namespace {

// eta(t) times a random profile field on a 2 pi window with 0 on the grid.
SpaceTimeField linear_test_field(const LinearStudy& study, std::uint64_t seed) {
    FieldProfile profile;
    profile.n_max = study.n_max;
    profile.samples = 512;
    profile.k = 1;
    const double dt = 2 * kPi / profile.samples;
    profile.t0 = -163 * dt;
    profile.sigma = 0;
    profile.beta = -1;
    auto u = random_profile_field(profile, seed);
    return multiply_in_time(std::move(u), [](double t) { return time_cutoff(t); });
}

SpectralField linear_test_data(int n_max, std::uint64_t seed) {
    SpectralField u0(TorusGrid(n_max), true);
    CounterRng rng(seed, Stream::RandomField);
    for (int n = 1; n <= n_max; ++n) {
        const double re = rng.normal();
        const double im = rng.normal();
        u0.set(n, Complex(re, im) / std::sqrt(2.0));
    }
    return u0;
}

}  // namespace

LinearReport linear_lemma_ratios(const LinearStudy& study) {
    if (study.Ts.empty()) throw std::invalid_argument("linear_lemma_ratios: no windows");
    for (double T : study.Ts)
        if (!(T > 0 && T <= 1)) throw std::invalid_argument("linear_lemma_ratios: windows must lie in (0, 1]");
    if (!(study.b < 0.5)) throw std::invalid_argument("linear_lemma_ratios: b must be below 1/2");
    const int M = study.ensemble;
    const int W = static_cast<int>(study.Ts.size());
    std::vector<std::optional<double>> hom(M * W), inh(M * W), dec(M * W);
    parallel_for(M, [&](int i) {
        const std::uint64_t seed = derive_seed(study.seed, std::uint64_t(i));
        const auto u0 = linear_test_data(study.n_max, derive_seed(seed, 0));
        const auto F = linear_test_field(study, derive_seed(seed, 1));
        const auto u = linear_test_field(study, derive_seed(seed, 2));
        for (int w = 0; w < W; ++w) {
            const double T = study.Ts[w];
            hom[i * W + w] = homogeneous_quotient(u0, study, T);
            inh[i * W + w] = inhomogeneous_quotient(F, study, T);
            dec[i * W + w] = time_decay_quotient(u, study, T);
        }
    });
    LinearReport out;
    const std::map<std::string, double> params = {{"s", study.s},       {"b", study.b},
                                                  {"b_high", study.b_high}, {"epsilon", study.epsilon},
                                                  {"p", study.p},       {"q", 2},
                                                  {"dt", study.dt}};
    auto build = [&](const char* name, const char* dist, const std::vector<std::optional<double>>& v) {
        auto r = make_report(name, dist, M * W, study.seed, study.n_max);
        r.parameters = params;
        collect(r, v);
        for (int w = 0; w < W; ++w) {
            double best = 0;
            for (int i = 0; i < M; ++i)
                if (v[i * W + w]) best = std::max(best, *v[i * W + w]);
            r.extras[key("max_T", study.Ts[w])] = best;
        }
        return r;
    };
    out.homogeneous = build("linear-homogeneous", "complex gaussian data, unit variance per mode", hom);
    out.inhomogeneous = build("linear-inhomogeneous", "eta times gaussian tau-profile forcing", inh);
    out.time_decay = build("time-decay", "eta times gaussian tau-profile field", dec);
    return out;
}

// ---- R_alpha --------------------------------------------------------------------------------

namespace {

// Full linear convolution of two sequences.
std::vector<Complex> convolve(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> out(a.size() + b.size() - 1, Complex(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == Complex(0)) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace

double r_alpha_numerator(const SpaceTimeField& u, double alpha, std::optional<double> gamma) {
    const int k = lattice_factor(u);
    const int N = u.n_max();
    const int K = u.samples();
    const double dtau = 2 * kPi / u.window_length();
    const auto tau = u.tau_view();
    double total = 0;
    for (int n = -N; n <= N; ++n) {
        const double limit = gamma ? std::pow(std::abs(double(n)), *gamma) : kInfinity;
        std::vector<Complex> a(K), b(K);
        for (int c = 0; c < K; ++c) {
            const bool inside = japanese(double(c - K / 2) / k) < limit;
            a[c] = inside ? tau(-n + N, c) : Complex(0);
            b[c] = inside ? tau(n + N, c) : Complex(0);
        }
        // Modulations add: tau - n^3 = m_2 + m_3 + m_4 when n_2 = -n and n_3 = n_4 = n.
        const auto w = convolve(convolve(a, b), b);
        const double weight = std::pow(japanese(double(n)), -2 - 2 * alpha);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double mod = (double(j) - 3.0 * (K / 2)) / k;
            const double s0 = japanese(mod);
            if (s0 >= limit) continue;
            total += weight * std::pow(s0, -2 * alpha) * std::norm(w[j] * dtau * dtau);
        }
    }
    return std::sqrt(total * dtau);
}

RatioReport r_alpha_bound(const RAlphaStudy& study) {
    if (!(study.alpha > 1.0 / 3) || !(study.p > 2 && study.p < 6))
        throw std::invalid_argument("r_alpha_bound: need alpha > 1/3 and 2 < p < 6");
    FieldProfile profile = study.profile;
    profile.n_max = study.n_max;
    profile.mean_zero = true;
    auto report = make_report("r-alpha", "gaussian tau-profile, mean zero", study.ensemble, study.seed, study.n_max);
    report.parameters = {{"s", -study.alpha},
                         {"b", study.alpha},
                         {"alpha", study.alpha},
                         {"p", study.p},
                         {"q", 2},
                         {"profile_sigma", profile.sigma},
                         {"profile_beta", profile.beta},
                         {"samples", profile.samples}};
    if (study.gamma) report.parameters["gamma"] = *study.gamma;
    const auto spec = NormSpec::xsbpq(-study.alpha, study.alpha, study.p, 2);
    std::vector<std::optional<double>> values(study.ensemble);
    parallel_for(study.ensemble, [&](int i) {
        const auto u = random_profile_field(profile, derive_seed(study.seed, std::uint64_t(i)));
        const double den = std::pow(xsbpq_norm(u, spec), 3);
        values[i] = guarded(r_alpha_numerator(u, study.alpha, study.gamma), den);
    });
    collect(report, values);
    return report;
}

// ---- stochastic trilinear -------------------------------------------------------------------

double f1_weight(double delta) { return 2 / (2 - 2 * delta) + 4 + 1 / delta; }

double f2_weight(int n, double delta, double c) { return near_curve_integral(n, c, kNearCurveWindow, 1 - 2 * delta); }

TrilinearReport stochastic_trilinear_check(const TrilinearStudy& study) {
    if (study.samples < 8 || study.samples % 4 != 0)
        throw std::invalid_argument("stochastic_trilinear_check: samples must be a positive multiple of 4");
    if (!(study.T > 0)) throw std::invalid_argument("stochastic_trilinear_check: T must be positive");
    TrilinearReport out;
    out.off_regime = !delta_in_regime(study.delta, study.p);
    const double alpha = 0.5 - study.delta;
    const int N = study.n_max;
    const int K = study.samples;
    const double dt = 2 * kPi / K;
    const int zero = K / 4;  // window [-pi/2, 3pi/2) puts t = 0 at index K/4
    const double t0 = -zero * dt;
    const int steps = K - zero - 1;
    const int T_index = static_cast<int>(std::lround(study.T / dt));
    if (T_index > steps) throw std::invalid_argument("stochastic_trilinear_check: T beyond the window");

    FieldProfile profile = study.profile;
    profile.n_max = N;
    profile.samples = K;
    profile.k = 1;
    profile.t0 = t0;
    profile.mean_zero = true;
    const auto u = random_profile_field(profile, study.seed);
    const double u_norm = xsbpq_norm(u, NormSpec::xsbpq(-alpha, alpha, study.p, 2));

    std::vector<double> w2(N + 1);
    parallel_for(N, [&](int i) { w2[i + 1] = f2_weight(i + 1, study.delta, study.near_curve_c); });
    const double w1 = f1_weight(study.delta);

    out.samples.resize(study.seeds);
    for (int s = 0; s < study.seeds; ++s) {
        const std::uint64_t seed = derive_seed(study.seed, std::uint64_t(s) + 1);
        const auto fam = sample_brownian_family(N, TimeGrid(dt, steps), seed);
        const auto phi = make_covariance(study.phi, fam);
        const auto conv = ito_convolution(phi, fam).field;
        SpaceTimeField eta_phi(TorusGrid(N), t0, dt, K);
        for (int k = 0; k <= steps; ++k) {
            const double c = time_cutoff(k * dt, study.T);
            for (int n = -N; n <= N; ++n) eta_phi(n, zero + k) = c * conv(n, k);
        }
        // |int_0^T |phi_n| dbeta_n|^2 summed with the F_1, F_2 weights; -n mirrors n.
        double f1 = 0, f2 = 0;
        for (int n = 1; n <= N; ++n) {
            Complex integral = 0;
            for (int k = 0; k < T_index; ++k) integral += std::abs(phi(n, k)) * fam.increment(n, k);
            const double mass = 2 * std::pow(japanese(double(n)), -1 - 2 * study.delta) * std::norm(integral);
            f1 += w1 * mass;
            f2 += w2[n] * mass;
        }
        TrilinearSample sample;
        sample.f1 = study.constant * std::sqrt(f1);
        sample.f2 = study.constant * std::sqrt(f2);
        ProductOptions opt;
        opt.derivative = true;
        opt.s = -alpha;
        opt.b = -alpha;
        opt.region = Region::A1;
        opt.skip_zero_modes = true;
        sample.numerator = product_norm(eta_phi, u, opt);
        sample.u_norm = u_norm;
        const double den = (sample.f1 + sample.f2) * u_norm;
        sample.ratio = den > 0 ? sample.numerator / den : 0;
        out.samples[s] = sample;
    }
    auto& r = out.ratios;
    r = make_report("stochastic-trilinear", std::string("noise ") + to_string(study.phi) + ", gaussian tau-profile u",
                    study.seeds, study.seed, N);
    r.parameters = {{"s", -alpha},       {"b", -alpha},       {"p", study.p},
                    {"q", 2},            {"delta", study.delta}, {"T", study.T},
                    {"c", study.near_curve_c}, {"constant", study.constant}, {"samples", K}};
    std::vector<std::optional<double>> values;
    for (const auto& smp : out.samples) values.push_back(smp.f1 + smp.f2 > 0 ? std::optional(smp.ratio) : std::nullopt);
    collect(r, values);
    double lo = kInfinity;
    for (double x : r.ratios) lo = std::min(lo, x);
    r.extras["min_ratio"] = r.ratios.empty() ? 0 : lo;
    r.extras["off_regime"] = out.off_regime ? 1 : 0;
    return out;
}

// ---- embeddings -----------------------------------------------------------------------------

EmbeddingReport embedding_suite(int fields, int n_max, double delta, double p, std::uint64_t seed) {
    if (fields < 1) throw std::invalid_argument("embedding_suite: need at least one field");
    EmbeddingReport r;
    r.fields = fields;
    r.delta = delta;
    r.p = p;
    r.constant = hoelder_embedding_constant(delta, p, n_max);
    const double alpha = 0.5 - delta;
    constexpr double slack = 1 + 1e-12;
    std::vector<std::array<double, 3>> q(fields);
    parallel_for(fields, [&](int i) {
        const std::uint64_t s = derive_seed(seed, std::uint64_t(i));
        CounterRng rng(s, Stream::Auxiliary);
        FieldProfile profile;
        profile.n_max = n_max;
        profile.samples = 16;
        profile.sigma = -1 + rng.uniform();
        profile.beta = -1 + rng.uniform();
        const auto u = random_profile_field(profile, derive_seed(s, 0));
        const double e1 = xsbpq_norm(u, NormSpec::xsbpq(-alpha, alpha, p, 2)) / xsb_norm(u, NormSpec::xsb(-alpha, alpha));
        const auto f = linear_test_data(n_max, derive_seed(s, 1));
        const double e2 = sobolev_fl_norm(f, NormSpec::sobolev(-0.5 - delta)) /
                          (r.constant * besov_norm(f, NormSpec::besov(-0.5 + delta, p)));
        const double e3 = xsb_norm(u, NormSpec::xsb(-0.5 - delta, alpha)) /
                          (r.constant * xsbpq_norm(u, NormSpec::xsbpq(-0.5 + delta, alpha, p, 2)));
        q[i] = {e1, e2, e3};
    });
    for (const auto& x : q) {
        r.embed1_holds += x[0] <= slack;
        r.embed2_holds += x[1] <= slack;
        r.embed3_holds += x[2] <= slack;
        r.embed1_worst = std::max(r.embed1_worst, x[0]);
        r.embed2_worst = std::max(r.embed2_worst, x[1]);
        r.embed3_worst = std::max(r.embed3_worst, x[2]);
    }
    return r;
}

}  // namespace skdv
