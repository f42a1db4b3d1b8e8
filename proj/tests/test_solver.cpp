#include "doctest.h"
#include "support.hpp"

#include "skdv/cutoff.hpp"
#include "skdv/solver.hpp"
#include "skdv/stats.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace skdv;

namespace {

SpectralField cosine(int n_max) {
    SpectralField u{TorusGrid(n_max)};
    u.set(1, 0.5);
    return u;
}

SolveConfig small_config(int n_max, double dt, double T) {
    SolveConfig c;
    c.grid = TorusGrid(n_max);
    c.dt = dt;
    c.T = T;
    return c;
}

// (u0^2)^ by direct convolution of the coefficients.
VectorXc square_by_convolution(const SpectralField& u) {
    const int N = u.n_max();
    VectorXc out = VectorXc::Zero(2 * N + 1);
    for (int n = -N; n <= N; ++n)
        for (int n1 = -N; n1 <= N; ++n1)
            if (std::abs(n - n1) <= N) out(n + N) += u[n1] * u[n - n1];
    return out;
}

double sup_h1_distance(const SpaceTimeField& a, const SpaceTimeField& b) {
    double worst = 0;
    for (int k = 0; k < a.samples(); ++k) worst = std::max(worst, sobolev_norm(a.slice(k) - b.slice(k), 1));
    return worst;
}

}  // namespace

TEST_CASE("duhamel map of zero data is zero") {
    const SpaceTimeField u(TorusGrid(8), 0.0, 0.01, 11);
    const SpectralField u0{TorusGrid(8)};
    CHECK(duhamel_apply(u, u0, u).values().isZero(0));
    const auto fam = sample_brownian_family(8, TimeGrid(0.01, 10), 1);
    CHECK(duhamel_apply(u, u0, make_covariance(PhiChoice::None, fam), fam).values().isZero(0));
}

TEST_CASE("duhamel integral of a constant-in-interaction forcing is exact") {
    // G(n, t) = e^{i n^3 t} g_n integrates to t e^{i n^3 t} g_n, which the trapezoid rule gets exactly.
    const int N = 6;
    const auto g = testing::random_field(N, 3);
    SpaceTimeField forcing(TorusGrid(N), -0.25, 0.05, 21);
    for (int k = 0; k < 21; ++k) forcing.set_slice(k, apply_airy_semigroup(g, forcing.time(k)));
    const auto out = duhamel_integral(forcing);
    for (int k = 0; k < 21; ++k) {
        const auto expect = apply_airy_semigroup(g, out.time(k));
        for (int n = -N; n <= N; ++n) CHECK(std::abs(out(n, k) - out.time(k) * expect[n]) < 1e-13);
    }
    SpaceTimeField shifted(TorusGrid(N), 0.03, 0.05, 5);
    CHECK_THROWS_AS(duhamel_integral(shifted), std::invalid_argument);
}

TEST_CASE("oscillatory Duhamel rule is exact on free waves") {
    // For u = S(t) a every pair product is constant in the interaction picture, so
    // N(n, t) = e^{i n^3 t} i n sum a(n1) a(n2) (e^{i w t} - 1) / (i w) with w = -3 n n1 n2.
    const int N = 12;
    const auto a = testing::random_field(N, 8, -1, true);
    const auto u = free_evolution(a, -0.25, 0.05, 21);
    const auto osc = duhamel_nonlinearity(u, u);
    const auto trap = duhamel_nonlinearity(u, u, DuhamelRule::Trapezoid);
    double scale = 0, err = 0, trap_err = 0;
    for (int k = 0; k < 21; ++k) {
        const double t = u.time(k);
        for (int n = -N; n <= N; ++n) {
            Complex acc = 0;
            for (int n1 = -N; n1 <= N; ++n1) {
                const int n2 = n - n1;
                if (std::abs(n2) > N) continue;
                const double w = -3.0 * n * n1 * n2;
                const Complex integral = w == 0 ? Complex(t) : (std::polar(1.0, w * t) - 1.0) / Complex(0, w);
                acc += a[n1] * a[n2] * integral;
            }
            const Complex expect = std::polar(1.0, dispersion_phase(n, t)) * Complex(0, n) * acc;
            scale = std::max(scale, std::abs(expect));
            err = std::max(err, std::abs(osc(n, k) - expect));
            trap_err = std::max(trap_err, std::abs(trap(n, k) - expect));
        }
    }
    CHECK(err <= 1e-12 * scale);
    CHECK(trap_err > 1e-2 * scale);  // 3 |n n1 n2| dt reaches 5 rad per step here
}

TEST_CASE("first Picard step matches the Taylor expansion to second order") {
    const int N = 4;
    SpectralField u0{TorusGrid(N)};
    u0.set(1, Complex(0.3, -0.2));
    u0.set(2, Complex(0.1, 0.25));
    const VectorXc sq = square_by_convolution(u0);
    std::vector<double> dts, errs;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
        const auto u = free_evolution(u0, 0.0, dt, 2);
        const auto gamma = duhamel_apply(u, u0, SpaceTimeField(u.grid(), 0.0, dt, 2)).slice(1);
        double err = 0;
        for (int n = -N; n <= N; ++n) {
            const Complex taylor = u0[n] + dt * (Complex(0, double(n) * n * n) * u0[n] - 0.5 * Complex(0, n) * sq(n + N));
            err = std::max(err, std::abs(gamma[n] - taylor));
        }
        dts.push_back(dt);
        errs.push_back(err);
    }
    CHECK(fit_loglog(dts, errs).slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("noise enters the Duhamel map linearly") {
    const int N = 8;
    const auto fam = sample_brownian_family(N, TimeGrid(1.0 / 64, 64), 12);
    const auto phi = build_phi_of_beta0(fam);
    const auto u = testing::random_real_space_time(N, 65, 4, 0.0, 1.0 / 64, -1.5);
    const auto u0 = testing::random_field(N, 2, -1, true);
    const auto base = duhamel_apply(u, u0, make_covariance(PhiChoice::None, fam), fam);
    const auto one = duhamel_apply(u, u0, phi, fam);
    const auto two = duhamel_apply(u, u0, phi, fam.scaled(2));
    const MatrixXc d1 = one.values() - base.values();
    const MatrixXc d2 = two.values() - base.values();
    CHECK((d2 - 2 * d1).cwiseAbs().maxCoeff() <= 1e-13 * d1.cwiseAbs().maxCoeff());
    const MatrixXc phi1 = ito_convolution(phi, fam).field.values();
    const MatrixXc phi2 = ito_convolution(phi, fam.scaled(2)).field.values();
    CHECK(phi2 == 2 * phi1);
}

TEST_CASE("zero data converges in one sweep") {
    const auto cfg = small_config(16, 1.0 / 64, 0.5);
    const auto traj = picard_solve(SpectralField(TorusGrid(16)), cfg);
    CHECK(traj.converged);
    CHECK(traj.status == SolveStatus::Converged);
    CHECK(traj.residuals.size() == 1);
    CHECK(traj.u.values().isZero(0));
    CHECK(traj.window == doctest::Approx(0.5));
}

TEST_CASE("deterministic solve conserves mass and matches the reference integrator") {
    const int N = 32;
    const double T = 0.1, dt = T / 128;
    const auto cfg = small_config(N, dt, T);
    const auto traj = picard_solve(cosine(N), cfg);
    REQUIRE(traj.converged);
    CHECK(traj.window == doctest::Approx(T));
    const double m0 = l2_mass(traj.u.slice(0));
    CHECK(m0 == doctest::Approx(kPi));
    for (int k = 0; k < traj.u.samples(); ++k) {
        CHECK(std::abs(l2_mass(traj.u.slice(k)) / m0 - 1) < 1e-6);
        CHECK(traj.u(0, k) == Complex(0));
    }
    const auto ref = reference_kdv(cosine(2 * N), dt / 16, 128 * 16, 16);
    SpaceTimeField ref_low(TorusGrid(N), 0.0, dt, 129);
    for (int k = 0; k <= 128; ++k) ref_low.set_slice(k, SpectralField(TorusGrid(N), ref.slice(k).half().head(N + 1)));
    CHECK(sup_h1_distance(traj.u, ref_low) < 1e-5);
}

TEST_CASE("reference integrator conserves mass and reduces to the Airy flow for small data") {
    const auto u0 = testing::random_field(16, 9, -3, true);
    const auto ref = reference_kdv(u0, 1e-3, 200, 50);
    CHECK(ref.samples() == 5);
    for (int k = 0; k < 5; ++k) CHECK(l2_mass(ref.slice(k)) == doctest::Approx(l2_mass(u0)).epsilon(1e-9));
    const auto tiny = reference_kdv(1e-8 * u0, 1e-3, 200, 200);
    const auto airy = apply_airy_semigroup(1e-8 * u0, 0.2);
    CHECK(testing::relative_error(tiny.slice(1).half(), airy.half()) < 1e-7);
    CHECK_THROWS_AS(reference_kdv(u0, 1e-3, 10, 3), std::invalid_argument);
}

TEST_CASE("noisy solves are deterministic, mean-zero, and fixed points") {
    const int N = 16;
    const auto cfg = small_config(N, 1.0 / 128, 0.25);
    for (std::uint64_t seed : {1u, 2u}) {
        const auto fam = sample_brownian_family(N, TimeGrid(1.0 / 128, 128), seed);
        const auto phi = build_phi_of_beta0(fam);
        const auto u0 = testing::random_field(N, seed, -1.5, true);
        const auto a = picard_solve(u0, phi, fam, cfg);
        const auto b = picard_solve(u0, phi, fam, cfg);
        REQUIRE(a.converged);
        CHECK(a.u.values() == b.u.values());
        CHECK(a.residuals == b.residuals);
        CHECK(a.residuals.back() <= cfg.tolerance);
        for (int k = 0; k < a.u.samples(); ++k) CHECK(a.u(0, k) == Complex(0));
        const auto gamma = duhamel_apply(a.u, u0, noise_forcing(phi, fam, a.window));
        CHECK(picard_distance(gamma, a.u, cfg, a.window) <= 2 * cfg.tolerance);
    }
}

TEST_CASE("non-contracting windows are halved and underflow is reported") {
    const int N = 16;
    auto cfg = small_config(N, 1.0 / 64, 1.0);
    cfg.max_sweeps = 4;
    cfg.tolerance = 1e-14;
    const auto big = 40.0 * testing::random_field(N, 5, -1, true);
    const auto traj = picard_solve(big, cfg);
    CHECK_FALSE(traj.converged);
    CHECK(traj.status == SolveStatus::WindowUnderflow);
    CHECK(traj.halved_count == 3);
    CHECK_FALSE(traj.reason.empty());
    for (double r : traj.residuals) CHECK(std::isfinite(r));

    cfg.allow_halving = false;
    const auto once = picard_solve(big, cfg);
    CHECK(once.status == SolveStatus::NotConverged);
    CHECK(once.halved_count == 0);
}

TEST_CASE("solver configuration validation") {
    auto cfg = small_config(16, 1.0 / 64, 0.5);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.steps() == 32);
    auto bad = cfg;
    bad.T = 0.51;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.max_sweeps = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.metric = default_picard_metric(0.2, 2.5);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.regime_check = false;
    CHECK_NOTHROW(bad.validate());
    bad = cfg;
    bad.levels = {8, 32};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    const auto metric = default_picard_metric();
    CHECK(metric.s == doctest::Approx(-0.45));
    CHECK(*metric.b == doctest::Approx(0.45));
    CHECK(metric.p == 2.5);
    CHECK(metric.q == 2);
}

TEST_CASE("truncated sequence") {
    const int N = 16;
    auto cfg = small_config(N, 1.0 / 128, 0.125);
    const auto fam = sample_brownian_family(N, TimeGrid(1.0 / 128, 128), 3);
    const auto phi = build_phi_of_beta0(fam);
    const auto u0 = 0.2 * sample_spatial_white_noise(N, 3);
    const auto reduced = project_mean_zero(u0);

    SUBCASE("top level reproduces the untruncated run") {
        cfg.levels = {N, 4, 8};
        const auto seq = solve_truncated_sequence(reduced, phi, fam, cfg);
        CHECK(seq.levels == std::vector<int>{4, 8, N});
        const auto full = picard_solve(reduced, phi, fam, cfg);
        CHECK(seq.runs.back().u.values() == full.u.values());
        CHECK(seq.status == SolveStatus::Converged);
        CHECK(seq.table.rows() == 3);
        for (int a = 0; a < 3; ++a) {
            CHECK(seq.table(a, a) == 0.0);
            for (int b = 0; b < 3; ++b) CHECK(seq.table(a, b) == seq.table(b, a));
        }
        CHECK(seq.consecutive.size() == 2);
        CHECK(seq.consecutive[0].distance == seq.table(0, 1));
        CHECK(seq.table(0, 1) > 0);
    }
    SUBCASE("rerun with the same seed gives the same table") {
        cfg.levels = {4, 8, 16};
        const auto a = solve_truncated_sequence(reduced, phi, fam, cfg);
        const auto b = solve_truncated_sequence(reduced, phi, fam, cfg);
        CHECK(a.table == b.table);
    }
    SUBCASE("equal levels give zero difference") {
        cfg.levels = {N, N};
        const auto seq = solve_truncated_sequence(reduced, phi, fam, cfg);
        CHECK(seq.table(0, 1) == 0.0);
    }
}

TEST_CASE("adaptive window") {
    const int N = 16;
    const auto cfg = small_config(N, 1.0 / 512, 1.0);
    const auto fam = sample_brownian_family(N, TimeGrid(1.0 / 512, 1024), 7);

    SUBCASE("zero data and zero noise accept T = 1") {
        const auto w = adaptive_window(SpectralField(TorusGrid(N)), make_covariance(PhiChoice::None, fam), fam, cfg);
        CHECK(w.T == 1.0);
        CHECK(w.probes.size() == 1);
        CHECK(w.probes[0].factor == 0.0);
        CHECK(w.radius == doctest::Approx(1.0));
    }
    SUBCASE("larger data never lengthens the window, and windows are dyadic") {
        const auto phi = build_phi_of_beta0(fam);
        const auto u0 = testing::random_field(N, 11, -0.5, true);
        double previous = 2;
        for (double c : {1.0, 2.0, 4.0}) {
            const auto w = adaptive_window(c * u0, phi, fam, cfg);
            CHECK(w.status == SolveStatus::Converged);
            CHECK(w.T <= previous);
            const double e = std::log2(w.T);
            CHECK(e == std::round(e));
            CHECK(w.probes.back().factor <= 0.5);
            for (std::size_t i = 0; i + 1 < w.probes.size(); ++i) CHECK(w.probes[i].factor > 0.5);
            previous = w.T;
        }
    }
}

TEST_CASE("second iteration decomposition partitions the nonlinearity") {
    const int N = 12;
    const int K = 64;
    const auto u = testing::random_real_space_time(N, K, 21, -1.0, 2.0 / K, -1.0);
    const auto pieces = second_iteration_decomposition(u);
    const auto total = duhamel_nonlinearity(u, u, DuhamelRule::Trapezoid);
    const MatrixXc sum = pieces[0].values() + pieces[1].values() + pieces[2].values();
    CHECK((sum - total.values()).norm() <= 1e-12 * total.values().norm());
    for (const auto& p : pieces)
        for (int k = 0; k < K; ++k) CHECK(p(0, k) == Complex(0));

    auto with_mean = u;
    with_mean(0, 3) = 1.0;
    CHECK_THROWS_AS(second_iteration_decomposition(with_mean), std::invalid_argument);
}

TEST_CASE("decomposition pieces live where their modulation is maximal") {
    // Sparse field: each mode carries a single modulation column, so every (n1, n2) interaction
    // lands in a known piece.
    const int N = 5, K = 32;
    const double dt = 2 * kPi / K;  // window length 2 pi, integer modulations
    const std::vector<std::pair<int, int>> entries = {{1, 0}, {2, 9}, {3, -4}, {5, 2}};
    SpaceTimeField::Values tau = SpaceTimeField::Values::Zero(2 * N + 1, K);
    for (auto [n, m] : entries) {
        tau(N + n, K / 2 + m) = 1.0;
        tau(N - n, K / 2 - m) = 1.0;
    }
    auto u = SpaceTimeField::from_tau_view(TorusGrid(N), 0.0, dt, tau);
    for (int k = 0; k < K; ++k)
        for (int n = 1; n <= N; ++n) u(-n, k) = std::conj(u(n, k));

    std::vector<std::set<int>> expected(2 * N + 1);
    std::vector<std::pair<int, int>> signed_entries;
    for (auto [n, m] : entries) {
        signed_entries.push_back({n, m});
        signed_entries.push_back({-n, -m});
    }
    auto jap = [](double x) { return 1 + std::abs(x); };
    for (auto [n1, m1] : signed_entries)
        for (auto [n2, m2] : signed_entries) {
            const int n = n1 + n2;
            if (n == 0 || std::abs(n) > N) continue;
            const double s0 = jap(m1 + m2 - 3.0 * n * n1 * n2), s1 = jap(m1), s2 = jap(m2);
            expected[n + N].insert((s0 >= s1 && s0 >= s2) ? 0 : (s1 >= s2 ? 1 : 2));
        }
    const auto pieces = second_iteration_decomposition(u);
    double scale = 0;
    for (const auto& p : pieces) scale = std::max(scale, p.values().cwiseAbs().maxCoeff());
    REQUIRE(scale > 0);
    int checked = 0;
    for (int n = -N; n <= N; ++n)
        for (int j = 0; j < 3; ++j) {
            if (expected[n + N].count(j)) continue;
            ++checked;
            for (int k = 0; k < K; ++k) CHECK(std::abs(pieces[j](n, k)) <= 1e-13 * scale);
        }
    CHECK(checked > 10);
}

TEST_CASE("gauge-reduced solve agrees with the direct simulation") {
    // With zero mean data the reduction is a pathwise change of variables: the direct equation
    // carries the full noise, including the zero mode beta_0 / sqrt(2 pi).
    const int N = 16;
    const double T = 0.25;
    auto run = [&](int steps) {
        const double dt = T / steps;
        const auto fam = sample_brownian_family(N, TimeGrid(T / 2048, 2048), 31).coarsened(2048 / steps);
        const auto u0 = testing::random_field(N, 31, -2.0, true);
        const auto cfg = small_config(N, dt, T);

        const auto red = gauge_reduce(u0, fam);
        const auto v = picard_iterate(red.v0, ito_convolution(red.phi, fam).field, cfg);

        auto forcing = ito_convolution(CovarianceOp::identity_offmean(N, fam.grid()), fam).field;
        for (int k = 0; k <= steps; ++k) forcing(0, k) = fam.path(0, k).real() / std::sqrt(2 * kPi);
        const auto u = picard_iterate(u0, forcing, cfg);
        REQUIRE(v.converged);
        REQUIRE(u.converged);
        const auto restored = gauge_restore(v.u, red.record);
        double worst = 0;
        for (int k = 0; k <= steps; ++k) worst = std::max(worst, sobolev_norm(restored.slice(k) - u.u.slice(k), -1));
        return worst;
    };
    std::vector<double> dts, errs;
    for (int steps : {64, 128, 256, 512}) {
        dts.push_back(T / steps);
        errs.push_back(run(steps));
    }
    MESSAGE("gauge discrepancy: " << errs[0] << " " << errs[1] << " " << errs[2] << " " << errs[3]);
    for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
    CHECK(errs.back() < 1e-2);
    CHECK(fit_loglog(dts, errs).slope >= 0.4);
}
