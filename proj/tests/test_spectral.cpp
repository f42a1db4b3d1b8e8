#include "skdv/io.hpp"
#include "skdv/spectral.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace skdv;
using skdv::testing::random_field;
using skdv::testing::random_real_space_time;
using skdv::testing::relative_error;

namespace {

// Direct O(N^2) convolution (i n) sum_{n1 + n2 = n} u1(n1) u2(n2), truncated to the grid.
VectorXc direct_nonlinearity(const SpectralField& u1, const SpectralField& u2) {
    const int N = u1.n_max();
    VectorXc out = VectorXc::Zero(N + 1);
    for (int n = 1; n <= N; ++n) {
        Complex acc = 0;
        for (int n1 = -N; n1 <= N; ++n1) acc += u1[n1] * u2[n - n1];
        out(n) = Complex(0, n) * acc;
    }
    return out;
}

double sobolev(const SpectralField& u, double s) {
    double acc = 0;
    for (int n = -u.n_max(); n <= u.n_max(); ++n) acc += std::pow(1.0 + std::abs(n), 2 * s) * std::norm(u[n]);
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("torus grid keeps dealiasing headroom") {
    for (int n = 1; n <= 600; ++n) {
        const TorusGrid g(n);
        CHECK(g.physical_size() >= 3 * n + 2);
        CHECK((g.physical_size() & (g.physical_size() - 1)) == 0);
    }
    CHECK_THROWS_AS(TorusGrid(0), std::invalid_argument);
}

TEST_CASE("spectral field stores a Hermitian half spectrum") {
    SpectralField u(TorusGrid(4));
    u.set(-2, Complex(1, 2));
    CHECK(u[2] == Complex(1, -2));
    CHECK(u[-2] == Complex(1, 2));
    u.set(0, Complex(3, 5));
    CHECK(u[0] == Complex(3, 0));
    SpectralField z(TorusGrid(4), true);
    CHECK_THROWS_AS(z.set(0, 1.0), std::invalid_argument);
    CHECK(u[7] == Complex(0));
}

TEST_CASE("airy semigroup") {
    const auto u = random_field(32, 1);
    CHECK(apply_airy_semigroup(u, 0.0) == u);

    SpectralField d(TorusGrid(8));
    d.set(1, 1.0);
    const auto e = apply_airy_semigroup(d, kPi);
    CHECK(std::abs(e[1] - Complex(-1, 0)) < 1e-15);

    for (double s : {-1.0, 0.0, 0.5, 2.0})
        CHECK(std::abs(sobolev(apply_airy_semigroup(u, 0.731), s) - sobolev(u, s)) <= 1e-12 * sobolev(u, s));

    const auto m = project_mean_zero(u);
    CHECK(apply_airy_semigroup(m, 1.3).mean_zero());

    CounterRng rng(5, Stream::Auxiliary);
    for (int trial = 0; trial < 100; ++trial) {
        // Dyadic times keep t1 + t2 exact.
        const double t1 = std::ldexp(std::floor(rng.uniform() * 0x1p32), -30) - 2;
        const double t2 = std::ldexp(std::floor(rng.uniform() * 0x1p32), -30) - 2;
        const auto v = random_field(24, 100 + trial);
        const auto composed = apply_airy_semigroup(apply_airy_semigroup(v, t2), t1);
        const auto direct = apply_airy_semigroup(v, t1 + t2);
        CHECK(relative_error(composed.half(), direct.half()) < 1e-12);
    }
}

TEST_CASE("nonlinearity of cos x is -sin 2x") {
    SpectralField c(TorusGrid(8));
    c.set(1, 0.5);
    const auto out = nonlinearity(c, c);
    // -sin 2x = (i/2) e^{2ix} - (i/2) e^{-2ix}
    for (int n = 0; n <= 8; ++n) {
        const Complex expected = n == 2 ? Complex(0, 0.5) : Complex(0);
        CHECK(std::abs(out[n] - expected) < 1e-15);
    }
    CHECK(out.mean_zero());
}

TEST_CASE("nonlinearity matches direct convolution and is symmetric") {
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 5 + 13 * trial;
        const auto a = random_field(N, 2 * trial + 1, -0.3);
        const auto b = random_field(N, 2 * trial + 2, -0.6);
        const auto fast = nonlinearity(a, b);
        CHECK(fast.half()(0) == Complex(0));
        CHECK(relative_error(fast.half(), direct_nonlinearity(a, b)) < 1e-12);
        CHECK(nonlinearity(b, a) == fast);
        const auto self = nonlinearity(a, a);
        const auto copy = a;
        CHECK(relative_error(self.half(), nonlinearity(a, copy).half()) < 1e-14);
    }
    CHECK_THROWS_AS(nonlinearity(random_field(4, 1), random_field(5, 1)), std::invalid_argument);
}

TEST_CASE("mean projection") {
    SpectralField c(TorusGrid(3));
    c.set(0, 4.0);
    const auto z = project_mean_zero(c);
    CHECK(z.half().norm() == 0);

    auto mz = project_mean_zero(random_field(10, 3));
    CHECK(project_mean_zero(mz) == mz);

    SpectralField u(TorusGrid(3));
    u.set(0, 2.0);
    u.set(1, 0.5);
    const auto p = project_mean_zero(u);
    CHECK(p[0] == Complex(0));
    CHECK(p[1] == Complex(0.5));
    CHECK(p.mean_zero());
}

TEST_CASE("physical transforms are inverse to each other") {
    const auto u = random_field(20, 9);
    const auto x = to_physical(u, 64);
    // Direct synthesis at one point.
    const double xj = 2 * kPi * 5 / 64;
    Complex direct = 0;
    for (int n = -20; n <= 20; ++n) direct += u[n] * std::polar(1.0, n * xj);
    CHECK(std::abs(direct.real() - x[5]) < 1e-12);
    CHECK(std::abs(direct.imag()) < 1e-12);
    CHECK(relative_error(from_physical(x, u.grid()).half(), u.half()) < 1e-14);
}

TEST_CASE("json round trip") {
    const auto u = project_mean_zero(random_field(6, 4));
    const auto back = spectral_field_from_json(to_json(u));
    CHECK(back == u);
    const auto st = random_real_space_time(3, 5, 2);
    const auto st_back = space_time_field_from_json(to_json(st));
    CHECK(st_back.values() == st.values());
    CHECK_THROWS(spectral_field_from_json(nlohmann::json{{"n_max", 2}, {"coeffs", {{1, 0}}}}));
}

TEST_CASE("time-frequency view round trip") {
    for (int trial = 0; trial < 5; ++trial) {
        const int K = 16 + 7 * trial;
        auto u = skdv::testing::random_space_time(6, K, trial, -0.37 * trial, 0.013 + 0.01 * trial);
        const auto tau = u.tau_view();
        const auto back = SpaceTimeField::from_tau_view(u.grid(), u.t0(), u.dt(), tau);
        CHECK((back.values() - u.values()).norm() <= 1e-12 * u.values().norm());
    }
}

TEST_CASE("time-frequency view locates a free wave on the dispersion curve") {
    // u^(n, t) = e^{i n^3 t} for n = 2 only: all mass at modulation 0.
    SpaceTimeField u(TorusGrid(3), -1.0, 1.0 / 64, 256);
    for (int k = 0; k < 256; ++k) u(2, k) = std::polar(1.0, 8 * u.time(k));
    const auto tau = u.tau_view();
    const int centre = 128;
    CHECK(std::abs(u.modulation(centre)) < 1e-15);
    CHECK(std::abs(std::abs(tau(2 + 3, centre)) - u.window_length()) < 1e-10);
    double off = 0;
    for (int c = 0; c < 256; ++c)
        if (c != centre) off += std::abs(tau(2 + 3, c));
    CHECK(off < 1e-9);
}

TEST_CASE("embedding in a larger window") {
    const auto u = skdv::testing::random_space_time(2, 8, 1, 0.0, 0.25);
    const auto e = embed_in_window(u, -1.0, 20);
    CHECK(e(1, 4) == u(1, 0));
    CHECK(e(1, 3) == Complex(0));
    CHECK_THROWS_AS(embed_in_window(u, -0.1, 40), std::invalid_argument);
    CHECK_THROWS_AS(embed_in_window(u, 0.0, 5), std::invalid_argument);
}
