#include "doctest.h"
#include "support.hpp"

#include "skdv/studies.hpp"

#include <algorithm>
#include <cmath>

using namespace skdv;

TEST_CASE("sup distances over time slices") {
    const auto a = testing::random_real_space_time(8, 5, 1);
    const auto b = testing::random_real_space_time(8, 5, 2);
    CHECK(sup_sobolev_distance(a, a, 1) == 0);
    CHECK(sup_besov_distance(a, b, -0.45, 2.5) == doctest::Approx(sup_besov_distance(b, a, -0.45, 2.5)));
    double worst = 0;
    for (int k = 0; k < 5; ++k) worst = std::max(worst, sobolev_norm(a.slice(k) - b.slice(k), 1));
    CHECK(sup_sobolev_distance(a, b, 1) == worst);
    const SpaceTimeField other(TorusGrid(8), 0.0, 0.05, 4);
    CHECK_THROWS_AS(sup_sobolev_distance(a, other, 1), std::invalid_argument);
}

TEST_CASE("deterministic benchmark conserves mass and matches the reference") {
    DeterministicScenario s;
    s.n_max = 32;
    const auto r = deterministic_benchmark(s);
    REQUIRE(r.run.converged);
    CHECK(r.mass == doctest::Approx(kPi));
    CHECK(r.max_mass_drift < 1e-6);
    CHECK(r.sup_h1_error < 1e-5);
    // A coarser reference step only loosens agreement.
    s.reference_refinement = 1;
    s.steps = 16;
    CHECK(deterministic_benchmark(s).sup_h1_error > r.sup_h1_error);
}

TEST_CASE("fixed-point defects stay at the contraction tolerance") {
    FixedPointStudy study;
    study.deterministic.n_max = 16;
    study.noisy = NoisyScenario{16, 1.0 / 128, 0.05, 2.5, 1e-10, 60, PhiChoice::PhiOfBeta0};
    study.noisy_seeds = 2;
    const auto cases = fixed_point_matrix(study);
    REQUIRE(cases.size() == 3);
    CHECK(cases[0].label == "deterministic cos x");
    for (const auto& c : cases) {
        REQUIRE(c.status == SolveStatus::Converged);
        CHECK(c.defect <= 2 * c.tolerance);
        CHECK(c.window > 0);
    }
    // Same study, same answers.
    const auto again = fixed_point_matrix(study);
    for (std::size_t i = 0; i < cases.size(); ++i) CHECK(again[i].defect == cases[i].defect);
}

TEST_CASE("noisy problems are reproducible and mean-zero") {
    const NoisyScenario s{16, 1.0 / 128, 0.05, 2.5, 1e-10, 60, PhiChoice::PhiOfBeta0};
    const auto a = make_noisy_problem(s, 4);
    const auto b = make_noisy_problem(s, 4);
    CHECK(a.u0.half() == b.u0.half());
    CHECK(a.u0[0] == Complex(0));
    CHECK(a.config.T == b.config.T);
    CHECK(a.family.grid().horizon() == doctest::Approx(2.0));
    CHECK(make_noisy_problem(s, 5).u0.half() != a.u0.half());
}

TEST_CASE("truncation study bookkeeping") {
    TruncationStudy study;
    study.scenario = NoisyScenario{32, 1.0 / 128, 0.05, 2.5, 1e-10, 60, PhiChoice::PhiOfBeta0};
    study.levels = {8, 16, 32};
    study.seeds = 3;
    const auto r = truncation_convergence(study);
    REQUIRE(r.runs.size() == 3);
    int decreasing = 0;
    for (const auto& run : r.runs) {
        REQUIRE(run.distances.size() == 2);
        REQUIRE(run.data_tail.size() == 2);
        for (double d : run.distances) CHECK(d > 0);
        CHECK(run.decreasing == (run.status == SolveStatus::Converged && run.distances[0] > run.distances[1]));
        decreasing += run.decreasing;
        // The tail between consecutive levels is the Besov norm of the data between them.
        const auto problem = make_noisy_problem(study.scenario, run.seed);
        const auto tail = truncate_modes(problem.u0, 16) - truncate_modes(problem.u0, 8);
        CHECK(run.data_tail[0] == doctest::Approx(besov_norm(tail, NormSpec::besov(-0.45, 2.5))));
    }
    CHECK(r.decreasing == decreasing);
    CHECK(r.fraction == doctest::Approx(decreasing / 3.0));

    study.levels = {8, 64};
    CHECK_THROWS_AS(truncation_convergence(study), std::invalid_argument);
    study.levels = {16};
    CHECK_THROWS_AS(truncation_convergence(study), std::invalid_argument);
}

TEST_CASE("small perturbations of the data move the solution linearly") {
    HolderStudy study;
    study.scenario = NoisyScenario{16, 1.0 / 128, 0.05, 2.5, 1e-12, 80, PhiChoice::PhiOfBeta0};
    study.seeds = 2;
    const auto r = holder_stability(study);
    REQUIRE(r.all_converged);
    for (const auto& run : r.runs) {
        REQUIRE(run.distances.size() == 2);
        CHECK(run.distances[0] > run.distances[1]);
        CHECK(run.beta == doctest::Approx(1.0).epsilon(0.01));
    }
    CHECK(r.beta == doctest::Approx(1.0).epsilon(0.01));
    study.epsilons = {1e-2};
    CHECK_THROWS_AS(holder_stability(study), std::invalid_argument);
    study.epsilons = {1e-2, 0};
    CHECK_THROWS_AS(holder_stability(study), std::invalid_argument);
}

TEST_CASE("isometry cells report the second moment per mode and time") {
    IsometryStudy study;
    study.modes = {1, 3};
    study.times = {0.25, 0.5};
    study.dt = 1.0 / 16;
    study.ensemble = 2000;
    const auto cells = ito_isometry(study);
    REQUIRE(cells.size() == 4);
    CHECK(cells[1].n == 1);
    CHECK(cells[1].t == 0.5);
    for (const auto& c : cells) CHECK(std::abs(c.z) < 4);
    study.times = {0.3};
    CHECK_THROWS_AS(ito_isometry(study), std::invalid_argument);
    study.phi = PhiChoice::None;
    study.times = {0.25};
    for (const auto& c : ito_isometry(study)) CHECK(c.second_moment.mean == 0);
}

TEST_CASE("factorized convolution approaches the direct sum under refinement") {
    AgreementStudy study;
    study.fine_steps = 256;
    study.seeds = 2;
    const auto r = convolution_agreement(study);
    REQUIRE(r.rms.size() == 4);
    CHECK(r.dts.front() == doctest::Approx(8.0 / 256));
    CHECK(r.monotone);
    CHECK(r.order > 0);
    for (std::size_t g = 0; g < 4; ++g)
        CHECK(r.rms[g] == doctest::Approx((r.per_seed[0][g] + r.per_seed[1][g]) / 2));
}

TEST_CASE("white noise regularity slope follows the block scaling") {
    RegularityStudy study;
    study.s = 0;
    study.sizes = {32, 64, 128, 256};
    study.seeds = 21;
    const auto r = white_noise_regularity(study);
    CHECK(r.predicted == doctest::Approx(0.5));
    CHECK(std::abs(r.slope - 0.5) < 0.1);
    study.s = -0.8;
    CHECK(white_noise_regularity(study).predicted == 0);
}

TEST_CASE("deterministic benchmark series") {
    DeterministicScenario s;
    s.n_max = 16;
    s.steps = 32;
    const auto r = deterministic_benchmark(s);
    REQUIRE(r.times.size() == 33);
    CHECK(r.times.back() == doctest::Approx(0.1));
    CHECK(r.mass_drift.front() == 0);
    CHECK(*std::max_element(r.h1_error.begin(), r.h1_error.end()) == r.sup_h1_error);
}
