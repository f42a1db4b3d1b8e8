// Runs each acceptance criterion at its stated size and tolerance; one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include "skdv/convolution.hpp"
#include "skdv/estimates.hpp"
#include "skdv/studies.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace skdv;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
};

double relative_change(double a, double b) { return std::abs(b - a) / std::abs(a); }

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome resonance() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = resonance_identity_sweep(256);
    const double elapsed = seconds_since(t0);
    return {r.passed && elapsed < 60,
            fmt("pairs %lld, triples %lld, max-sigma %lld, failures %zu, %.1f s (limit 60 s)",
                static_cast<long long>(r.pairs_checked), static_cast<long long>(r.triples_checked),
                static_cast<long long>(r.maxmax_checked), r.witnesses.size(), elapsed)};
}

Outcome isometry() {
    const auto t0 = std::chrono::steady_clock::now();
    IsometryStudy study;
    study.modes = {1, 5, 17};
    study.times = {0.25, 1};
    study.ensemble = 10000;
    study.seed = 101;
    const auto cells = ito_isometry(study);
    const double elapsed = seconds_since(t0);
    double worst = 0;
    std::ostringstream os;
    for (const auto& c : cells) {
        worst = std::max(worst, std::abs(c.z));
        os << fmt(" (n=%d,t=%g: %.4f, z=%+.2f)", c.n, c.t, c.second_moment.mean, c.z);
    }
    return {cells.size() == 6 && worst <= 3 && elapsed < 300,
            fmt("max |z| %.2f (limit 3), %.1f s (limit 300 s);", worst, elapsed) + os.str()};
}

Outcome agreement() {
    AgreementStudy study;
    study.alpha = 0.3;
    study.m = 2;
    study.factors = {8, 4, 2, 1};
    study.seed = 103;
    const auto r = convolution_agreement(study);
    std::string rms;
    for (double v : r.rms) rms += fmt(" %.3e", v);
    return {r.monotone && r.order >= 0.4,
            fmt("order %.3f (need >= 0.4), decreasing %s, rms by dt:", r.order, r.monotone ? "yes" : "no") + rms};
}

Outcome regularity() {
    std::string detail;
    bool pass = true;
    const double points[][2] = {{-0.4, 2}, {-0.6, 2}};
    for (const auto& sp : points) {
        RegularityStudy study;
        study.s = sp[0];
        study.p = sp[1];
        study.sizes = {64, 128, 256, 512, 1024};
        study.seeds = 50;
        study.seed = 104;
        const auto r = white_noise_regularity(study);
        const bool ok = std::abs(r.slope - r.predicted) <= 0.1;
        pass = pass && ok;
        detail += fmt("(s,p)=(%g,%g): slope %.3f vs %.3f%s; ", sp[0], sp[1], r.slope, r.predicted, ok ? "" : " [off]");
    }
    return {pass, detail + "tolerance 0.1, 50 seeds"};
}

Outcome xsbpq_stability() {
    XsbpqStudy study;
    study.s = -0.45;
    study.b = 0.45;
    study.p = 2.5;
    study.q = 2;
    study.T = 1;
    study.ensemble = 200;
    study.seed = 105;
    study.n_max = 256;
    const auto lo = mc_expected_xsbpq(study);
    study.n_max = 512;
    const auto hi = mc_expected_xsbpq(study);
    const double change = relative_change(lo.mean, hi.mean);
    return {change < 0.05, fmt("mean %.5f (+-%.5f) at 256, %.5f (+-%.5f) at 512, change %.2f%% (limit 5%%)", lo.mean,
                               lo.standard_error, hi.mean, hi.standard_error, 100 * change)};
}

Outcome deterministic() {
    const auto t0 = std::chrono::steady_clock::now();
    DeterministicScenario scenario;  // cos x, T = 0.1, n_max = 128
    const auto r = deterministic_benchmark(scenario);
    const double elapsed = seconds_since(t0);
    return {r.run.converged && r.max_mass_drift <= 1e-6 && r.sup_h1_error <= 1e-5 && elapsed < 120,
            fmt("status %s, mass drift %.2e (limit 1e-6), sup H^1 error %.2e (limit 1e-5), %.1f s (limit 120 s)",
                to_string(r.run.status), r.max_mass_drift, r.sup_h1_error, elapsed)};
}

Outcome fixed_point() {
    FixedPointStudy study;
    study.noisy_seeds = 5;
    study.seed = 107;
    const auto cases = fixed_point_matrix(study);
    bool pass = cases.size() == 6;
    int converged = 0;
    std::string detail;
    for (const auto& c : cases) {
        const bool ok = c.status != SolveStatus::Converged || c.defect <= 2 * c.tolerance;
        converged += c.status == SolveStatus::Converged;
        pass = pass && ok;
        detail += fmt("; %s: %s, defect %.2e / tol %.0e", c.label.c_str(), to_string(c.status), c.defect, c.tolerance);
    }
    return {pass, fmt("%d of %zu converged", converged, cases.size()) + detail};
}

Outcome truncation() {
    TruncationStudy study;
    study.scenario.n_max = 256;
    study.levels = {32, 64, 128, 256};
    study.seeds = 20;
    study.seed = 108;
    const auto r = truncation_convergence(study);
    int converged = 0;
    for (const auto& run : r.runs) converged += run.status == SolveStatus::Converged;
    return {r.fraction >= 0.8,
            fmt("d(N,2N) decreasing on %d of %zu seeds (%.0f%%, need 80%%); converged %d; data tail alone "
                "decreasing on %d",
                r.decreasing, r.runs.size(), 100 * r.fraction, converged, r.data_tail_decreasing)};
}

Outcome embeddings() {
    const auto r = embedding_suite(100, 64, 0.05, 2.5, 109);
    return {r.embed1_holds == 100 && r.embed2_holds == 100 && r.embed3_holds == 100,
            fmt("EMBED1 %d/100 (worst %.4f, constant 1); EMBED2 %d/100 (worst %.4f), EMBED3 %d/100 (worst %.4f), "
                "Hoelder constant %.4f",
                r.embed1_holds, r.embed1_worst, r.embed2_holds, r.embed2_worst, r.embed3_holds, r.embed3_worst,
                r.constant)};
}

Outcome near_curve() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = near_curve_sweep(256, 1);
    const double elapsed = seconds_since(t0);
    return {r.running_max_slope < 0.05 && elapsed < 120,
            fmt("max %.4f, running-max slope %.4f (limit 0.05), value slope %.4f, %.1f s (limit 120 s)",
                r.running_max.back(), r.running_max_slope, r.value_slope, elapsed)};
}

Outcome ratio_stability() {
    std::string detail;
    bool pass = true;
    auto record = [&](const char* name, const RatioReport& lo, const RatioReport& hi) {
        const double change = relative_change(lo.max_ratio, hi.max_ratio);
        const int samples = lo.ensemble_size;
        const bool ok = change <= 0.15 && samples >= 200 && samples <= 500;
        pass = pass && ok;
        detail += fmt("%s %.4f -> %.4f (%.1f%%, %d samples); ", name, lo.max_ratio, hi.max_ratio, 100 * change, samples);
    };
    {
        StrichartzStudy s;
        s.random_fields = 400;
        s.free_waves = 100;
        s.seed = 111;
        s.n_max = 64;
        const auto lo = strichartz_ratio(s);
        s.n_max = 128;
        record("strichartz", lo, strichartz_ratio(s));
    }
    {
        BilinearStudy s;
        s.s = -0.5;
        s.pairs = 500;
        s.seed = 112;
        s.n_max = 64;
        const auto lo = bilinear_ratio(s);
        s.n_max = 128;
        record("bilinear", lo, bilinear_ratio(s));
    }
    {
        RAlphaStudy s;
        s.alpha = 0.45;
        s.p = 2.5;
        s.ensemble = 200;
        s.seed = 113;
        s.n_max = 64;
        const auto lo = r_alpha_bound(s);
        s.n_max = 128;
        record("r-alpha", lo, r_alpha_bound(s));
    }
    return {pass, detail + "limit 15%"};
}

Outcome continuity() {
    ContinuityStudy study;
    study.s = -0.45;
    study.p = 2.5;
    study.m = 2;
    study.seed = 114;
    study.n_max = 256;
    const auto lo = continuity_study(study);
    study.n_max = 512;
    const auto hi = continuity_study(study);
    const double change = relative_change(lo.sup_moment.mean, hi.sup_moment.mean);
    return {change <= 0.10 && lo.gamma > 0.2 && hi.gamma > 0.2,
            fmt("E sup ||Phi||^4 %.4f at 256, %.4f at 512, change %.2f%% (limit 10%%); gamma %.3f, %.3f (need > 0.2)",
                lo.sup_moment.mean, hi.sup_moment.mean, 100 * change, lo.gamma, hi.gamma)};
}

Outcome holder() {
    HolderStudy study;
    study.epsilons = {1e-2, 1e-3};
    study.seeds = 5;
    study.seed = 115;
    const auto r = holder_stability(study);
    std::string per_seed;
    for (const auto& run : r.runs) per_seed += fmt(" %.4f", run.beta);
    return {r.all_converged && r.beta > 0 && r.beta <= 1,
            fmt("pooled beta %.6f (need in (0, 1]), all converged %s, per seed:", r.beta,
                r.all_converged ? "yes" : "no") + per_seed};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "resonance identities", resonance},
        {2, "Ito isometry", isometry},
        {3, "factorized vs Ito agreement", agreement},
        {4, "white-noise regularity threshold", regularity},
        {5, "X^{s,b}_{p,q} Monte Carlo stability", xsbpq_stability},
        {6, "deterministic solver benchmark", deterministic},
        {7, "Picard fixed-point defect", fixed_point},
        {8, "truncation convergence", truncation},
        {9, "embedding suite", embeddings},
        {10, "near-curve integral bound", near_curve},
        {11, "estimate-ratio stability", ratio_stability},
        {12, "stochastic convolution continuity", continuity},
        {13, "Hoelder stability of the data-to-solution map", holder},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
