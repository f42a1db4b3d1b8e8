#include "skdv/convolution.hpp"

#include "skdv/cutoff.hpp"
#include "skdv/parallel.hpp"
#include "skdv/rng.hpp"
#include "skdv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skdv {

namespace {

void check_grids(const CovarianceOp& phi, const BrownianFamily& family, const char* where) {
    if (!(phi.grid() == family.grid()) || phi.n_max() != family.n_max())
        throw std::invalid_argument(std::string(where) + ": covariance and Brownian family live on different grids");
    if (family.n_max() < 1) throw std::invalid_argument(std::string(where) + ": need at least one nonzero mode");
}


// Interaction-picture noise increments e^{-i n^3 t_j} phi_n(t_j) dbeta_n(t_j) / sqrt(2), rows n = 0..N.
MatrixXc twisted_increments(const CovarianceOp& phi, const BrownianFamily& family) {
    const int N = family.n_max();
    const int K = family.grid().steps;
    const double root_half = std::sqrt(0.5);
    MatrixXc dz = MatrixXc::Zero(N + 1, K);
    for (int n = 1; n <= N; ++n)
        for (int j = 0; j < K; ++j)
            dz(n, j) = std::polar(root_half, -dispersion_phase(n, family.grid().time(j))) * phi(n, j) * family.increment(n, j);
    return dz;
}

// Interaction-picture values psi(n, k), k = 0..K, mapped to the full Hermitian field e^{i n^3 t_k} psi.
SpaceTimeField untwist(const MatrixXc& psi, const TimeGrid& grid) {
    const int N = static_cast<int>(psi.rows()) - 1;
    SpaceTimeField out(TorusGrid(N), 0.0, grid.dt, grid.steps + 1);
    for (int n = 1; n <= N; ++n)
        for (int k = 0; k <= grid.steps; ++k) {
            const Complex z = std::polar(1.0, dispersion_phase(n, grid.time(k))) * psi(n, k);
            out(n, k) = z;
            out(-n, k) = std::conj(z);
        }
    return out;
}

double power(double x, double p) {
    if (p == 2) return x * x;
    if (p == 2.5) return x * x * std::sqrt(x);
    return std::pow(x, p);
}

}  // namespace

ConvolutionResult ito_convolution(const CovarianceOp& phi, const BrownianFamily& family) {
    check_grids(phi, family, "ito_convolution");
    const MatrixXc dz = twisted_increments(phi, family);
    const int K = family.grid().steps;
    MatrixXc psi = MatrixXc::Zero(dz.rows(), K + 1);
    for (int k = 0; k < K; ++k) psi.col(k + 1) = psi.col(k) + dz.col(k);
    return {untwist(psi, family.grid()), ConvolutionMethod::Ito, 0, 0, family.seed(), phi.describe(), family.grid()};
}

ConvolutionResult factorized_convolution(const CovarianceOp& phi, const BrownianFamily& family, double alpha, int m) {
    check_grids(phi, family, "factorized_convolution");
    if (m < 1 || !(alpha > 1.0 / (2 * m)) || !(alpha < 0.5))
        throw std::invalid_argument("factorized_convolution: alpha must lie in (1/(2m), 1/2)");
    const MatrixXc dz = twisted_increments(phi, family);
    const int K = family.grid().steps;
    const double h = family.grid().dt;

    // Inner kernel at the cell midpoints s_i = t_i + h/2: left-point weights for earlier cells,
    // the exact average of (s_i - r)^{-alpha} over the half cell [t_i, s_i] for the current one.
    Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(K, K);
    for (int i = 0; i < K; ++i) {
        inner(i, i) = std::pow(0.5 * h, 1 - alpha) / ((1 - alpha) * h);
        for (int j = 0; j < i; ++j) inner(i, j) = std::pow((i - j + 0.5) * h, -alpha);
    }
    // Outer kernel (t_k - s)^{alpha - 1} integrated exactly over each cell [t_i, t_{i+1}], i < k.
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(K + 1, K);
    for (int k = 1; k <= K; ++k)
        for (int i = 0; i < k; ++i)
            outer(k, i) = (std::pow((k - i) * h, alpha) - std::pow((k - i - 1) * h, alpha)) / alpha;
    outer *= std::sin(kPi * alpha) / kPi;

    const Eigen::MatrixXd y_re = dz.real() * inner.transpose();
    const Eigen::MatrixXd y_im = dz.imag() * inner.transpose();
    MatrixXc psi(dz.rows(), K + 1);
    psi.real() = y_re * outer.transpose();
    psi.imag() = y_im * outer.transpose();
    return {untwist(psi, family.grid()), ConvolutionMethod::Factorized, alpha, m, family.seed(), phi.describe(),
            family.grid()};
}

double rms_difference(const SpaceTimeField& a, const SpaceTimeField& b) {
    a.require_compatible(b);
    const double total = (a.values() - b.values()).squaredNorm();
    return std::sqrt(total / static_cast<double>(a.values().size()));
}

bool delta_in_regime(double delta, double p) {
    const double lower = (p - 2) / (4 * p);
    const double upper = (p - 2) / (2 * p);
    return delta >= lower - 1e-12 && delta < upper;
}

bool stochastic_regime(double s, double b, double p) {
    const double delta = s + 0.5;
    return std::abs(b - (0.5 - delta)) < 1e-12 && delta_in_regime(delta, p);
}

MonteCarloEstimate mc_expected_xsbpq(const XsbpqStudy& study) {
    if (study.ensemble < 1) throw std::invalid_argument("mc_expected_xsbpq: empty ensemble");
    const NormSpec spec = NormSpec::xsbpq(study.s, study.b, study.p, study.q).restricted(study.T);
    const double horizon = study.b >= 0.5 ? 2 * study.T : study.T;
    const TimeGrid grid = TimeGrid::covering(horizon, study.dt);
    MonteCarloEstimate out;
    out.samples.assign(study.ensemble, 0.0);
    parallel_for(study.ensemble, [&](int i) {
        const auto family = sample_brownian_family(study.n_max, grid, derive_seed(study.seed, i));
        const auto phi = make_covariance(study.phi, family);
        auto field = ito_convolution(phi, family).field;
        field = multiply_in_time(std::move(field), [](double t) { return time_cutoff(t); });
        out.samples[i] = restricted_norm(field, spec).value;
    });
    const auto est = mean_estimate(out.samples);
    out.mean = est.mean;
    out.standard_error = est.standard_error;
    out.off_regime = !stochastic_regime(study.s, study.b, study.p);
    return out;
}

std::vector<double> slice_besov_norms(const SpaceTimeField& u, double s, double p) {
    const int N = u.n_max();
    const int J = DyadicPartition::block_of(N) + 1;
    std::vector<double> weight(N + 1);
    std::vector<int> block(N + 1);
    for (int n = 0; n <= N; ++n) {
        weight[n] = std::pow(japanese(double(n)), s * p);
        block[n] = DyadicPartition::block_of(n);
    }
    std::vector<double> out(u.samples());
    std::vector<double> acc(J);
    for (int k = 0; k < u.samples(); ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int n = -N; n <= N; ++n) acc[block[std::abs(n)]] += weight[std::abs(n)] * power(std::abs(u(n, k)), p);
        double best = 0;
        for (double a : acc) best = std::max(best, a);
        out[k] = std::pow(best, 1 / p);
    }
    return out;
}

ContinuityReport continuity_study(const ContinuityStudy& study) {
    if (study.m < 2) throw std::invalid_argument("continuity_study: m must be >= 2");
    if (study.dts.empty() || study.ensemble < 1) throw std::invalid_argument("continuity_study: empty study");
    const double finest = *std::min_element(study.dts.begin(), study.dts.end());
    const TimeGrid grid = TimeGrid::covering(study.T, finest);
    std::vector<int> factors;
    for (double dt : study.dts) {
        const double f = dt / finest;
        const int factor = static_cast<int>(std::lround(f));
        if (std::abs(f - factor) > 1e-9 || grid.steps % factor != 0)
            throw std::invalid_argument("continuity_study: time steps must be nested multiples of the finest");
        factors.push_back(factor);
    }
    const int L = static_cast<int>(study.dts.size());
    std::vector<double> sup(study.ensemble);
    std::vector<std::vector<double>> modulus(L, std::vector<double>(study.ensemble));
    parallel_for(study.ensemble, [&](int i) {
        const auto fine = sample_brownian_family(study.n_max, grid, derive_seed(study.seed, i));
        for (int l = 0; l < L; ++l) {
            const auto family = fine.coarsened(factors[l]);
            const auto phi = make_covariance(study.phi, family);
            const auto field = ito_convolution(phi, family).field;
            SpaceTimeField increments(field.grid(), 0.0, field.dt(), field.samples() - 1);
            increments.values() = field.values().rightCols(field.samples() - 1) - field.values().leftCols(field.samples() - 1);
            const auto jumps = slice_besov_norms(increments, study.s, study.p);
            modulus[l][i] = *std::max_element(jumps.begin(), jumps.end());
            if (factors[l] == 1) {
                const auto norms = slice_besov_norms(field, study.s, study.p);
                sup[i] = std::pow(*std::max_element(norms.begin(), norms.end()), 2 * study.m);
            }
        }
    });
    ContinuityReport report;
    report.sup_samples = sup;
    report.sup_moment = mean_estimate(sup);
    report.dts = study.dts;
    std::vector<double> means;
    bool positive = true;
    for (int l = 0; l < L; ++l) {
        report.modulus.push_back(mean_estimate(modulus[l]));
        means.push_back(report.modulus.back().mean);
        positive = positive && means.back() > 0;
    }
    if (positive && L >= 2) report.gamma = fit_loglog(study.dts, means).slope;
    report.off_regime = !(study.s * study.p < -1);
    return report;
}

}  // namespace skdv
