#include "skdv/norms.hpp"

#include "skdv/cutoff.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace skdv {

const char* to_string(NormKind kind) {
    switch (kind) {
        case NormKind::Besov: return "besov";
        case NormKind::FourierLebesgue: return "fourier_lebesgue";
        case NormKind::Xsb: return "xsb";
        case NormKind::Xsbpq: return "xsbpq";
    }
    return "unknown";
}

NormSpec NormSpec::besov(double s, double p, double q) {
    NormSpec spec;
    spec.kind = NormKind::Besov;
    spec.s = s;
    spec.p = p;
    spec.q = q;
    spec.validate();
    return spec;
}

NormSpec NormSpec::fourier_lebesgue(double s, double p) {
    NormSpec spec;
    spec.kind = NormKind::FourierLebesgue;
    spec.s = s;
    spec.p = p;
    spec.validate();
    return spec;
}

NormSpec NormSpec::xsb(double s, double b) {
    NormSpec spec;
    spec.kind = NormKind::Xsb;
    spec.s = s;
    spec.b = b;
    spec.p = 2;
    spec.q = 2;
    spec.validate();
    return spec;
}

NormSpec NormSpec::xsbpq(double s, double b, double p, double q) {
    NormSpec spec;
    spec.kind = NormKind::Xsbpq;
    spec.s = s;
    spec.b = b;
    spec.p = p;
    spec.q = q;
    spec.validate();
    return spec;
}

NormSpec NormSpec::restricted(double T) const {
    NormSpec spec = *this;
    spec.T = T;
    spec.validate();
    return spec;
}

void NormSpec::validate() const {
    if (!(p >= 1)) throw std::invalid_argument("NormSpec: p must be >= 1");
    if (!(q >= 1)) throw std::invalid_argument("NormSpec: q must be >= 1");
    if (T && !(*T > 0)) throw std::invalid_argument("NormSpec: restriction T must be positive");
    if (temporal() && !b) throw std::invalid_argument("NormSpec: space-time norm needs b");
    if (!temporal() && b) throw std::invalid_argument("NormSpec: b given for a spatial norm");
    if (!temporal() && T) throw std::invalid_argument("NormSpec: restriction given for a spatial norm");
}

int DyadicPartition::block_of(int n) {
    const unsigned a = static_cast<unsigned>(std::abs(n));
    if (a <= 1) return 0;
    return std::bit_width(a - 1);
}

DyadicPartition::DyadicPartition(int n_max) {
    if (n_max < 0) throw std::invalid_argument("DyadicPartition: negative n_max");
    blocks_.resize(block_of(n_max) + 1);
    for (int n = -n_max; n <= n_max; ++n) blocks_[block_of(n)].push_back(n);
}

namespace {

double lp_accumulate(double acc, double x, double p) {
    if (std::isinf(p)) return std::max(acc, x);
    return acc + std::pow(x, p);
}

double lp_finish(double acc, double p) {
    if (std::isinf(p)) return acc;
    return std::pow(acc, 1.0 / p);
}

Eigen::VectorXd magnitudes(const SpectralField& u) {
    const int N = u.n_max();
    Eigen::VectorXd a(2 * N + 1);
    for (int n = -N; n <= N; ++n) a(n + N) = std::abs(u[n]);
    return a;
}

}  // namespace

double dyadic_sequence_norm(const Eigen::VectorXd& a, double s, double p, double q) {
    const int N = static_cast<int>(a.size() - 1) / 2;
    const int J = DyadicPartition::block_of(N) + 1;
    std::vector<double> block(J, 0.0);
    for (int n = -N; n <= N; ++n) {
        const double x = std::pow(japanese(double(n)), s) * a(n + N);
        auto& b = block[DyadicPartition::block_of(n)];
        b = lp_accumulate(b, x, p);
    }
    double acc = 0;
    for (double b : block) acc = lp_accumulate(acc, lp_finish(b, p), q);
    return lp_finish(acc, q);
}

double weighted_sequence_norm(const Eigen::VectorXd& a, double s, double p) {
    const int N = static_cast<int>(a.size() - 1) / 2;
    double acc = 0;
    for (int n = -N; n <= N; ++n) acc = lp_accumulate(acc, std::pow(japanese(double(n)), s) * a(n + N), p);
    return lp_finish(acc, p);
}

double besov_norm(const SpectralField& u, const NormSpec& spec) {
    if (spec.b) throw std::invalid_argument("besov_norm: b must be absent");
    return dyadic_sequence_norm(magnitudes(u), spec.s, spec.p, spec.q);
}

double sobolev_fl_norm(const SpectralField& u, const NormSpec& spec) {
    if (spec.b) throw std::invalid_argument("sobolev_fl_norm: b must be absent");
    return weighted_sequence_norm(magnitudes(u), spec.s, spec.p);
}

Eigen::VectorXd modulation_profile(const SpaceTimeField& u, double b, double q) {
    const auto tau = u.tau_view();
    const int rows = static_cast<int>(tau.rows());
    const int K = static_cast<int>(tau.cols());
    const double dtau = u.tau_spacing();
    std::vector<double> weight(K);
    for (int c = 0; c < K; ++c) weight[c] = std::pow(japanese(u.modulation(c)), b);
    Eigen::VectorXd out(rows);
    for (int r = 0; r < rows; ++r) {
        double acc = 0;
        for (int c = 0; c < K; ++c) acc = lp_accumulate(acc, weight[c] * std::abs(tau(r, c)), q);
        out(r) = std::isinf(q) ? acc : std::pow(acc * dtau, 1.0 / q);
    }
    return out;
}

double xsb_norm(const SpaceTimeField& u, const NormSpec& spec) {
    if (!spec.b) throw std::invalid_argument("xsb_norm: b required");
    return weighted_sequence_norm(modulation_profile(u, *spec.b, 2), spec.s, 2);
}

double xsbpq_norm(const SpaceTimeField& u, const NormSpec& spec) {
    if (!spec.b) throw std::invalid_argument("xsbpq_norm: b required");
    return dyadic_sequence_norm(modulation_profile(u, *spec.b, spec.q), spec.s, spec.p, kInfinity);
}

SpaceTimeField restricted_field(const SpaceTimeField& u, const NormSpec& spec) {
    if (!spec.T) throw std::invalid_argument("restricted_norm: restriction interval required");
    if (!spec.b) throw std::invalid_argument("restricted_norm: b required");
    const double T = *spec.T;
    const bool smooth = *spec.b >= 0.5;
    const double lo = smooth ? -T : 0.0;
    const double hi = smooth ? 2 * T : T;
    const double dt = u.dt();
    const double mid = 0.5 * (lo + hi);
    const double need_lo = std::min(u.t0(), mid - 2 * (hi - lo));
    const double need_hi = std::max(u.time(u.samples()), mid + 2 * (hi - lo));
    const int before = static_cast<int>(std::ceil((u.t0() - need_lo) / dt - 1e-9));
    const double t0 = u.t0() - before * dt;
    int samples = static_cast<int>(std::ceil((need_hi - t0) / dt - 1e-9));
    samples += samples % 2;
    auto padded = embed_in_window(u, t0, samples);
    const double slack = 1e-9 * dt;
    return multiply_in_time(std::move(padded), [&](double t) {
        if (smooth) return time_cutoff(t, T);
        return (t >= -slack && t <= T + slack) ? 1.0 : 0.0;
    });
}

RestrictedNorm restricted_norm(const SpaceTimeField& u, const NormSpec& spec) {
    if (!spec.temporal()) throw std::invalid_argument("restricted_norm: space-time norm required");
    const auto cut = restricted_field(u, spec);
    NormSpec plain = spec;
    plain.T.reset();
    const double value = spec.kind == NormKind::Xsb ? xsb_norm(cut, plain) : xsbpq_norm(cut, plain);
    return {value, *spec.b >= 0.5};
}

double norm(const SpectralField& u, const NormSpec& spec) {
    switch (spec.kind) {
        case NormKind::Besov: return besov_norm(u, spec);
        case NormKind::FourierLebesgue: return sobolev_fl_norm(u, spec);
        default: throw std::invalid_argument("norm: space-time norm requested for a spatial field");
    }
}

double norm(const SpaceTimeField& u, const NormSpec& spec) {
    if (!spec.temporal()) throw std::invalid_argument("norm: spatial norm requested for a space-time field");
    if (spec.T) return restricted_norm(u, spec).value;
    return spec.kind == NormKind::Xsb ? xsb_norm(u, spec) : xsbpq_norm(u, spec);
}

double fl_embedding_constant(double eps, double p, int n_max) {
    const int J = DyadicPartition::block_of(n_max) + 1;
    double acc = 0;
    for (int j = 0; j < J; ++j) {
        const double smallest = j == 0 ? 1.0 : std::ldexp(1.0, j - 1) + 2.0;
        acc = lp_accumulate(acc, std::pow(smallest, -eps), p);
    }
    return lp_finish(acc, p);
}

double hoelder_embedding_constant(double delta, double p, int n_max) {
    const DyadicPartition partition(n_max);
    // Dual exponent of p/2 on each block.
    const double r = p == 2 ? kInfinity : (std::isinf(p) ? 1.0 : p / (p - 2));
    double total = 0;
    for (int j = 0; j < partition.size(); ++j) {
        double acc = 0;
        for (int n : partition.block(j)) acc = lp_accumulate(acc, std::pow(japanese(double(n)), -4 * delta), r);
        total += lp_finish(acc, r);
    }
    return std::sqrt(total);
}

}  // namespace skdv
